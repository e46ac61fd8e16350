#pragma once

// Compares the library against the frozen brute-force values for the
// four-node path fixture. Shared by the unit tests and the acceptance binary.

#include <filesystem>
#include <string>
#include <vector>

namespace exes::golden {

constexpr double kTolerance = 1e-9;

struct SectionResult {
  std::string section;
  std::size_t checks = 0;
  std::vector<std::string> failures;
};

std::vector<SectionResult> check_t4(const std::filesystem::path& golden_json);

}  // namespace exes::golden
