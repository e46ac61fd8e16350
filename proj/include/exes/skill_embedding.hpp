#pragma once

// Count-based skill embedding (PPMI + truncated SVD over per-node skill
// co-occurrence). Provides the skill similarity oracle used to pick
// candidate skills and query augmentations.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exes/corpus.hpp"

namespace exes {

class SkillEmbedding {
 public:
  SkillEmbedding() = default;
  // `values` is row-major, one row of `dimension` entries per token.
  SkillEmbedding(std::vector<std::string> tokens, std::size_t dimension,
                 std::vector<double> values);

  std::size_t dimension() const { return dimension_; }
  std::size_t vocabulary_size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::span<const double> vector_of(SkillId s) const {
    return {values_.data() + index(s) * dimension_, dimension_};
  }
  bool is_zero(SkillId s) const;
  // Cosine similarity; 0 when either vector is zero.
  double cosine(SkillId a, SkillId b) const;
  // Cosine between an arbitrary vector and a skill vector.
  double cosine(std::span<const double> v, SkillId b) const;
  // Mean of the target vectors.
  std::vector<double> centroid(std::span<const SkillId> targets) const;

  bool operator==(const SkillEmbedding&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::size_t dimension_ = 0;
  std::vector<double> values_;
};

// Symmetric skill-skill co-occurrence counts (zero diagonal), row-major.
std::vector<double> cooccurrence_counts(const CollaborationNetwork& net);
// Positive PMI of a symmetric count matrix, row-major.
std::vector<double> ppmi(const std::vector<double>& counts, std::size_t n);

// Throws DimensionTooLarge when dimension > |S| or dimension == 0.
SkillEmbedding fit_embedding(const CollaborationNetwork& net, std::size_t dimension);
std::size_t default_embedding_dimension(const CollaborationNetwork& net);

struct SimilarSkill {
  SkillId skill{};
  double similarity = 0.0;
};

// Vocabulary minus `exclude`, ordered by cosine to the centroid of `targets`
// (descending; zero vectors last; ties by token). Throws EmptyVocabulary, and
// InvalidArgument when targets is empty.
std::vector<SimilarSkill> rank_similar(const SkillEmbedding& emb, std::span<const SkillId> targets,
                                       std::span<const SkillId> exclude);
std::vector<SkillId> top_similar(const SkillEmbedding& emb, std::span<const SkillId> targets,
                                 std::span<const SkillId> exclude, std::size_t t);

// TSV cache: `skill<TAB>v1,v2,...`.
void save_embedding(const SkillEmbedding& emb, const std::filesystem::path& path);
// Rows are matched to the network's skill universe by token. Throws
// ParseError when the file does not cover the universe exactly.
SkillEmbedding load_embedding(const CollaborationNetwork& net, const std::filesystem::path& path);

}  // namespace exes
