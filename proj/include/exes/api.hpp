#pragma once

// Request handlers shared by the HTTP service and the CLI. Each takes the
// request body as JSON and returns the response document, throwing Error on
// invalid input.

#include <functional>
#include <string>
#include <vector>

#include "exes/corpus.hpp"
#include "exes/error.hpp"
#include "exes/link_predictor.hpp"
#include "exes/search_engine.hpp"
#include "exes/serialize.hpp"
#include "exes/skill_embedding.hpp"

namespace exes {

class UnknownKeyword : public Error {
 public:
  UnknownKeyword(std::string token, std::vector<std::string> nearest);
  const std::string& token() const { return token_; }
  const std::vector<std::string>& nearest() const { return nearest_; }

 private:
  std::string token_;
  std::vector<std::string> nearest_;
};

struct ApiContext {
  const CollaborationNetwork* net = nullptr;
  const ProbeInterface* engine = nullptr;
  const LinkPredictor* link_predictor = nullptr;
  // Lazily fitted by the owner.
  std::function<const SkillEmbedding&()> embedding;
};

// "keywords" (array or comma-separated string) or its alias "q".
std::vector<SkillId> request_keywords(const CollaborationNetwork& net, const Json& body);

Json api_rank(const ApiContext& ctx, const Json& body);
Json api_team(const ApiContext& ctx, const Json& body);
Json api_explain_factual(const ApiContext& ctx, const Json& body);
Json api_explain_counterfactual(const ApiContext& ctx, const Json& body);
Json api_similar(const ApiContext& ctx, const Json& body);
Json api_neighborhood(const ApiContext& ctx, const Json& body);

// True when the request asks for a baseline-scale computation.
bool is_long_running(const Json& body);

}  // namespace exes
