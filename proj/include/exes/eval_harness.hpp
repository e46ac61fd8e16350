#pragma once

// Exhaustive baselines, precision metrics and the sampling protocol that
// compares pruned explanations against them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "exes/corpus.hpp"
#include "exes/counterfactual.hpp"
#include "exes/factual.hpp"
#include "exes/search_engine.hpp"

namespace exes {

enum class FeatureScope { kFull, kNeighborhood };

struct FeatureKinds {
  bool skills = true;
  bool edges = true;
  bool keywords = true;
};

// Every feature of the selected kinds: all node-skill pairs and edges of the
// network (kFull) or of the radius-d subgraph (kNeighborhood), plus all query
// keywords.
std::vector<Feature> factual_universe(const StatusProbe& probe, FeatureScope scope, std::size_t d,
                                      FeatureKinds kinds = {});

// Shapley over the whole universe. Timeout propagates.
FactualExplanation exhaustive_factual(StatusProbe& probe, FeatureScope scope, ValueFunction vf,
                                      const ShapleyOptions& options = {}, FeatureKinds kinds = {},
                                      std::size_t d = 0);

enum class BaselineVariant { kFull, kExhaustiveNeighborhood, kExhaustiveSkills };

std::string_view baseline_variant_name(BaselineVariant v);

// Atom universe enumerated by a baseline for one counterfactual kind.
//   full:                    every applicable atom of the kind
//   exhaustive_neighborhood: all nodes × the pruned skill list (skill kinds);
//                            atoms touching the radius-d region (link kinds)
//   exhaustive_skills:       neighborhood nodes × every skill (skill kinds)
// Variants without a distinct meaning for a kind fall back to full.
std::vector<Perturbation> counterfactual_universe(StatusProbe& probe, CounterfactualKind kind,
                                                  BaselineVariant variant,
                                                  const CounterfactualContext& ctx, std::size_t t);

struct ExhaustiveResult {
  // Known once a flip is found (smaller sizes were fully enumerated) or the
  // enumeration up to γ finished without one.
  std::optional<std::size_t> minimal_size;
  std::vector<CounterfactualExplanation> explanations;  // all flips of minimal size found
  bool complete = true;                                 // false on timeout
  bool searched_to_gamma = false;                       // no flip within γ
  std::uint64_t engine_calls = 0;
};

// kFull probes every subset up to γ before reporting the minimal flips (the
// baseline's cost model); kStopAtMinimal ends after the first size that
// contains a flip. Both report the same minimal flips when they complete.
enum class Enumeration { kFull, kStopAtMinimal };

// Size-ordered subset enumeration over `universe` up to γ. Timeout is caught
// and reported through `complete`.
ExhaustiveResult exhaustive_minimal(StatusProbe& probe, std::span<const Perturbation> universe,
                                    std::size_t gamma, Enumeration enumeration = Enumeration::kFull);

ExhaustiveResult exhaustive_counterfactual(StatusProbe& probe, CounterfactualKind kind,
                                           std::size_t gamma, BaselineVariant variant,
                                           const CounterfactualContext& ctx, std::size_t t,
                                           Enumeration enumeration = Enumeration::kFull);

// |top-k of pruned by |φ| ∩ nonzero features of exhaustive| / min(k, |pruned features|).
// 1.0 when pruned has no features.
double precision_at_k(const FactualExplanation& pruned, const FactualExplanation& exhaustive,
                      std::size_t k);

struct CounterfactualPrecision {
  double precision = 0.0;
  double precision_star = 0.0;
};

// Fractions of explanations of size == m and ≤ m + 1. Throws
// OracleUnavailable when m is unknown. An empty list scores (1, 1).
CounterfactualPrecision precision_counterfactual(std::span<const CounterfactualExplanation> pruned,
                                                 std::optional<std::size_t> oracle_minimal_size);

struct EvalConfig {
  std::size_t n_queries = 10;
  std::size_t keywords_min = 3;
  std::size_t keywords_max = 5;
  std::uint32_t k = 10;
  double timeout_seconds = 1000.0;
  std::uint64_t probe_budget = 0;  // per explanation, 0 = unlimited
  BeamParams params;
  std::uint64_t seed = 1;
  std::size_t experts_per_query = 2;
  std::size_t non_experts_per_query = 2;
  std::size_t skill_radius = 1;
  std::size_t collaboration_radius = 2;
  double tau = 0.1;
  ShapleyOptions shapley;
  // Empty = every method.
  std::vector<std::string> methods;
  bool include_timing = true;
  std::size_t embedding_dimension = 0;  // 0 = default
};

// Throws InvalidArgument on inconsistent values.
void validate_config(const EvalConfig& config);
// Reads a JSON object with the EvalConfig field names (b, gamma, e, t for
// the beam parameters). Throws ParseError.
EvalConfig parse_eval_config(const std::string& json_text);

struct MethodRow {
  std::string method;
  std::string baseline;
  std::size_t subjects = 0;
  std::size_t exes_completed = 0;
  std::size_t baseline_completed = 0;
  double exes_latency_ms = 0.0;
  double baseline_latency_ms = 0.0;
  double exes_probes = 0.0;
  double baseline_probes = 0.0;
  double exes_size = 0.0;
  std::optional<double> baseline_size;
  std::size_t exes_count = 0;
  std::size_t baseline_count = 0;
  std::optional<double> precision_at_1;
  std::optional<double> precision_at_5;
  std::optional<double> precision;
  std::optional<double> precision_star;
};

struct EvalReport {
  std::string dataset;
  std::size_t n_nodes = 0;
  std::vector<std::vector<std::string>> queries;  // sampled keyword tokens
  std::vector<MethodRow> rows;
  bool include_timing = true;

  const MethodRow* find(std::string_view method, std::string_view baseline = {}) const;
};

std::vector<std::string> protocol_methods();

// Samples queries and subjects (experts from the top k, non-experts from
// ranks k+1..2k), runs every selected method and its baselines, aggregates.
// Throws InsufficientPopulation when fewer than 2k nodes exist or a
// query's population cannot supply the requested subjects.
EvalReport run_protocol(const ProbeInterface& engine, const CollaborationNetwork& net,
                        const EvalConfig& config, const std::string& dataset = "synthetic");

void write_report_csv(const EvalReport& report, std::ostream& out);
void write_report_json(const EvalReport& report, std::ostream& out);

}  // namespace exes
