#include "exes/eval_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "exes/error.hpp"
#include "exes/link_predictor.hpp"
#include "exes/skill_embedding.hpp"

namespace exes {

std::vector<Feature> factual_universe(const StatusProbe& probe, FeatureScope scope, std::size_t d,
                                      FeatureKinds kinds) {
  const CollaborationNetwork& net = probe.network();
  std::vector<Feature> out;
  std::vector<NodeId> nodes;
  std::vector<EdgeKey> edges;
  if (scope == FeatureScope::kFull) {
    for (std::size_t i = 0; i < net.num_nodes(); ++i) nodes.push_back(node_id(i));
    edges = net.edges();
  } else {
    const NetworkView view(net);
    nodes = neighborhood(view, probe.subject(), d);
    edges = induced_edges(view, nodes);
  }
  if (kinds.skills) {
    for (NodeId u : nodes) {
      for (SkillId s : net.skills_of(u)) out.push_back(Feature::node_skill(u, s));
    }
  }
  if (kinds.edges) {
    for (const EdgeKey& e : edges) out.push_back(Feature::edge(e));
  }
  if (kinds.keywords) {
    for (SkillId s : probe.query().keywords) out.push_back(Feature::keyword(s));
  }
  return out;
}

FactualExplanation exhaustive_factual(StatusProbe& probe, FeatureScope scope, ValueFunction vf,
                                      const ShapleyOptions& options, FeatureKinds kinds,
                                      std::size_t d) {
  const std::vector<Feature> features = factual_universe(probe, scope, d, kinds);
  return shapley_values(probe, features, vf, options);
}

std::string_view baseline_variant_name(BaselineVariant v) {
  switch (v) {
    case BaselineVariant::kFull: return "exhaustive";
    case BaselineVariant::kExhaustiveNeighborhood: return "exhaustive-neighborhood";
    case BaselineVariant::kExhaustiveSkills: return "exhaustive-skills";
  }
  return "unknown";
}

std::vector<Perturbation> counterfactual_universe(StatusProbe& probe, CounterfactualKind kind,
                                                  BaselineVariant variant,
                                                  const CounterfactualContext& ctx, std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const Query& q = probe.query();
  const std::size_t d = ctx.radius.value_or(default_radius(kind));
  const NetworkView view(net);

  std::vector<NodeId> all_nodes(net.num_nodes());
  for (std::size_t i = 0; i < all_nodes.size(); ++i) all_nodes[i] = node_id(i);
  std::vector<SkillId> all_skills(net.num_skills());
  for (std::size_t i = 0; i < all_skills.size(); ++i) all_skills[i] = skill_id(i);

  auto pruned_skills = [&]() {
    if (!ctx.embedding) throw Error(ErrorCode::kInvalidArgument, "skill embedding required");
    return top_similar(*ctx.embedding, q.keywords, {}, t);
  };

  std::vector<Perturbation> out;
  switch (kind) {
    case CounterfactualKind::kSkillAdd:
    case CounterfactualKind::kSkillRemove: {
      const bool add = kind == CounterfactualKind::kSkillAdd;
      std::vector<NodeId> nodes = all_nodes;
      std::vector<SkillId> skills = all_skills;
      if (variant == BaselineVariant::kExhaustiveNeighborhood) {
        skills = pruned_skills();
        std::sort(skills.begin(), skills.end());
      } else if (variant == BaselineVariant::kExhaustiveSkills) {
        nodes = neighborhood(view, probe.subject(), d);
      }
      for (NodeId u : nodes) {
        for (SkillId s : skills) {
          if (net.has_skill(u, s) == add) continue;
          out.push_back(add ? Perturbation::add_skill(u, s) : Perturbation::remove_skill(u, s));
        }
      }
      break;
    }
    case CounterfactualKind::kQueryPromote:
    case CounterfactualKind::kQueryDemote:
      for (SkillId s : all_skills) {
        if (!q.contains(s)) out.push_back(Perturbation::add_keyword(s));
      }
      break;
    case CounterfactualKind::kLinkAdd: {
      std::set<NodeId> region;
      if (variant == BaselineVariant::kExhaustiveNeighborhood) {
        for (NodeId u : neighborhood(view, probe.subject(), d)) region.insert(u);
      }
      for (std::size_t a = 0; a < net.num_nodes(); ++a) {
        for (std::size_t b = a + 1; b < net.num_nodes(); ++b) {
          if (net.has_edge(node_id(a), node_id(b))) continue;
          if (!region.empty() && !region.contains(node_id(a)) && !region.contains(node_id(b))) {
            continue;
          }
          out.push_back(Perturbation::add_edge(EdgeKey{node_id(a), node_id(b)}));
        }
      }
      break;
    }
    case CounterfactualKind::kLinkRemove: {
      std::vector<EdgeKey> edges = net.edges();
      if (variant == BaselineVariant::kExhaustiveNeighborhood) {
        edges = induced_edges(view, neighborhood(view, probe.subject(), d));
      }
      for (const EdgeKey& e : edges) out.push_back(Perturbation::remove_edge(e));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ExhaustiveResult exhaustive_minimal(StatusProbe& probe, std::span<const Perturbation> universe,
                                    std::size_t gamma, Enumeration enumeration) {
  ExhaustiveResult result;
  const std::uint64_t calls_before = probe.engine_calls();
  const bool initial = probe.initial().status;
  const std::size_t m = universe.size();
  const std::size_t limit = std::min(gamma, m);
  std::size_t size = 1;
  try {
    for (; size <= limit; ++size) {
      std::vector<std::size_t> idx(size);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      while (true) {
        PerturbationSet subset;
        subset.reserve(size);
        for (std::size_t i : idx) subset.push_back(universe[i]);
        const Outcome out = probe.evaluate(to_overlay(subset));
        if (out.status != initial && !result.minimal_size) {
          result.explanations.push_back({std::move(subset), out.rank, out.status});
        }
        std::size_t pos = size;
        while (pos > 0 && idx[pos - 1] == m - size + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
      }
      if (!result.explanations.empty() && !result.minimal_size) {
        result.minimal_size = size;
        if (enumeration == Enumeration::kStopAtMinimal) break;
      }
    }
    if (!result.minimal_size) result.searched_to_gamma = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTimeout) throw;
    result.complete = false;
    if (!result.explanations.empty() && !result.minimal_size) result.minimal_size = size;
  }
  result.engine_calls = probe.engine_calls() - calls_before;
  return result;
}

ExhaustiveResult exhaustive_counterfactual(StatusProbe& probe, CounterfactualKind kind,
                                           std::size_t gamma, BaselineVariant variant,
                                           const CounterfactualContext& ctx, std::size_t t,
                                           Enumeration enumeration) {
  if (is_promotion(kind) == probe.initial().status) {
    throw Error(ErrorCode::kDirectionMismatch,
                std::string(counterfactual_kind_name(kind)) + " does not apply to this subject");
  }
  const std::vector<Perturbation> universe = counterfactual_universe(probe, kind, variant, ctx, t);
  return exhaustive_minimal(probe, universe, gamma, enumeration);
}

double precision_at_k(const FactualExplanation& pruned, const FactualExplanation& exhaustive,
                      std::size_t k) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pruned.attributions.size(); ++i) {
    if (std::abs(pruned.attributions[i]) > 1e-12) order.push_back(i);
  }
  if (order.empty() || k == 0) return 1.0;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(pruned.attributions[a]) > std::abs(pruned.attributions[b]);
  });
  const std::size_t top = std::min(k, order.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < top; ++i) {
    if (std::abs(exhaustive.phi(pruned.features[order[i]])) > 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(top);
}

CounterfactualPrecision precision_counterfactual(std::span<const CounterfactualExplanation> pruned,
                                                 std::optional<std::size_t> oracle_minimal_size) {
  if (!oracle_minimal_size) {
    throw Error(ErrorCode::kOracleUnavailable, "oracle minimal size unknown");
  }
  if (pruned.empty()) return {1.0, 1.0};
  const std::size_t m = *oracle_minimal_size;
  std::size_t exact = 0;
  std::size_t near = 0;
  for (const auto& x : pruned) {
    if (x.size() == m) ++exact;
    if (x.size() <= m + 1) ++near;
  }
  const auto n = static_cast<double>(pruned.size());
  return {static_cast<double>(exact) / n, static_cast<double>(near) / n};
}

// ---------------------------------------------------------------------------
// Configuration

void validate_config(const EvalConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (c.n_queries == 0) fail("n_queries must be >= 1");
  if (c.keywords_min == 0 || c.keywords_min > c.keywords_max) {
    fail("need 1 <= keywords_min <= keywords_max");
  }
  if (c.k == 0) fail("k must be >= 1");
  if (!(c.timeout_seconds >= 0.0)) fail("timeout_seconds must be >= 0");
  if (c.params.b == 0 || c.params.gamma == 0 || c.params.e == 0) {
    fail("beam parameters must be >= 1");
  }
  if (!(c.tau >= 0.0)) fail("tau must be >= 0");
  const auto known = protocol_methods();
  for (const auto& m : c.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) fail("unknown method " + m);
  }
}

EvalConfig parse_eval_config(const std::string& json_text) {
  using nlohmann::json;
  EvalConfig c;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_queries") c.n_queries = v.get<std::size_t>();
      else if (key == "keywords_min") c.keywords_min = v.get<std::size_t>();
      else if (key == "keywords_max") c.keywords_max = v.get<std::size_t>();
      else if (key == "k") c.k = v.get<std::uint32_t>();
      else if (key == "timeout_seconds") c.timeout_seconds = v.get<double>();
      else if (key == "probe_budget") c.probe_budget = v.get<std::uint64_t>();
      else if (key == "b") c.params.b = v.get<std::size_t>();
      else if (key == "gamma") c.params.gamma = v.get<std::size_t>();
      else if (key == "e") c.params.e = v.get<std::size_t>();
      else if (key == "t") c.params.t = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "experts_per_query") c.experts_per_query = v.get<std::size_t>();
      else if (key == "non_experts_per_query") c.non_experts_per_query = v.get<std::size_t>();
      else if (key == "skill_radius") c.skill_radius = v.get<std::size_t>();
      else if (key == "collaboration_radius") c.collaboration_radius = v.get<std::size_t>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "samples") c.shapley.samples = v.get<std::size_t>();
      else if (key == "exact_threshold") c.shapley.exact_threshold = v.get<std::size_t>();
      else if (key == "methods") c.methods = v.get<std::vector<std::string>>();
      else if (key == "include_timing") c.include_timing = v.get<bool>();
      else if (key == "embedding_dimension") c.embedding_dimension = v.get<std::size_t>();
      else throw Error(ErrorCode::kParseError, "unknown config key " + key);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  validate_config(c);
  return c;
}

// ---------------------------------------------------------------------------
// Protocol

namespace {

struct MethodSpec {
  std::string name;
  bool factual = true;
  // factual
  enum class Facet { kSkills, kQuery, kCollaborations } facet = Facet::kSkills;
  // counterfactual
  CounterfactualKind kind = CounterfactualKind::kSkillAdd;
  std::vector<BaselineVariant> baselines;
};

const std::vector<MethodSpec>& method_specs() {
  using F = MethodSpec::Facet;
  using K = CounterfactualKind;
  using B = BaselineVariant;
  static const std::vector<MethodSpec> specs{
      {"factual-skills", true, F::kSkills, {}, {B::kFull}},
      {"factual-query", true, F::kQuery, {}, {B::kFull}},
      {"factual-collaborations", true, F::kCollaborations, {}, {B::kFull}},
      {"cf-skill-add", false, {}, K::kSkillAdd, {B::kExhaustiveNeighborhood, B::kExhaustiveSkills}},
      {"cf-skill-rm", false, {}, K::kSkillRemove, {B::kExhaustiveNeighborhood, B::kExhaustiveSkills}},
      {"cf-query-promote", false, {}, K::kQueryPromote, {B::kFull}},
      {"cf-query-demote", false, {}, K::kQueryDemote, {B::kFull}},
      {"cf-link-add", false, {}, K::kLinkAdd, {B::kExhaustiveNeighborhood}},
      {"cf-link-rm", false, {}, K::kLinkRemove, {B::kExhaustiveNeighborhood}},
  };
  return specs;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Subject {
  Query q;
  NodeId node{};
  bool expert = false;
};

struct RunRecord {
  bool completed = false;
  double latency_ms = 0.0;
  std::uint64_t probes = 0;
};

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<Subject> sample_subjects(const ProbeInterface& engine, const CollaborationNetwork& net,
                                     const EvalConfig& config, std::mt19937_64& rng,
                                     std::vector<std::vector<std::string>>& queries) {
  const std::size_t n = net.num_nodes();
  const std::size_t k = config.k;
  if (n < 2 * k) {
    throw Error(ErrorCode::kInsufficientPopulation,
                "need at least 2k = " + std::to_string(2 * k) + " nodes, have " + std::to_string(n));
  }
  if (config.experts_per_query > k || config.non_experts_per_query > k) {
    throw Error(ErrorCode::kInsufficientPopulation, "more subjects per query than k");
  }
  if (config.keywords_min > net.num_skills()) {
    throw Error(ErrorCode::kInsufficientPopulation, "fewer skills than keywords_min");
  }
  std::vector<Subject> out;
  std::vector<SkillId> universe(net.num_skills());
  for (std::size_t i = 0; i < universe.size(); ++i) universe[i] = skill_id(i);
  const std::size_t kw_max = std::min(config.keywords_max, net.num_skills());
  std::uniform_int_distribution<std::size_t> kw_count(config.keywords_min, kw_max);
  for (std::size_t qi = 0; qi < config.n_queries; ++qi) {
    const std::size_t count = kw_count(rng);
    std::vector<SkillId> pool = universe;
    std::shuffle(pool.begin(), pool.end(), rng);
    Query q;
    q.k = config.k;
    q.keywords.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(q.keywords.begin(), q.keywords.end());
    std::vector<std::string> tokens;
    for (SkillId s : q.keywords) tokens.push_back(net.skill_token(s));
    queries.push_back(std::move(tokens));

    const RankedList ranking = engine.rank(NetworkView(net), q);
    std::vector<std::size_t> top(k);
    std::iota(top.begin(), top.end(), std::size_t{0});
    std::vector<std::size_t> next(k);
    std::iota(next.begin(), next.end(), k);
    std::shuffle(top.begin(), top.end(), rng);
    std::shuffle(next.begin(), next.end(), rng);
    for (std::size_t i = 0; i < config.experts_per_query; ++i) {
      out.push_back({q, ranking.entries()[top[i]].node, true});
    }
    for (std::size_t i = 0; i < config.non_experts_per_query; ++i) {
      out.push_back({q, ranking.entries()[next[i]].node, false});
    }
  }
  return out;
}

class ProtocolRunner {
 public:
  ProtocolRunner(const ProbeInterface& engine, const CollaborationNetwork& net,
                 const EvalConfig& config)
      : engine_(engine),
        net_(net),
        config_(config),
        embedding_(fit_embedding(net, config.embedding_dimension
                                          ? config.embedding_dimension
                                          : default_embedding_dimension(net))),
        ctx_{&embedding_, &predictor_, std::nullopt} {}

  std::vector<MethodRow> run(const MethodSpec& spec, const std::vector<Subject>& subjects) {
    return spec.factual ? run_factual(spec, subjects) : run_counterfactual(spec, subjects);
  }

 private:
  StatusProbe make_probe(const Subject& s) const {
    StatusProbe probe(engine_, net_, s.q, s.node, Mode::search());
    probe.set_deadline(Deadline(config_.timeout_seconds,
                                config_.probe_budget ? probe.engine_calls() + config_.probe_budget
                                                     : 0));
    return probe;
  }

  template <typename Fn>
  RunRecord timed(StatusProbe& probe, Fn&& fn) {
    RunRecord r;
    const auto start = Clock::now();
    const std::uint64_t before = probe.engine_calls();
    try {
      fn();
      r.completed = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTimeout) throw;
    }
    r.latency_ms = elapsed_ms(start);
    r.probes = probe.engine_calls() - before;
    return r;
  }

  FactualExplanation exes_factual(const MethodSpec& spec, StatusProbe& probe) const {
    switch (spec.facet) {
      case MethodSpec::Facet::kSkills:
        return explain_skills(probe, config_.skill_radius, ValueFunction::kStatus, config_.shapley);
      case MethodSpec::Facet::kQuery:
        return explain_query(probe, ValueFunction::kStatus, config_.shapley);
      case MethodSpec::Facet::kCollaborations:
        return explain_collaborations(probe, config_.collaboration_radius, config_.tau,
                                      ValueFunction::kStatus, config_.shapley);
    }
    return {};
  }

  FactualExplanation baseline_factual(const MethodSpec& spec, StatusProbe& probe) const {
    FeatureKinds kinds{false, false, false};
    if (spec.facet == MethodSpec::Facet::kSkills) kinds.skills = true;
    if (spec.facet == MethodSpec::Facet::kQuery) kinds.keywords = true;
    if (spec.facet == MethodSpec::Facet::kCollaborations) kinds.edges = true;
    return exhaustive_factual(probe, FeatureScope::kFull, ValueFunction::kStatus, config_.shapley,
                              kinds);
  }

  std::vector<MethodRow> run_factual(const MethodSpec& spec, const std::vector<Subject>& subjects) {
    MethodRow row;
    row.method = spec.name;
    row.baseline = std::string(baseline_variant_name(BaselineVariant::kFull));
    std::vector<double> lat_x, lat_b, probes_x, probes_b, size_x, size_b, p1, p5;
    for (const Subject& s : subjects) {
      ++row.subjects;
      FactualExplanation x;
      FactualExplanation base;
      StatusProbe px = make_probe(s);
      const RunRecord rx = timed(px, [&] { x = exes_factual(spec, px); });
      StatusProbe pb = make_probe(s);
      const RunRecord rb = timed(pb, [&] { base = baseline_factual(spec, pb); });
      lat_x.push_back(rx.latency_ms);
      lat_b.push_back(rb.latency_ms);
      probes_x.push_back(static_cast<double>(rx.probes));
      probes_b.push_back(static_cast<double>(rb.probes));
      if (rx.completed) {
        ++row.exes_completed;
        size_x.push_back(static_cast<double>(x.nonzero_count()));
      }
      if (rb.completed) {
        ++row.baseline_completed;
        size_b.push_back(static_cast<double>(base.nonzero_count()));
      }
      if (rx.completed && rb.completed) {
        p1.push_back(precision_at_k(x, base, 1));
        p5.push_back(precision_at_k(x, base, 5));
      }
    }
    row.exes_latency_ms = mean(lat_x);
    row.baseline_latency_ms = mean(lat_b);
    row.exes_probes = mean(probes_x);
    row.baseline_probes = mean(probes_b);
    row.exes_size = mean(size_x);
    if (!size_b.empty()) row.baseline_size = mean(size_b);
    row.exes_count = row.exes_completed;
    row.baseline_count = row.baseline_completed;
    if (!p1.empty()) {
      row.precision_at_1 = mean(p1);
      row.precision_at_5 = mean(p5);
    }
    return {row};
  }

  std::vector<MethodRow> run_counterfactual(const MethodSpec& spec,
                                            const std::vector<Subject>& subjects) {
    const bool promote = is_promotion(spec.kind);
    struct ExesRun {
      RunRecord record;
      std::vector<CounterfactualExplanation> explanations;
    };
    std::vector<const Subject*> eligible;
    for (const Subject& s : subjects) {
      if (s.expert != promote) eligible.push_back(&s);
    }
    std::vector<ExesRun> exes_runs;
    for (const Subject* s : eligible) {
      ExesRun run;
      StatusProbe probe = make_probe(*s);
      run.record = timed(probe, [&] {
        try {
          run.explanations = explain_counterfactual(probe, spec.kind, config_.params, ctx_).explanations;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNoCandidates) throw;
        }
      });
      exes_runs.push_back(std::move(run));
    }

    std::vector<MethodRow> rows;
    for (BaselineVariant variant : spec.baselines) {
      MethodRow row;
      row.method = spec.name;
      row.baseline = std::string(baseline_variant_name(variant));
      std::vector<double> lat_x, lat_b, probes_x, probes_b, size_x, size_b;
      std::size_t scored = 0;
      std::size_t exact = 0;
      std::size_t near = 0;
      for (std::size_t i = 0; i < eligible.size(); ++i) {
        const ExesRun& xr = exes_runs[i];
        ++row.subjects;
        lat_x.push_back(xr.record.latency_ms);
        probes_x.push_back(static_cast<double>(xr.record.probes));
        if (xr.record.completed) {
          ++row.exes_completed;
          row.exes_count += xr.explanations.size();
          for (const auto& x : xr.explanations) size_x.push_back(static_cast<double>(x.size()));
        }
        StatusProbe probe = make_probe(*eligible[i]);
        ExhaustiveResult oracle;
        const RunRecord rb = timed(probe, [&] {
          oracle = exhaustive_counterfactual(probe, spec.kind, config_.params.gamma, variant, ctx_,
                                             config_.params.t);
        });
        lat_b.push_back(rb.latency_ms);
        probes_b.push_back(static_cast<double>(oracle.engine_calls));
        if (oracle.complete) ++row.baseline_completed;
        row.baseline_count += oracle.explanations.size();
        if (oracle.minimal_size) {
          size_b.push_back(static_cast<double>(*oracle.minimal_size));
          if (xr.record.completed) {
            for (const auto& x : xr.explanations) {
              ++scored;
              if (x.size() == *oracle.minimal_size) ++exact;
              if (x.size() <= *oracle.minimal_size + 1) ++near;
            }
          }
        }
      }
      row.exes_latency_ms = mean(lat_x);
      row.baseline_latency_ms = mean(lat_b);
      row.exes_probes = mean(probes_x);
      row.baseline_probes = mean(probes_b);
      row.exes_size = mean(size_x);
      if (!size_b.empty()) row.baseline_size = mean(size_b);
      if (scored > 0) {
        row.precision = static_cast<double>(exact) / static_cast<double>(scored);
        row.precision_star = static_cast<double>(near) / static_cast<double>(scored);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  const ProbeInterface& engine_;
  const CollaborationNetwork& net_;
  const EvalConfig& config_;
  SkillEmbedding embedding_;
  AdamicAdarPredictor predictor_;
  CounterfactualContext ctx_;
};

}  // namespace

std::vector<std::string> protocol_methods() {
  std::vector<std::string> out;
  for (const auto& s : method_specs()) out.push_back(s.name);
  return out;
}

const MethodRow* EvalReport::find(std::string_view method, std::string_view baseline) const {
  for (const auto& r : rows) {
    if (r.method == method && (baseline.empty() || r.baseline == baseline)) return &r;
  }
  return nullptr;
}

EvalReport run_protocol(const ProbeInterface& engine, const CollaborationNetwork& net,
                        const EvalConfig& config, const std::string& dataset) {
  validate_config(config);
  EvalReport report;
  report.dataset = dataset;
  report.n_nodes = net.num_nodes();
  report.include_timing = config.include_timing;
  std::mt19937_64 rng(config.seed);
  const std::vector<Subject> subjects = sample_subjects(engine, net, config, rng, report.queries);
  ProtocolRunner runner(engine, net, config);
  for (const MethodSpec& spec : method_specs()) {
    if (!config.methods.empty() &&
        std::find(config.methods.begin(), config.methods.end(), spec.name) == config.methods.end()) {
      continue;
    }
    for (auto& row : runner.run(spec, subjects)) report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string fixed(double x) {
  if (x == 0.0) x = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string cell(const std::optional<double>& x) { return x ? fixed(*x) : "n/a"; }

nlohmann::json jcell(const std::optional<double>& x) {
  if (!x) return "n/a";
  return std::round(*x * 1e6) / 1e6 + 0.0;
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "method,dataset,baseline,subjects";
  if (report.include_timing) out << ",latency_exes_ms,latency_baseline_ms";
  out << ",probes_exes,probes_baseline,size_exes,size_baseline,count_exes,count_baseline"
         ",completed_exes,completed_baseline,precision_at_1,precision_at_5,precision,"
         "precision_star\n";
  for (const MethodRow& r : report.rows) {
    out << r.method << ',' << report.dataset << ',' << r.baseline << ',' << r.subjects;
    if (report.include_timing) {
      out << ',' << fixed(r.exes_latency_ms) << ',' << fixed(r.baseline_latency_ms);
    }
    out << ',' << fixed(r.exes_probes) << ',' << fixed(r.baseline_probes) << ','
        << fixed(r.exes_size) << ',' << cell(r.baseline_size) << ',' << r.exes_count << ','
        << r.baseline_count << ',' << r.exes_completed << ',' << r.baseline_completed << ','
        << cell(r.precision_at_1) << ',' << cell(r.precision_at_5) << ',' << cell(r.precision)
        << ',' << cell(r.precision_star) << '\n';
  }
}

void write_report_json(const EvalReport& report, std::ostream& out) {
  using nlohmann::json;
  json rows = json::array();
  for (const MethodRow& r : report.rows) {
    json row{
        {"method", r.method},
        {"baseline", r.baseline},
        {"subjects", r.subjects},
        {"probes_exes", jcell(r.exes_probes)},
        {"probes_baseline", jcell(r.baseline_probes)},
        {"size_exes", jcell(r.exes_size)},
        {"size_baseline", jcell(r.baseline_size)},
        {"count_exes", r.exes_count},
        {"count_baseline", r.baseline_count},
        {"completed_exes", r.exes_completed},
        {"completed_baseline", r.baseline_completed},
        {"precision_at_1", jcell(r.precision_at_1)},
        {"precision_at_5", jcell(r.precision_at_5)},
        {"precision", jcell(r.precision)},
        {"precision_star", jcell(r.precision_star)},
    };
    if (report.include_timing) {
      row["latency_exes_ms"] = jcell(r.exes_latency_ms);
      row["latency_baseline_ms"] = jcell(r.baseline_latency_ms);
    }
    rows.push_back(std::move(row));
  }
  const json doc{
      {"dataset", report.dataset},
      {"n_nodes", report.n_nodes},
      {"queries", report.queries},
      {"rows", rows},
  };
  out << doc.dump(2) << '\n';
}

}  // namespace exes
