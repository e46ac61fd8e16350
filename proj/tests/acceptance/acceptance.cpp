// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Thresholds and suite sizes are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "exes/corpus.hpp"
#include "exes/counterfactual.hpp"
#include "exes/error.hpp"
#include "exes/eval_harness.hpp"
#include "exes/factual.hpp"
#include "exes/link_predictor.hpp"
#include "exes/search_engine.hpp"
#include "exes/skill_embedding.hpp"
#include "golden_check.hpp"

using namespace exes;

namespace {

constexpr double kEfficiencyTolerance = 1e-9;
constexpr std::size_t kShapleyInstances = 200;
constexpr std::size_t kFactualInstancesPerFacet = 30;
constexpr double kPrecisionStarThreshold = 0.9;
constexpr double kSkillFactualSpeedup = 5.0;
constexpr double kSpeedupSuiteSeconds = 600.0;
constexpr std::uint64_t kOracleProbeBudget = 150000;

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<CounterfactualKind> kAllKinds = {
    CounterfactualKind::kSkillAdd, CounterfactualKind::kSkillRemove, CounterfactualKind::kQueryPromote,
    CounterfactualKind::kQueryDemote, CounterfactualKind::kLinkAdd, CounterfactualKind::kLinkRemove};

// Small random network; retries parameter draws the generator rejects.
CollaborationNetwork small_network(std::mt19937_64& rng, std::size_t n_min, std::size_t n_max,
                                   std::size_t spn_max) {
  while (true) {
    SyntheticParams p;
    p.n_nodes = std::uniform_int_distribution<std::size_t>(n_min, n_max)(rng);
    p.n_skills = std::uniform_int_distribution<std::size_t>(3, 8)(rng);
    p.avg_degree = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(4, p.n_nodes - 1))(rng);
    p.skills_per_node = std::uniform_int_distribution<std::size_t>(1, std::min(spn_max, p.n_skills))(rng);
    p.seed = rng();
    try {
      return generate_synthetic(p);
    } catch (const Error&) {
    }
  }
}

Query random_query(const CollaborationNetwork& net, std::mt19937_64& rng, std::size_t kw_min,
                   std::size_t kw_max, std::uint32_t k) {
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < net.num_skills(); ++i) vocab.push_back(net.skill_token(skill_id(i)));
  std::shuffle(vocab.begin(), vocab.end(), rng);
  const std::size_t m = std::min(vocab.size(), std::uniform_int_distribution<std::size_t>(kw_min, kw_max)(rng));
  vocab.resize(m);
  return make_query(net, vocab, k);
}

NodeId random_node(const CollaborationNetwork& net, std::mt19937_64& rng) {
  return node_id(std::uniform_int_distribution<std::size_t>(0, net.num_nodes() - 1)(rng));
}

// ---------------------------------------------------------------------------

Verdict shapley_axioms() {
  std::mt19937_64 rng(20240501);
  const ReferenceEngine engine;
  double worst = 0.0;
  std::size_t null_checks = 0, symmetry_checks = 0, violations = 0;
  for (std::size_t inst = 0; inst < kShapleyInstances; ++inst) {
    const CollaborationNetwork net = small_network(rng, 3, 20, 3);
    const auto k = std::uniform_int_distribution<std::uint32_t>(1, std::max<std::uint32_t>(1, net.num_nodes() / 2))(rng);
    const Query q = random_query(net, rng, 1, 4, k);
    const NodeId subject = random_node(net, rng);
    const Mode mode = inst % 4 == 3 ? Mode::team(random_node(net, rng)) : Mode::search();
    StatusProbe probe(engine, net, q, subject, mode);

    std::vector<Feature> features = factual_universe(probe, FeatureScope::kFull, 0);
    std::shuffle(features.begin(), features.end(), rng);
    features.resize(std::min<std::size_t>(features.size(), std::uniform_int_distribution<std::size_t>(1, 12)(rng)));
    const ValueFunction vf = inst % 2 ? ValueFunction::kMargin : ValueFunction::kStatus;
    const FactualExplanation x = shapley_values(probe, features, vf);
    if (!x.exact) ++violations;

    double sum = 0.0;
    for (double p : x.attributions) sum += p;
    worst = std::max(worst, std::abs(sum - (x.value_full - x.value_empty)));

    const std::size_t n = features.size();
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<double> v(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      std::vector<bool> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1U;
      v[mask] = coalition_value(probe, features, c, vf);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      bool null_player = true;
      for (std::uint64_t mask = 0; mask < total && null_player; ++mask) {
        if (!(mask & bi) && v[mask | bi] != v[mask]) null_player = false;
      }
      if (null_player) {
        ++null_checks;
        if (x.attributions[i] != 0.0) ++violations;
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        bool symmetric = true;
        for (std::uint64_t mask = 0; mask < total && symmetric; ++mask) {
          if (!(mask & bi) && !(mask & bj) && v[mask | bi] != v[mask | bj]) symmetric = false;
        }
        if (symmetric) {
          ++symmetry_checks;
          if (x.attributions[i] != x.attributions[j]) ++violations;
        }
      }
    }
  }
  return {worst <= kEfficiencyTolerance && violations == 0 && null_checks > 0 && symmetry_checks > 0,
          format("%zu instances, max |sum phi - (v(full) - v(empty))| = %.3g, %zu null-player and %zu "
                 "symmetric-pair checks, %zu violations",
                 kShapleyInstances, worst, null_checks, symmetry_checks, violations)};
}

Verdict factual_oracle_equivalence() {
  std::mt19937_64 rng(777);
  const ReferenceEngine engine;
  double min_p1 = 1.0, min_p5 = 1.0;
  std::size_t runs = 0;
  for (int facet = 0; facet < 3; ++facet) {
    std::size_t done = 0;
    while (done < kFactualInstancesPerFacet) {
      const CollaborationNetwork net = small_network(rng, 3, 6, 2);
      const Query q = random_query(net, rng, 1, 4, std::uniform_int_distribution<std::uint32_t>(1, 3)(rng));
      StatusProbe probe(engine, net, q, random_node(net, rng), Mode::search());
      const std::size_t d = net.num_nodes();  // at least the diameter
      const ValueFunction vf = done % 2 ? ValueFunction::kMargin : ValueFunction::kStatus;
      FeatureKinds kinds{facet == 0, facet == 2, facet == 1};
      if (factual_universe(probe, FeatureScope::kFull, 0, kinds).size() > 12) continue;
      FactualExplanation pruned;
      if (facet == 0) pruned = explain_skills(probe, d, vf);
      if (facet == 1) pruned = explain_query(probe, vf);
      if (facet == 2) pruned = explain_collaborations(probe, d, 0.0, vf);
      const FactualExplanation full = exhaustive_factual(probe, FeatureScope::kFull, vf, {}, kinds);
      min_p1 = std::min(min_p1, precision_at_k(pruned, full, 1));
      min_p5 = std::min(min_p5, precision_at_k(pruned, full, 5));
      ++done;
      ++runs;
    }
  }
  return {min_p1 == 1.0 && min_p5 == 1.0,
          format("%zu instances over skills/query/collaborations, min Precision@1 = %.3f, min Precision@5 = %.3f",
                 runs, min_p1, min_p5)};
}

// Status of the subject after applying `set` from scratch, without the probe
// cache or the search's bookkeeping.
std::pair<bool, std::uint32_t> fresh_status(const ProbeInterface& engine, const CollaborationNetwork& net,
                                            const Query& q, NodeId subject, const Mode& mode,
                                            const PerturbationSet& set) {
  const auto [view, q2] = apply_overlay(net, q, to_overlay(set));
  const RelevanceStatus st = mode.is_team() ? membership_status(engine, view, q2, mode.seed, subject)
                                            : relevance_status(engine, view, q2, subject);
  return {st.relevant, st.rank};
}

Verdict counterfactual_validity() {
  const ReferenceEngine engine;
  const AdamicAdarPredictor lp;
  std::size_t total = 0, invalid = 0, runs = 0;
  std::set<std::string> kinds_seen;

  auto check = [&](const CollaborationNetwork& net, const SkillEmbedding& emb, const Query& q, NodeId subject,
                   const Mode& mode) {
    CounterfactualContext ctx{&emb, &lp, std::nullopt};
    const bool initial = fresh_status(engine, net, q, subject, mode, {}).first;
    for (CounterfactualKind kind : kAllKinds) {
      if (is_promotion(kind) == initial) continue;
      StatusProbe probe(engine, net, q, subject, mode);
      try {
        const CounterfactualResult r = explain_counterfactual(probe, kind, BeamParams{}, ctx);
        ++runs;
        for (const auto& x : r.explanations) {
          ++total;
          kinds_seen.insert(std::string(counterfactual_kind_name(kind)));
          const auto [status, rank] = fresh_status(engine, net, q, subject, mode, x.perturbations);
          if (status == initial || status != x.flipped_to || rank != x.new_rank || x.size() > BeamParams{}.gamma) {
            ++invalid;
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoCandidates) throw;
      }
    }
  };

  {
    const CollaborationNetwork t4 = make_t4();
    const SkillEmbedding emb = fit_embedding(t4, default_embedding_dimension(t4));
    for (std::uint32_t k : {1u, 2u}) {
      for (std::size_t p = 0; p < 4; ++p) {
        check(t4, emb, make_query(t4, std::vector<std::string>{"db", "ml"}, k), node_id(p), Mode::search());
        check(t4, emb, make_query(t4, std::vector<std::string>{"ml", "sql"}, k), node_id(p), Mode::team(node_id(0)));
      }
    }
  }
  {
    const CollaborationNetwork net = generate_synthetic(SyntheticParams{100, 30, 6, 5, 7});
    const SkillEmbedding emb = fit_embedding(net, default_embedding_dimension(net));
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 6; ++i) {
      const Query q = random_query(net, rng, 3, 5, 10);
      const RankedList ranking = engine.rank(NetworkView(net), q);
      check(net, emb, q, ranking.entries()[std::uniform_int_distribution<std::size_t>(0, 9)(rng)].node,
            Mode::search());
      check(net, emb, q, ranking.entries()[std::uniform_int_distribution<std::size_t>(10, 19)(rng)].node,
            Mode::search());
      const NodeId seed = ranking.entries()[0].node;
      const Team team = engine.form_team(NetworkView(net), q, seed);
      if (team.members.size() > 1) check(net, emb, q, team.members.back(), Mode::team(seed));
      check(net, emb, q, random_node(net, rng), Mode::team(seed));
    }
  }
  return {invalid == 0 && total > 0 && kinds_seen.size() == kAllKinds.size(),
          format("%zu explanations from %zu runs covering %zu of 6 kinds, %zu failed re-validation", total, runs,
                 kinds_seen.size(), invalid)};
}

// Unbounded beam over the full atom universe against size-ordered brute force.
Verdict counterfactual_minimality() {
  const ReferenceEngine engine;
  const AdamicAdarPredictor lp;
  std::mt19937_64 rng(99);
  std::size_t instances = 0, with_flip = 0, mismatches = 0, explanations = 0;

  auto run = [&](const CollaborationNetwork& net, const Query& q, NodeId subject, const Mode& mode,
                 std::size_t gamma) {
    const SkillEmbedding emb = fit_embedding(net, std::min<std::size_t>(2, net.num_skills()));
    CounterfactualContext ctx{&emb, &lp, std::nullopt};
    for (CounterfactualKind kind : kAllKinds) {
      StatusProbe probe(engine, net, q, subject, mode);
      if (is_promotion(kind) == probe.initial().status) continue;
      const auto universe = counterfactual_universe(probe, kind, BaselineVariant::kFull, ctx, 0);
      if (universe.empty()) continue;
      StatusProbe oracle_probe(engine, net, q, subject, mode);
      const ExhaustiveResult oracle = exhaustive_minimal(oracle_probe, universe, gamma, Enumeration::kStopAtMinimal);
      BeamParams params;
      params.b = std::size_t{1} << 40;
      params.gamma = gamma;
      params.t = universe.size();
      params.e = std::max<std::size_t>(1, oracle.explanations.size());
      const BeamResult beam = beam_search(probe, universe, params);
      ++instances;
      std::set<PerturbationSet> want, got;
      for (const auto& x : oracle.explanations) want.insert(x.perturbations);
      for (const auto& x : beam.explanations) {
        got.insert(x.perturbations);
        if (!oracle.minimal_size || x.size() != *oracle.minimal_size) ++mismatches;
      }
      explanations += beam.explanations.size();
      if (oracle.minimal_size) ++with_flip;
      if (got != want) ++mismatches;
    }
  };

  const CollaborationNetwork t4 = make_t4();
  for (std::uint32_t k : {1u, 2u, 3u}) {
    for (const auto& toks : {std::vector<std::string>{"db", "ml"}, std::vector<std::string>{"ir", "ml"},
                             std::vector<std::string>{"sql"}}) {
      const Query q = make_query(t4, toks, k);
      for (std::size_t p = 0; p < 4; ++p) {
        run(t4, q, node_id(p), Mode::search(), 5);
        run(t4, q, node_id(p), Mode::team(node_id(0)), 5);
      }
    }
  }
  for (int i = 0; i < 40; ++i) {
    const CollaborationNetwork net = small_network(rng, 4, 6, 2);
    const Query q = random_query(net, rng, 1, 3, std::uniform_int_distribution<std::uint32_t>(1, 2)(rng));
    const NodeId subject = random_node(net, rng);
    run(net, q, subject, i % 3 == 2 ? Mode::team(random_node(net, rng)) : Mode::search(), 3);
  }
  return {mismatches == 0 && with_flip > 0,
          format("%zu instances (%zu with a flip within gamma), %zu explanations, %zu differ from brute force",
                 instances, with_flip, explanations, mismatches)};
}

// Default beam against the smallest flip in the union of every baseline
// universe for the kind.
Verdict counterfactual_precision_star() {
  const ReferenceEngine engine;
  const AdamicAdarPredictor lp;
  const CollaborationNetwork net = generate_synthetic(SyntheticParams{100, 30, 6, 5, 7});
  const SkillEmbedding emb = fit_embedding(net, default_embedding_dimension(net));
  const CounterfactualContext ctx{&emb, &lp, std::nullopt};
  const BeamParams params;  // b=30, gamma=5, e=5, t=10
  std::mt19937_64 rng(31337);
  std::size_t scored = 0, exact = 0, near = 0, runs = 0, oracle_missing = 0;
  for (int i = 0; i < 6; ++i) {
    const Query q = random_query(net, rng, 3, 5, 10);
    const RankedList ranking = engine.rank(NetworkView(net), q);
    std::vector<NodeId> subjects;
    for (int j = 0; j < 2; ++j) {
      subjects.push_back(ranking.entries()[std::uniform_int_distribution<std::size_t>(0, 9)(rng)].node);
      subjects.push_back(ranking.entries()[std::uniform_int_distribution<std::size_t>(10, 19)(rng)].node);
    }
    for (NodeId subject : subjects) {
      for (CounterfactualKind kind : kAllKinds) {
        StatusProbe probe(engine, net, q, subject, Mode::search());
        if (is_promotion(kind) == probe.initial().status) continue;
        CounterfactualResult r;
        try {
          r = explain_counterfactual(probe, kind, params, ctx);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNoCandidates) throw;
          continue;
        }
        ++runs;
        if (r.explanations.empty()) continue;
        std::set<Perturbation> pool;
        for (BaselineVariant v : {BaselineVariant::kFull, BaselineVariant::kExhaustiveNeighborhood,
                                  BaselineVariant::kExhaustiveSkills}) {
          if (v == BaselineVariant::kFull &&
              (kind == CounterfactualKind::kSkillAdd || kind == CounterfactualKind::kLinkAdd)) {
            continue;  // whole-network universes, out of reach
          }
          for (const auto& p : counterfactual_universe(probe, kind, v, ctx, params.t)) pool.insert(p);
        }
        for (const auto& x : r.explanations) pool.insert(x.perturbations.begin(), x.perturbations.end());
        const std::vector<Perturbation> universe(pool.begin(), pool.end());
        StatusProbe oracle_probe(engine, net, q, subject, Mode::search());
        oracle_probe.set_deadline(Deadline(std::numeric_limits<double>::infinity(), kOracleProbeBudget));
        const ExhaustiveResult oracle =
            exhaustive_minimal(oracle_probe, universe, params.gamma, Enumeration::kStopAtMinimal);
        if (!oracle.minimal_size) {
          ++oracle_missing;
          continue;
        }
        for (const auto& x : r.explanations) {
          ++scored;
          if (x.size() == *oracle.minimal_size) ++exact;
          if (x.size() <= *oracle.minimal_size + 1) ++near;
        }
      }
    }
  }
  const double precision = scored ? static_cast<double>(exact) / static_cast<double>(scored) : 0.0;
  const double star = scored ? static_cast<double>(near) / static_cast<double>(scored) : 0.0;
  return {scored > 0 && star >= kPrecisionStarThreshold,
          format("Precision* = %.3f (threshold %.2f), Precision = %.3f over %zu explanations from %zu runs; "
                 "%zu runs without an oracle minimum",
                 star, kPrecisionStarThreshold, precision, scored, runs, oracle_missing)};
}

Verdict pruning_speedup() {
  const auto start = Clock::now();
  const ReferenceEngine engine;
  const CollaborationNetwork net = generate_synthetic(SyntheticParams{200, 30, 6, 5, 11});
  EvalConfig config;
  config.n_queries = 2;
  config.k = 10;
  config.timeout_seconds = 4.0;
  config.shapley.samples = 256;
  config.seed = 5;
  const EvalReport report = run_protocol(engine, net, config, "synthetic-200");
  const double elapsed = seconds_since(start);

  std::vector<std::string> slower;
  double skill_speedup = 0.0;
  for (const MethodRow& row : report.rows) {
    if (row.method == "factual-query" || row.method == "cf-query-demote") continue;
    if (!(row.exes_latency_ms < row.baseline_latency_ms)) slower.push_back(row.method + "/" + row.baseline);
    if (row.method == "factual-skills") skill_speedup = row.baseline_latency_ms / std::max(row.exes_latency_ms, 1e-9);
  }
  std::string detail = format("skill factual speedup %.1fx (target %.0fx), suite %.0f s (limit %.0f s)",
                              skill_speedup, kSkillFactualSpeedup, elapsed, kSpeedupSuiteSeconds);
  for (const auto& s : slower) detail += ", slower: " + s;
  if (slower.empty()) detail += ", pruned search faster on every compared row";
  return {slower.empty() && skill_speedup >= kSkillFactualSpeedup && elapsed <= kSpeedupSuiteSeconds, detail};
}

Verdict protocol_determinism() {
  const ReferenceEngine engine;
  const CollaborationNetwork net = generate_synthetic(SyntheticParams{100, 30, 6, 5, 7});
  EvalConfig config;
  config.n_queries = 2;
  config.k = 5;
  config.include_timing = false;
  config.probe_budget = 3000;
  config.seed = 17;
  auto render = [&] {
    const EvalReport r = run_protocol(engine, net, config, "synthetic-100");
    std::ostringstream csv, json;
    write_report_csv(r, csv);
    write_report_json(r, json);
    return std::make_pair(csv.str(), json.str());
  };
  const auto a = render();
  const auto b = render();
  return {a == b && !a.first.empty(),
          format("two runs with seed %llu: CSV %zu bytes, JSON %zu bytes, %s", static_cast<unsigned long long>(config.seed),
                 a.first.size(), a.second.size(), a == b ? "byte-identical" : "DIFFERENT")};
}

Verdict t4_golden() {
  std::size_t checks = 0, failures = 0;
  std::string first;
  for (const auto& s : golden::check_t4(EXES_GOLDEN_JSON)) {
    checks += s.checks;
    failures += s.failures.size();
    if (first.empty() && !s.failures.empty()) first = s.section + ": " + s.failures.front();
  }
  std::string detail = format("%zu checks against the brute-force oracle (tolerance %.0e), %zu mismatches", checks,
                              golden::kTolerance, failures);
  if (!first.empty()) detail += "; first: " + first;
  return {failures == 0 && checks > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"shapley-axioms", shapley_axioms},
      {"factual-oracle-equivalence", factual_oracle_equivalence},
      {"counterfactual-validity", counterfactual_validity},
      {"counterfactual-minimality", counterfactual_minimality},
      {"counterfactual-precision-star", counterfactual_precision_star},
      {"pruning-speedup", pruning_speedup},
      {"protocol-determinism", protocol_determinism},
      {"t4-golden", t4_golden},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    const auto start = Clock::now();
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-30s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
