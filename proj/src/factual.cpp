#include "exes/factual.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>

#include "exes/error.hpp"

namespace exes {

std::string_view feature_kind_name(Feature::Kind kind) {
  switch (kind) {
    case Feature::Kind::kNodeSkill: return "skill";
    case Feature::Kind::kEdge: return "edge";
    case Feature::Kind::kQueryKeyword: return "keyword";
  }
  return "unknown";
}

std::string describe(const CollaborationNetwork& net, const Feature& f) {
  switch (f.kind) {
    case Feature::Kind::kNodeSkill:
      return "skill:" + net.display_name(f.node) + ":" + net.skill_token(f.skill);
    case Feature::Kind::kEdge:
      return "edge:" + net.display_name(f.node) + "-" + net.display_name(f.other);
    case Feature::Kind::kQueryKeyword:
      return "keyword:" + net.skill_token(f.skill);
  }
  return {};
}

double outcome_value(ValueFunction vf, const Outcome& outcome) {
  if (vf == ValueFunction::kStatus) return outcome.status ? 1.0 : 0.0;
  if (outcome.k == 0) return -1.0;
  const double k = outcome.k;
  const double margin = (k - static_cast<double>(outcome.rank) + 1.0) / k;
  return std::clamp(margin, -1.0, 1.0);
}

double FactualExplanation::phi(const Feature& f) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == f) return attributions[i];
  }
  return 0.0;
}

std::size_t FactualExplanation::nonzero_count() const {
  return static_cast<std::size_t>(std::count_if(attributions.begin(), attributions.end(),
                                                [](double p) { return std::abs(p) > 1e-12; }));
}

double coalition_value(StatusProbe& probe, std::span<const Feature> features,
                       const std::vector<bool>& coalition, ValueFunction vf) {
  if (coalition.size() != features.size()) {
    throw Error(ErrorCode::kInvalidArgument, "coalition size mismatch");
  }
  PerturbationOverlay overlay;
  std::vector<SkillId> keywords = probe.query().keywords;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (coalition[i]) continue;
    const Feature& f = features[i];
    switch (f.kind) {
      case Feature::Kind::kNodeSkill:
        overlay.removed_skills.insert({f.node, f.skill});
        break;
      case Feature::Kind::kEdge:
        overlay.removed_edges.insert(f.edge_key());
        break;
      case Feature::Kind::kQueryKeyword:
        keywords.erase(std::remove(keywords.begin(), keywords.end(), f.skill), keywords.end());
        break;
    }
  }
  return outcome_value(vf, probe.evaluate(overlay, keywords));
}

namespace {

std::vector<bool> mask_to_coalition(std::uint64_t mask, std::size_t n) {
  std::vector<bool> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1U;
  return c;
}

}  // namespace

FactualExplanation shapley_values(StatusProbe& probe, std::span<const Feature> features,
                                  ValueFunction vf, const ShapleyOptions& options) {
  FactualExplanation out;
  out.subject = probe.subject();
  out.mode = probe.mode();
  out.features.assign(features.begin(), features.end());
  const std::uint64_t calls_before = probe.engine_calls();
  const std::size_t n = features.size();
  out.attributions.assign(n, 0.0);

  out.value_full = coalition_value(probe, features, std::vector<bool>(n, true), vf);
  if (n == 0) {
    out.value_empty = out.value_full;
    return out;
  }
  out.value_empty = coalition_value(probe, features, std::vector<bool>(n, false), vf);

  if (n <= options.exact_threshold && n < 63) {
    out.exact = true;
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<double> value(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      value[mask] = coalition_value(probe, features, mask_to_coalition(mask, n), vf);
    }
    // weight(s) = s! (n - s - 1)! / n!
    std::vector<double> weight(n);
    for (std::size_t s = 0; s < n; ++s) {
      double w = 1.0 / static_cast<double>(n);
      for (std::size_t j = 1; j <= s; ++j) {
        w *= static_cast<double>(j) / static_cast<double>(n - j);
      }
      weight[s] = w;
    }
    // Marginals are summed per coalition size in sorted order, so features
    // with identical marginal multisets get bit-identical attributions.
    std::vector<std::vector<double>> by_size(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      for (auto& v : by_size) v.clear();
      for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (mask & bit) continue;
        const double delta = value[mask | bit] - value[mask];
        if (delta != 0.0) by_size[static_cast<std::size_t>(std::popcount(mask))].push_back(delta);
      }
      double phi = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        std::sort(by_size[s].begin(), by_size[s].end());
        double sum = 0.0;
        for (double d : by_size[s]) sum += d;
        phi += weight[s] * sum;
      }
      out.attributions[i] = phi;
    }
  } else {
    out.exact = false;
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sums(n, 0.0);
    const std::size_t samples = std::max<std::size_t>(1, options.samples);
    for (std::size_t s = 0; s < samples; ++s) {
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<bool> coalition(n, false);
      double previous = out.value_empty;
      for (std::size_t pos = 0; pos < n; ++pos) {
        coalition[order[pos]] = true;
        const double current = pos + 1 == n ? out.value_full
                                            : coalition_value(probe, features, coalition, vf);
        sums[order[pos]] += current - previous;
        previous = current;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.attributions[i] = sums[i] / static_cast<double>(samples);
  }
  out.engine_calls = probe.engine_calls() - calls_before;
  return out;
}

FactualExplanation explain_skills(StatusProbe& probe, std::size_t d, ValueFunction vf,
                                  const ShapleyOptions& options) {
  const CollaborationNetwork& net = probe.network();
  std::vector<Feature> features;
  for (NodeId u : neighborhood(net, probe.subject(), d)) {
    for (SkillId s : net.skills_of(u)) features.push_back(Feature::node_skill(u, s));
  }
  return shapley_values(probe, features, vf, options);
}

FactualExplanation explain_query(StatusProbe& probe, ValueFunction vf,
                                 const ShapleyOptions& options) {
  std::vector<Feature> features;
  for (SkillId s : probe.query().keywords) features.push_back(Feature::keyword(s));
  return shapley_values(probe, features, vf, options);
}

FactualExplanation explain_collaborations(StatusProbe& probe, std::size_t d, double tau,
                                          ValueFunction vf, const ShapleyOptions& options,
                                          CollaborationTrace* trace) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be >= 0");
  const std::uint64_t calls_at_start = probe.engine_calls();
  const CollaborationNetwork& net = probe.network();
  const NodeId subject = probe.subject();
  const NetworkView view(net);
  const std::vector<NodeId> hood = neighborhood(view, subject, d);
  const std::vector<EdgeKey> region = induced_edges(view, hood);

  std::deque<NodeId> queue{subject};
  std::set<NodeId> queued{subject};
  std::set<EdgeKey> impactful;
  CollaborationTrace local_trace;

  while (!queue.empty()) {
    const NodeId px = queue.front();
    queue.pop_front();
    local_trace.expanded.push_back(px);
    std::vector<Feature> incident;
    for (const EdgeKey& e : region) {
      if (e.u == px || e.v == px) incident.push_back(Feature::edge(e));
    }
    if (incident.empty()) continue;
    const FactualExplanation local = shapley_values(probe, incident, vf, options);
    for (std::size_t i = 0; i < incident.size(); ++i) {
      if (!(std::abs(local.attributions[i]) >= tau)) continue;
      const EdgeKey e = incident[i].edge_key();
      impactful.insert(e);
      const NodeId py = e.u == px ? e.v : e.u;
      if (queued.insert(py).second) queue.push_back(py);
    }
  }

  local_trace.impactful.assign(impactful.begin(), impactful.end());
  std::vector<Feature> features;
  for (const EdgeKey& e : impactful) features.push_back(Feature::edge(e));
  FactualExplanation out = shapley_values(probe, features, vf, options);
  out.engine_calls = probe.engine_calls() - calls_at_start;
  if (trace) *trace = std::move(local_trace);
  return out;
}

}  // namespace exes
