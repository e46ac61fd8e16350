#include "exes/api.hpp"

#include <sstream>

#include "exes/counterfactual.hpp"
#include "exes/eval_harness.hpp"
#include "exes/factual.hpp"

namespace exes {

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

const Json* field(const Json& body, const char* key) {
  if (!body.is_object()) invalid("request body must be a JSON object");
  const auto it = body.find(key);
  return it == body.end() || it->is_null() ? nullptr : &*it;
}

std::uint64_t get_uint(const Json& body, const char* key, std::uint64_t fallback) {
  const Json* v = field(body, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || (v->is_number_integer() && v->get<std::int64_t>() < 0)) {
    invalid(std::string(key) + " must be a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

double get_real(const Json& body, const char* key, double fallback) {
  const Json* v = field(body, key);
  if (!v) return fallback;
  if (!v->is_number()) invalid(std::string(key) + " must be a number");
  return v->get<double>();
}

std::string get_string(const Json& body, const char* key, const std::string& fallback) {
  const Json* v = field(body, key);
  if (!v) return fallback;
  if (v->is_number_integer()) return std::to_string(v->get<std::int64_t>());
  if (!v->is_string()) invalid(std::string(key) + " must be a string");
  return v->get<std::string>();
}

std::string require_string(const Json& body, const char* key) {
  if (!field(body, key)) invalid(std::string("missing field '") + key + "'");
  return get_string(body, key, {});
}

std::uint32_t request_k(const Json& body) {
  const std::uint64_t k = get_uint(body, "k", 10);
  if (k == 0 || k > 1000000) invalid("k must be >= 1");
  return static_cast<std::uint32_t>(k);
}

void check_params_keys(const Json& params, std::initializer_list<const char*> allowed) {
  if (!params.is_object()) invalid("params must be an object");
  for (const auto& [key, _] : params.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid("unknown parameter '" + key + "'");
  }
}

const Json& params_of(const Json& body) {
  static const Json empty = Json::object();
  const Json* p = field(body, "params");
  return p ? *p : empty;
}

Query request_query(const ApiContext& ctx, const Json& body) {
  Query q;
  q.keywords = request_keywords(*ctx.net, body);
  q.k = request_k(body);
  return q;
}

PerturbationOverlay request_overlay(const ApiContext& ctx, const Json& body, const Query& q) {
  PerturbationOverlay o;
  const Json* list = field(body, "perturbations");
  if (!list) return o;
  if (!list->is_array()) invalid("perturbations must be an array of strings");
  std::vector<Perturbation> ps;
  for (const Json& p : *list) {
    if (!p.is_string()) invalid("perturbations must be an array of strings");
    ps.push_back(decode_perturbation(*ctx.net, p.get<std::string>()));
  }
  o = to_overlay(ps);
  validate_overlay(*ctx.net, q, o);
  return o;
}

Mode request_mode(const ApiContext& ctx, const Json& body) {
  const std::string mode = get_string(body, "mode", "search");
  if (mode == "search") return Mode::search();
  if (mode == "team") return Mode::team(ctx.net->node(require_string(body, "seed")));
  invalid("mode must be 'search' or 'team'");
}

void apply_timeout(StatusProbe& probe, const Json& params) {
  const double t = get_real(params, "timeout_seconds", -1.0);
  if (t >= 0.0) probe.set_deadline(Deadline(t));
}

}  // namespace

UnknownKeyword::UnknownKeyword(std::string token, std::vector<std::string> nearest)
    : Error(ErrorCode::kUnknownSkill,
            "unknown keyword '" + token + "'" +
                (nearest.empty() ? std::string() : "; nearest: " + join(nearest))),
      token_(std::move(token)),
      nearest_(std::move(nearest)) {}

std::vector<SkillId> request_keywords(const CollaborationNetwork& net, const Json& body) {
  const Json* v = field(body, "keywords");
  if (!v) v = field(body, "q");
  if (!v) invalid("missing field 'keywords'");
  std::vector<std::string> tokens;
  if (v->is_string()) {
    std::stringstream ss(v->get<std::string>());
    for (std::string t; std::getline(ss, t, ',');) {
      if (!t.empty()) tokens.push_back(t);
    }
  } else if (v->is_array()) {
    for (const Json& t : *v) {
      if (!t.is_string()) invalid("keywords must be strings");
      tokens.push_back(t.get<std::string>());
    }
  } else {
    invalid("keywords must be an array or a comma-separated string");
  }
  if (tokens.empty()) invalid("keywords must not be empty");
  std::vector<SkillId> out;
  for (const auto& t : tokens) {
    const auto s = net.find_skill(t);
    if (!s) throw UnknownKeyword(t, nearest_tokens(net, t));
    out.push_back(*s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Json api_rank(const ApiContext& ctx, const Json& body) {
  const Query q = request_query(ctx, body);
  const PerturbationOverlay o = request_overlay(ctx, body, q);
  const auto [view, q2] = apply_overlay(*ctx.net, q, o);
  return ranked_list_json(*ctx.net, ctx.engine->rank(view, q2), q2);
}

Json api_team(const ApiContext& ctx, const Json& body) {
  Query q;
  q.keywords = request_keywords(*ctx.net, body);
  q.k = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, get_uint(body, "k", 1)));
  const NodeId seed = ctx.net->node(require_string(body, "seed"));
  const PerturbationOverlay o = request_overlay(ctx, body, q);
  const auto [view, q2] = apply_overlay(*ctx.net, q, o);
  return team_json(*ctx.net, ctx.engine->form_team(view, q2, seed), q2);
}

Json api_explain_factual(const ApiContext& ctx, const Json& body) {
  const Query q = request_query(ctx, body);
  const NodeId subject = ctx.net->node(require_string(body, "subject"));
  const Mode mode = request_mode(ctx, body);
  const std::string facet = get_string(body, "facet", "skills");
  const Json& params = params_of(body);
  check_params_keys(params, {"d", "tau", "value", "samples", "exact_threshold", "rng_seed",
                             "timeout_seconds"});
  const std::string value = get_string(params, "value", "status");
  ValueFunction vf = ValueFunction::kStatus;
  if (value == "margin") vf = ValueFunction::kMargin;
  else if (value != "status") invalid("value must be 'status' or 'margin'");
  ShapleyOptions opts;
  opts.samples = get_uint(params, "samples", opts.samples);
  opts.exact_threshold = get_uint(params, "exact_threshold", opts.exact_threshold);
  opts.seed = get_uint(params, "rng_seed", opts.seed);

  StatusProbe probe(*ctx.engine, *ctx.net, q, subject, mode);
  apply_timeout(probe, params);
  const std::string baseline = get_string(body, "baseline", "");
  if (!baseline.empty() && baseline != "exhaustive") invalid("factual baseline must be 'exhaustive'");

  FeatureKinds kinds{false, false, false};
  FactualExplanation x;
  if (facet == "skills") {
    kinds.skills = true;
    if (baseline.empty()) x = explain_skills(probe, get_uint(params, "d", 1), vf, opts);
  } else if (facet == "query") {
    kinds.keywords = true;
    if (baseline.empty()) x = explain_query(probe, vf, opts);
  } else if (facet == "collaborations") {
    kinds.edges = true;
    const double tau = get_real(params, "tau", 0.1);
    if (baseline.empty()) x = explain_collaborations(probe, get_uint(params, "d", 2), tau, vf, opts);
  } else {
    invalid("facet must be skills, query or collaborations");
  }
  if (!baseline.empty()) x = exhaustive_factual(probe, FeatureScope::kFull, vf, opts, kinds);
  return factual_json(*ctx.net, x, facet);
}

Json api_explain_counterfactual(const ApiContext& ctx, const Json& body) {
  const Query q = request_query(ctx, body);
  const NodeId subject = ctx.net->node(require_string(body, "subject"));
  const Mode mode = request_mode(ctx, body);
  const CounterfactualKind kind = parse_counterfactual_kind(require_string(body, "kind"));
  const Json& params = params_of(body);
  check_params_keys(params, {"b", "gamma", "e", "t", "d", "timeout_seconds"});
  BeamParams beam;
  beam.b = get_uint(params, "b", beam.b);
  beam.gamma = get_uint(params, "gamma", beam.gamma);
  beam.e = get_uint(params, "e", beam.e);
  beam.t = get_uint(params, "t", beam.t);
  CounterfactualContext cf;
  cf.link_predictor = ctx.link_predictor;
  if (kind != CounterfactualKind::kLinkAdd && kind != CounterfactualKind::kLinkRemove) {
    cf.embedding = &ctx.embedding();
  }
  if (field(params, "d")) cf.radius = get_uint(params, "d", 0);

  StatusProbe probe(*ctx.engine, *ctx.net, q, subject, mode);
  apply_timeout(probe, params);
  const std::string baseline = get_string(body, "baseline", "");
  if (!baseline.empty()) {
    BaselineVariant variant;
    if (baseline == "exhaustive") variant = BaselineVariant::kFull;
    else if (baseline == "exhaustive-neighborhood") variant = BaselineVariant::kExhaustiveNeighborhood;
    else if (baseline == "exhaustive-skills") variant = BaselineVariant::kExhaustiveSkills;
    else invalid("unknown baseline '" + baseline + "'");
    if (variant == BaselineVariant::kExhaustiveNeighborhood && !cf.embedding &&
        (kind == CounterfactualKind::kSkillAdd || kind == CounterfactualKind::kSkillRemove)) {
      cf.embedding = &ctx.embedding();
    }
    const ExhaustiveResult r = exhaustive_counterfactual(probe, kind, beam.gamma, variant, cf, beam.t,
                                                         Enumeration::kStopAtMinimal);
    if (!r.complete) throw Error(ErrorCode::kTimeout, "exhaustive search timed out");
    CounterfactualResult out;
    out.kind = kind;
    out.subject = subject;
    out.initial = probe.initial();
    for (const auto& x : r.explanations) {
      if (revalidate(*ctx.engine, *ctx.net, q, subject, mode, x.perturbations)) {
        out.explanations.push_back(x);
      }
    }
    sort_for_presentation(out.explanations, out.initial.rank);
    return counterfactual_json(*ctx.net, out);
  }
  try {
    return counterfactual_json(*ctx.net, explain_counterfactual(probe, kind, beam, cf));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoCandidates) throw;
    return counterfactual_empty_json(*ctx.net, kind, subject, probe.initial(),
                                     "no candidate perturbations for " +
                                         std::string(counterfactual_kind_name(kind)));
  }
}

Json api_similar(const ApiContext& ctx, const Json& body) {
  const std::vector<SkillId> targets = request_keywords(*ctx.net, body);
  const std::uint64_t t = get_uint(body, "t", 5);
  std::vector<SkillId> exclude;
  if (const Json* ex = field(body, "exclude")) {
    Json tmp{{"keywords", *ex}};
    exclude = request_keywords(*ctx.net, tmp);
  }
  auto list = rank_similar(ctx.embedding(), targets, exclude);
  if (list.size() > t) list.resize(t);
  return similar_json(*ctx.net, list);
}

Json api_neighborhood(const ApiContext& ctx, const Json& body) {
  const NodeId subject = ctx.net->node(require_string(body, "subject"));
  return neighborhood_json(*ctx.net, subject, get_uint(body, "d", 1));
}

bool is_long_running(const Json& body) {
  if (!body.is_object()) return false;
  const auto async = body.find("async");
  if (async != body.end() && async->is_boolean() && async->get<bool>()) return true;
  const auto baseline = body.find("baseline");
  return baseline != body.end() && baseline->is_string() && !baseline->get<std::string>().empty();
}

}  // namespace exes
