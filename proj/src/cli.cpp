#include "exes/cli.hpp"

#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "exes/api.hpp"
#include "exes/error.hpp"
#include "exes/eval_harness.hpp"
#include "exes/service.hpp"

namespace exes {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string net;
  std::string q;
  std::uint32_t k = 10;
  bool json = false;
  std::string ranker = "reference";
  std::string link_predictor = "adamic-adar";
  std::string embedding_cache;
};

fs::path resolve_net(const std::string& arg) {
  if (arg.empty()) throw Error(ErrorCode::kInvalidArgument, "--net is required");
  fs::path p(arg);
  if (!fs::exists(p) && p.is_relative()) {
    if (const char* root = std::getenv("EXES_DATA_DIR")) {
      const fs::path candidate = fs::path(root) / p;
      if (fs::exists(candidate)) return candidate;
    }
  }
  if (!fs::is_directory(p)) {
    throw Error(ErrorCode::kIoError, "network directory '" + arg + "' not found");
  }
  return p;
}

class Session {
 public:
  explicit Session(const Common& c)
      : net_(load_network_dir(resolve_net(c.net))),
        engine_(make_engine(c.ranker)),
        predictor_(make_link_predictor(c.link_predictor)),
        cache_(c.embedding_cache) {}

  ApiContext context() {
    ApiContext ctx;
    ctx.net = &net_;
    ctx.engine = engine_.get();
    ctx.link_predictor = predictor_.get();
    ctx.embedding = [this]() -> const SkillEmbedding& { return embedding(); };
    return ctx;
  }

  const CollaborationNetwork& net() const { return net_; }
  const ProbeInterface& engine() const { return *engine_; }

 private:
  const SkillEmbedding& embedding() {
    if (!embedding_) {
      if (!cache_.empty() && fs::exists(cache_)) {
        embedding_ = load_embedding(net_, cache_);
      } else {
        embedding_ = fit_embedding(net_, default_embedding_dimension(net_));
        if (!cache_.empty()) save_embedding(*embedding_, cache_);
      }
    }
    return *embedding_;
  }

  CollaborationNetwork net_;
  std::unique_ptr<ProbeInterface> engine_;
  std::unique_ptr<LinkPredictor> predictor_;
  fs::path cache_;
  std::optional<SkillEmbedding> embedding_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x == 0.0 ? 0.0 : x);
  return buf;
}

void add_common(CLI::App* app, Common& c, bool with_k = true) {
  app->add_option("--net", c.net, "network directory (relative paths also tried under $EXES_DATA_DIR)")
      ->required();
  app->add_option("--q,--keywords", c.q, "comma-separated query keywords")->required();
  if (with_k) app->add_option("--k", c.k, "relevance cutoff");
  app->add_flag("--json", c.json, "machine-readable output");
  app->add_option("--ranker", c.ranker, "ranking engine");
  app->add_option("--link-predictor", c.link_predictor, "link predictor");
  app->add_option("--embedding-cache", c.embedding_cache, "skill embedding TSV cache");
}

Json base_request(const Common& c) { return Json{{"keywords", c.q}, {"k", c.k}}; }

void print_rank(std::ostream& out, const Json& r) {
  out << "rank\tnode\tscore\trelevant\n";
  for (const auto& e : r["ranking"]) {
    out << e["rank"].get<int>() << '\t' << e["node"].get<std::string>() << '\t'
        << fmt(e["score"].get<double>()) << '\t' << (e["relevant"].get<bool>() ? "*" : "") << '\n';
  }
}

void print_team(std::ostream& out, const Json& t) {
  out << "join\tnode\n";
  for (const auto& m : t["members"]) {
    out << m["join_rank"].get<int>() << '\t' << m["node"].get<std::string>() << '\n';
  }
  out << "covered:";
  for (const auto& s : t["covered"]) out << ' ' << s.get<std::string>();
  out << (t["complete"].get<bool>() ? "" : " (incomplete)") << '\n';
}

std::string attribution_label(const Json& a) {
  const std::string kind = a["kind"];
  if (kind == "skill") return "skill " + a["node"].get<std::string>() + ":" + a["skill"].get<std::string>();
  if (kind == "edge") {
    return "edge " + a["edge"][0].get<std::string>() + "-" + a["edge"][1].get<std::string>();
  }
  return "keyword " + a["skill"].get<std::string>();
}

void print_factual(std::ostream& out, const Json& x) {
  out << "subject " << x["subject"].get<std::string>() << "  value(all)=" << fmt(x["value_full"])
      << "  value(none)=" << fmt(x["value_empty"]) << (x["exact"].get<bool>() ? "" : "  (sampled)")
      << '\n';
  std::vector<Json> rows(x["attributions"].begin(), x["attributions"].end());
  std::stable_sort(rows.begin(), rows.end(), [](const Json& a, const Json& b) {
    return std::abs(a["phi"].get<double>()) > std::abs(b["phi"].get<double>());
  });
  for (const auto& a : rows) out << fmt(a["phi"].get<double>()) << '\t' << attribution_label(a) << '\n';
}

void print_counterfactual(std::ostream& out, const Json& r) {
  out << "subject " << r["subject"].get<std::string>() << "  kind " << r["kind"].get<std::string>()
      << "  initial rank " << r["initial"]["rank"].get<int>() << '\n';
  if (r["explanations"].empty()) {
    out << "no explanation";
    if (r.contains("reason")) out << ": " << r["reason"].get<std::string>();
    out << '\n';
    return;
  }
  int i = 0;
  for (const auto& x : r["explanations"]) {
    out << ++i << ".";
    for (const auto& p : x["perturbations"]) out << ' ' << p["text"].get<std::string>();
    out << "  -> rank " << x["new_rank"].get<int>() << '\n';
  }
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::kTimeout ? 3 : 2; }

Service* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanations for expert search and team formation"};
  app.require_subcommand(1);

  // rank
  Common rank_c;
  std::vector<std::string> rank_perturbations;
  auto* rank = app.add_subcommand("rank", "rank every node for a query");
  add_common(rank, rank_c);
  rank->add_option("--perturbation", rank_perturbations, "what-if perturbation, e.g. add-skill:p3:ml");

  // team
  Common team_c;
  std::string team_seed;
  auto* team = app.add_subcommand("team", "form a team from a seed node");
  add_common(team, team_c, false);
  team->add_option("--seed", team_seed, "seed node")->required();

  // explain factual | cf
  auto* explain = app.add_subcommand("explain", "explain a subject's status");
  explain->require_subcommand(1);
  Common fx_c;
  std::string fx_subject, fx_facet = "skills", fx_mode = "search", fx_seed, fx_value = "status",
                          fx_baseline;
  std::optional<std::size_t> fx_d, fx_samples;
  std::optional<double> fx_tau, fx_timeout;
  std::optional<std::uint64_t> fx_rng;
  auto* fx = explain->add_subcommand("factual", "Shapley attributions");
  add_common(fx, fx_c);
  fx->add_option("--subject", fx_subject)->required();
  fx->add_option("--facet", fx_facet)->check(CLI::IsMember({"skills", "query", "collaborations"}));
  fx->add_option("--mode", fx_mode)->check(CLI::IsMember({"search", "team"}));
  fx->add_option("--seed", fx_seed, "team seed (team mode)");
  fx->add_option("--d", fx_d, "neighborhood radius");
  fx->add_option("--tau", fx_tau, "collaboration threshold");
  fx->add_option("--value", fx_value)->check(CLI::IsMember({"status", "margin"}));
  fx->add_option("--samples", fx_samples, "permutation samples above the exact threshold");
  fx->add_option("--rng-seed", fx_rng);
  fx->add_option("--timeout", fx_timeout, "seconds");
  fx->add_option("--baseline", fx_baseline, "exhaustive");

  Common cf_c;
  std::string cf_subject, cf_kind, cf_mode = "search", cf_seed, cf_baseline;
  std::optional<std::size_t> cf_b, cf_gamma, cf_e, cf_t, cf_d;
  std::optional<double> cf_timeout;
  auto* cf = explain->add_subcommand("cf", "counterfactual explanations");
  add_common(cf, cf_c);
  cf->add_option("--subject", cf_subject)->required();
  cf->add_option("--kind", cf_kind)
      ->required()
      ->check(CLI::IsMember({"skill-add", "skill-rm", "query-promote", "query-demote", "link-add",
                             "link-rm"}));
  cf->add_option("--mode", cf_mode)->check(CLI::IsMember({"search", "team"}));
  cf->add_option("--seed", cf_seed, "team seed (team mode)");
  cf->add_option("--b", cf_b, "beam width");
  cf->add_option("--gamma", cf_gamma, "maximum explanation size");
  cf->add_option("--e", cf_e, "explanations wanted");
  cf->add_option("--t", cf_t, "candidate count");
  cf->add_option("--d", cf_d, "neighborhood radius");
  cf->add_option("--timeout", cf_timeout, "seconds");
  cf->add_option("--baseline", cf_baseline,
                 "exhaustive | exhaustive-neighborhood | exhaustive-skills");

  // similar
  Common sim_c;
  std::size_t sim_t = 5;
  std::string sim_exclude;
  auto* similar = app.add_subcommand("similar", "skills nearest to the query centroid");
  add_common(similar, sim_c, false);
  similar->add_option("--t", sim_t);
  similar->add_option("--exclude", sim_exclude, "comma-separated skills to leave out");

  // eval run
  auto* eval = app.add_subcommand("eval", "evaluation protocol");
  eval->require_subcommand(1);
  std::string eval_net, eval_config, eval_ranker = "reference";
  std::vector<std::string> eval_out;
  auto* eval_run = eval->add_subcommand("run", "run the protocol and write the report");
  eval_run->add_option("--net", eval_net)->required();
  eval_run->add_option("--config", eval_config, "JSON configuration file");
  eval_run->add_option("--out", eval_out, "report paths (.csv and/or .json)")->expected(1, 2);
  eval_run->add_option("--ranker", eval_ranker);

  // serve
  ServiceConfig serve_cfg;
  std::string serve_data_dir, serve_ui_dir;
  auto* serve = app.add_subcommand("serve", "HTTP service");
  serve->add_option("--host", serve_cfg.host);
  serve->add_option("--port", serve_cfg.port);
  serve->add_option("--workers", serve_cfg.workers)->check(CLI::PositiveNumber);
  serve->add_option("--data-dir", serve_data_dir, "preload every network directory under this path");
  serve->add_option("--ui-dir", serve_ui_dir, "static assets served under /ui");
  serve->add_option("--ranker", serve_cfg.ranker);
  serve->add_option("--link-predictor", serve_cfg.link_predictor);

  // fixtures gen
  auto* fixtures = app.add_subcommand("fixtures", "fixture networks");
  fixtures->require_subcommand(1);
  SyntheticParams gen;
  std::string gen_out;
  bool gen_t4 = false;
  auto* fixtures_gen = fixtures->add_subcommand("gen", "write a synthetic network as TSV");
  fixtures_gen->add_option("--n", gen.n_nodes, "nodes");
  fixtures_gen->add_option("--skills", gen.n_skills, "skill universe size");
  fixtures_gen->add_option("--degree", gen.avg_degree, "average degree");
  fixtures_gen->add_option("--skills-per-node", gen.skills_per_node);
  fixtures_gen->add_option("--seed", gen.seed);
  fixtures_gen->add_flag("--t4", gen_t4, "write the four-node path fixture instead");
  fixtures_gen->add_option("--out", gen_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    auto emit = [&](const Common& c, const Json& j, void (*print)(std::ostream&, const Json&)) {
      if (c.json) out << dump(j);
      else print(out, j);
    };

    if (*rank) {
      Session s(rank_c);
      Json req = base_request(rank_c);
      if (!rank_perturbations.empty()) req["perturbations"] = rank_perturbations;
      emit(rank_c, api_rank(s.context(), req), print_rank);
    } else if (*team) {
      Session s(team_c);
      Json req{{"keywords", team_c.q}, {"seed", team_seed}};
      emit(team_c, api_team(s.context(), req), print_team);
    } else if (*fx) {
      Session s(fx_c);
      Json req = base_request(fx_c);
      req["subject"] = fx_subject;
      req["facet"] = fx_facet;
      req["mode"] = fx_mode;
      if (!fx_seed.empty()) req["seed"] = fx_seed;
      if (!fx_baseline.empty()) req["baseline"] = fx_baseline;
      Json params{{"value", fx_value}};
      if (fx_d) params["d"] = *fx_d;
      if (fx_tau) params["tau"] = *fx_tau;
      if (fx_samples) params["samples"] = *fx_samples;
      if (fx_rng) params["rng_seed"] = *fx_rng;
      if (fx_timeout) params["timeout_seconds"] = *fx_timeout;
      req["params"] = params;
      emit(fx_c, api_explain_factual(s.context(), req), print_factual);
    } else if (*cf) {
      Session s(cf_c);
      Json req = base_request(cf_c);
      req["subject"] = cf_subject;
      req["kind"] = cf_kind;
      req["mode"] = cf_mode;
      if (!cf_seed.empty()) req["seed"] = cf_seed;
      if (!cf_baseline.empty()) req["baseline"] = cf_baseline;
      Json params = Json::object();
      if (cf_b) params["b"] = *cf_b;
      if (cf_gamma) params["gamma"] = *cf_gamma;
      if (cf_e) params["e"] = *cf_e;
      if (cf_t) params["t"] = *cf_t;
      if (cf_d) params["d"] = *cf_d;
      if (cf_timeout) params["timeout_seconds"] = *cf_timeout;
      req["params"] = params;
      emit(cf_c, api_explain_counterfactual(s.context(), req), print_counterfactual);
    } else if (*similar) {
      Session s(sim_c);
      Json req{{"keywords", sim_c.q}, {"t", sim_t}};
      if (!sim_exclude.empty()) req["exclude"] = sim_exclude;
      emit(sim_c, api_similar(s.context(), req), [](std::ostream& o, const Json& j) {
        for (const auto& e : j["skills"]) {
          o << fmt(e["similarity"].get<double>()) << '\t' << e["skill"].get<std::string>() << '\n';
        }
      });
    } else if (*eval_run) {
      const CollaborationNetwork net = load_network_dir(resolve_net(eval_net));
      EvalConfig config;
      if (!eval_config.empty()) {
        std::ifstream in(eval_config);
        if (!in) throw Error(ErrorCode::kIoError, "cannot read " + eval_config);
        std::stringstream ss;
        ss << in.rdbuf();
        config = parse_eval_config(ss.str());
      }
      const auto engine = make_engine(eval_ranker);
      const EvalReport report =
          run_protocol(*engine, net, config, fs::path(eval_net).lexically_normal().filename().string());
      if (eval_out.empty()) write_report_csv(report, out);
      for (const auto& path : eval_out) {
        std::ofstream f(path);
        if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
        if (fs::path(path).extension() == ".json") write_report_json(report, f);
        else write_report_csv(report, f);
      }
    } else if (*serve) {
      serve_cfg.data_dir = serve_data_dir;
      serve_cfg.ui_dir = serve_ui_dir;
      Service service(serve_cfg);
      const int port = service.bind();
      if (port < 0) {
        err << "cannot bind " << serve_cfg.host << ":" << serve_cfg.port << '\n';
        return 1;
      }
      out << "listening on http://" << serve_cfg.host << ":" << port << std::endl;
      g_service = &service;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      service.listen();
      g_service = nullptr;
    } else if (*fixtures_gen) {
      const CollaborationNetwork net = gen_t4 ? make_t4() : generate_synthetic(gen);
      save_network_dir(net, gen_out);
      out << "wrote " << net.num_nodes() << " nodes, " << net.num_edges() << " edges, "
          << net.num_skills() << " skills to " << gen_out << '\n';
    }
  } catch (const UnknownKeyword& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace exes
