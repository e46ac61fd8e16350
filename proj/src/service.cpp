#include "exes/service.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "exes/api.hpp"
#include "exes/error.hpp"
#include "exes/eval_harness.hpp"
#include "exes/serialize.hpp"

namespace exes {

namespace {

struct HttpError {
  int status;
  Json body;
};

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kDanglingEdge:
    case ErrorCode::kDuplicateNode:
    case ErrorCode::kSelfLoop:
      return 400;
    case ErrorCode::kUnknownNode:
      return 404;
    case ErrorCode::kDirectionMismatch:
      return 409;
    case ErrorCode::kTimeout:
      return 504;
    case ErrorCode::kIoError:
      return 500;
    case ErrorCode::kUnknownSkill:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOverlayConflict:
    case ErrorCode::kInfeasibleParameters:
    case ErrorCode::kDimensionTooLarge:
    case ErrorCode::kEmptyVocabulary:
    case ErrorCode::kNoCandidates:
    case ErrorCode::kOracleUnavailable:
    case ErrorCode::kInsufficientPopulation:
      return 422;
  }
  return 500;
}

// Runs `fn`, mapping failures to (status, body).
template <typename Fn>
std::pair<int, Json> guarded(Fn&& fn) {
  try {
    return {200, fn()};
  } catch (const HttpError& e) {
    return {e.status, e.body};
  } catch (const UnknownKeyword& e) {
    Json body = error_json(e);
    body["token"] = e.token();
    body["nearest"] = e.nearest();
    return {422, body};
  } catch (const Error& e) {
    return {http_status(e.code()), error_json(e)};
  } catch (const Json::exception& e) {
    return {400, Json{{"error", "ParseError"}, {"detail", e.what()}}};
  } catch (const std::exception& e) {
    return {500, Json{{"error", "Internal"}, {"detail", e.what()}}};
  }
}

void respond(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump(body), "application/json");
}

struct Job {
  std::string id;
  std::string status = "queued";  // queued | running | done | failed
  int http_status = 0;
  Json result;
};

class JobPool {
 public:
  JobPool(std::size_t workers, std::size_t max_queued) : max_queued_(max_queued) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, workers); ++i) {
      threads_.emplace_back([this] { work(); });
    }
  }
  ~JobPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  // Returns the job id, or empty when the queue is full.
  std::string submit(std::function<std::pair<int, Json>()> task) {
    std::lock_guard lock(mu_);
    if (queue_.size() >= max_queued_) return {};
    auto job = std::make_shared<Job>();
    job->id = "job-" + std::to_string(++counter_);
    jobs_[job->id] = job;
    queue_.emplace_back(job, std::move(task));
    cv_.notify_one();
    return job->id;
  }

  std::optional<Json> snapshot(const std::string& id) {
    std::lock_guard lock(mu_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    const Job& j = *it->second;
    Json out{{"id", j.id}, {"status", j.status}};
    if (j.status == "done") out["result"] = j.result;
    if (j.status == "failed") {
      out["error"] = j.result;
      out["http_status"] = j.http_status;
    }
    return out;
  }

 private:
  void work() {
    while (true) {
      std::shared_ptr<Job> job;
      std::function<std::pair<int, Json>()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        std::tie(job, task) = std::move(queue_.front());
        queue_.pop_front();
        job->status = "running";
      }
      auto [status, body] = task();
      std::lock_guard lock(mu_);
      job->http_status = status;
      job->status = status == 200 ? "done" : "failed";
      job->result = std::move(body);
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<std::shared_ptr<Job>, std::function<std::pair<int, Json>()>>> queue_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::thread> threads_;
  std::size_t max_queued_;
  std::uint64_t counter_ = 0;
  bool stopping_ = false;
};

struct NetworkEntry {
  NetworkEntry(std::string id_, CollaborationNetwork net_) : id(std::move(id_)), net(std::move(net_)) {}

  std::string id;
  CollaborationNetwork net;
  std::once_flag embedding_once;
  std::unique_ptr<SkillEmbedding> embedding;

  const SkillEmbedding& fitted_embedding() {
    std::call_once(embedding_once, [this] {
      embedding = std::make_unique<SkillEmbedding>(
          fit_embedding(net, default_embedding_dimension(net)));
    });
    return *embedding;
  }
};

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw HttpError{400, Json{{"error", "ParseError"}, {"detail", e.what()}}};
  }
}

}  // namespace

struct Service::State {
  std::unique_ptr<ProbeInterface> engine;
  std::unique_ptr<LinkPredictor> link_predictor;
  std::shared_mutex mu;
  std::map<std::string, std::shared_ptr<NetworkEntry>> networks;
  std::string latest;
  std::uint64_t counter = 0;
  JobPool jobs;

  State(const ServiceConfig& c)
      : engine(make_engine(c.ranker)),
        link_predictor(make_link_predictor(c.link_predictor)),
        jobs(c.workers, c.max_queued_jobs) {}

  std::shared_ptr<NetworkEntry> lookup(const std::string& id) {
    std::shared_lock lock(mu);
    const std::string key = id.empty() ? latest : id;
    const auto it = networks.find(key);
    if (it == networks.end()) {
      throw HttpError{404, Json{{"error", "UnknownNetwork"},
                                {"detail", key.empty() ? "no network loaded"
                                                       : "unknown network '" + key + "'"}}};
    }
    return it->second;
  }

  std::shared_ptr<NetworkEntry> lookup(const Json& body) {
    std::string id;
    if (body.is_object()) {
      const auto it = body.find("network_id");
      if (it != body.end() && it->is_string()) id = it->get<std::string>();
    }
    return lookup(id);
  }

  ApiContext context(NetworkEntry& entry) {
    ApiContext ctx;
    ctx.net = &entry.net;
    ctx.engine = engine.get();
    ctx.link_predictor = link_predictor.get();
    ctx.embedding = [&entry]() -> const SkillEmbedding& { return entry.fitted_embedding(); };
    return ctx;
  }
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      state_(std::make_unique<State>(config_)),
      server_(std::make_unique<httplib::Server>()) {
  if (!config_.data_dir.empty() && std::filesystem::is_directory(config_.data_dir)) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& e : std::filesystem::directory_iterator(config_.data_dir)) {
      if (e.is_directory() && std::filesystem::exists(e.path() / "nodes.tsv")) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) add_network(load_network_dir(d), d.filename().string());
  }

  const std::size_t threads = std::max<std::size_t>(2, config_.workers * 2);
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  State& st = *state_;
  auto maybe_async = [&st](auto fn) {
    return [&st, fn](const httplib::Request& req, httplib::Response& res) {
      Json body;
      std::shared_ptr<NetworkEntry> entry;
      auto [status, out] = guarded([&] {
        body = parse_body(req);
        entry = st.lookup(body);
        if (is_long_running(body)) return Json();
        return fn(st.context(*entry), body);
      });
      if (status == 200 && is_long_running(body)) {
        const std::string id = st.jobs.submit([&st, entry, body, fn] {
          return guarded([&] { return fn(st.context(*entry), body); });
        });
        if (id.empty()) {
          respond(res, 503, Json{{"error", "Busy"}, {"detail", "job queue full"}});
          return;
        }
        res.set_header("Location", "/jobs/" + id);
        respond(res, 202, Json{{"job_id", id}, {"status", "queued"}});
        return;
      }
      respond(res, status, out);
    };
  };
  server_->Post("/networks", [this](const httplib::Request& req, httplib::Response& res) {
    auto [status, out] = guarded([&] {
      std::string nodes, edges, skills;
      if (req.is_multipart_form_data()) {
        for (const char* key : {"nodes", "edges", "skills"}) {
          if (!req.has_file(key)) {
            throw Error(ErrorCode::kParseError, std::string("missing multipart part '") + key + "'");
          }
        }
        nodes = req.get_file_value("nodes").content;
        edges = req.get_file_value("edges").content;
        skills = req.get_file_value("skills").content;
      } else {
        const Json body = parse_body(req);
        for (const char* key : {"nodes", "edges", "skills"}) {
          if (!body.contains(key) || !body[key].is_string()) {
            throw Error(ErrorCode::kParseError, std::string("missing TSV field '") + key + "'");
          }
        }
        nodes = body["nodes"].get<std::string>();
        edges = body["edges"].get<std::string>();
        skills = body["skills"].get<std::string>();
      }
      CollaborationNetwork net = parse_network(nodes, edges, skills);
      Json summary = network_summary_json(net);
      summary["network_id"] = add_network(std::move(net));
      return summary;
    });
    respond(res, status == 200 ? 201 : status, out);
  });

  server_->Get("/networks", [&st](const httplib::Request&, httplib::Response& res) {
    Json list = Json::array();
    std::shared_lock lock(st.mu);
    for (const auto& [id, entry] : st.networks) {
      Json s = network_summary_json(entry->net);
      s["network_id"] = id;
      list.push_back(std::move(s));
    }
    respond(res, 200, Json{{"networks", list}});
  });

  server_->Get(R"(/networks/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    auto [status, out] = guarded([&] {
      auto entry = st.lookup(req.matches[1].str());
      Json s = network_summary_json(entry->net);
      s["network_id"] = entry->id;
      return s;
    });
    respond(res, status, out);
  });

  server_->Get(R"(/networks/([^/]+)/neighborhood)",
               [&st](const httplib::Request& req, httplib::Response& res) {
                 auto [status, out] = guarded([&] {
                   auto entry = st.lookup(req.matches[1].str());
                   Json body{{"subject", req.get_param_value("subject")}};
                   if (req.has_param("d")) body["d"] = std::stoull(req.get_param_value("d"));
                   return api_neighborhood(st.context(*entry), body);
                 });
                 respond(res, status, out);
               });

  server_->Post("/rank", maybe_async(api_rank));
  server_->Post("/team", maybe_async(api_team));
  server_->Post("/explain/factual", maybe_async(api_explain_factual));
  server_->Post("/explain/counterfactual", maybe_async(api_explain_counterfactual));

  server_->Get("/skills/similar", [&st](const httplib::Request& req, httplib::Response& res) {
    auto [status, out] = guarded([&] {
      Json body{{"q", req.get_param_value("q")}};
      if (req.has_param("t")) {
        try {
          body["t"] = std::stoull(req.get_param_value("t"));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidArgument, "t must be a non-negative integer");
        }
      }
      if (req.has_param("exclude")) body["exclude"] = req.get_param_value("exclude");
      auto entry = st.lookup(req.get_param_value("network_id"));
      return api_similar(st.context(*entry), body);
    });
    respond(res, status, out);
  });

  server_->Post("/eval/run", [&st](const httplib::Request& req, httplib::Response& res) {
    Json body;
    std::shared_ptr<NetworkEntry> entry;
    EvalConfig config;
    auto [status, out] = guarded([&] {
      body = parse_body(req);
      entry = st.lookup(body);
      config = parse_eval_config(body.contains("config") ? body["config"].dump() : "{}");
      return Json();
    });
    if (status != 200) {
      respond(res, status, out);
      return;
    }
    const std::string id = st.jobs.submit([&st, entry, config] {
      return guarded([&] {
        const EvalReport report = run_protocol(*st.engine, entry->net, config, entry->id);
        std::ostringstream json_out, csv_out;
        write_report_json(report, json_out);
        write_report_csv(report, csv_out);
        return Json{{"report", Json::parse(json_out.str())}, {"csv", csv_out.str()}};
      });
    });
    if (id.empty()) {
      respond(res, 503, Json{{"error", "Busy"}, {"detail", "job queue full"}});
      return;
    }
    res.set_header("Location", "/jobs/" + id);
    respond(res, 202, Json{{"job_id", id}, {"status", "queued"}});
  });

  server_->Get(R"(/jobs/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    const auto snap = st.jobs.snapshot(req.matches[1].str());
    if (!snap) {
      respond(res, 404, Json{{"error", "UnknownJob"}, {"detail", req.matches[1].str()}});
      return;
    }
    respond(res, 200, *snap);
  });

  server_->Get("/spec", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(openapi_document(), "application/json");
  });

  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    respond(res, 200, Json{{"status", "ok"}});
  });

  if (!config_.ui_dir.empty()) server_->set_mount_point("/ui", config_.ui_dir.string());
}

Service::~Service() { stop(); }

std::string Service::add_network(CollaborationNetwork net, std::string id) {
  std::unique_lock lock(state_->mu);
  if (id.empty()) id = "net-" + std::to_string(++state_->counter);
  state_->networks[id] = std::make_shared<NetworkEntry>(id, std::move(net));
  state_->latest = id;
  return id;
}

int Service::bind() {
  if (config_.port == 0) return server_->bind_to_any_port(config_.host);
  return server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

bool Service::listen() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

std::string openapi_document() {
  auto op = [](const char* summary, Json request, const char* response) {
    Json o{{"summary", summary},
           {"responses", Json{{"200", Json{{"description", response}}},
                              {"400", Json{{"description", "malformed request"}}},
                              {"404", Json{{"description", "unknown network or node"}}},
                              {"422", Json{{"description", "invalid field value"}}}}}};
    if (!request.is_null()) {
      o["requestBody"] = Json{
          {"content", Json{{"application/json", Json{{"schema", Json{{"type", "object"},
                                                                      {"properties", request}}}}}}}};
    }
    return o;
  };
  const Json str{{"type", "string"}};
  const Json integer{{"type", "integer"}};
  const Json number{{"type", "number"}};
  const Json keywords{{"type", "array"}, {"items", str}};
  const Json strings{{"type", "array"}, {"items", str}};
  const Json base{{"network_id", str}, {"keywords", keywords}, {"k", integer}};
  Json rank = base;
  rank["perturbations"] = strings;
  Json team{{"network_id", str}, {"keywords", keywords}, {"seed", str}, {"perturbations", strings}};
  Json factual = base;
  factual["subject"] = str;
  factual["facet"] = Json{{"type", "string"}, {"enum", {"skills", "query", "collaborations"}}};
  factual["mode"] = Json{{"type", "string"}, {"enum", {"search", "team"}}};
  factual["seed"] = str;
  factual["baseline"] = str;
  factual["async"] = Json{{"type", "boolean"}};
  factual["params"] = Json{{"type", "object"},
                           {"properties", Json{{"d", integer},
                                               {"tau", number},
                                               {"value", str},
                                               {"samples", integer},
                                               {"exact_threshold", integer},
                                               {"rng_seed", integer},
                                               {"timeout_seconds", number}}}};
  Json cf = factual;
  cf.erase("facet");
  cf["kind"] = Json{{"type", "string"},
                    {"enum", {"skill-add", "skill-rm", "query-promote", "query-demote", "link-add",
                              "link-rm"}}};
  cf["params"] = Json{{"type", "object"},
                      {"properties", Json{{"b", integer},
                                          {"gamma", integer},
                                          {"e", integer},
                                          {"t", integer},
                                          {"d", integer},
                                          {"timeout_seconds", number}}}};
  Json paths{
      {"/networks",
       Json{{"post", op("Upload a network (multipart nodes/edges/skills, or JSON with TSV text)",
                        Json{{"nodes", str}, {"edges", str}, {"skills", str}},
                        "network id and counts")},
            {"get", op("List loaded networks", nullptr, "network summaries")}}},
      {"/networks/{id}", Json{{"get", op("Network summary", nullptr, "counts and content hash")}}},
      {"/networks/{id}/neighborhood",
       Json{{"get", op("Nodes and edges within d hops of a subject", nullptr, "subgraph")}}},
      {"/rank", Json{{"post", op("Rank all nodes for a query", rank, "ranked list")}}},
      {"/team", Json{{"post", op("Form a team from a seed", team, "team")}}},
      {"/explain/factual",
       Json{{"post", op("Shapley attributions (202 + job id for baseline or async requests)",
                        factual, "factual explanation")}}},
      {"/explain/counterfactual",
       Json{{"post", op("Minimal perturbation sets that flip the subject's status", cf,
                        "counterfactual explanations; 409 on direction mismatch")}}},
      {"/skills/similar",
       Json{{"get", op("Skills nearest to the query centroid (?q=&t=&network_id=&exclude=)", nullptr,
                       "ordered skills")}}},
      {"/eval/run",
       Json{{"post", op("Run the evaluation protocol as a job", Json{{"network_id", str},
                                                                      {"config", Json{{"type", "object"}}}},
                        "202 with job id")}}},
      {"/jobs/{id}", Json{{"get", op("Poll a job", nullptr, "job status and result")}}},
      {"/health", Json{{"get", op("Liveness", nullptr, "ok")}}},
  };
  const Json doc{{"openapi", "3.0.3"},
                 {"info", Json{{"title", "exes"}, {"version", "1.0.0"}}},
                 {"paths", paths}};
  return dump(doc);
}

}  // namespace exes
