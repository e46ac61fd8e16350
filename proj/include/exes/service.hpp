#pragma once

// HTTP front end. Networks are immutable once uploaded; each gets its own
// lazily fitted skill embedding. Baseline-scale requests and evaluation runs
// go through a bounded job pool and are polled via GET /jobs/{id}.

#include <filesystem>
#include <memory>
#include <string>

#include "exes/corpus.hpp"

namespace httplib {
class Server;
}

namespace exes {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 2;
  std::size_t max_queued_jobs = 64;
  std::string ranker = "reference";
  std::string link_predictor = "adamic-adar";
  // Subdirectories holding nodes.tsv/edges.tsv/skills.tsv are preloaded,
  // named after the directory.
  std::filesystem::path data_dir;
  // Static assets served under /ui when set.
  std::filesystem::path ui_dir;
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Returns the id under which the network is served ("net-<n>" when empty).
  std::string add_network(CollaborationNetwork net, std::string id = {});

  // Binds the listening socket; port 0 picks a free port. Returns the port
  // or -1.
  int bind();
  // Serves until stop(); requires bind().
  bool listen();
  void stop();

  const ServiceConfig& config() const { return config_; }

 private:
  struct State;
  ServiceConfig config_;
  std::unique_ptr<State> state_;
  std::unique_ptr<httplib::Server> server_;
};

// OpenAPI description of the endpoints.
std::string openapi_document();

}  // namespace exes
