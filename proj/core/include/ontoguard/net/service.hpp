#pragma once

// JSON-over-HTTP front end for the engine, review queue, audit trail and
// evaluation runs. No authentication: reviewer ids are trusted labels.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ontoguard/backend.hpp"
#include "ontoguard/engine.hpp"

namespace ontoguard::net {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks any free port
  std::optional<std::filesystem::path> journal_path;
  std::filesystem::path policies_dir = "policies";
  std::string backend = "deterministic";
  std::string mock_script;
  std::optional<LlmConfig> llm;
  std::shared_ptr<ChatTransport> transport;
  const Clock* clock = nullptr;
  unsigned eval_jobs = 1;
};

class Service {
 public:
  // Loads and validates the policies, opens the journal and builds the
  // backend. Throws CorpusInvalid, JournalUnwritable, BackendUnavailable.
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Throws PortInUse.
  void start();
  // Blocks until stop() is called from elsewhere.
  void wait();
  void stop();

  int port() const;
  Engine& engine();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ontoguard::net
