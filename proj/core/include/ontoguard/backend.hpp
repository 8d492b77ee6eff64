#pragma once

// Decision backends: the deterministic rule backend, a scripted mock and an
// LLM client over a pluggable chat transport.

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "ontoguard/caabac.hpp"
#include "ontoguard/domain.hpp"

namespace ontoguard {

struct BackendCapabilities {
  bool supports_free_text = false;
  bool deterministic = true;
};

struct DecisionInput {
  const AccessRequest& request;
  const AttributeSet& attributes;
  const ContextSnapshot& context;
  const std::vector<ProvisionMatch>& matches;
};

struct BackendVerdict {
  Verdict verdict;
  std::optional<std::string> raw_response;
  double latency_ms = 0.0;
  std::optional<BackendFault> fault;  // set when a fallback produced the verdict
};

class DecisionBackend {
 public:
  virtual ~DecisionBackend() = default;
  virtual std::string id() const = 0;
  virtual BackendCapabilities capabilities() const = 0;
  // Throws BackendUnavailable when the backend cannot produce any verdict.
  virtual BackendVerdict decide(const DecisionInput& input) = 0;
};

// ---------------------------------------------------------------------------
// Text boundary

std::string render_prompt(const AccessRequest& request, const std::vector<ProvisionMatch>& matches,
                          const ContextSnapshot& context);

// Throws UnparseableResponse.
BackendVerdict parse_response(const std::string& text);

// Verdict-to-text template; parse_response inverts it.
std::string canonical_render(const Verdict& v);

// ---------------------------------------------------------------------------

class DeterministicBackend final : public DecisionBackend {
 public:
  std::string id() const override { return "deterministic"; }
  BackendCapabilities capabilities() const override { return {false, true}; }
  BackendVerdict decide(const DecisionInput& input) override;
};

BackendVerdict deterministic_decide(const DecisionInput& input);

// Replays scripted response texts keyed by request_id; a `default` text
// covers every other request.
class MockBackend final : public DecisionBackend {
 public:
  MockBackend(std::map<std::string, std::string> responses, std::optional<std::string> fallback_text);

  // {"default": str?, "responses": {request_id: str}}
  static MockBackend from_json(const nlohmann::json& script);
  static MockBackend from_file(const std::string& path);

  std::string id() const override { return "mock"; }
  BackendCapabilities capabilities() const override { return {true, true}; }
  BackendVerdict decide(const DecisionInput& input) override;

 private:
  std::map<std::string, std::string> responses_;
  std::optional<std::string> default_;
};

struct LlmConfig {
  std::string base_url;
  std::string api_key;
  std::string model = "gpt-4";
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;

  // Reads the ONTOGUARD_LLM_* variables; nullopt when no base URL is set.
  static std::optional<LlmConfig> from_env();
};

// One chat-completion round trip. Throws Timeout or TransportError.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const LlmConfig& config, const std::string& prompt) = 0;
};

nlohmann::json chat_request_body(const LlmConfig& config, const std::string& prompt);
// Extracts the first choice's message content; throws UnparseableResponse.
std::string chat_response_text(const std::string& body);

// Returns scripted answers or injected faults, for tests.
class ScriptedTransport final : public ChatTransport {
 public:
  struct Step {
    enum class Kind { Reply, Timeout, TransportError } kind = Kind::Reply;
    std::string text;
  };

  explicit ScriptedTransport(std::vector<Step> steps, bool repeat_last = true);
  std::string complete(const LlmConfig& config, const std::string& prompt) override;

  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mu_;
  std::vector<Step> steps_;
  std::size_t next_ = 0;
  bool repeat_last_;
  std::vector<std::string> prompts_;
};

class LlmBackend final : public DecisionBackend {
 public:
  LlmBackend(LlmConfig config, std::shared_ptr<ChatTransport> transport);

  std::string id() const override { return "llm:" + config_.model; }
  BackendCapabilities capabilities() const override { return {true, false}; }
  // Never throws for transport or parse failures: falls back to the
  // deterministic backend and records the fault.
  BackendVerdict decide(const DecisionInput& input) override;

  const LlmConfig& config() const { return config_; }

 private:
  LlmConfig config_;
  std::shared_ptr<ChatTransport> transport_;
  std::counting_semaphore<1024> in_flight_;
};

}  // namespace ontoguard
