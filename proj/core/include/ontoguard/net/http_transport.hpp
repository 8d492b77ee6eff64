#pragma once

#include <memory>
#include <string>

#include "ontoguard/backend.hpp"

namespace ontoguard::net {

// POSTs {model, messages} to <base_url>/chat/completions.
class HttpChatTransport final : public ChatTransport {
 public:
  std::string complete(const LlmConfig& config, const std::string& prompt) override;
};

// "deterministic", "mock" (needs a script path) or "llm" (needs
// ONTOGUARD_LLM_BASE_URL unless `llm` is given). Throws BackendUnavailable.
std::shared_ptr<DecisionBackend> make_backend(const std::string& name, const std::string& mock_script = {},
                                              std::optional<LlmConfig> llm = std::nullopt,
                                              std::shared_ptr<ChatTransport> transport = nullptr);

}  // namespace ontoguard::net
