#include "ontoguard/net/http_transport.hpp"

#include <chrono>

#include <httplib.h>

#include "ontoguard/error.hpp"

namespace ontoguard::net {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;
};

Endpoint split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("base URL lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

}  // namespace

std::string HttpChatTransport::complete(const LlmConfig& config, const std::string& prompt) {
  const Endpoint ep = split_url(config.base_url);
  httplib::Client client(ep.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(ep.path_prefix + "/chat/completions", headers, chat_request_body(config, prompt).dump(),
                         "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && std::chrono::steady_clock::now() - started >= config.timeout);
    if (timed_out) throw Timeout("chat completion timed out after " + std::to_string(config.timeout.count()) + " ms");
    throw TransportError("chat completion failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("chat completion returned HTTP " + std::to_string(res->status));
  }
  return chat_response_text(res->body);
}

std::shared_ptr<DecisionBackend> make_backend(const std::string& name, const std::string& mock_script,
                                              std::optional<LlmConfig> llm,
                                              std::shared_ptr<ChatTransport> transport) {
  if (name == "deterministic") return std::make_shared<DeterministicBackend>();
  if (name == "mock") {
    if (mock_script.empty()) throw BackendUnavailable("the mock backend needs a script");
    return std::make_shared<MockBackend>(MockBackend::from_file(mock_script));
  }
  if (name == "llm") {
    if (!llm) llm = LlmConfig::from_env();
    if (!llm) throw BackendUnavailable("ONTOGUARD_LLM_BASE_URL is not set");
    if (!transport) transport = std::make_shared<HttpChatTransport>();
    return std::make_shared<LlmBackend>(*llm, std::move(transport));
  }
  throw BackendUnavailable("unknown backend '" + name + "'");
}

}  // namespace ontoguard::net
