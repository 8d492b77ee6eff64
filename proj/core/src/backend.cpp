#include "ontoguard/backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"
#include "ontoguard/rules.hpp"

namespace ontoguard {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lowercase(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

bool has_remediation_verb(std::string_view sentence) {
  const std::string lower = lowercase(std::string(sentence));
  for (auto verb : {"seek", "obtain", "need to"}) {
    if (lower.find(verb) != std::string::npos) return true;
  }
  return false;
}

// Sentences keep their terminal punctuation.
std::vector<std::string> split_sentences(std::string_view prose) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < prose.size(); ++i) {
    current += prose[i];
    const char ch = prose[i];
    const bool terminal = ch == '.' || ch == '!' || ch == '?';
    const bool boundary = i + 1 == prose.size() || std::isspace(static_cast<unsigned char>(prose[i + 1]));
    if (terminal && boundary) {
      auto s = trim(current);
      if (!s.empty()) out.push_back(s);
      current.clear();
    }
  }
  auto s = trim(current);
  if (!s.empty()) out.push_back(s);
  return out;
}

std::optional<ProvisionCitation> parse_cited_line(std::string_view line) {
  if (!starts_with_ci(line, "cited:")) return std::nullopt;
  std::string rest = trim(line.substr(6));
  ProvisionCitation c;
  if (rest.empty()) return c;
  std::string tail;
  if (rest.front() == '(') {
    tail = rest;
  } else {
    auto sp = rest.find(' ');
    c.provision_id = rest.substr(0, sp);
    tail = sp == std::string::npos ? "" : trim(rest.substr(sp + 1));
  }
  if (tail.size() >= 2 && tail.front() == '(' && tail.back() == ')') {
    c.detail = tail.substr(1, tail.size() - 2);
  } else {
    c.detail = tail;
  }
  return c;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string fixed_line(std::string_view label, std::string_view value) {
  return std::string(label) + ": " + std::string(value) + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

std::string render_prompt(const AccessRequest& r, const std::vector<ProvisionMatch>& matches,
                          const ContextSnapshot& ctx) {
  std::string out;
  out += fixed_line("Scenario", trim(r.raw_narrative));
  out += fixed_line("Requester", std::string(to_string(r.subject.actor_role)) + " (" +
                                     std::string(to_string(r.subject.registration_status)) + ")");
  out += fixed_line("Relationship to patient", to_string(r.subject.relationship_to_patient));
  out += fixed_line("Resource", std::string(to_string(r.resource.record_scope)) + " of patient " +
                                    r.resource.patient_id + " (" + std::string(to_string(r.resource.sensitivity)) +
                                    ")");
  out += fixed_line("Purpose", to_string(r.purpose));
  out += fixed_line("Consent", to_string(r.consent));
  out += fixed_line("Supervision", to_string(r.supervision));
  out += fixed_line("Context", "situation=" + std::string(to_string(ctx.situation)) +
                                   ", urgency=" + std::string(to_string(ctx.urgency)) +
                                   ", location=" + std::string(to_string(ctx.location)) +
                                   ", device=" + std::string(to_string(ctx.device)));
  out += "Governing provisions:\n";
  int n = 0;
  for (const auto& m : matches) {
    out += std::to_string(++n) + ". " + m.provision_id + " [" + std::string(to_string(m.source_act)) + "] " +
           std::string(to_string(m.effect)) + ", " + std::string(to_string(m.priority));
    std::vector<std::string> parts;
    for (const auto& c : m.attribute_checks) {
      parts.push_back(std::string(to_string(c.condition)) + " (" + std::string(to_string(c.status)) + ")");
    }
    for (auto c : m.context_conditions) parts.emplace_back(to_string(c));
    if (m.emergency_overridable) parts.emplace_back(to_string(Condition::EmergencyOverridable));
    if (!parts.empty()) {
      out += "; conditions: ";
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    }
    out += "\n";
  }
  if (std::ranges::none_of(matches, [](const ProvisionMatch& m) { return m.is_authorizing(); })) {
    out += "No authorizing provision matched.\n";
  }
  out +=
      "Answer with \"Access granted\", \"Access granted with conditions\" or \"Access denied\", then list "
      "obligations or recommendations as \"- \" lines and cite provisions as \"Cited: <provision id> "
      "(<reason>)\".\n";
  out += "Is access granted?\n";
  return out;
}

BackendVerdict parse_response(const std::string& text) {
  if (trim(text).empty()) throw UnparseableResponse("empty response");

  std::vector<std::string> bullets;
  std::vector<ProvisionCitation> citations;
  std::string prose;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (auto c = parse_cited_line(t)) {
      citations.push_back(*c);
    } else if (t.rfind("- ", 0) == 0 || t.rfind("* ", 0) == 0) {
      auto item = trim(t.substr(2));
      if (!item.empty()) bullets.push_back(item);
    } else {
      prose += (prose.empty() ? "" : " ") + t;
    }
  }

  BackendVerdict out;
  out.raw_response = text;
  Verdict& v = out.verdict;
  v.rationale = citations;

  std::optional<VerdictKind> anchored;
  std::size_t anchor_len = 0;
  if (starts_with_ci(prose, "access granted with conditions")) {
    anchored = VerdictKind::ConditionalGrant;
    anchor_len = 30;
  } else if (starts_with_ci(prose, "access granted")) {
    anchored = VerdictKind::Grant;
    anchor_len = 14;
  } else if (starts_with_ci(prose, "access denied")) {
    anchored = VerdictKind::Deny;
    anchor_len = 13;
  }

  if (anchored) {
    std::string remainder = prose.substr(anchor_len);
    auto start = remainder.find_first_not_of(" .,:;!-");
    remainder = start == std::string::npos ? "" : remainder.substr(start);
    auto sentences = split_sentences(remainder);
    v.kind = *anchored;
    auto& items = v.kind == VerdictKind::Deny ? v.recommendations : v.obligations;
    for (auto& s : sentences) {
      if (v.kind != VerdictKind::Deny || has_remediation_verb(s)) items.push_back(s);
    }
    for (auto& b : bullets) items.push_back(b);
    return out;
  }

  auto sentences = split_sentences(prose);
  const bool remedial = std::ranges::any_of(sentences, has_remediation_verb) ||
                        std::ranges::any_of(bullets, has_remediation_verb);
  if (!remedial) throw UnparseableResponse(text.substr(0, 200));
  v.kind = VerdictKind::Deny;
  v.recommendations = sentences;
  for (auto& b : bullets) v.recommendations.push_back(b);
  return out;
}

std::string canonical_render(const Verdict& v) {
  std::string out;
  switch (v.kind) {
    case VerdictKind::Grant:
      out = "Access granted.\n";
      break;
    case VerdictKind::ConditionalGrant:
      out = "Access granted with conditions.\n";
      break;
    case VerdictKind::Deny:
      out = "Access denied.\n";
      break;
  }
  for (const auto& o : v.obligations) out += "- " + o + "\n";
  for (const auto& r : v.recommendations) out += "- " + r + "\n";
  for (const auto& c : v.rationale) {
    out += "Cited: ";
    if (!c.provision_id.empty()) out += c.provision_id + " ";
    out += "(" + c.detail + ")\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

BackendVerdict deterministic_decide(const DecisionInput& in) {
  const auto start = std::chrono::steady_clock::now();
  auto channels = evaluate_channels(in.attributes, in.context, in.matches);
  BackendVerdict out;
  out.verdict = rule_verdict({in.request, channels, in.matches, in.context});
  out.latency_ms = elapsed_ms(start);
  return out;
}

BackendVerdict DeterministicBackend::decide(const DecisionInput& input) { return deterministic_decide(input); }

namespace {

BackendVerdict fallback_after(FaultKind kind, const std::string& message, const DecisionInput& input,
                              std::optional<std::string> raw) {
  BackendVerdict out = deterministic_decide(input);
  out.fault = BackendFault{kind, message, true};
  out.raw_response = std::move(raw);
  return out;
}

}  // namespace

MockBackend::MockBackend(std::map<std::string, std::string> responses, std::optional<std::string> fallback_text)
    : responses_(std::move(responses)), default_(std::move(fallback_text)) {}

MockBackend MockBackend::from_json(const json& script) {
  if (!script.is_object()) throw BackendUnavailable("mock script must be an object");
  std::map<std::string, std::string> responses;
  if (script.contains("responses")) {
    for (const auto& [id, text] : script.at("responses").items()) responses[id] = text.get<std::string>();
  }
  std::optional<std::string> fallback;
  if (script.contains("default") && script.at("default").is_string()) fallback = script.at("default").get<std::string>();
  return MockBackend(std::move(responses), std::move(fallback));
}

MockBackend MockBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailable("cannot read mock script " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw BackendUnavailable("invalid mock script " + path + ": " + e.what());
  }
}

BackendVerdict MockBackend::decide(const DecisionInput& input) {
  const auto start = std::chrono::steady_clock::now();
  const std::string* text = nullptr;
  if (auto it = responses_.find(input.request.request_id); it != responses_.end()) {
    text = &it->second;
  } else if (default_) {
    text = &*default_;
  }
  if (text == nullptr) throw BackendUnavailable("no scripted response for " + input.request.request_id);
  try {
    BackendVerdict out = parse_response(*text);
    out.latency_ms = elapsed_ms(start);
    return out;
  } catch (const UnparseableResponse& e) {
    return fallback_after(FaultKind::UnparseableResponse, e.what(), input, *text);
  }
}

// ---------------------------------------------------------------------------

std::optional<LlmConfig> LlmConfig::from_env() {
  const char* base = std::getenv("ONTOGUARD_LLM_BASE_URL");
  if (base == nullptr || *base == '\0') return std::nullopt;
  LlmConfig c;
  c.base_url = base;
  if (const char* key = std::getenv("ONTOGUARD_LLM_API_KEY")) c.api_key = key;
  if (const char* model = std::getenv("ONTOGUARD_LLM_MODEL"); model && *model) c.model = model;
  if (const char* t = std::getenv("ONTOGUARD_LLM_TIMEOUT_MS"); t && *t) {
    char* end = nullptr;
    long ms = std::strtol(t, &end, 10);
    if (end != t && ms > 0) c.timeout = std::chrono::milliseconds(ms);
  }
  return c;
}

json chat_request_body(const LlmConfig& config, const std::string& prompt) {
  return json{{"model", config.model}, {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
}

std::string chat_response_text(const std::string& body) {
  try {
    auto j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw UnparseableResponse(std::string("malformed chat completion: ") + e.what());
  }
}

ScriptedTransport::ScriptedTransport(std::vector<Step> steps, bool repeat_last)
    : steps_(std::move(steps)), repeat_last_(repeat_last) {}

std::string ScriptedTransport::complete(const LlmConfig& /*config*/, const std::string& prompt) {
  Step step;
  {
    std::lock_guard lock(mu_);
    prompts_.push_back(prompt);
    if (steps_.empty() || (next_ >= steps_.size() && !repeat_last_)) throw TransportError("script exhausted");
    step = steps_[std::min(next_, steps_.size() - 1)];
    ++next_;
  }
  switch (step.kind) {
    case Step::Kind::Timeout:
      throw Timeout("scripted timeout");
    case Step::Kind::TransportError:
      throw TransportError(step.text.empty() ? "scripted transport error" : step.text);
    case Step::Kind::Reply:
      break;
  }
  return step.text;
}

std::vector<std::string> ScriptedTransport::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

LlmBackend::LlmBackend(LlmConfig config, std::shared_ptr<ChatTransport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      in_flight_(std::clamp(config_.max_in_flight, 1, 1024)) {}

BackendVerdict LlmBackend::decide(const DecisionInput& input) {
  const auto start = std::chrono::steady_clock::now();
  const std::string prompt = render_prompt(input.request, input.matches, input.context);
  std::optional<std::string> raw;
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{in_flight_};
  try {
    if (!transport_) throw TransportError("no transport configured");
    raw = transport_->complete(config_, prompt);
    BackendVerdict out = parse_response(*raw);
    out.latency_ms = elapsed_ms(start);
    return out;
  } catch (const Timeout& e) {
    return fallback_after(FaultKind::Timeout, e.what(), input, raw);
  } catch (const UnparseableResponse& e) {
    return fallback_after(FaultKind::UnparseableResponse, e.what(), input, raw);
  } catch (const std::exception& e) {
    return fallback_after(FaultKind::TransportError, e.what(), input, raw);
  }
}

}  // namespace ontoguard
