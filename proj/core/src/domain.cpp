#include "ontoguard/domain.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace ontoguard {

std::string to_iso8601(Timestamp t) {
  std::int64_t secs = t.millis / 1000;
  std::int64_t ms = t.millis % 1000;
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  std::string s(text);
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
    return std::nullopt;
  }
  std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    int digits = 0;
    while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
      if (digits < 3) ms = ms * 10 + (rest.front() - '0');
      ++digits;
      rest.remove_prefix(1);
    }
    if (digits == 0) return std::nullopt;
    for (int d = digits; d < 3; ++d) ms *= 10;
  }
  if (rest != "Z") return std::nullopt;
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  return Timestamp{static_cast<std::int64_t>(secs) * 1000 + ms};
}

Timestamp SystemClock::now() const {
  using namespace std::chrono;
  return Timestamp{duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()};
}

const Clock& system_clock() {
  static const SystemClock clock;
  return clock;
}

std::string new_request_id() {
  static std::atomic<std::uint64_t> last{0};
  using namespace std::chrono;
  const auto now = static_cast<std::uint64_t>(
      duration_cast<microseconds>(std::chrono::system_clock::now().time_since_epoch()).count());
  std::uint64_t prev = last.load(std::memory_order_relaxed);
  std::uint64_t next = 0;
  do {
    next = std::max(prev + 1, now);
  } while (!last.compare_exchange_weak(prev, next, std::memory_order_relaxed));
  char buf[24];
  std::snprintf(buf, sizeof buf, "req-%016llx", static_cast<unsigned long long>(next));
  return buf;
}

// ---------------------------------------------------------------------------

std::string ValidationError::message() const {
  switch (kind) {
    case Kind::MissingField:
      return "MissingField(" + field + ")";
    case Kind::UnknownEnumValue:
      return "UnknownEnumValue(" + field + ", " + value + ")";
    case Kind::WrongType:
      return "WrongType(" + field + ", " + value + ")";
    case Kind::EmptyNarrative:
      return "EmptyNarrative";
  }
  return "ValidationError";
}

namespace {

using nlohmann::json;

class RequestReader {
 public:
  const json* member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
      errors.push_back({ValidationError::Kind::MissingField, path, {}});
      return nullptr;
    }
    return &obj.at(key);
  }

  std::optional<std::string> string_field(const json& obj, const std::string& key, const std::string& path) {
    const json* v = member(obj, key, path);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      errors.push_back({ValidationError::Kind::WrongType, path, v->dump()});
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  template <typename E>
  std::optional<E> enum_field(const json& obj, const std::string& key, const std::string& path) {
    auto s = string_field(obj, key, path);
    if (!s) return std::nullopt;
    auto e = enum_from_string<E>(*s);
    if (!e) errors.push_back({ValidationError::Kind::UnknownEnumValue, path, *s});
    return e;
  }

  const json* object_field(const json& obj, const std::string& key) {
    const json* v = member(obj, key, key);
    if (v != nullptr && !v->is_object()) {
      errors.push_back({ValidationError::Kind::WrongType, key, v->dump()});
      return nullptr;
    }
    return v;
  }

  std::vector<ValidationError> errors;
};

}  // namespace

RequestValidation validate_request(const nlohmann::json& candidate) {
  RequestReader r;
  if (!candidate.is_object()) {
    return std::vector<ValidationError>{{ValidationError::Kind::WrongType, "request", candidate.type_name()}};
  }
  AccessRequest req;

  auto id = r.string_field(candidate, "request_id", "request_id");
  if (id && id->empty()) r.errors.push_back({ValidationError::Kind::MissingField, "request_id", {}});
  if (id) req.request_id = *id;

  if (const json* subject = r.object_field(candidate, "subject")) {
    if (auto v = r.enum_field<Role>(*subject, "actor_role", "subject.actor_role")) req.subject.actor_role = *v;
    if (auto v = r.enum_field<RegistrationStatus>(*subject, "registration_status", "subject.registration_status"))
      req.subject.registration_status = *v;
    if (auto v = r.enum_field<Relationship>(*subject, "relationship_to_patient", "subject.relationship_to_patient"))
      req.subject.relationship_to_patient = *v;
  }
  if (const json* resource = r.object_field(candidate, "resource")) {
    if (auto v = r.string_field(*resource, "patient_id", "resource.patient_id")) req.resource.patient_id = *v;
    if (auto v = r.enum_field<RecordScope>(*resource, "record_scope", "resource.record_scope"))
      req.resource.record_scope = *v;
    if (auto v = r.enum_field<Sensitivity>(*resource, "sensitivity", "resource.sensitivity"))
      req.resource.sensitivity = *v;
  }
  if (auto v = r.enum_field<Purpose>(candidate, "purpose", "purpose")) req.purpose = *v;
  if (auto v = r.enum_field<Consent>(candidate, "consent", "consent")) req.consent = *v;
  if (auto v = r.enum_field<Supervision>(candidate, "supervision", "supervision")) req.supervision = *v;

  if (auto v = r.string_field(candidate, "raw_narrative", "raw_narrative")) {
    if (v->find_first_not_of(" \t\r\n") == std::string::npos) {
      r.errors.push_back({ValidationError::Kind::EmptyNarrative, "raw_narrative", {}});
    }
    req.raw_narrative = *v;
  }

  if (!r.errors.empty()) return std::move(r.errors);
  return req;
}

// ---------------------------------------------------------------------------

std::optional<std::string> verdict_violation(const Verdict& v) {
  if (v.kind != VerdictKind::Deny && !v.recommendations.empty()) {
    return std::string(to_string(v.kind)) + " verdict carries recommendations";
  }
  if (v.kind == VerdictKind::Deny && !v.obligations.empty()) {
    return "Deny verdict carries obligations";
  }
  return std::nullopt;
}

std::vector<ConditionCheck> ProvisionMatch::unmet() const {
  std::vector<ConditionCheck> out;
  for (const auto& c : attribute_checks) {
    if (c.status != ConditionStatus::Satisfied) out.push_back(c);
  }
  return out;
}

bool ProvisionMatch::viable() const {
  if (!is_authorizing()) return false;
  return std::ranges::all_of(attribute_checks, [](const ConditionCheck& c) {
    return c.status == ConditionStatus::Satisfied || is_remediable(c.condition);
  });
}

bool context_consistent(const ContextSnapshot& c) {
  return c.situation != Situation::Emergency || c.urgency == Urgency::High || c.urgency == Urgency::Critical;
}

Conflict make_conflict(Party a, Party b, ConflictKind kind, std::string detail) {
  if (b < a) std::swap(a, b);
  return Conflict{a, b, kind, std::move(detail)};
}

const ChannelVerdict* Decision::channel(Channel c) const {
  for (const auto& cv : channels) {
    if (cv.channel == c) return &cv;
  }
  return nullptr;
}

}  // namespace ontoguard
