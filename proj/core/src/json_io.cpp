#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;

namespace {

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <typename T>
std::vector<T> list_or_empty(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  return j.at(key).get<std::vector<T>>();
}

}  // namespace

void to_json(json& j, const Timestamp& t) { j = to_iso8601(t); }

void from_json(const json& j, Timestamp& t) {
  auto parsed = parse_iso8601(j.get<std::string>());
  if (!parsed) throw Error("WrongType", "not an ISO-8601 UTC timestamp: " + j.dump());
  t = *parsed;
}

void to_json(json& j, const SubjectDescriptor& v) {
  j = json{{"actor_role", v.actor_role},
           {"registration_status", v.registration_status},
           {"relationship_to_patient", v.relationship_to_patient}};
}

void to_json(json& j, const ResourceDescriptor& v) {
  j = json{{"patient_id", v.patient_id}, {"record_scope", v.record_scope}, {"sensitivity", v.sensitivity}};
}

void to_json(json& j, const AccessRequest& v) {
  j = json{{"request_id", v.request_id}, {"subject", v.subject},       {"resource", v.resource},
           {"purpose", v.purpose},       {"consent", v.consent},       {"supervision", v.supervision},
           {"raw_narrative", v.raw_narrative}};
}

void from_json(const json& j, AccessRequest& v) {
  auto result = validate_request(j);
  if (auto* errors = std::get_if<std::vector<ValidationError>>(&result)) {
    const auto& first = errors->front();
    const char* code = first.kind == ValidationError::Kind::MissingField       ? "MissingField"
                       : first.kind == ValidationError::Kind::UnknownEnumValue ? "UnknownEnumValue"
                       : first.kind == ValidationError::Kind::WrongType        ? "WrongType"
                                                                                : "EmptyNarrative";
    throw Error(code, first.message());
  }
  v = std::get<AccessRequest>(std::move(result));
}

void to_json(json& j, const ValidationError& v) {
  static constexpr const char* kinds[] = {"MissingField", "UnknownEnumValue", "WrongType", "EmptyNarrative"};
  j = json{{"kind", kinds[static_cast<int>(v.kind)]}, {"field", v.field}, {"message", v.message()}};
  if (!v.value.empty()) j["value"] = v.value;
}

void to_json(json& j, const ProvisionCitation& v) {
  j = json{{"provision_id", v.provision_id}, {"detail", v.detail}};
}

void from_json(const json& j, ProvisionCitation& v) {
  v.provision_id = j.value("provision_id", "");
  v.detail = j.value("detail", "");
}

void to_json(json& j, const Verdict& v) {
  j = json{{"kind", v.kind},
           {"obligations", v.obligations},
           {"recommendations", v.recommendations},
           {"rationale", v.rationale}};
}

void from_json(const json& j, Verdict& v) {
  j.at("kind").get_to(v.kind);
  v.obligations = list_or_empty<std::string>(j, "obligations");
  v.recommendations = list_or_empty<std::string>(j, "recommendations");
  v.rationale = list_or_empty<ProvisionCitation>(j, "rationale");
}

void to_json(json& j, const ConditionCheck& v) { j = json{{"condition", v.condition}, {"status", v.status}}; }

void from_json(const json& j, ConditionCheck& v) {
  j.at("condition").get_to(v.condition);
  j.at("status").get_to(v.status);
}

void to_json(json& j, const ProvisionMatch& v) {
  j = json{{"provision_id", v.provision_id},
           {"source_act", v.source_act},
           {"effect", v.effect},
           {"priority", v.priority},
           {"attribute_checks", v.attribute_checks},
           {"context_conditions", v.context_conditions},
           {"emergency_overridable", v.emergency_overridable}};
}

void from_json(const json& j, ProvisionMatch& v) {
  j.at("provision_id").get_to(v.provision_id);
  j.at("source_act").get_to(v.source_act);
  j.at("effect").get_to(v.effect);
  j.at("priority").get_to(v.priority);
  v.attribute_checks = list_or_empty<ConditionCheck>(j, "attribute_checks");
  v.context_conditions = list_or_empty<Condition>(j, "context_conditions");
  v.emergency_overridable = j.value("emergency_overridable", false);
}

void to_json(json& j, const ContextSnapshot& v) {
  j = json{{"situation", v.situation},
           {"urgency", v.urgency},
           {"location", v.location},
           {"device", v.device},
           {"timestamp", v.timestamp}};
}

void from_json(const json& j, ContextSnapshot& v) {
  j.at("situation").get_to(v.situation);
  j.at("urgency").get_to(v.urgency);
  j.at("location").get_to(v.location);
  j.at("device").get_to(v.device);
  j.at("timestamp").get_to(v.timestamp);
}

void to_json(json& j, const ChannelVerdict& v) {
  j = json{{"channel", v.channel}, {"stance", v.stance}, {"conditions", v.conditions}, {"basis", v.basis}};
}

void from_json(const json& j, ChannelVerdict& v) {
  j.at("channel").get_to(v.channel);
  j.at("stance").get_to(v.stance);
  v.conditions = list_or_empty<ConditionCheck>(j, "conditions");
  v.basis = list_or_empty<ProvisionCitation>(j, "basis");
}

void to_json(json& j, const Conflict& v) {
  j = json{{"between", json::array({v.first, v.second})}, {"kind", v.kind}, {"detail", v.detail}};
}

void from_json(const json& j, Conflict& v) {
  const auto& between = j.at("between");
  v = make_conflict(between.at(0).get<Party>(), between.at(1).get<Party>(), j.at("kind").get<ConflictKind>(),
                    j.value("detail", ""));
}

void to_json(json& j, const BackendFault& v) {
  j = json{{"kind", v.kind}, {"message", v.message}, {"fallback_used", v.fallback_used}};
}

void from_json(const json& j, BackendFault& v) {
  j.at("kind").get_to(v.kind);
  v.message = j.value("message", "");
  v.fallback_used = j.value("fallback_used", true);
}

void to_json(json& j, const Decision& v) {
  j = json{{"request_id", v.request_id},
           {"stage", v.stage},
           {"request", v.request},
           {"verdict", v.verdict},
           {"channels", v.channels},
           {"matches", v.matches},
           {"context", v.context},
           {"conflicts", v.conflicts},
           {"backend_id", v.backend_id},
           {"backend_deterministic", v.backend_deterministic},
           {"backend_raw_response", optional_to_json(v.backend_raw_response)},
           {"backend_fault", optional_to_json(v.backend_fault)},
           {"draft_verdict", optional_to_json(v.draft_verdict)},
           {"reviewer", optional_to_json(v.reviewer)},
           {"produced_at", v.produced_at}};
}

void from_json(const json& j, Decision& v) {
  j.at("request_id").get_to(v.request_id);
  j.at("stage").get_to(v.stage);
  j.at("request").get_to(v.request);
  j.at("verdict").get_to(v.verdict);
  v.channels = list_or_empty<ChannelVerdict>(j, "channels");
  v.matches = list_or_empty<ProvisionMatch>(j, "matches");
  j.at("context").get_to(v.context);
  v.conflicts = list_or_empty<Conflict>(j, "conflicts");
  v.backend_id = j.value("backend_id", "");
  v.backend_deterministic = j.value("backend_deterministic", true);
  v.backend_raw_response = optional_from_json<std::string>(j, "backend_raw_response");
  v.backend_fault = optional_from_json<BackendFault>(j, "backend_fault");
  v.draft_verdict = optional_from_json<Verdict>(j, "draft_verdict");
  v.reviewer = optional_from_json<std::string>(j, "reviewer");
  j.at("produced_at").get_to(v.produced_at);
}

}  // namespace ontoguard
