#pragma once

// JSON encodings for the domain types. Enums are written as their wire
// spellings, timestamps as ISO-8601 strings, absent optionals as null.

#include <concepts>
#include <string>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "ontoguard/domain.hpp"
#include "ontoguard/error.hpp"

namespace ontoguard {

template <typename E>
concept NamedEnum = std::is_enum_v<E> && requires { EnumNames<E>::entries; };

template <NamedEnum E>
void to_json(nlohmann::json& j, E value) {
  j = std::string(to_string(value));
}

template <NamedEnum E>
void from_json(const nlohmann::json& j, E& value) {
  if (!j.is_string()) {
    throw Error("WrongType", std::string(enum_type_name<E>()) + " must be a string, got " + j.dump());
  }
  const auto& s = j.get_ref<const std::string&>();
  auto parsed = enum_from_string<E>(s);
  if (!parsed) throw Error("UnknownEnumValue", std::string(enum_type_name<E>()) + ": " + s);
  value = *parsed;
}

void to_json(nlohmann::json& j, const Timestamp& t);
void from_json(const nlohmann::json& j, Timestamp& t);

void to_json(nlohmann::json& j, const SubjectDescriptor& v);
void to_json(nlohmann::json& j, const ResourceDescriptor& v);
void to_json(nlohmann::json& j, const AccessRequest& v);
// Strict: goes through validate_request and throws on the first problem.
void from_json(const nlohmann::json& j, AccessRequest& v);

void to_json(nlohmann::json& j, const ValidationError& v);

void to_json(nlohmann::json& j, const ProvisionCitation& v);
void from_json(const nlohmann::json& j, ProvisionCitation& v);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const ConditionCheck& v);
void from_json(const nlohmann::json& j, ConditionCheck& v);
void to_json(nlohmann::json& j, const ProvisionMatch& v);
void from_json(const nlohmann::json& j, ProvisionMatch& v);
void to_json(nlohmann::json& j, const ContextSnapshot& v);
void from_json(const nlohmann::json& j, ContextSnapshot& v);
void to_json(nlohmann::json& j, const ChannelVerdict& v);
void from_json(const nlohmann::json& j, ChannelVerdict& v);
void to_json(nlohmann::json& j, const Conflict& v);
void from_json(const nlohmann::json& j, Conflict& v);
void to_json(nlohmann::json& j, const BackendFault& v);
void from_json(const nlohmann::json& j, BackendFault& v);
void to_json(nlohmann::json& j, const Decision& v);
void from_json(const nlohmann::json& j, Decision& v);

}  // namespace ontoguard
