#pragma once

// Context capture and the three channel evaluators (ontology, attribute,
// context). Everything here is a pure function of its arguments.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoguard/domain.hpp"

namespace ontoguard {

// Structured values that win over anything read from the narrative.
struct ContextOverrides {
  std::optional<Situation> situation;
  std::optional<Urgency> urgency;
  std::optional<Location> location;
  std::optional<Device> device;
  std::optional<Supervision> supervision;  // must agree with the request

  bool empty() const { return !situation && !urgency && !location && !device && !supervision; }
  bool operator==(const ContextOverrides&) const = default;
};

struct RawContext {
  std::string text;  // extra free text, read together with the request narrative
  ContextOverrides overrides;
  Timestamp timestamp;
};

struct SubjectAttributes {
  Role role = Role::Other;
  RegistrationStatus registration = RegistrationStatus::Unregistered;
  Relationship relationship = Relationship::None;
  Clearance clearance = Clearance::None;

  bool operator==(const SubjectAttributes&) const = default;
};

struct ResourceAttributes {
  RecordScope scope = RecordScope::FullRecord;
  Sensitivity sensitivity = Sensitivity::Normal;
  std::vector<std::string> clinical_flags;  // e.g. "NFR"

  bool operator==(const ResourceAttributes&) const = default;
};

struct AttributeSet {
  SubjectAttributes subject;
  ResourceAttributes resource;
  ContextSnapshot environment;
  std::vector<std::string> derivation_notes;

  // Flat view keyed by the standardized vocabulary, e.g. "subject.clearance".
  std::map<std::string, std::string> to_map() const;
  bool operator==(const AttributeSet&) const = default;
};

struct CaptureResult {
  AttributeSet attributes;
  ContextSnapshot context;
};

// Throws ContradictoryOverride.
CaptureResult capture_context(const AccessRequest& request, const RawContext& raw = {});

// Overrides reproducing `snapshot`; feeding them back into capture_context
// yields the same snapshot.
ContextOverrides overrides_from(const ContextSnapshot& snapshot);

ContextOverrides parse_overrides(const nlohmann::json& j);  // throws Error on unknown values
nlohmann::json overrides_to_json(const ContextOverrides& o);
void to_json(nlohmann::json& j, const AttributeSet& a);

ConditionStatus evaluate_context_condition(Condition c, const ContextSnapshot& context);

ChannelVerdict evaluate_ontology_channel(const std::vector<ProvisionMatch>& matches);
ChannelVerdict evaluate_abac(const AttributeSet& attrs, const std::vector<ProvisionMatch>& matches);
ChannelVerdict evaluate_caac(const ContextSnapshot& context, const std::vector<ProvisionMatch>& matches);

// True when a CAAC verdict is an emergency break-glass permit.
bool is_emergency_permit(const ChannelVerdict& caac, const ContextSnapshot& context);

}  // namespace ontoguard
