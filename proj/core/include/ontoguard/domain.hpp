#pragma once

// Value types shared by every stage of a decision: the request, the context
// snapshot, provision matches, channel stances and the decision itself.
// All of them are plain immutable-by-convention values and safe to share
// across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoguard/enums.hpp"

namespace ontoguard {

// Milliseconds since the Unix epoch, UTC. Rendered as ISO-8601 at every
// boundary (files, wire, CLI).
struct Timestamp {
  std::int64_t millis = 0;

  auto operator<=>(const Timestamp&) const = default;
};

std::string to_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

// Always returns the same instant; used for byte-stable output.
class FixedClock final : public Clock {
 public:
  explicit FixedClock(Timestamp at) : at_(at) {}
  Timestamp now() const override { return at_; }

 private:
  Timestamp at_;
};

const Clock& system_clock();

// Unique within the process and lexicographically ordered by creation.
std::string new_request_id();

// ---------------------------------------------------------------------------

struct SubjectDescriptor {
  Role actor_role = Role::Other;
  RegistrationStatus registration_status = RegistrationStatus::Unregistered;
  Relationship relationship_to_patient = Relationship::None;

  bool operator==(const SubjectDescriptor&) const = default;
};

struct ResourceDescriptor {
  std::string patient_id;
  RecordScope record_scope = RecordScope::FullRecord;
  Sensitivity sensitivity = Sensitivity::Normal;

  bool operator==(const ResourceDescriptor&) const = default;
};

struct AccessRequest {
  std::string request_id;
  SubjectDescriptor subject;
  ResourceDescriptor resource;
  Purpose purpose = Purpose::Other;
  Consent consent = Consent::Unknown;
  Supervision supervision = Supervision::NotApplicable;
  std::string raw_narrative;

  bool operator==(const AccessRequest&) const = default;
};

struct ValidationError {
  enum class Kind { MissingField, UnknownEnumValue, WrongType, EmptyNarrative };

  Kind kind;
  std::string field;
  std::string value;  // offending value, for UnknownEnumValue / WrongType

  std::string message() const;
  bool operator==(const ValidationError&) const = default;
};

// Either a well-formed request or every problem found in the candidate.
using RequestValidation = std::variant<AccessRequest, std::vector<ValidationError>>;

RequestValidation validate_request(const nlohmann::json& candidate);

// ---------------------------------------------------------------------------

struct ProvisionCitation {
  std::string provision_id;  // empty for attribute/context predicates
  std::string detail;

  bool operator==(const ProvisionCitation&) const = default;
};

// Cited when no provision authorizes the request.
inline constexpr std::string_view kNoAuthorizingProvision = "none/no-authorizing-provision";

struct Verdict {
  VerdictKind kind = VerdictKind::Deny;
  std::vector<std::string> obligations;
  std::vector<std::string> recommendations;
  std::vector<ProvisionCitation> rationale;

  bool operator==(const Verdict&) const = default;
};

// Grant/ConditionalGrant carry no recommendations, Deny carries no
// obligations. Returns a description of the first violation, if any.
std::optional<std::string> verdict_violation(const Verdict& v);

struct ConditionCheck {
  Condition condition;
  ConditionStatus status;

  bool operator==(const ConditionCheck&) const = default;
};

// One provision accepted by the request, with each attribute condition
// evaluated against the request's fields.
struct ProvisionMatch {
  std::string provision_id;
  SourceAct source_act = SourceAct::PrivacyAct1988;
  Effect effect = Effect::Authorize;
  Priority priority = Priority::Default;
  std::vector<ConditionCheck> attribute_checks;
  std::vector<Condition> context_conditions;
  bool emergency_overridable = false;

  bool is_authorizing() const { return effect != Effect::Prohibit; }
  bool is_mandatory_prohibit() const {
    return effect == Effect::Prohibit && priority == Priority::Mandatory;
  }
  std::vector<ConditionCheck> unmet() const;
  bool fully_satisfied() const { return unmet().empty(); }
  bool viable() const;  // every unmet condition is remediable

  bool operator==(const ProvisionMatch&) const = default;
};

struct ContextSnapshot {
  Situation situation = Situation::Routine;
  Urgency urgency = Urgency::Normal;
  Location location = Location::Unknown;
  Device device = Device::Unknown;
  Timestamp timestamp;

  bool operator==(const ContextSnapshot&) const = default;
};

// Emergency situations always carry high or critical urgency.
bool context_consistent(const ContextSnapshot& c);

struct ChannelVerdict {
  Channel channel = Channel::Ontology;
  Stance stance = Stance::Abstain;
  std::vector<ConditionCheck> conditions;  // PermitWithConditions only
  std::vector<ProvisionCitation> basis;

  bool operator==(const ChannelVerdict&) const = default;
};

struct Conflict {
  Party first = Party::Ontology;  // first < second, always
  Party second = Party::Abac;
  ConflictKind kind = ConflictKind::StanceDisagreement;
  std::string detail;

  bool operator==(const Conflict&) const = default;
};

Conflict make_conflict(Party a, Party b, ConflictKind kind, std::string detail);

struct BackendFault {
  FaultKind kind = FaultKind::TransportError;
  std::string message;
  bool fallback_used = true;

  bool operator==(const BackendFault&) const = default;
};

struct Decision {
  std::string request_id;
  Stage stage = Stage::Draft;
  AccessRequest request;
  Verdict verdict;
  std::vector<ChannelVerdict> channels;  // Ontology, ABAC, CAAC in that order
  std::vector<ProvisionMatch> matches;
  ContextSnapshot context;
  std::vector<Conflict> conflicts;
  std::string backend_id;
  bool backend_deterministic = true;
  std::optional<std::string> backend_raw_response;
  std::optional<BackendFault> backend_fault;
  std::optional<Verdict> draft_verdict;  // the backend's verdict, kept after resolution
  std::optional<std::string> reviewer;
  Timestamp produced_at;

  const ChannelVerdict* channel(Channel c) const;
  bool operator==(const Decision&) const = default;
};

}  // namespace ontoguard
