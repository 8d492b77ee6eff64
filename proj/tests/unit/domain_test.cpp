#include <gtest/gtest.h>

#include <set>

#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"
#include "support/test_support.hpp"

namespace ontoguard {
namespace {

using nlohmann::json;
using testing::random_request;

json sample_request_json() {
  return json::parse(R"({
    "request_id": "req-1",
    "subject": {"actor_role": "registered-nurse", "registration_status": "registered-provider",
                "relationship_to_patient": "none"},
    "resource": {"patient_id": "p-9", "record_scope": "medication-list", "sensitivity": "normal"},
    "purpose": "healthcare-provision", "consent": "granted", "supervision": "not-applicable",
    "raw_narrative": "Ward round medication check."
  })");
}

TEST(Timestamp, Iso8601RoundTrip) {
  Timestamp t{1704067200123};
  EXPECT_EQ(to_iso8601(t), "2024-01-01T00:00:00.123Z");
  EXPECT_EQ(parse_iso8601("2024-01-01T00:00:00.123Z"), t);
  EXPECT_EQ(parse_iso8601("2024-01-01T00:00:00Z"), Timestamp{1704067200000});
  EXPECT_FALSE(parse_iso8601("2024-01-01 00:00:00"));
  EXPECT_FALSE(parse_iso8601("2024-01-01T00:00:00+02:00"));
}

TEST(Timestamp, RoundTripsArbitraryInstants) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    Timestamp t{static_cast<std::int64_t>(rng() % 4102444800000ULL)};
    EXPECT_EQ(parse_iso8601(to_iso8601(t)), t);
  }
}

TEST(Enums, EveryValueRoundTripsThroughItsSpelling) {
  auto check = []<typename E>(E) {
    for (E e : enum_values<E>()) EXPECT_EQ(enum_from_string<E>(to_string(e)), e);
    EXPECT_FALSE(enum_from_string<E>("no-such-value"));
  };
  check(Role{});
  check(RegistrationStatus{});
  check(Relationship{});
  check(RecordScope{});
  check(Sensitivity{});
  check(Purpose{});
  check(Consent{});
  check(Supervision{});
  check(Situation{});
  check(Urgency{});
  check(Location{});
  check(Device{});
  check(SourceAct{});
  check(Effect{});
  check(Condition{});
  check(VerdictKind{});
  check(Stage{});
}

TEST(ValidateRequest, AcceptsWellFormedRequest) {
  auto v = validate_request(sample_request_json());
  ASSERT_TRUE(std::holds_alternative<AccessRequest>(v));
  const auto& r = std::get<AccessRequest>(v);
  EXPECT_EQ(r.subject.actor_role, Role::RegisteredNurse);
  EXPECT_EQ(r.resource.record_scope, RecordScope::MedicationList);
  EXPECT_EQ(r.consent, Consent::Granted);
}

TEST(ValidateRequest, CollectsEveryProblem) {
  json j = sample_request_json();
  j["subject"].erase("relationship_to_patient");
  j["subject"]["actor_role"] = "wizard";
  j["consent"] = 3;
  j["raw_narrative"] = "   ";
  auto v = validate_request(j);
  ASSERT_TRUE(std::holds_alternative<std::vector<ValidationError>>(v));
  std::set<std::string> messages;
  for (const auto& e : std::get<std::vector<ValidationError>>(v)) messages.insert(e.message());
  EXPECT_TRUE(messages.count("UnknownEnumValue(subject.actor_role, wizard)"));
  EXPECT_TRUE(messages.count("MissingField(subject.relationship_to_patient)"));
  EXPECT_TRUE(messages.count("EmptyNarrative"));
  EXPECT_EQ(messages.size(), 4u);
}

TEST(ValidateRequest, MissingRequestIdIsReported) {
  json j = sample_request_json();
  j.erase("request_id");
  auto v = validate_request(j);
  ASSERT_TRUE(std::holds_alternative<std::vector<ValidationError>>(v));
  EXPECT_EQ(std::get<std::vector<ValidationError>>(v).front().message(), "MissingField(request_id)");
}

TEST(ValidateRequest, StrictFromJsonThrowsFirstProblem) {
  json j = sample_request_json();
  j["purpose"] = "curiosity";
  EXPECT_THROW(j.get<AccessRequest>(), Error);
}

TEST(JsonRoundTrip, RandomRequests) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    AccessRequest r = random_request(rng, i);
    json j = r;
    EXPECT_EQ(j.get<AccessRequest>(), r);
  }
}

TEST(JsonRoundTrip, DecisionWithEveryOptionalSet) {
  Decision d;
  d.request_id = "req-x";
  d.stage = Stage::Final;
  d.request = testing::clinician_request();
  d.verdict.kind = VerdictKind::ConditionalGrant;
  d.verdict.obligations = {"maintain data confidentiality"};
  d.verdict.rationale = {{"mhra-2012/serious-threat-access", "emergency override available"}};
  d.channels = {{Channel::Ontology, Stance::PermitWithConditions,
                 {{Condition::ConsentRequired, ConditionStatus::Indeterminate}}, {{"a/b", "x"}}}};
  ProvisionMatch m;
  m.provision_id = "a/b";
  m.effect = Effect::AuthorizeWithConditions;
  m.attribute_checks = {{Condition::ConsentRequired, ConditionStatus::Indeterminate}};
  m.context_conditions = {Condition::OnPremisesRequired};
  m.emergency_overridable = true;
  d.matches = {m};
  d.context = {Situation::Emergency, Urgency::Critical, Location::OnPremises, Device::Byod, Timestamp{42}};
  d.conflicts = {make_conflict(Party::RuleEngine, Party::Backend, ConflictKind::StanceDisagreement, "kinds differ")};
  d.backend_id = "llm:gpt-4";
  d.backend_deterministic = false;
  d.backend_raw_response = "Access granted.";
  d.backend_fault = BackendFault{FaultKind::Timeout, "slow", true};
  d.draft_verdict = d.verdict;
  d.reviewer = "rev-1";
  d.produced_at = Timestamp{99};
  json j = d;
  EXPECT_EQ(j.get<Decision>(), d);
  EXPECT_TRUE(j.at("backend_fault").is_object());
}

TEST(JsonRoundTrip, AbsentOptionalsAreNull) {
  Decision d;
  d.request_id = "req-y";
  d.request = testing::clinician_request();
  json j = d;
  EXPECT_TRUE(j.at("reviewer").is_null());
  EXPECT_TRUE(j.at("backend_fault").is_null());
  EXPECT_EQ(j.get<Decision>(), d);
}

TEST(Verdict, ShapeRules) {
  Verdict grant{VerdictKind::Grant, {"maintain data confidentiality"}, {}, {}};
  EXPECT_FALSE(verdict_violation(grant));
  grant.recommendations = {"obtain consent"};
  EXPECT_TRUE(verdict_violation(grant));
  Verdict deny{VerdictKind::Deny, {"something"}, {}, {}};
  EXPECT_TRUE(verdict_violation(deny));
}

TEST(Conflict, PartiesAreOrdered) {
  auto c = make_conflict(Party::Caac, Party::Ontology, ConflictKind::StanceDisagreement, "");
  EXPECT_EQ(c.first, Party::Ontology);
  EXPECT_EQ(c.second, Party::Caac);
}

TEST(Context, EmergencyNeedsHighUrgency) {
  ContextSnapshot c;
  c.situation = Situation::Emergency;
  c.urgency = Urgency::Low;
  EXPECT_FALSE(context_consistent(c));
  c.urgency = Urgency::High;
  EXPECT_TRUE(context_consistent(c));
  c.situation = Situation::Routine;
  c.urgency = Urgency::Low;
  EXPECT_TRUE(context_consistent(c));
}

TEST(RequestId, UniqueAndOrdered) {
  std::string prev;
  for (int i = 0; i < 2000; ++i) {
    auto id = new_request_id();
    EXPECT_LT(prev, id);
    prev = id;
  }
}

TEST(ProvisionMatch, UnmetAndViable) {
  ProvisionMatch m;
  m.effect = Effect::AuthorizeWithConditions;
  m.attribute_checks = {{Condition::ConsentRequired, ConditionStatus::Unsatisfied},
                        {Condition::RegisteredProviderRequired, ConditionStatus::Satisfied}};
  EXPECT_EQ(m.unmet().size(), 1u);
  EXPECT_TRUE(m.viable());
  m.attribute_checks[1].status = ConditionStatus::Unsatisfied;
  EXPECT_FALSE(m.viable());
  m.effect = Effect::Prohibit;
  EXPECT_FALSE(m.viable());
}

}  // namespace
}  // namespace ontoguard
