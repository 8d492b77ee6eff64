#include <gtest/gtest.h>

#include <algorithm>

#include "ontoguard/error.hpp"
#include "ontoguard/ontology.hpp"
#include "support/test_support.hpp"

namespace ontoguard {
namespace {

using testing::TempDir;
using testing::write_file;

const char* kMinimalFile = R"({
  "act": "privacy-act-1988",
  "version": "1 Sep 2021",
  "provisions": [
    {
      "provision_id": "pa-1988/a",
      "source_act": "privacy-act-1988",
      "effect": "AuthorizeWithConditions",
      "applies_to": {"roles": ["general-practitioner"], "purposes": "*", "scopes": "*",
                     "relationships": "*", "registration": "*"},
      "conditions": ["consent-required"],
      "summary": "test"
    }
  ]
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

TEST(PolicyFile, ParsesMinimalFile) {
  SourceAct act{};
  std::string version;
  auto ps = parse_policy_file(kMinimalFile, "a.json", &act, &version);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(act, SourceAct::PrivacyAct1988);
  EXPECT_EQ(version, "1 Sep 2021");
  EXPECT_EQ(ps[0].priority, Priority::Default);
  EXPECT_TRUE(ps[0].applies_to.purposes.any);
  EXPECT_TRUE(ps[0].applies_to.roles.accepts(Role::GeneralPractitioner));
  EXPECT_FALSE(ps[0].applies_to.roles.accepts(Role::Surgeon));
}

TEST(PolicyFile, RejectsUnknownAct) {
  EXPECT_THROW(parse_policy_file(with(kMinimalFile, "\"act\": \"privacy-act-1988\"", "\"act\": \"gdpr\""), "a.json"),
               UnknownAct);
}

TEST(PolicyFile, RejectsUnknownKeyWithLine) {
  auto text = with(kMinimalFile, "\"summary\": \"test\"", "\"summary\": \"test\",\n      \"colour\": \"red\"");
  try {
    parse_policy_file(text, "a.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "a.json");
    EXPECT_GT(e.line(), 1);
  }
}

TEST(PolicyFile, RejectsMalformedJsonWithLine) {
  try {
    parse_policy_file("{\n  \"act\": \"privacy-act-1988\",\n  oops\n}", "b.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(PolicyFile, RejectsProhibitWithConditions) {
  auto text = with(kMinimalFile, "\"AuthorizeWithConditions\"", "\"Prohibit\"");
  EXPECT_THROW(parse_policy_file(text, "a.json"), ParseError);
}

TEST(PolicyFile, RejectsForeignSourceAct) {
  auto text = with(kMinimalFile, "\"source_act\": \"privacy-act-1988\"",
                   "\"source_act\": \"health-records-act-2001\"");
  EXPECT_THROW(parse_policy_file(text, "a.json"), ParseError);
}

TEST(PolicyFile, RejectsUnknownEnumInMatcher) {
  auto text = with(kMinimalFile, "[\"general-practitioner\"]", "[\"astronaut\"]");
  EXPECT_THROW(parse_policy_file(text, "a.json"), ParseError);
}

TEST(PolicyCorpus, BundledCorpusLoadsAndValidates) {
  auto o = testing::bundled_ontology();
  EXPECT_EQ(o.act_versions.size(), 3u);
  EXPECT_EQ(o.provisions.size(), 11u);
  EXPECT_EQ(o.act_versions.at(SourceAct::PrivacyAct1988), "1 Sep 2021");
  EXPECT_EQ(o.act_versions.at(SourceAct::MyHealthRecordsAct2012), "1 Sep 2021");
  EXPECT_EQ(o.act_versions.at(SourceAct::HealthRecordsAct2001), "2 Sep 2022");
  EXPECT_TRUE(validate_ontology(o).empty());
  ASSERT_NE(o.find("mhra-2012/serious-threat-access"), nullptr);
  EXPECT_TRUE(o.find("mhra-2012/serious-threat-access")->has(Condition::EmergencyOverridable));
  EXPECT_EQ(o.find("mhra-2012/unregistered-access-prohibited")->priority, Priority::Mandatory);
}

TEST(PolicyCorpus, DuplicateIdNamesBothFiles) {
  TempDir dir;
  write_file(dir / "one.json", kMinimalFile);
  write_file(dir / "two.json", kMinimalFile);
  try {
    load_policy_corpus(policy_files_in(dir.path()));
    FAIL() << "expected DuplicateProvisionId";
  } catch (const DuplicateProvisionId& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("one.json"), std::string::npos);
    EXPECT_NE(msg.find("two.json"), std::string::npos);
  }
}

TEST(PolicyCorpus, UnreadableDirectory) {
  EXPECT_THROW(policy_files_in("/nonexistent/ontoguard"), FileUnreadable);
}

TEST(ValidateOntology, EmptyOntology) {
  TempDir dir;
  auto o = load_policy_corpus(policy_files_in(dir.path()));
  auto problems = validate_ontology(o);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_EQ(problems[0].kind, "empty ontology");
}

Provision authorize(std::string id) {
  Provision p;
  p.provision_id = std::move(id);
  p.effect = Effect::AuthorizeWithConditions;
  return p;
}

bool has_kind(const std::vector<OntologyProblem>& ps, const std::string& kind, const std::string& id) {
  return std::ranges::any_of(ps, [&](const OntologyProblem& p) { return p.kind == kind && p.provision_id == id; });
}

TEST(ValidateOntology, FindsStructuralProblems) {
  Ontology o;
  Provision never = authorize("x/never");
  never.applies_to.roles = Selector<Role>::of({});
  Provision purpose = authorize("x/purpose");
  purpose.applies_to.purposes = Selector<Purpose>::of({Purpose::Research});
  purpose.conditions = {Condition::PurposeMustBeHealthcare};
  Provision reg = authorize("x/reg");
  reg.applies_to.registration = Selector<RegistrationStatus>::of({RegistrationStatus::Unregistered});
  reg.conditions = {Condition::RegisteredProviderRequired};
  Provision wall;
  wall.provision_id = "x/wall";
  wall.effect = Effect::Prohibit;
  wall.priority = Priority::Mandatory;
  wall.applies_to.roles = Selector<Role>::of({Role::Student});
  Provision shadowed = authorize("x/shadowed");
  shadowed.applies_to.roles = Selector<Role>::of({Role::Student});
  o.provisions = {never, purpose, reg, wall, shadowed};
  o.act_versions[SourceAct::PrivacyAct1988] = "v1";
  o.act_versions[SourceAct::HealthRecordsAct2001] = "v2";
  for (auto& p : o.provisions) p.source_act = SourceAct::PrivacyAct1988;

  auto ps = validate_ontology(o);
  EXPECT_TRUE(has_kind(ps, "never fires", "x/never"));
  EXPECT_TRUE(has_kind(ps, "unsatisfiable condition", "x/purpose"));
  EXPECT_TRUE(has_kind(ps, "unsatisfiable condition", "x/reg"));
  EXPECT_TRUE(has_kind(ps, "shadowed provision", "x/shadowed"));
  EXPECT_TRUE(has_kind(ps, "act without provisions", ""));
  EXPECT_FALSE(has_kind(ps, "shadowed provision", "x/purpose"));
}

TEST(Selector, CoversIsSetInclusion) {
  auto all = Selector<Consent>::wildcard();
  auto two = Selector<Consent>::of({Consent::Granted, Consent::Absent});
  auto every = Selector<Consent>::of({Consent::Granted, Consent::Absent, Consent::Unknown});
  EXPECT_TRUE(all.covers(two));
  EXPECT_FALSE(two.covers(all));
  EXPECT_TRUE(every.covers(all));
  EXPECT_TRUE(two.covers(Selector<Consent>::of({Consent::Absent})));
}

TEST(EvaluateCondition, Table) {
  AccessRequest r = testing::clinician_request();
  r.consent = Consent::Granted;
  EXPECT_EQ(evaluate_condition(Condition::ConsentRequired, r), ConditionStatus::Satisfied);
  r.consent = Consent::Absent;
  EXPECT_EQ(evaluate_condition(Condition::ConsentRequired, r), ConditionStatus::Unsatisfied);
  r.consent = Consent::Unknown;
  EXPECT_EQ(evaluate_condition(Condition::ConsentRequired, r), ConditionStatus::Indeterminate);
  r.supervision = Supervision::Supervised;
  EXPECT_EQ(evaluate_condition(Condition::SupervisionRequired, r), ConditionStatus::Satisfied);
  r.supervision = Supervision::NotApplicable;
  EXPECT_EQ(evaluate_condition(Condition::SupervisionRequired, r), ConditionStatus::Unsatisfied);
  r.purpose = Purpose::Billing;
  EXPECT_EQ(evaluate_condition(Condition::PurposeMustBeHealthcare, r), ConditionStatus::Unsatisfied);
  r.subject.registration_status = RegistrationStatus::Unregistered;
  EXPECT_EQ(evaluate_condition(Condition::RegisteredProviderRequired, r), ConditionStatus::Unsatisfied);
}

TEST(ApplicableProvisions, SplitsConditionsByChannel) {
  Ontology o;
  Provision p = authorize("x/p");
  p.conditions = {Condition::ConsentRequired, Condition::OnPremisesRequired, Condition::EmergencyOverridable};
  o.provisions = {p};
  auto ms = applicable_provisions(o, testing::clinician_request());
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].attribute_checks.size(), 1u);
  EXPECT_EQ(ms[0].context_conditions, std::vector<Condition>{Condition::OnPremisesRequired});
  EXPECT_TRUE(ms[0].emergency_overridable);
}

// Property: matches are exactly the accepting provisions, Mandatory first,
// then by id, whatever the order of the provisions in the ontology.
TEST(ApplicableProvisions, OrderingAndCommutativity) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    Ontology o = testing::random_ontology(rng);
    AccessRequest r = testing::random_request(rng, i);
    auto ms = applicable_provisions(o, r);

    std::size_t accepting = 0;
    for (const auto& p : o.provisions) accepting += p.applies_to.accepts(r) ? 1 : 0;
    ASSERT_EQ(ms.size(), accepting);
    for (std::size_t k = 1; k < ms.size(); ++k) {
      const auto& a = ms[k - 1];
      const auto& b = ms[k];
      if (a.priority == b.priority) {
        EXPECT_LT(a.provision_id, b.provision_id);
      } else {
        EXPECT_EQ(a.priority, Priority::Mandatory);
      }
    }
    std::shuffle(o.provisions.begin(), o.provisions.end(), rng);
    EXPECT_EQ(applicable_provisions(o, r), ms);
  }
}

TEST(ProvisionJson, ParsesBackToTheSameProvision) {
  for (const auto& p : testing::bundled_ontology().provisions) {
    nlohmann::json file = {{"act", std::string(to_string(p.source_act))},
                           {"version", "v"},
                           {"provisions", nlohmann::json::array({provision_to_json(p)})}};
    auto back = parse_policy_file(file.dump(), "round.json");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], p);
  }
}

}  // namespace
}  // namespace ontoguard
