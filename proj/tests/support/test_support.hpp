#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ontoguard/backend.hpp"
#include "ontoguard/domain.hpp"
#include "ontoguard/ontology.hpp"

namespace ontoguard::testing {

inline std::filesystem::path policies_dir() { return ONTOGUARD_TEST_POLICIES_DIR; }
inline std::filesystem::path corpus_dir() { return ONTOGUARD_TEST_CORPUS_DIR; }
inline std::filesystem::path data_dir() { return ONTOGUARD_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return ONTOGUARD_TEST_GOLDEN_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json load_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

inline Ontology bundled_ontology() { return load_policy_corpus(policy_files_in(policies_dir())); }

inline AccessRequest request_from(const std::filesystem::path& p) {
  return std::get<AccessRequest>(validate_request(load_json(p)));
}

inline AccessRequest clinician_request(Role role = Role::GeneralPractitioner, Consent consent = Consent::Granted,
                                       Purpose purpose = Purpose::HealthcareProvision) {
  AccessRequest r;
  r.request_id = "req-test";
  r.subject.actor_role = role;
  r.subject.registration_status = RegistrationStatus::RegisteredProvider;
  r.subject.relationship_to_patient = Relationship::None;
  r.resource.patient_id = "patient-1";
  r.resource.record_scope = RecordScope::FullRecord;
  r.purpose = purpose;
  r.consent = consent;
  r.raw_narrative = "A clinician reviews the patient's history before a consultation.";
  return r;
}

// A fresh temporary directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("ontoguard-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

// Returns a verdict chosen by the test, regardless of input.
class FixedVerdictBackend final : public DecisionBackend {
 public:
  explicit FixedVerdictBackend(Verdict v) : verdict_(std::move(v)) {}
  std::string id() const override { return "fixed"; }
  BackendCapabilities capabilities() const override { return {true, true}; }
  BackendVerdict decide(const DecisionInput&) override { return {verdict_, canonical_render(verdict_), 0.0, {}}; }

 private:
  Verdict verdict_;
};

// ---------------------------------------------------------------------------
// Random generators for property tests.

template <typename E>
E pick(std::mt19937_64& rng) {
  const auto& all = enum_values<E>();
  return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename E>
Selector<E> random_selector(std::mt19937_64& rng) {
  if (coin(rng, 0.4)) return Selector<E>::wildcard();
  std::vector<E> values;
  for (E e : enum_values<E>()) {
    if (coin(rng, 0.5)) values.push_back(e);
  }
  if (values.empty()) values.push_back(pick<E>(rng));
  return Selector<E>::of(std::move(values));
}

inline Provision random_provision(std::mt19937_64& rng, int index) {
  Provision p;
  p.provision_id = "rand/p" + std::to_string(index);
  p.source_act = pick<SourceAct>(rng);
  p.effect = pick<Effect>(rng);
  p.priority = coin(rng, 0.3) ? Priority::Mandatory : Priority::Default;
  p.applies_to = {random_selector<Role>(rng), random_selector<Purpose>(rng), random_selector<RecordScope>(rng),
                  random_selector<Relationship>(rng), random_selector<RegistrationStatus>(rng)};
  if (p.effect != Effect::Prohibit) {
    for (Condition c : enum_values<Condition>()) {
      if (coin(rng, 0.3)) p.conditions.push_back(c);
    }
  }
  return p;
}

inline Ontology random_ontology(std::mt19937_64& rng) {
  Ontology o;
  const int n = std::uniform_int_distribution<int>(1, 8)(rng);
  for (int i = 0; i < n; ++i) o.provisions.push_back(random_provision(rng, i));
  return o;
}

inline const char* const kNarratives[] = {
    "A clinician reviews the record before a routine appointment.",
    "The patient collapsed and is unconscious in the emergency department.",
    "A telehealth consultation from a personal device.",
    "Home care visit after discharge; the nurse uses a hospital-approved tablet.",
    "Overnight shift on the ward, urgent medication check.",
    "Critical trauma case en route in the ambulance.",
    "The patient is marked not for resuscitation; routine review.",
};

inline AccessRequest random_request(std::mt19937_64& rng, int index = 0) {
  AccessRequest r;
  r.request_id = "req-rand-" + std::to_string(index);
  r.subject.actor_role = pick<Role>(rng);
  r.subject.registration_status = pick<RegistrationStatus>(rng);
  r.subject.relationship_to_patient = pick<Relationship>(rng);
  r.resource.patient_id = "patient-" + std::to_string(index);
  r.resource.record_scope = pick<RecordScope>(rng);
  r.resource.sensitivity = pick<Sensitivity>(rng);
  r.purpose = pick<Purpose>(rng);
  r.consent = pick<Consent>(rng);
  r.supervision = pick<Supervision>(rng);
  const auto n = std::size(kNarratives);
  r.raw_narrative = kNarratives[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
  return r;
}

// Overrides that never contradict the request or each other.
inline ContextOverrides random_overrides(std::mt19937_64& rng) {
  ContextOverrides o;
  if (coin(rng, 0.3)) o.situation = pick<Situation>(rng);
  if (coin(rng, 0.3)) o.location = pick<Location>(rng);
  if (coin(rng, 0.3)) o.device = pick<Device>(rng);
  if (coin(rng, 0.2)) o.urgency = coin(rng) ? Urgency::High : Urgency::Critical;
  return o;
}

inline std::string random_sentence(std::mt19937_64& rng) {
  static const char* const kWords[] = {"review", "the", "chart", "record", "within", "policy", "clinic", "ward",
                                       "daily", "notes", "care", "plan", "team", "audit", "log", "entry"};
  std::string s;
  const int n = std::uniform_int_distribution<int>(1, 6)(rng);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[std::uniform_int_distribution<std::size_t>(0, std::size(kWords) - 1)(rng)];
  }
  return s;
}

// Well-formed verdicts: no recommendations on grants, no obligations on denials.
inline Verdict random_verdict(std::mt19937_64& rng) {
  Verdict v;
  v.kind = pick<VerdictKind>(rng);
  const int items = std::uniform_int_distribution<int>(0, 4)(rng);
  auto& list = v.kind == VerdictKind::Deny ? v.recommendations : v.obligations;
  for (int i = 0; i < items; ++i) list.push_back(random_sentence(rng));
  const int cites = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < cites; ++i) {
    ProvisionCitation c;
    if (coin(rng, 0.8)) c.provision_id = "act-" + std::to_string(i) + "/prov-" + std::to_string(rng() % 100);
    c.detail = random_sentence(rng);
    v.rationale.push_back(c);
  }
  return v;
}

}  // namespace ontoguard::testing
