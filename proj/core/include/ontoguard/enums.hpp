#pragma once

// Closed vocabularies shared by every module, with their wire spellings.
//
// Every enumeration here is closed: parsing an unknown spelling fails rather
// than mapping to a catch-all. Where the domain needs a catch-all, the
// vocabulary carries an explicit `other` arm that callers must choose.
//
// Extension point: the role, purpose and scope vocabularies are reconstructed
// from the bundled scenario corpus. Adding a value means adding it to the
// enum and to its EnumNames table; provision files pick it up by spelling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace ontoguard {

template <typename E>
struct EnumNames;  // specialised below: `type_name` and `entries`

template <typename E>
constexpr std::string_view to_string(E value) {
  for (const auto& [v, name] : EnumNames<E>::entries) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E>
constexpr std::optional<E> enum_from_string(std::string_view name) {
  for (const auto& [v, n] : EnumNames<E>::entries) {
    if (n == name) return v;
  }
  return std::nullopt;
}

template <typename E>
constexpr auto enum_values() {
  std::array<E, EnumNames<E>::entries.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumNames<E>::entries[i].first;
  return out;
}

template <typename E>
constexpr std::string_view enum_type_name() {
  return EnumNames<E>::type_name;
}

#define ONTOGUARD_ENUM_NAMES(E, NAME, ...)                                   \
  template <>                                                                \
  struct EnumNames<E> {                                                      \
    static constexpr std::string_view type_name = NAME;                      \
    static constexpr auto entries = std::to_array<std::pair<E, std::string_view>>({__VA_ARGS__}); \
  }

// ---------------------------------------------------------------------------
// Request vocabulary

enum class Role : std::uint8_t {
  GeneralPractitioner,
  MedicalSpecialist,
  EmergencyPhysician,
  Surgeon,
  Psychiatrist,
  Radiologist,
  Pathologist,
  RegisteredNurse,
  NursePractitioner,
  Paramedic,
  AlliedHealthProfessional,
  Psychologist,
  Counsellor,
  SocialWorker,
  Pharmacist,
  LaboratoryScientist,
  MedicalTechnologist,
  Dentist,
  Optometrist,
  Chiropractor,
  HomeHealthAide,
  Nutritionist,
  PersonalTrainer,
  YogaInstructor,
  PharmacyTechnician,
  Student,
  Intern,
  HospitalAdministrator,
  MedicalRecordsTechnician,
  HealthDataAnalyst,
  ItStaff,
  MedicalTranscriptionist,
  BillingSpecialist,
  HealthInformaticsSpecialist,
  PatientCoordinator,
  PrivacyOfficer,
  QualityAssuranceManager,
  Patient,
  FamilyMember,
  Parent,
  LegalGuardian,
  PowerOfAttorney,
  Caregiver,
  PersonalContact,
  Researcher,
  Other,
};

ONTOGUARD_ENUM_NAMES(Role, "role",
                     {Role::GeneralPractitioner, "general-practitioner"},
                     {Role::MedicalSpecialist, "medical-specialist"},
                     {Role::EmergencyPhysician, "emergency-physician"},
                     {Role::Surgeon, "surgeon"},
                     {Role::Psychiatrist, "psychiatrist"},
                     {Role::Radiologist, "radiologist"},
                     {Role::Pathologist, "pathologist"},
                     {Role::RegisteredNurse, "registered-nurse"},
                     {Role::NursePractitioner, "nurse-practitioner"},
                     {Role::Paramedic, "paramedic"},
                     {Role::AlliedHealthProfessional, "allied-health-professional"},
                     {Role::Psychologist, "psychologist"},
                     {Role::Counsellor, "counsellor"},
                     {Role::SocialWorker, "social-worker"},
                     {Role::Pharmacist, "pharmacist"},
                     {Role::LaboratoryScientist, "laboratory-scientist"},
                     {Role::MedicalTechnologist, "medical-technologist"},
                     {Role::Dentist, "dentist"},
                     {Role::Optometrist, "optometrist"},
                     {Role::Chiropractor, "chiropractor"},
                     {Role::HomeHealthAide, "home-health-aide"},
                     {Role::Nutritionist, "nutritionist"},
                     {Role::PersonalTrainer, "personal-trainer"},
                     {Role::YogaInstructor, "yoga-instructor"},
                     {Role::PharmacyTechnician, "pharmacy-technician"},
                     {Role::Student, "student"},
                     {Role::Intern, "intern"},
                     {Role::HospitalAdministrator, "hospital-administrator"},
                     {Role::MedicalRecordsTechnician, "medical-records-technician"},
                     {Role::HealthDataAnalyst, "health-data-analyst"},
                     {Role::ItStaff, "it-staff"},
                     {Role::MedicalTranscriptionist, "medical-transcriptionist"},
                     {Role::BillingSpecialist, "billing-specialist"},
                     {Role::HealthInformaticsSpecialist, "health-informatics-specialist"},
                     {Role::PatientCoordinator, "patient-coordinator"},
                     {Role::PrivacyOfficer, "privacy-officer"},
                     {Role::QualityAssuranceManager, "quality-assurance-manager"},
                     {Role::Patient, "patient"},
                     {Role::FamilyMember, "family-member"},
                     {Role::Parent, "parent"},
                     {Role::LegalGuardian, "legal-guardian"},
                     {Role::PowerOfAttorney, "power-of-attorney"},
                     {Role::Caregiver, "caregiver"},
                     {Role::PersonalContact, "personal-contact"},
                     {Role::Researcher, "researcher"},
                     {Role::Other, "other"});

enum class RegistrationStatus : std::uint8_t { RegisteredProvider, Unregistered };
ONTOGUARD_ENUM_NAMES(RegistrationStatus, "registration_status",
                     {RegistrationStatus::RegisteredProvider, "registered-provider"},
                     {RegistrationStatus::Unregistered, "unregistered"});

enum class Relationship : std::uint8_t { None, Friend, Relative, Partner, Colleague, Neighbor, Other };
ONTOGUARD_ENUM_NAMES(Relationship, "relationship_to_patient",
                     {Relationship::None, "none"},
                     {Relationship::Friend, "friend"},
                     {Relationship::Relative, "relative"},
                     {Relationship::Partner, "partner"},
                     {Relationship::Colleague, "colleague"},
                     {Relationship::Neighbor, "neighbor"},
                     {Relationship::Other, "other"});

enum class RecordScope : std::uint8_t { FullRecord, MedicationList, Imaging, MentalHealth, ContactInfo, Other };
ONTOGUARD_ENUM_NAMES(RecordScope, "record_scope",
                     {RecordScope::FullRecord, "full-record"},
                     {RecordScope::MedicationList, "medication-list"},
                     {RecordScope::Imaging, "imaging"},
                     {RecordScope::MentalHealth, "mental-health"},
                     {RecordScope::ContactInfo, "contact-info"},
                     {RecordScope::Other, "other"});

enum class Sensitivity : std::uint8_t { Normal, Restricted };
ONTOGUARD_ENUM_NAMES(Sensitivity, "sensitivity",
                     {Sensitivity::Normal, "normal"},
                     {Sensitivity::Restricted, "restricted"});

enum class Purpose : std::uint8_t { HealthcareProvision, Research, Billing, Administration, Education, Personal, Other };
ONTOGUARD_ENUM_NAMES(Purpose, "purpose",
                     {Purpose::HealthcareProvision, "healthcare-provision"},
                     {Purpose::Research, "research"},
                     {Purpose::Billing, "billing"},
                     {Purpose::Administration, "administration"},
                     {Purpose::Education, "education"},
                     {Purpose::Personal, "personal"},
                     {Purpose::Other, "other"});

enum class Consent : std::uint8_t { Granted, Absent, Unknown };
ONTOGUARD_ENUM_NAMES(Consent, "consent",
                     {Consent::Granted, "granted"},
                     {Consent::Absent, "absent"},
                     {Consent::Unknown, "unknown"});

enum class Supervision : std::uint8_t { Supervised, Unsupervised, NotApplicable };
ONTOGUARD_ENUM_NAMES(Supervision, "supervision",
                     {Supervision::Supervised, "supervised"},
                     {Supervision::Unsupervised, "unsupervised"},
                     {Supervision::NotApplicable, "not-applicable"});

// ---------------------------------------------------------------------------
// Context vocabulary

enum class Situation : std::uint8_t { Routine, Emergency, AfterHours, RemoteTelehealth, HomeCare };
ONTOGUARD_ENUM_NAMES(Situation, "situation",
                     {Situation::Routine, "routine"},
                     {Situation::Emergency, "emergency"},
                     {Situation::AfterHours, "after-hours"},
                     {Situation::RemoteTelehealth, "remote-telehealth"},
                     {Situation::HomeCare, "home-care"});

enum class Urgency : std::uint8_t { Low, Normal, High, Critical };
ONTOGUARD_ENUM_NAMES(Urgency, "urgency",
                     {Urgency::Low, "low"},
                     {Urgency::Normal, "normal"},
                     {Urgency::High, "high"},
                     {Urgency::Critical, "critical"});

enum class Location : std::uint8_t { OnPremises, OffSite, PatientHome, Unknown };
ONTOGUARD_ENUM_NAMES(Location, "location",
                     {Location::OnPremises, "on-premises"},
                     {Location::OffSite, "off-site"},
                     {Location::PatientHome, "patient-home"},
                     {Location::Unknown, "unknown"});

enum class Device : std::uint8_t { HospitalApproved, Byod, Unknown };
ONTOGUARD_ENUM_NAMES(Device, "device",
                     {Device::HospitalApproved, "hospital-approved"},
                     {Device::Byod, "byod"},
                     {Device::Unknown, "unknown"});

enum class Clearance : std::uint8_t { None, Standard, Elevated };
ONTOGUARD_ENUM_NAMES(Clearance, "clearance",
                     {Clearance::None, "none"},
                     {Clearance::Standard, "standard"},
                     {Clearance::Elevated, "elevated"});

// ---------------------------------------------------------------------------
// Policy vocabulary

enum class SourceAct : std::uint8_t { PrivacyAct1988, MyHealthRecordsAct2012, HealthRecordsAct2001 };
ONTOGUARD_ENUM_NAMES(SourceAct, "source_act",
                     {SourceAct::PrivacyAct1988, "privacy-act-1988"},
                     {SourceAct::MyHealthRecordsAct2012, "my-health-records-act-2012"},
                     {SourceAct::HealthRecordsAct2001, "health-records-act-2001"});

enum class Effect : std::uint8_t { Authorize, Prohibit, AuthorizeWithConditions };
ONTOGUARD_ENUM_NAMES(Effect, "effect",
                     {Effect::Authorize, "Authorize"},
                     {Effect::Prohibit, "Prohibit"},
                     {Effect::AuthorizeWithConditions, "AuthorizeWithConditions"});

// The first four are attribute conditions (ABAC channel); the device and
// premises conditions are context conditions (CAAC channel);
// emergency-overridable is a marker consulted by the CAAC channel.
enum class Condition : std::uint8_t {
  ConsentRequired,
  SupervisionRequired,
  PurposeMustBeHealthcare,
  RegisteredProviderRequired,
  EmergencyOverridable,
  HospitalApprovedDeviceRequired,
  OnPremisesRequired,
};
ONTOGUARD_ENUM_NAMES(Condition, "condition",
                     {Condition::ConsentRequired, "consent-required"},
                     {Condition::SupervisionRequired, "supervision-required"},
                     {Condition::PurposeMustBeHealthcare, "purpose-must-be-healthcare"},
                     {Condition::RegisteredProviderRequired, "registered-provider-required"},
                     {Condition::EmergencyOverridable, "emergency-overridable"},
                     {Condition::HospitalApprovedDeviceRequired, "hospital-approved-device-required"},
                     {Condition::OnPremisesRequired, "on-premises-required"});

constexpr bool is_attribute_condition(Condition c) {
  return c == Condition::ConsentRequired || c == Condition::SupervisionRequired ||
         c == Condition::PurposeMustBeHealthcare || c == Condition::RegisteredProviderRequired;
}

constexpr bool is_context_condition(Condition c) {
  return c == Condition::HospitalApprovedDeviceRequired || c == Condition::OnPremisesRequired;
}

// Registration cannot be fixed by the requester; everything else can.
constexpr bool is_remediable(Condition c) {
  return c != Condition::RegisteredProviderRequired && c != Condition::EmergencyOverridable;
}

// Break-glass waives only these gaps.
constexpr bool is_emergency_waivable(Condition c) {
  return c == Condition::ConsentRequired || c == Condition::SupervisionRequired;
}

enum class Priority : std::uint8_t { Mandatory, Default };
ONTOGUARD_ENUM_NAMES(Priority, "priority",
                     {Priority::Mandatory, "Mandatory"},
                     {Priority::Default, "Default"});

enum class ConditionStatus : std::uint8_t { Satisfied, Unsatisfied, Indeterminate };
ONTOGUARD_ENUM_NAMES(ConditionStatus, "condition_status",
                     {ConditionStatus::Satisfied, "satisfied"},
                     {ConditionStatus::Unsatisfied, "unsatisfied"},
                     {ConditionStatus::Indeterminate, "indeterminate"});

// ---------------------------------------------------------------------------
// Decision vocabulary

enum class VerdictKind : std::uint8_t { Grant, ConditionalGrant, Deny };
ONTOGUARD_ENUM_NAMES(VerdictKind, "verdict",
                     {VerdictKind::Grant, "Grant"},
                     {VerdictKind::ConditionalGrant, "ConditionalGrant"},
                     {VerdictKind::Deny, "Deny"});

enum class Channel : std::uint8_t { Ontology, Abac, Caac };
ONTOGUARD_ENUM_NAMES(Channel, "channel",
                     {Channel::Ontology, "Ontology"},
                     {Channel::Abac, "ABAC"},
                     {Channel::Caac, "CAAC"});

enum class Stance : std::uint8_t { Permit, PermitWithConditions, Forbid, Abstain };
ONTOGUARD_ENUM_NAMES(Stance, "stance",
                     {Stance::Permit, "Permit"},
                     {Stance::PermitWithConditions, "PermitWithConditions"},
                     {Stance::Forbid, "Forbid"},
                     {Stance::Abstain, "Abstain"});

// Parties that can disagree: the three channels plus the backend against the
// rule engine's own resolution.
enum class Party : std::uint8_t { Ontology, Abac, Caac, Backend, RuleEngine };
ONTOGUARD_ENUM_NAMES(Party, "party",
                     {Party::Ontology, "Ontology"},
                     {Party::Abac, "ABAC"},
                     {Party::Caac, "CAAC"},
                     {Party::Backend, "Backend"},
                     {Party::RuleEngine, "RuleEngine"});

enum class ConflictKind : std::uint8_t { StanceDisagreement, ConditionContradiction };
ONTOGUARD_ENUM_NAMES(ConflictKind, "conflict_kind",
                     {ConflictKind::StanceDisagreement, "StanceDisagreement"},
                     {ConflictKind::ConditionContradiction, "ConditionContradiction"});

enum class Stage : std::uint8_t { Draft, Resolved, Final };
ONTOGUARD_ENUM_NAMES(Stage, "stage",
                     {Stage::Draft, "Draft"},
                     {Stage::Resolved, "Resolved"},
                     {Stage::Final, "Final"});

enum class FaultKind : std::uint8_t { Timeout, TransportError, UnparseableResponse };
ONTOGUARD_ENUM_NAMES(FaultKind, "fault",
                     {FaultKind::Timeout, "Timeout"},
                     {FaultKind::TransportError, "TransportError"},
                     {FaultKind::UnparseableResponse, "UnparseableResponse"});



}  // namespace ontoguard
