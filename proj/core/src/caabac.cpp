#include "ontoguard/caabac.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string_view>

#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

template <std::size_t N>
std::optional<std::string_view> first_hit(const std::string& text, const std::array<std::string_view, N>& words) {
  for (auto w : words) {
    if (text.find(w) != std::string::npos) return w;
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 3> kNfrPhrases = {"not for resuscitation", "not-for-resuscitation",
                                                         "nfr"};
constexpr std::array<std::string_view, 11> kEmergency = {
    "emergency", "critical",  "critically", "airlifted", "unconscious",     "collapsed",
    "trauma",    "crisis",    "suicide",    "life-threatening", "resuscitat"};
constexpr std::array<std::string_view, 4> kCriticalUrgency = {"critical", "critically", "unconscious",
                                                              "life-threatening"};
constexpr std::array<std::string_view, 7> kTelehealth = {"telehealth",   "teleconsult", "telemedicine", "telepsychiatr",
                                                         "telepharmacy", "remote",      "virtual"};
constexpr std::array<std::string_view, 8> kHomeCare = {"home care",   "home-based",  "in-home",       "at home",
                                                       "home health", "home therapy", "home delivery", "at their home"};
constexpr std::array<std::string_view, 4> kAfterHours = {"after hours", "after-hours", "overnight", "night shift"};
constexpr std::array<std::string_view, 3> kUrgent = {"urgent", "urgently", "as soon as possible"};
constexpr std::array<std::string_view, 4> kEnRoute = {"en route", "on the way to the hospital", "during the flight",
                                                      "in the ambulance"};
constexpr std::array<std::string_view, 5> kOnPremises = {"emergency room", "emergency department", "hospital",
                                                         "admitted", "on the ward"};
constexpr std::array<std::string_view, 3> kByod = {"byod", "own device", "personal device"};
constexpr std::array<std::string_view, 2> kApprovedDevice = {"hospital-approved", "hospital workstation"};

bool has_nfr_flag(const std::string& text) {
  for (auto p : kNfrPhrases) {
    auto pos = text.find(p);
    while (pos != std::string::npos) {
      // "nfr" only as a standalone token
      bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(text[pos - 1]));
      std::size_t end = pos + p.size();
      bool right_ok = end >= text.size() || !std::isalpha(static_cast<unsigned char>(text[end]));
      if (p != "nfr" || (left_ok && right_ok)) return true;
      pos = text.find(p, pos + 1);
    }
  }
  return false;
}

// The NFR phrase mentions resuscitation without describing an emergency.
std::string without_nfr_phrases(std::string text) {
  for (auto p : {std::string_view("not for resuscitation"), std::string_view("not-for-resuscitation")}) {
    for (auto pos = text.find(p); pos != std::string::npos; pos = text.find(p)) text.erase(pos, p.size());
  }
  return text;
}

template <typename E>
void apply_override(E& field, const std::optional<E>& over, const char* name, AttributeSet& attrs) {
  if (!over || *over == field) return;
  attrs.derivation_notes.push_back(std::string(name) + ": override " + std::string(to_string(field)) + " -> " +
                                   std::string(to_string(*over)));
  field = *over;
}

}  // namespace

std::map<std::string, std::string> AttributeSet::to_map() const {
  std::map<std::string, std::string> m;
  m["subject.role"] = to_string(subject.role);
  m["subject.registration"] = to_string(subject.registration);
  m["subject.relationship"] = to_string(subject.relationship);
  m["subject.clearance"] = to_string(subject.clearance);
  m["resource.scope"] = to_string(resource.scope);
  m["resource.sensitivity"] = to_string(resource.sensitivity);
  std::string flags;
  for (const auto& f : resource.clinical_flags) flags += (flags.empty() ? "" : ",") + f;
  m["resource.clinical_flags"] = flags;
  m["environment.situation"] = to_string(environment.situation);
  m["environment.urgency"] = to_string(environment.urgency);
  m["environment.location"] = to_string(environment.location);
  m["environment.device"] = to_string(environment.device);
  m["environment.timestamp"] = to_iso8601(environment.timestamp);
  return m;
}

CaptureResult capture_context(const AccessRequest& request, const RawContext& raw) {
  AttributeSet attrs;
  const ContextOverrides& over = raw.overrides;
  if (over.supervision && *over.supervision != request.supervision) {
    throw ContradictoryOverride("supervision override " + std::string(to_string(*over.supervision)) +
                                " disagrees with the request's " + std::string(to_string(request.supervision)));
  }

  std::string text = lowercase(request.raw_narrative);
  if (!raw.text.empty()) text += " " + lowercase(raw.text);
  const std::string scan = without_nfr_phrases(text);
  auto& notes = attrs.derivation_notes;

  ContextSnapshot ctx;
  ctx.timestamp = raw.timestamp;

  // situation, by precedence
  if (auto hit = first_hit(scan, kEmergency)) {
    ctx.situation = Situation::Emergency;
    notes.push_back("situation: emergency from '" + std::string(*hit) + "'");
  } else if (auto hit = first_hit(scan, kTelehealth)) {
    ctx.situation = Situation::RemoteTelehealth;
    notes.push_back("situation: remote-telehealth from '" + std::string(*hit) + "'");
  } else if (auto hit = first_hit(scan, kHomeCare)) {
    ctx.situation = Situation::HomeCare;
    notes.push_back("situation: home-care from '" + std::string(*hit) + "'");
  } else if (auto hit = first_hit(scan, kAfterHours)) {
    ctx.situation = Situation::AfterHours;
    notes.push_back("situation: after-hours from '" + std::string(*hit) + "'");
  } else {
    notes.push_back("situation: defaulted to routine");
  }

  if (ctx.situation == Situation::Emergency) {
    if (auto hit = first_hit(scan, kCriticalUrgency)) {
      ctx.urgency = Urgency::Critical;
      notes.push_back("urgency: critical from '" + std::string(*hit) + "'");
    } else {
      ctx.urgency = Urgency::High;
      notes.push_back("urgency: high for an emergency");
    }
  } else if (auto hit = first_hit(scan, kUrgent)) {
    ctx.urgency = Urgency::High;
    notes.push_back("urgency: high from '" + std::string(*hit) + "'");
  } else {
    notes.push_back("urgency: defaulted to normal");
  }

  if (auto hit = first_hit(scan, kEnRoute)) {
    ctx.location = Location::OffSite;
    notes.push_back("location: off-site from '" + std::string(*hit) + "'");
  } else if (ctx.situation == Situation::RemoteTelehealth) {
    ctx.location = Location::OffSite;
    notes.push_back("location: off-site for remote-telehealth");
  } else if (ctx.situation == Situation::HomeCare) {
    ctx.location = Location::PatientHome;
    notes.push_back("location: patient-home for home-care");
  } else if (auto hit = first_hit(scan, kOnPremises)) {
    ctx.location = Location::OnPremises;
    notes.push_back("location: on-premises from '" + std::string(*hit) + "'");
  } else {
    notes.push_back("location: defaulted to unknown");
  }

  if (auto hit = first_hit(scan, kByod)) {
    ctx.device = Device::Byod;
    notes.push_back("device: byod from '" + std::string(*hit) + "'");
  } else if (auto hit = first_hit(scan, kApprovedDevice)) {
    ctx.device = Device::HospitalApproved;
    notes.push_back("device: hospital-approved from '" + std::string(*hit) + "'");
  } else {
    notes.push_back("device: defaulted to unknown");
  }

  apply_override(ctx.situation, over.situation, "situation", attrs);
  apply_override(ctx.location, over.location, "location", attrs);
  apply_override(ctx.device, over.device, "device", attrs);
  if (over.urgency) {
    apply_override(ctx.urgency, over.urgency, "urgency", attrs);
  } else if (ctx.situation == Situation::Emergency && ctx.urgency != Urgency::High &&
             ctx.urgency != Urgency::Critical) {
    notes.push_back("urgency: raised to high for an emergency");
    ctx.urgency = Urgency::High;
  }
  if (!context_consistent(ctx)) {
    throw ContradictoryOverride("urgency " + std::string(to_string(ctx.urgency)) +
                                " is inconsistent with an emergency situation");
  }

  attrs.subject.role = request.subject.actor_role;
  attrs.subject.registration = request.subject.registration_status;
  attrs.subject.relationship = request.subject.relationship_to_patient;
  if (text.find("security clearance") != std::string::npos) {
    attrs.subject.clearance = Clearance::Elevated;
    notes.push_back("clearance: elevated from 'security clearance'");
  } else if (request.subject.registration_status == RegistrationStatus::RegisteredProvider) {
    attrs.subject.clearance = Clearance::Standard;
    notes.push_back("clearance: standard for a registered provider");
  } else {
    notes.push_back("clearance: defaulted to none");
  }

  attrs.resource.scope = request.resource.record_scope;
  attrs.resource.sensitivity = request.resource.sensitivity;
  if (request.resource.record_scope == RecordScope::MentalHealth &&
      request.resource.sensitivity != Sensitivity::Restricted) {
    attrs.resource.sensitivity = Sensitivity::Restricted;
    notes.push_back("sensitivity: restricted for mental-health scope");
  }
  if (has_nfr_flag(text)) {
    attrs.resource.clinical_flags.push_back("NFR");
    notes.push_back("clinical_flags: NFR");
  }

  attrs.environment = ctx;
  return {std::move(attrs), ctx};
}

ContextOverrides overrides_from(const ContextSnapshot& s) {
  ContextOverrides o;
  o.situation = s.situation;
  o.urgency = s.urgency;
  o.location = s.location;
  o.device = s.device;
  return o;
}

ContextOverrides parse_overrides(const json& j) {
  ContextOverrides o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw Error("WrongType", "context overrides must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "situation") o.situation = value.get<Situation>();
    else if (key == "urgency") o.urgency = value.get<Urgency>();
    else if (key == "location") o.location = value.get<Location>();
    else if (key == "device") o.device = value.get<Device>();
    else if (key == "supervision") o.supervision = value.get<Supervision>();
    else throw Error("UnknownField", "unknown context override '" + key + "'");
  }
  return o;
}

json overrides_to_json(const ContextOverrides& o) {
  json j = json::object();
  if (o.situation) j["situation"] = *o.situation;
  if (o.urgency) j["urgency"] = *o.urgency;
  if (o.location) j["location"] = *o.location;
  if (o.device) j["device"] = *o.device;
  if (o.supervision) j["supervision"] = *o.supervision;
  return j;
}

void to_json(json& j, const AttributeSet& a) {
  j = json::object();
  for (const auto& [k, v] : a.to_map()) j[k] = v;
  j["derivation_notes"] = a.derivation_notes;
}

// ---------------------------------------------------------------------------

ConditionStatus evaluate_context_condition(Condition c, const ContextSnapshot& ctx) {
  switch (c) {
    case Condition::HospitalApprovedDeviceRequired:
      if (ctx.device == Device::HospitalApproved) return ConditionStatus::Satisfied;
      if (ctx.device == Device::Byod) return ConditionStatus::Unsatisfied;
      return ConditionStatus::Indeterminate;
    case Condition::OnPremisesRequired:
      if (ctx.location == Location::OnPremises) return ConditionStatus::Satisfied;
      if (ctx.location == Location::Unknown) return ConditionStatus::Indeterminate;
      return ConditionStatus::Unsatisfied;
    default:
      return ConditionStatus::Indeterminate;
  }
}

namespace {

ProvisionCitation cite(const ProvisionMatch& m, std::string detail) { return {m.provision_id, std::move(detail)}; }

std::string describe_unmet(const std::vector<ConditionCheck>& checks) {
  std::string out;
  for (const auto& c : checks) {
    if (!out.empty()) out += ", ";
    out += std::string(to_string(c.condition)) + " " + std::string(to_string(c.status));
  }
  return out;
}

// Among `candidates`, the first match with the fewest unmet conditions.
const ProvisionMatch* best_of(const std::vector<const ProvisionMatch*>& candidates) {
  const ProvisionMatch* best = nullptr;
  std::size_t fewest = 0;
  for (const auto* m : candidates) {
    auto n = m->unmet().size();
    if (best == nullptr || n < fewest) {
      best = m;
      fewest = n;
    }
  }
  return best;
}

}  // namespace

ChannelVerdict evaluate_ontology_channel(const std::vector<ProvisionMatch>& matches) {
  ChannelVerdict v;
  v.channel = Channel::Ontology;
  std::vector<const ProvisionMatch*> authorizing;
  for (const auto& m : matches) {
    if (m.effect == Effect::Prohibit) {
      v.basis.push_back(cite(m, std::string(to_string(m.priority)) + " prohibition applies"));
    } else {
      authorizing.push_back(&m);
    }
  }
  if (!v.basis.empty()) {
    v.stance = Stance::Forbid;
    return v;
  }
  if (authorizing.empty()) {
    v.stance = Stance::Abstain;
    v.basis.push_back({std::string(kNoAuthorizingProvision), "no provision applies to the request"});
    return v;
  }
  std::vector<const ProvisionMatch*> satisfied;
  for (const auto* m : authorizing) {
    if (m->fully_satisfied()) satisfied.push_back(m);
  }
  if (!satisfied.empty()) {
    v.stance = Stance::Permit;
    for (const auto* m : satisfied) v.basis.push_back(cite(*m, "authorizes; all conditions met"));
    return v;
  }
  const ProvisionMatch* best = best_of(authorizing);
  v.stance = Stance::PermitWithConditions;
  v.conditions = best->unmet();
  for (const auto* m : authorizing) v.basis.push_back(cite(*m, "authorizes subject to " + describe_unmet(m->unmet())));
  return v;
}

ChannelVerdict evaluate_abac(const AttributeSet& /*attrs*/, const std::vector<ProvisionMatch>& matches) {
  ChannelVerdict v;
  v.channel = Channel::Abac;
  std::vector<const ProvisionMatch*> authorizing;
  std::vector<const ProvisionMatch*> prohibiting;
  for (const auto& m : matches) (m.is_authorizing() ? authorizing : prohibiting).push_back(&m);

  if (authorizing.empty()) {
    if (prohibiting.empty()) {
      v.stance = Stance::Abstain;
      v.basis.push_back({"", "no provision states attribute conditions"});
    } else {
      v.stance = Stance::Forbid;
      for (const auto* m : prohibiting) v.basis.push_back(cite(*m, "subject attributes fall within a prohibition"));
    }
    return v;
  }

  std::vector<const ProvisionMatch*> satisfied;
  std::vector<const ProvisionMatch*> viable;
  for (const auto* m : authorizing) {
    if (m->fully_satisfied()) satisfied.push_back(m);
    if (m->viable()) viable.push_back(m);
  }
  if (!satisfied.empty()) {
    v.stance = Stance::Permit;
    for (const auto* m : satisfied) v.basis.push_back(cite(*m, "attribute conditions satisfied"));
    return v;
  }
  if (!viable.empty()) {
    const ProvisionMatch* best = best_of(viable);
    v.stance = Stance::PermitWithConditions;
    v.conditions = best->unmet();
    v.basis.push_back(cite(*best, "attribute conditions outstanding: " + describe_unmet(v.conditions)));
    return v;
  }
  v.stance = Stance::Forbid;
  for (const auto* m : authorizing) {
    v.basis.push_back(cite(*m, "attribute conditions cannot be met: " + describe_unmet(m->unmet())));
  }
  return v;
}

ChannelVerdict evaluate_caac(const ContextSnapshot& ctx, const std::vector<ProvisionMatch>& matches) {
  ChannelVerdict v;
  v.channel = Channel::Caac;
  const bool emergency = ctx.situation == Situation::Emergency && context_consistent(ctx);

  if (emergency) {
    for (const auto& m : matches) {
      if (m.is_authorizing() && m.emergency_overridable) {
        v.basis.push_back(cite(m, "emergency override available"));
      }
    }
    if (!v.basis.empty()) {
      v.stance = Stance::Permit;
      return v;
    }
  }

  std::vector<ProvisionCitation> violated;
  std::vector<ConditionCheck> violated_checks;
  std::vector<ProvisionCitation> pending_basis;
  std::vector<ConditionCheck> pending;
  for (const auto& m : matches) {
    if (!m.is_authorizing()) continue;
    for (Condition c : m.context_conditions) {
      auto status = evaluate_context_condition(c, ctx);
      std::string detail = std::string(to_string(c)) + " " + std::string(to_string(status));
      if (status == ConditionStatus::Unsatisfied) {
        violated.push_back(cite(m, detail));
        ConditionCheck check{c, status};
        if (std::ranges::find(violated_checks, check) == violated_checks.end()) violated_checks.push_back(check);
      } else if (status == ConditionStatus::Indeterminate) {
        pending_basis.push_back(cite(m, detail));
        ConditionCheck check{c, status};
        if (std::ranges::find(pending, check) == pending.end()) pending.push_back(check);
      }
    }
  }
  if (!violated.empty()) {
    v.stance = Stance::Forbid;
    v.conditions = std::move(violated_checks);
    v.basis = std::move(violated);
    return v;
  }
  if (!pending.empty()) {
    v.stance = Stance::PermitWithConditions;
    v.conditions = std::move(pending);
    v.basis = std::move(pending_basis);
    return v;
  }
  v.stance = Stance::Abstain;
  v.basis.push_back({"", "no context-relevant provision"});
  return v;
}

bool is_emergency_permit(const ChannelVerdict& caac, const ContextSnapshot& ctx) {
  return caac.channel == Channel::Caac && caac.stance == Stance::Permit && ctx.situation == Situation::Emergency;
}

}  // namespace ontoguard
