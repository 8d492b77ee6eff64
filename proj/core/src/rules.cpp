#include "ontoguard/rules.hpp"

#include <algorithm>

namespace ontoguard {

std::string remediation_text(Condition c) {
  switch (c) {
    case Condition::ConsentRequired:
      return "obtain patient's informed consent";
    case Condition::SupervisionRequired:
      return "perform under supervision of a registered provider";
    case Condition::PurposeMustBeHealthcare:
      return "route via ethics/authority approval";
    case Condition::RegisteredProviderRequired:
      return "access not obtainable for unregistered actors";
    case Condition::HospitalApprovedDeviceRequired:
      return "access from a hospital-approved device";
    case Condition::OnPremisesRequired:
      return "access from hospital premises";
    case Condition::EmergencyOverridable:
      break;
  }
  return std::string(kNoRemediation);
}

std::vector<ChannelVerdict> evaluate_channels(const AttributeSet& attrs, const ContextSnapshot& context,
                                              const std::vector<ProvisionMatch>& matches) {
  return {evaluate_ontology_channel(matches), evaluate_abac(attrs, matches), evaluate_caac(context, matches)};
}

namespace {

const ChannelVerdict& channel_of(const std::vector<ChannelVerdict>& channels, Channel c) {
  for (const auto& v : channels) {
    if (v.channel == c) return v;
  }
  static const ChannelVerdict abstain{};
  return abstain;
}

void add_citations(std::vector<ProvisionCitation>& out, const std::vector<ProvisionCitation>& from) {
  for (const auto& c : from) {
    if (std::ranges::find(out, c) == out.end()) out.push_back(c);
  }
}

// Canonical union: condition order, first status seen wins, except that
// unsatisfied beats indeterminate.
std::vector<ConditionCheck> union_conditions(const std::vector<ConditionCheck>& a,
                                             const std::vector<ConditionCheck>& b) {
  std::vector<ConditionCheck> out;
  for (const auto* list : {&a, &b}) {
    for (const auto& c : *list) {
      auto it = std::ranges::find_if(out, [&](const ConditionCheck& o) { return o.condition == c.condition; });
      if (it == out.end()) {
        out.push_back(c);
      } else if (c.status == ConditionStatus::Unsatisfied) {
        it->status = ConditionStatus::Unsatisfied;
      }
    }
  }
  std::ranges::sort(out, [](const ConditionCheck& x, const ConditionCheck& y) { return x.condition < y.condition; });
  return out;
}

Verdict deny(const RuleInput& in, std::vector<ProvisionCitation> rationale) {
  Verdict v;
  v.kind = VerdictKind::Deny;
  v.rationale = std::move(rationale);
  v.recommendations = recommendations_for(in);
  return v;
}

Verdict grant(VerdictKind kind, std::vector<std::string> obligations, std::vector<ProvisionCitation> rationale) {
  Verdict v;
  v.kind = kind;
  obligations.emplace_back(kConfidentialityObligation);
  v.obligations = std::move(obligations);
  v.rationale = std::move(rationale);
  return v;
}

}  // namespace

Verdict rule_verdict(const RuleInput& in) {
  const auto& onto = channel_of(in.channels, Channel::Ontology);
  const auto& abac = channel_of(in.channels, Channel::Abac);
  const auto& caac = channel_of(in.channels, Channel::Caac);
  const bool emergency_permit = is_emergency_permit(caac, in.context);

  std::vector<ProvisionCitation> rationale;
  add_citations(rationale, onto.basis);

  // Mandatory prohibitions are absolute.
  bool mandatory_prohibit = false;
  bool default_prohibit = false;
  for (const auto& m : in.matches) {
    if (m.effect != Effect::Prohibit) continue;
    (m.priority == Priority::Mandatory ? mandatory_prohibit : default_prohibit) = true;
  }
  if (mandatory_prohibit) return deny(in, rationale);

  if (in.matches.empty()) {
    if (rationale.empty()) rationale.push_back({std::string(kNoAuthorizingProvision), "no provision applies"});
    return deny(in, rationale);
  }

  if (abac.stance == Stance::Forbid) {
    add_citations(rationale, abac.basis);
    return deny(in, rationale);
  }
  if (caac.stance == Stance::Forbid) {
    add_citations(rationale, caac.basis);
    return deny(in, rationale);
  }

  if (default_prohibit) {
    if (emergency_permit) {
      add_citations(rationale, caac.basis);
      return grant(VerdictKind::ConditionalGrant, {std::string(kRetrospectiveReviewObligation)}, rationale);
    }
    return deny(in, rationale);
  }

  if (abac.stance == Stance::Permit) {
    add_citations(rationale, abac.basis);
    if (caac.stance == Stance::PermitWithConditions) {
      add_citations(rationale, caac.basis);
      std::vector<std::string> obligations;
      for (const auto& c : caac.conditions) obligations.push_back(remediation_text(c.condition));
      return grant(VerdictKind::ConditionalGrant, obligations, rationale);
    }
    return grant(VerdictKind::Grant, {}, rationale);
  }

  // ABAC permits subject to conditions.
  add_citations(rationale, abac.basis);
  std::vector<ConditionCheck> outstanding = abac.conditions;
  if (emergency_permit) {
    add_citations(rationale, caac.basis);
    std::erase_if(outstanding, [](const ConditionCheck& c) { return is_emergency_waivable(c.condition); });
    if (outstanding.empty()) {
      return grant(VerdictKind::ConditionalGrant, {std::string(kRetrospectiveReviewObligation)}, rationale);
    }
  } else if (caac.stance == Stance::PermitWithConditions) {
    add_citations(rationale, caac.basis);
    outstanding = union_conditions(outstanding, caac.conditions);
  }
  outstanding = union_conditions(outstanding, {});

  const bool all_pending = std::ranges::all_of(
      outstanding, [](const ConditionCheck& c) { return c.status == ConditionStatus::Indeterminate; });
  if (all_pending) {
    std::vector<std::string> obligations;
    for (const auto& c : outstanding) obligations.push_back(remediation_text(c.condition));
    return grant(VerdictKind::ConditionalGrant, obligations, rationale);
  }
  return deny(in, rationale);
}

std::vector<std::string> recommendations_for(const RuleInput& in) {
  const auto& abac = channel_of(in.channels, Channel::Abac);
  const auto& caac = channel_of(in.channels, Channel::Caac);

  std::vector<ConditionCheck> unmet;
  if (abac.stance == Stance::PermitWithConditions) {
    unmet = abac.conditions;
  } else if (abac.stance == Stance::Forbid) {
    // the authorizing match closest to being satisfied
    const ProvisionMatch* best = nullptr;
    for (const auto& m : in.matches) {
      if (!m.is_authorizing()) continue;
      if (best == nullptr || m.unmet().size() < best->unmet().size()) best = &m;
    }
    if (best != nullptr) unmet = best->unmet();
  }
  if (caac.stance == Stance::PermitWithConditions || caac.stance == Stance::Forbid) {
    unmet = union_conditions(unmet, caac.conditions);
  }
  unmet = union_conditions(unmet, {});

  bool registration_blocked = std::ranges::any_of(unmet, [](const ConditionCheck& c) {
    return c.condition == Condition::RegisteredProviderRequired && c.status == ConditionStatus::Unsatisfied;
  });
  const bool prohibited = std::ranges::any_of(in.matches, [](const ProvisionMatch& m) { return !m.is_authorizing(); });
  if (prohibited && in.request.subject.registration_status == RegistrationStatus::Unregistered) {
    registration_blocked = true;
  }

  std::vector<Condition> recommend;
  for (const auto& c : unmet) {
    if (c.condition == Condition::RegisteredProviderRequired || !is_remediable(c.condition)) continue;
    // a prohibition cannot be remedied by meeting an authorizing provision's conditions
    if (prohibited) continue;
    recommend.push_back(c.condition);
  }
  if (registration_blocked) recommend.push_back(Condition::RegisteredProviderRequired);
  std::ranges::sort(recommend);

  std::vector<std::string> out;
  for (Condition c : recommend) out.push_back(remediation_text(c));
  if (out.empty()) out.emplace_back(kNoRemediation);
  return out;
}

}  // namespace ontoguard
