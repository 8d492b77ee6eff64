#include "ontoguard/pipeline.hpp"

#include <algorithm>

#include "ontoguard/error.hpp"
#include "ontoguard/rules.hpp"

namespace ontoguard {

namespace {

Party party_of(Channel c) {
  switch (c) {
    case Channel::Ontology:
      return Party::Ontology;
    case Channel::Abac:
      return Party::Abac;
    case Channel::Caac:
      return Party::Caac;
  }
  return Party::Ontology;
}

bool permits(Stance s) { return s == Stance::Permit || s == Stance::PermitWithConditions; }

void append_unique(std::vector<std::string>& out, const std::vector<std::string>& extra) {
  for (const auto& e : extra) {
    if (std::ranges::find(out, e) == out.end()) out.push_back(e);
  }
}

}  // namespace

Decision decide(const Ontology& ontology, const AccessRequest& request, const RawContext& raw,
                DecisionBackend& backend) {
  if (ontology.provisions.empty()) throw NoProvisionCorpus("the ontology holds no provisions");

  auto matches = applicable_provisions(ontology, request);
  auto captured = capture_context(request, raw);
  auto channels = evaluate_channels(captured.attributes, captured.context, matches);

  BackendVerdict bv = backend.decide({request, captured.attributes, captured.context, matches});

  Decision d;
  d.request_id = request.request_id;
  d.stage = Stage::Draft;
  d.request = request;
  d.verdict = bv.verdict;
  d.channels = std::move(channels);
  d.matches = std::move(matches);
  d.context = captured.context;
  d.backend_id = backend.id();
  // a fault means the rule engine produced the verdict
  d.backend_deterministic = backend.capabilities().deterministic || bv.fault.has_value();
  d.backend_raw_response = bv.raw_response;
  d.backend_fault = bv.fault;
  d.produced_at = raw.timestamp;
  d.conflicts = detect_conflicts(d.channels, d.verdict, rule_engine_verdict(d));
  return d;
}

Verdict rule_engine_verdict(const Decision& d) {
  return rule_verdict({d.request, d.channels, d.matches, d.context});
}

std::vector<Conflict> detect_conflicts(const std::vector<ChannelVerdict>& channels, const Verdict& backend_verdict,
                                       const Verdict& rule_engine) {
  std::vector<Conflict> out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    for (std::size_t j = i + 1; j < channels.size(); ++j) {
      const auto& a = channels[i];
      const auto& b = channels[j];
      const bool disagree = (permits(a.stance) && b.stance == Stance::Forbid) ||
                            (a.stance == Stance::Forbid && permits(b.stance));
      if (disagree) {
        out.push_back(make_conflict(party_of(a.channel), party_of(b.channel), ConflictKind::StanceDisagreement,
                                    std::string(to_string(a.channel)) + " " + std::string(to_string(a.stance)) +
                                        " vs " + std::string(to_string(b.channel)) + " " +
                                        std::string(to_string(b.stance))));
        continue;
      }
      // the same condition reported with different statuses
      for (const auto& ca : a.conditions) {
        auto it = std::ranges::find_if(b.conditions, [&](const ConditionCheck& cb) {
          return cb.condition == ca.condition && cb.status != ca.status;
        });
        if (it != b.conditions.end() && permits(a.stance) && permits(b.stance)) {
          out.push_back(make_conflict(party_of(a.channel), party_of(b.channel), ConflictKind::ConditionContradiction,
                                      std::string(to_string(ca.condition)) + " " +
                                          std::string(to_string(ca.status)) + " vs " +
                                          std::string(to_string(it->status))));
          break;
        }
      }
    }
  }
  if (backend_verdict.kind != rule_engine.kind) {
    out.push_back(make_conflict(Party::Backend, Party::RuleEngine, ConflictKind::StanceDisagreement,
                                "backend " + std::string(to_string(backend_verdict.kind)) + " vs rule engine " +
                                    std::string(to_string(rule_engine.kind))));
  }
  return out;
}

Decision resolve(const Decision& draft, const std::vector<Conflict>& conflicts) {
  if (draft.stage != Stage::Draft) {
    throw InvalidStage("resolve expects a Draft decision, got " + std::string(to_string(draft.stage)));
  }
  Decision out = draft;
  out.stage = Stage::Resolved;
  out.draft_verdict = draft.verdict;
  out.conflicts = conflicts;

  Verdict rule = rule_engine_verdict(draft);
  if (draft.verdict.kind == rule.kind) {
    // consistent: keep the backend's additional texts alongside the rule texts
    if (rule.kind == VerdictKind::Deny) {
      append_unique(rule.recommendations, draft.verdict.recommendations);
    } else {
      append_unique(rule.obligations, draft.verdict.obligations);
    }
    for (const auto& c : draft.verdict.rationale) {
      if (std::ranges::find(rule.rationale, c) == rule.rationale.end()) rule.rationale.push_back(c);
    }
  } else {
    const bool recorded = std::ranges::any_of(out.conflicts, [](const Conflict& c) {
      return c.first == Party::Backend && c.second == Party::RuleEngine;
    });
    if (!recorded) {
      out.conflicts.push_back(make_conflict(Party::Backend, Party::RuleEngine, ConflictKind::StanceDisagreement,
                                            "backend " + std::string(to_string(draft.verdict.kind)) +
                                                " vs rule engine " + std::string(to_string(rule.kind))));
    }
  }
  out.verdict = std::move(rule);
  return out;
}

std::vector<std::string> generate_recommendations(const Decision& resolved_deny,
                                                  const std::vector<ProvisionMatch>& matches) {
  if (resolved_deny.verdict.kind != VerdictKind::Deny) {
    throw NotADenial("recommendations apply only to Deny, got " +
                     std::string(to_string(resolved_deny.verdict.kind)));
  }
  return recommendations_for({resolved_deny.request, resolved_deny.channels, matches, resolved_deny.context});
}

}  // namespace ontoguard
