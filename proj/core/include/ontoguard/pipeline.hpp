#pragma once

// Draft -> conflict detection -> resolution. Stateless; safe to run many
// requests concurrently as long as the backend is thread-safe.

#include <vector>

#include "ontoguard/backend.hpp"
#include "ontoguard/caabac.hpp"
#include "ontoguard/domain.hpp"
#include "ontoguard/ontology.hpp"

namespace ontoguard {

// Throws NoProvisionCorpus, BackendUnavailable, ContradictoryOverride.
Decision decide(const Ontology& ontology, const AccessRequest& request, const RawContext& raw,
                DecisionBackend& backend);

// Channel disagreements, plus (Backend, RuleEngine) when the backend's kind
// differs from the rule-engine verdict.
std::vector<Conflict> detect_conflicts(const std::vector<ChannelVerdict>& channels, const Verdict& backend_verdict,
                                       const Verdict& rule_engine_verdict);

// Throws InvalidStage unless `draft` is a Draft.
Decision resolve(const Decision& draft, const std::vector<Conflict>& conflicts);

// Throws NotADenial.
std::vector<std::string> generate_recommendations(const Decision& resolved_deny,
                                                  const std::vector<ProvisionMatch>& matches);

// The rule-engine verdict for a decision's own channels and matches.
Verdict rule_engine_verdict(const Decision& d);

}  // namespace ontoguard
