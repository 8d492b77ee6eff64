#pragma once

// The resolution lattice shared by the pipeline and the deterministic
// backend, and the fixed remediation text table.

#include <string>
#include <string_view>
#include <vector>

#include "ontoguard/caabac.hpp"
#include "ontoguard/domain.hpp"

namespace ontoguard {

inline constexpr std::string_view kConfidentialityObligation = "maintain data confidentiality";
inline constexpr std::string_view kRetrospectiveReviewObligation = "retrospective review of emergency access";
inline constexpr std::string_view kNoRemediation = "no remediation available under the governing provisions";

// Remediation text for a condition; also used as the obligation text when
// a conditional grant leaves the condition to be met.
std::string remediation_text(Condition c);

// Ontology, ABAC, CAAC, in that order.
std::vector<ChannelVerdict> evaluate_channels(const AttributeSet& attrs, const ContextSnapshot& context,
                                              const std::vector<ProvisionMatch>& matches);

struct RuleInput {
  const AccessRequest& request;
  const std::vector<ChannelVerdict>& channels;
  const std::vector<ProvisionMatch>& matches;
  const ContextSnapshot& context;
};

// The rule-engine verdict for one request.
Verdict rule_verdict(const RuleInput& in);

// Recommendations for a Deny: one per unmet remediable condition in fixed
// condition order, or the registration / no-remediation text.
std::vector<std::string> recommendations_for(const RuleInput& in);

}  // namespace ontoguard
