#pragma once

// Scenario corpus, rubric scoring, metrics and per-category box statistics.

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoguard/backend.hpp"
#include "ontoguard/caabac.hpp"
#include "ontoguard/domain.hpp"
#include "ontoguard/ontology.hpp"
#include "ontoguard/oversight.hpp"

namespace ontoguard {

// Category labels in reporting order.
inline constexpr std::array<std::string_view, 12> kCategories = {
    "Allied Health",         "Consultants",         "Direct Care",
    "Emergency Services",    "Home Care",           "Laboratory Services",
    "Mental Health",         "Hospital Support Staff", "Pharmacy",
    "Telemedicine",          "Patients and Contact",   "Misleading Situations"};

inline constexpr std::size_t kMinScenariosPerCategory = 10;

// Keys detected in a verdict's obligations and recommendations.
inline constexpr std::array<std::string_view, 6> kRecommendationKeys = {
    "consent", "supervision", "ethics-approval", "registration", "retrospective-review", "confidentiality"};

struct ExpectedOutcome {
  VerdictKind verdict = VerdictKind::Deny;
  std::vector<std::string> recommendation_keys;
  std::vector<std::string> provisions;  // any one cited satisfies the citation check

  bool operator==(const ExpectedOutcome&) const = default;
};

struct Scenario {
  std::string scenario_id;
  std::string category;
  std::string narrative;
  AccessRequest request;
  ContextOverrides overrides;
  std::optional<ExpectedOutcome> expected;
  bool is_conflict_case = false;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::vector<std::string> files;
  std::string corpus_hash;  // sha256 over file names and contents

  const Scenario* find(std::string_view scenario_id) const;
  std::vector<std::string> categories() const;  // reporting order, present ones only
  ScenarioSet subset(std::string_view category) const;
};

// Throws ParseError.
std::vector<Scenario> parse_corpus_file(const std::string& text, const std::string& path);
// Throws FileUnreadable, ParseError, CategoryCountViolation.
ScenarioSet load_corpus(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view data);

// ---------------------------------------------------------------------------

struct RubricScore {
  double context_comprehension = 0.0;
  double recommendation_effectiveness = 0.0;
  double total = 0.0;

  // Enforces the score grid and the zero-dependency rule.
  static RubricScore make(double cc, double re);
  bool operator==(const RubricScore&) const = default;
};

std::vector<std::string> recommendation_keys_in(const Verdict& v);

// Throws MissingKey when `key` is empty.
RubricScore score_response(const Verdict& v, const std::optional<ExpectedOutcome>& key);
// Raw backend text; unparseable text scores zero.
RubricScore score_response(const std::string& text, const std::optional<ExpectedOutcome>& key);

double compliance_rate(const std::vector<bool>& compliant);               // throws EmptySample
double conflict_resolution_efficiency(const std::vector<bool>& correct);  // throws NoConflictCases
double adaptability_score(double perf_immediate, double perf_later);      // throws ZeroBaseline

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t count = 0;

  bool operator==(const BoxStats&) const = default;
};

// Linear interpolation at h = (n - 1) p on sorted values.
double percentile_linear(const std::vector<double>& sorted, double p);
BoxStats box_stats(std::vector<double> values);  // throws EmptySample

// Throws UnknownScenario; EmptyCategory when a category in `required` has
// no scores.
std::map<std::string, BoxStats> aggregate_by_category(const std::map<std::string, double>& scores,
                                                      const ScenarioSet& corpus,
                                                      const std::vector<std::string>& required = {});

// ---------------------------------------------------------------------------

struct ScenarioResult {
  std::string scenario_id;
  std::string category;
  VerdictKind expected = VerdictKind::Deny;
  VerdictKind draft = VerdictKind::Deny;
  VerdictKind resolved = VerdictKind::Deny;
  VerdictKind final_verdict = VerdictKind::Deny;
  bool compliant = false;
  bool conflict_case = false;
  bool conflicts_detected = false;
  bool conflict_resolved = false;
  RubricScore score;
  std::vector<std::string> keys_found;
  std::optional<FaultKind> fault;
};

struct MetricReport {
  double compliance_rate = 0.0;
  std::optional<double> conflict_resolution_efficiency;
  std::optional<double> adaptability;
  double mean_score = 0.0;
  std::map<std::string, BoxStats> per_category;
  std::string backend_id;
  std::string corpus_hash;
  Timestamp generated_at;
  std::string reviewer;
  std::size_t fallback_count = 0;
  std::vector<ScenarioResult> results;  // corpus order
};

nlohmann::ordered_json report_to_json(const MetricReport& r);
std::string report_csv(const MetricReport& r);

struct EvalOptions {
  unsigned jobs = 1;
  std::optional<double> baseline_compliance;  // enables adaptability
  const Clock* clock = nullptr;               // defaults to the system clock
  Journal* journal = nullptr;                 // defaults to an in-memory journal
  std::string reviewer = "harness-auto-approve";
  std::optional<std::filesystem::path> report_path;
  std::optional<std::filesystem::path> csv_path;
};

MetricReport run_evaluation(const Ontology& ontology, const ScenarioSet& corpus,
                            std::shared_ptr<DecisionBackend> backend, const EvalOptions& options = {});

}  // namespace ontoguard
