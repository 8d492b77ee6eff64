#include "ontoguard/eval.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "ontoguard/engine.hpp"
#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;
using nlohmann::ordered_json;

const Scenario* ScenarioSet::find(std::string_view id) const {
  for (const auto& s : scenarios) {
    if (s.scenario_id == id) return &s;
  }
  return nullptr;
}

std::vector<std::string> ScenarioSet::categories() const {
  std::vector<std::string> out;
  for (auto c : kCategories) {
    if (std::ranges::any_of(scenarios, [&](const Scenario& s) { return s.category == c; })) out.emplace_back(c);
  }
  return out;
}

ScenarioSet ScenarioSet::subset(std::string_view category) const {
  ScenarioSet out;
  out.files = files;
  out.corpus_hash = corpus_hash;
  for (const auto& s : scenarios) {
    if (s.category == category) out.scenarios.push_back(s);
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

int line_of(const std::string& text, const std::string& needle) {
  auto pos = needle.empty() ? std::string::npos : text.find(needle);
  if (pos == std::string::npos) return 1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

bool known_category(std::string_view c) { return std::ranges::find(kCategories, c) != kCategories.end(); }

}  // namespace

std::vector<Scenario> parse_corpus_file(const std::string& text, const std::string& path) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto upto = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError(path, line, e.what());
  }
  if (!doc.is_object() || !doc.contains("category") || !doc.at("category").is_string()) {
    throw ParseError(path, 1, "missing \"category\"");
  }
  const std::string category = doc.at("category").get<std::string>();
  if (!known_category(category)) throw ParseError(path, line_of(text, category), "unknown category '" + category + "'");
  if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
    throw ParseError(path, 1, "missing \"scenarios\" list");
  }

  std::vector<Scenario> out;
  for (const auto& item : doc.at("scenarios")) {
    Scenario s;
    if (!item.is_object() || !item.contains("scenario_id") || !item.at("scenario_id").is_string()) {
      throw ParseError(path, 1, "scenario without scenario_id");
    }
    s.scenario_id = item.at("scenario_id").get<std::string>();
    const int line = line_of(text, "\"" + s.scenario_id + "\"");
    auto fail = [&](const std::string& msg) { throw ParseError(path, line, s.scenario_id + ": " + msg); };

    s.category = item.value("category", category);
    if (!known_category(s.category)) fail("unknown category '" + s.category + "'");
    if (s.category != category) fail("category differs from the file's category");
    s.narrative = item.value("narrative", "");
    if (s.narrative.empty()) fail("missing narrative");

    if (!item.contains("request") || !item.at("request").is_object()) fail("missing request");
    json req = item.at("request");
    if (!req.contains("request_id")) req["request_id"] = s.scenario_id;
    if (!req.contains("raw_narrative")) req["raw_narrative"] = s.narrative;
    auto validated = validate_request(req);
    if (auto* errors = std::get_if<std::vector<ValidationError>>(&validated)) fail(errors->front().message());
    s.request = std::get<AccessRequest>(validated);

    try {
      if (item.contains("context_overrides")) s.overrides = parse_overrides(item.at("context_overrides"));
    } catch (const std::exception& e) {
      fail(e.what());
    }

    if (item.contains("expected") && !item.at("expected").is_null()) {
      const json& e = item.at("expected");
      ExpectedOutcome key;
      try {
        key.verdict = e.at("verdict").get<VerdictKind>();
        key.recommendation_keys = e.value("recommendation_keys", std::vector<std::string>{});
        key.provisions = e.value("provisions", std::vector<std::string>{});
      } catch (const std::exception& ex) {
        fail(std::string("bad expected outcome: ") + ex.what());
      }
      for (const auto& k : key.recommendation_keys) {
        if (std::ranges::find(kRecommendationKeys, k) == kRecommendationKeys.end()) {
          fail("unknown recommendation key '" + k + "'");
        }
      }
      s.expected = std::move(key);
    }
    s.is_conflict_case = item.value("is_conflict_case", false);
    out.push_back(std::move(s));
  }
  return out;
}

ScenarioSet load_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw FileUnreadable(dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::ranges::sort(files);

  ScenarioSet set;
  std::string hash_input;
  std::set<std::string> ids;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw FileUnreadable(f.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    hash_input += f.filename().string() + '\n' + text + '\n';
    for (auto& s : parse_corpus_file(text, f.string())) {
      if (!ids.insert(s.scenario_id).second) {
        throw ParseError(f.string(), line_of(text, s.scenario_id), "duplicate scenario_id " + s.scenario_id);
      }
      set.scenarios.push_back(std::move(s));
    }
    set.files.push_back(f.string());
  }
  set.corpus_hash = sha256_hex(hash_input);

  for (auto c : kCategories) {
    auto n = std::ranges::count_if(set.scenarios, [&](const Scenario& s) { return s.category == c; });
    if (static_cast<std::size_t>(n) < kMinScenariosPerCategory) {
      throw CategoryCountViolation("category '" + std::string(c) + "' has " + std::to_string(n) +
                                   " scenarios, needs at least " + std::to_string(kMinScenariosPerCategory));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------

RubricScore RubricScore::make(double cc, double re) {
  auto on_grid = [](double v) { return v == 0.0 || v == 0.25 || v == 0.5; };
  if (!on_grid(cc) || !on_grid(re)) throw Error("InvalidScore", "rubric components must be 0, 0.25 or 0.5");
  if (cc == 0.0) re = 0.0;
  return RubricScore{cc, re, cc + re};
}

std::vector<std::string> recommendation_keys_in(const Verdict& v) {
  std::string text;
  for (const auto* list : {&v.obligations, &v.recommendations}) {
    for (const auto& s : *list) text += s + "\n";
  }
  for (auto& ch : text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto has = [&](std::initializer_list<std::string_view> words) {
    return std::ranges::any_of(words, [&](std::string_view w) { return text.find(w) != std::string::npos; });
  };
  std::vector<std::string> out;
  if (has({"consent"})) out.emplace_back("consent");
  if (has({"supervis"})) out.emplace_back("supervision");
  if (has({"ethics", "authority approval"})) out.emplace_back("ethics-approval");
  if (has({"unregistered", "registration"})) out.emplace_back("registration");
  if (has({"retrospective"})) out.emplace_back("retrospective-review");
  if (has({"confidential"})) out.emplace_back("confidentiality");
  return out;
}

RubricScore score_response(const Verdict& v, const std::optional<ExpectedOutcome>& key) {
  if (!key) throw MissingKey("no expected outcome to score against");
  const bool verdict_ok = v.kind == key->verdict;
  const bool cited_ok = key->provisions.empty() || std::ranges::any_of(key->provisions, [&](const std::string& id) {
                          return std::ranges::any_of(v.rationale,
                                                     [&](const ProvisionCitation& c) { return c.provision_id == id; });
                        });
  const double cc = verdict_ok && cited_ok ? 0.5 : (verdict_ok || cited_ok ? 0.25 : 0.0);

  const auto found = recommendation_keys_in(v);
  std::size_t present = 0;
  for (const auto& k : key->recommendation_keys) {
    if (std::ranges::find(found, k) != found.end()) ++present;
  }
  double re = 0.0;
  if (present == key->recommendation_keys.size()) {
    re = 0.5;
  } else if (present > 0) {
    re = 0.25;
  }
  return RubricScore::make(cc, re);
}

RubricScore score_response(const std::string& text, const std::optional<ExpectedOutcome>& key) {
  if (!key) throw MissingKey("no expected outcome to score against");
  try {
    return score_response(parse_response(text).verdict, key);
  } catch (const UnparseableResponse&) {
    return RubricScore::make(0.0, 0.0);
  }
}

double compliance_rate(const std::vector<bool>& compliant) {
  if (compliant.empty()) throw EmptySample("compliance rate of an empty sample");
  auto k = std::ranges::count(compliant, true);
  return static_cast<double>(k) / static_cast<double>(compliant.size());
}

double conflict_resolution_efficiency(const std::vector<bool>& correct) {
  if (correct.empty()) throw NoConflictCases("no conflict cases in the run");
  auto k = std::ranges::count(correct, true);
  return static_cast<double>(k) / static_cast<double>(correct.size());
}

double adaptability_score(double perf_immediate, double perf_later) {
  if (perf_immediate <= 0.0) throw ZeroBaseline("adaptability needs a positive baseline");
  return (perf_later - perf_immediate) / perf_immediate;
}

double percentile_linear(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw EmptySample("percentile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw EmptySample("box statistics of an empty sample");
  std::ranges::sort(values);
  BoxStats b;
  b.min = values.front();
  b.max = values.back();
  b.q1 = percentile_linear(values, 0.25);
  b.median = percentile_linear(values, 0.5);
  b.q3 = percentile_linear(values, 0.75);
  b.count = values.size();
  return b;
}

std::map<std::string, BoxStats> aggregate_by_category(const std::map<std::string, double>& scores,
                                                      const ScenarioSet& corpus,
                                                      const std::vector<std::string>& required) {
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& c : required) grouped[c];
  for (const auto& [id, total] : scores) {
    const Scenario* s = corpus.find(id);
    if (s == nullptr) throw UnknownScenario(id);
    grouped[s->category].push_back(total);
  }
  std::map<std::string, BoxStats> out;
  for (auto& [category, values] : grouped) {
    if (values.empty()) throw EmptyCategory(category);
    out[category] = box_stats(std::move(values));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json box_json(const BoxStats& b) {
  ordered_json j;
  j["count"] = b.count;
  j["min"] = b.min;
  j["q1"] = b.q1;
  j["median"] = b.median;
  j["q3"] = b.q3;
  j["max"] = b.max;
  return j;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json report_to_json(const MetricReport& r) {
  ordered_json j;
  ordered_json meta;
  meta["backend_id"] = r.backend_id;
  meta["corpus_hash"] = r.corpus_hash;
  meta["generated_at"] = to_iso8601(r.generated_at);
  meta["reviewer"] = r.reviewer;
  meta["scenario_count"] = r.results.size();
  meta["fallback_count"] = r.fallback_count;
  j["metadata"] = meta;

  ordered_json metrics;
  metrics["compliance_rate"] = r.compliance_rate;
  metrics["conflict_resolution_efficiency"] = optional_number(r.conflict_resolution_efficiency);
  metrics["adaptability"] = optional_number(r.adaptability);
  metrics["mean_score"] = r.mean_score;
  j["metrics"] = metrics;

  ordered_json per = ordered_json::object();
  for (auto c : kCategories) {
    auto it = r.per_category.find(std::string(c));
    if (it != r.per_category.end()) per[std::string(c)] = box_json(it->second);
  }
  j["per_category"] = per;

  ordered_json results = ordered_json::array();
  for (const auto& s : r.results) {
    ordered_json row;
    row["scenario_id"] = s.scenario_id;
    row["category"] = s.category;
    row["expected"] = std::string(to_string(s.expected));
    row["draft"] = std::string(to_string(s.draft));
    row["resolved"] = std::string(to_string(s.resolved));
    row["final"] = std::string(to_string(s.final_verdict));
    row["compliant"] = s.compliant;
    row["conflict_case"] = s.conflict_case;
    row["conflicts_detected"] = s.conflicts_detected;
    row["conflict_resolved"] = s.conflict_resolved;
    row["context_comprehension"] = s.score.context_comprehension;
    row["recommendation_effectiveness"] = s.score.recommendation_effectiveness;
    row["total"] = s.score.total;
    row["keys_found"] = s.keys_found;
    row["fault"] = s.fault ? ordered_json(std::string(to_string(*s.fault))) : ordered_json(nullptr);
    results.push_back(row);
  }
  j["results"] = results;
  return j;
}

std::string report_csv(const MetricReport& r) {
  std::ostringstream out;
  out << "scenario_id,category,expected,draft,resolved,compliant,conflict_case,context_comprehension,"
         "recommendation_effectiveness,total\n";
  for (const auto& s : r.results) {
    out << s.scenario_id << ",\"" << s.category << "\"," << to_string(s.expected) << ',' << to_string(s.draft)
        << ',' << to_string(s.resolved) << ',' << (s.compliant ? 1 : 0) << ',' << (s.conflict_case ? 1 : 0) << ','
        << s.score.context_comprehension << ',' << s.score.recommendation_effectiveness << ',' << s.score.total
        << '\n';
  }
  return out.str();
}

MetricReport run_evaluation(const Ontology& ontology, const ScenarioSet& corpus,
                            std::shared_ptr<DecisionBackend> backend, const EvalOptions& options) {
  if (corpus.scenarios.empty()) throw EmptySample("no scenarios to evaluate");
  const Clock& clock = options.clock ? *options.clock : system_clock();
  Journal scratch;
  Journal& journal = options.journal ? *options.journal : scratch;
  const std::string backend_id = backend->id();
  Engine engine(ontology, std::move(backend), journal, clock);

  const std::size_t n = corpus.scenarios.size();
  std::vector<ScenarioResult> results(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Scenario& s = corpus.scenarios[i];
        if (!s.expected) throw MissingKey(s.scenario_id + " has no expected outcome");
        auto sub = engine.submit(s.request, s.overrides);
        Decision final_decision = engine.sign_off(sub.ticket.ticket_id, options.reviewer, Approve{});

        ScenarioResult& r = results[i];
        r.scenario_id = s.scenario_id;
        r.category = s.category;
        r.expected = s.expected->verdict;
        r.draft = sub.draft.verdict.kind;
        r.resolved = sub.resolved.verdict.kind;
        r.final_verdict = final_decision.verdict.kind;
        r.compliant = r.draft == r.expected;
        r.conflict_case = s.is_conflict_case;
        r.conflicts_detected = !sub.resolved.conflicts.empty();
        r.conflict_resolved = r.resolved == r.expected;
        r.score = score_response(sub.draft.verdict, s.expected);
        r.keys_found = recommendation_keys_in(sub.draft.verdict);
        if (sub.draft.backend_fault) r.fault = sub.draft.backend_fault->kind;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  MetricReport report;
  report.backend_id = backend_id;
  report.corpus_hash = corpus.corpus_hash;
  report.generated_at = clock.now();
  report.reviewer = options.reviewer;

  std::vector<bool> compliant;
  std::vector<bool> conflicts_ok;
  std::map<std::string, double> totals;
  double sum = 0.0;
  for (const auto& r : results) {
    compliant.push_back(r.compliant);
    if (r.conflict_case) conflicts_ok.push_back(r.conflict_resolved);
    totals[r.scenario_id] = r.score.total;
    sum += r.score.total;
    if (r.fault) ++report.fallback_count;
  }
  report.compliance_rate = compliance_rate(compliant);
  if (!conflicts_ok.empty()) report.conflict_resolution_efficiency = conflict_resolution_efficiency(conflicts_ok);
  if (options.baseline_compliance) {
    report.adaptability = adaptability_score(*options.baseline_compliance, report.compliance_rate);
  }
  report.mean_score = sum / static_cast<double>(results.size());
  report.per_category = aggregate_by_category(totals, corpus);
  report.results = std::move(results);

  if (options.report_path) {
    std::ofstream out(*options.report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileUnreadable("cannot write report " + options.report_path->string());
    out << report_to_json(report).dump(2) << '\n';
  }
  if (options.csv_path) {
    std::ofstream out(*options.csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileUnreadable("cannot write csv " + options.csv_path->string());
    out << report_csv(report);
  }
  return report;
}

}  // namespace ontoguard
