// ontoguard command line: validate-policies, decide, evaluate, serve.
//
// Exit codes: 0 ok, 1 policy or corpus invalid, 2 input invalid, 3 backend failure.
// JSON goes to stdout, diagnostics to stderr.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ontoguard/engine.hpp"
#include "ontoguard/error.hpp"
#include "ontoguard/eval.hpp"
#include "ontoguard/json_io.hpp"
#include "ontoguard/net/http_transport.hpp"
#include "ontoguard/net/service.hpp"
#include "ontoguard/ontology.hpp"

namespace {

using namespace ontoguard;
using nlohmann::json;

enum Exit { kOk = 0, kPolicyInvalid = 1, kInputInvalid = 2, kBackendFailure = 3 };

struct ExitWith {
  int code;
  std::string message;
};

struct Common {
  std::string policies = "policies";
  std::string journal;
  std::string fixed_time;
};

std::unique_ptr<Clock> make_clock(const Common& c) {
  if (c.fixed_time.empty()) return nullptr;
  auto t = parse_iso8601(c.fixed_time);
  if (!t) throw ExitWith{kInputInvalid, "--fixed-time must look like 2024-01-01T00:00:00Z"};
  return std::make_unique<FixedClock>(*t);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExitWith{kInputInvalid, "cannot read " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const std::string& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ExitWith{kInputInvalid, path + " is not valid JSON"};
  return j;
}

struct LoadedPolicies {
  Ontology ontology;
  std::vector<OntologyProblem> problems;
};

LoadedPolicies load_policies(const std::string& dir) {
  LoadedPolicies out;
  try {
    out.ontology = load_policy_corpus(policy_files_in(dir));
  } catch (const Error& e) {
    throw ExitWith{kPolicyInvalid, e.code() + ": " + e.what()};
  }
  out.problems = validate_ontology(out.ontology);
  return out;
}

Ontology load_valid_policies(const std::string& dir) {
  auto loaded = load_policies(dir);
  if (!loaded.problems.empty()) {
    std::string msg = "policy corpus invalid:";
    for (const auto& p : loaded.problems) msg += "\n  " + p.kind + " " + p.provision_id + ": " + p.message;
    throw ExitWith{kPolicyInvalid, msg};
  }
  return std::move(loaded.ontology);
}

std::unique_ptr<Journal> open_journal(const Common& c) {
  try {
    return c.journal.empty() ? std::make_unique<Journal>() : std::make_unique<Journal>(c.journal);
  } catch (const Error& e) {
    throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
  }
}

std::shared_ptr<DecisionBackend> backend_or_exit(const std::string& name, const std::string& mock_script) {
  try {
    return net::make_backend(name, mock_script);
  } catch (const Error& e) {
    throw ExitWith{kBackendFailure, e.code() + ": " + e.what()};
  }
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& c) {
  auto loaded = load_policies(c.policies);
  json problems = json::array();
  for (const auto& p : loaded.problems) {
    problems.push_back({{"kind", p.kind}, {"provision_id", p.provision_id}, {"message", p.message}});
  }
  json versions = json::object();
  for (const auto& [act, v] : loaded.ontology.act_versions) versions[std::string(to_string(act))] = v;
  json out = {{"acts", loaded.ontology.act_versions.size()},
              {"provisions", loaded.ontology.provisions.size()},
              {"act_versions", versions},
              {"problems", problems},
              {"valid", loaded.problems.empty()}};
  std::cout << out.dump(2) << "\n";
  std::cerr << loaded.ontology.act_versions.size() << " acts, " << loaded.ontology.provisions.size()
            << " provisions\n";
  for (const auto& p : loaded.problems) {
    std::cerr << p.kind << (p.provision_id.empty() ? "" : " " + p.provision_id) << ": " << p.message << "\n";
  }
  return loaded.problems.empty() ? kOk : kPolicyInvalid;
}

struct DecideArgs {
  std::string request;
  std::string backend = "deterministic";
  std::string context;
  std::string context_text;
  std::string mock_script;
  std::string auto_approve;
};

int cmd_decide(const Common& c, const DecideArgs& a) {
  json candidate = read_json_file(a.request);
  auto validated = validate_request(candidate);
  if (auto* errors = std::get_if<std::vector<ValidationError>>(&validated)) {
    for (const auto& e : *errors) std::cerr << e.message() << "\n";
    return kInputInvalid;
  }
  ContextOverrides overrides;
  if (!a.context.empty()) {
    try {
      overrides = parse_overrides(read_json_file(a.context));
    } catch (const Error& e) {
      throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
    }
  }

  Ontology ontology = load_valid_policies(c.policies);
  auto backend = backend_or_exit(a.backend, a.mock_script);
  auto clock = make_clock(c);
  auto journal = open_journal(c);
  Engine engine(std::move(ontology), backend, *journal, clock ? *clock : system_clock());

  Submission sub;
  try {
    sub = engine.submit(std::get<AccessRequest>(validated), overrides, a.context_text);
  } catch (const BackendUnavailable& e) {
    throw ExitWith{kBackendFailure, e.code() + ": " + e.what()};
  } catch (const ContradictoryOverride& e) {
    throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
  }
  json out = {{"decision", sub.resolved}, {"ticket_id", sub.ticket.ticket_id}};
  if (!a.auto_approve.empty()) {
    out["final"] = engine.sign_off(sub.ticket.ticket_id, a.auto_approve, Approve{});
  }
  std::cout << out.dump(2) << "\n";
  std::cerr << sub.ticket.ticket_id << ": " << to_string(sub.resolved.verdict.kind) << "\n";
  return kOk;
}

struct EvaluateArgs {
  std::string corpus = "corpus";
  std::string backend = "deterministic";
  std::string mock_script;
  std::string report;
  std::string csv;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> baseline;
};

int cmd_evaluate(const Common& c, const EvaluateArgs& a) {
  ScenarioSet corpus;
  try {
    corpus = load_corpus(a.corpus);
  } catch (const FileUnreadable& e) {
    throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
  } catch (const Error& e) {
    throw ExitWith{kPolicyInvalid, e.code() + ": " + e.what()};
  }
  Ontology ontology = load_valid_policies(c.policies);
  auto backend = backend_or_exit(a.backend, a.mock_script);
  auto clock = make_clock(c);
  std::unique_ptr<Journal> journal = c.journal.empty() ? nullptr : open_journal(c);

  EvalOptions opts;
  opts.jobs = a.jobs;
  opts.baseline_compliance = a.baseline;
  opts.clock = clock.get();
  opts.journal = journal.get();
  if (!a.report.empty()) opts.report_path = a.report;
  if (!a.csv.empty()) opts.csv_path = a.csv;

  MetricReport report;
  try {
    report = run_evaluation(ontology, corpus, backend, opts);
  } catch (const BackendUnavailable& e) {
    throw ExitWith{kBackendFailure, e.code() + ": " + e.what()};
  } catch (const FileUnreadable& e) {
    throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
  }
  std::cout << report_to_json(report).dump(2) << "\n";
  std::cerr << corpus.scenarios.size() << " scenarios, compliance " << report.compliance_rate << "\n";
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string backend = "deterministic";
  std::string mock_script;
};

int cmd_serve(const Common& c, const ServeArgs& a) {
  net::ServiceConfig cfg;
  cfg.host = a.host;
  cfg.port = a.port;
  cfg.policies_dir = c.policies;
  if (!c.journal.empty()) cfg.journal_path = c.journal;
  cfg.backend = a.backend;
  cfg.mock_script = a.mock_script;
  auto clock = make_clock(c);
  cfg.clock = clock.get();

  // Block the stop signals before any server thread exists, then wait for one here.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  std::unique_ptr<net::Service> service;
  try {
    service = std::make_unique<net::Service>(cfg);
    service->start();
  } catch (const CorpusInvalid& e) {
    throw ExitWith{kPolicyInvalid, e.code() + ": " + e.what()};
  } catch (const BackendUnavailable& e) {
    throw ExitWith{kBackendFailure, e.code() + ": " + e.what()};
  } catch (const Error& e) {
    throw ExitWith{kInputInvalid, e.code() + ": " + e.what()};
  }
  std::cout << json{{"listening", a.host + ":" + std::to_string(service->port())}}.dump() << std::endl;

  int sig = 0;
  sigwait(&stop_signals, &sig);
  std::cerr << "signal " << sig << ", shutting down\n";
  service->stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ontoguard: policy-grounded access decisions for health records"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--policies", common.policies, "policy directory")->capture_default_str();
  app.add_option("--journal", common.journal, "append-only audit journal (JSON lines)");
  app.add_option("--fixed-time", common.fixed_time, "pin the clock, for reproducible output");

  auto* validate = app.add_subcommand("validate-policies", "load and check the policy corpus");

  DecideArgs decide_args;
  auto* decide = app.add_subcommand("decide", "decide one access request");
  decide->add_option("--request", decide_args.request, "request JSON file")->required();
  decide->add_option("--backend", decide_args.backend, "deterministic | mock | llm")->capture_default_str();
  decide->add_option("--context", decide_args.context, "context overrides JSON file");
  decide->add_option("--context-text", decide_args.context_text, "extra free-text context");
  decide->add_option("--mock-script", decide_args.mock_script, "script for the mock backend");
  decide->add_option("--auto-approve", decide_args.auto_approve, "sign off as this reviewer and print the final decision");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "run the scenario corpus and report metrics");
  evaluate->add_option("--corpus", eval_args.corpus, "scenario directory")->capture_default_str();
  evaluate->add_option("--backend", eval_args.backend, "deterministic | mock | llm")->capture_default_str();
  evaluate->add_option("--mock-script", eval_args.mock_script, "script for the mock backend");
  evaluate->add_option("--report", eval_args.report, "write the report JSON here");
  evaluate->add_option("--csv", eval_args.csv, "write per-scenario scores here");
  evaluate->add_option("--jobs", eval_args.jobs, "parallel scenarios")->check(CLI::PositiveNumber);
  evaluate->add_option("--baseline", eval_args.baseline, "earlier compliance rate, enables adaptability")
      ->check(CLI::Range(0.0, 1.0));

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--host", serve_args.host)->capture_default_str();
  serve->add_option("--port", serve_args.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--backend", serve_args.backend)->capture_default_str();
  serve->add_option("--mock-script", serve_args.mock_script);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputInvalid;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*decide) return cmd_decide(common, decide_args);
    if (*evaluate) return cmd_evaluate(common, eval_args);
    if (*serve) return cmd_serve(common, serve_args);
  } catch (const ExitWith& e) {
    std::cerr << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return kInputInvalid;
  }
  return kOk;
}
