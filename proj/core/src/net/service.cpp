#include "ontoguard/net/service.hpp"

#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "ontoguard/error.hpp"
#include "ontoguard/eval.hpp"
#include "ontoguard/json_io.hpp"
#include "ontoguard/net/http_transport.hpp"

namespace ontoguard::net {

using nlohmann::json;

namespace {

int status_for(const std::string& code) {
  static const std::map<std::string, int> table = {
      {"TicketNotFound", 404},     {"AlreadyClosed", 409},        {"BackendUnavailable", 503},
      {"JournalCorrupt", 500},     {"JournalUnwritable", 500},    {"NoReport", 404},
  };
  auto it = table.find(code);
  return it == table.end() ? 400 : it->second;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, json{{"code", code}, {"message", message}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, status_for(e.code()), e.code(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "InternalError", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw Error("BadRequest", "request body must be a JSON object");
  return body;
}

Ontology load_checked(const std::filesystem::path& dir) {
  Ontology onto;
  try {
    onto = load_policy_corpus(policy_files_in(dir));
  } catch (const Error& e) {
    throw CorpusInvalid(e.code() + ": " + e.what());
  }
  auto problems = validate_ontology(onto);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p.kind + " " + p.provision_id;
    throw CorpusInvalid(msg);
  }
  return onto;
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  const Clock& clock;
  std::unique_ptr<Journal> journal;
  std::unique_ptr<Engine> engine;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex report_mu;
  std::optional<json> latest_report;

  explicit Impl(ServiceConfig c)
      : config(std::move(c)), clock(config.clock ? *config.clock : system_clock()) {
    // httplib defaults to SO_REUSEPORT, which lets a second server share the port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    Ontology onto = load_checked(config.policies_dir);
    journal = config.journal_path ? std::make_unique<Journal>(*config.journal_path) : std::make_unique<Journal>();
    auto backend = make_backend(config.backend, config.mock_script, config.llm, config.transport);
    engine = std::make_unique<Engine>(std::move(onto), std::move(backend), *journal, clock);
    routes();
  }

  void routes() {
    server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        auto onto = engine->ontology();
        json versions = json::object();
        for (const auto& [act, version] : onto->act_versions) versions[std::string(to_string(act))] = version;
        send_json(res, 200,
                  json{{"status", "ok"},
                       {"act_versions", versions},
                       {"provisions", onto->provisions.size()},
                       {"backend_id", engine->backend().id()}});
      });
    });

    server.Post("/v1/decisions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body = parse_body(req);
        if (!body.contains("request")) throw Error("MissingField", "body needs a request");
        json request_json = body.at("request");
        if (request_json.is_object() && !request_json.contains("request_id")) {
          request_json["request_id"] = new_request_id();
        }
        auto validated = validate_request(request_json);
        if (auto* errors = std::get_if<std::vector<ValidationError>>(&validated)) {
          json list = json::array();
          for (const auto& e : *errors) list.push_back(e);
          send_json(res, 400,
                    json{{"code", "ValidationError"}, {"message", errors->front().message()}, {"errors", list}});
          return;
        }
        ContextOverrides overrides;
        if (body.contains("context_overrides")) overrides = parse_overrides(body.at("context_overrides"));
        auto sub = engine->submit(std::get<AccessRequest>(validated), overrides, body.value("context_text", ""));
        send_json(res, 201, json{{"decision", sub.resolved}, {"ticket_id", sub.ticket.ticket_id}});
      });
    });

    server.Get("/v1/reviews", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string status = req.has_param("status") ? req.get_param_value("status") : "pending";
        std::optional<TicketStatus> filter;
        if (status != "all") {
          filter = enum_from_string<TicketStatus>(status);
          if (!filter) throw Error("UnknownEnumValue", "status must be pending, signed-off, escalated or all");
        }
        json list = json::array();
        for (const auto& t : engine->reviews().tickets(filter)) list.push_back(t);
        send_json(res, 200, json{{"tickets", list}});
      });
    });

    server.Get(R"(/v1/reviews/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto t = engine->reviews().ticket(req.matches[1]);
        if (!t) throw TicketNotFound(req.matches[1]);
        json body = *t;
        if (auto f = engine->reviews().final_decision(t->ticket_id)) body["final_decision"] = *f;
        send_json(res, 200, body);
      });
    });

    server.Post(R"(/v1/reviews/([^/]+)/signoff)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body = parse_body(req);
        const std::string reviewer = body.value("reviewer_id", "");
        if (reviewer.empty()) throw Error("MissingField", "reviewer_id is required");
        const std::string action = body.value("action", "");
        SignOffAction act;
        if (action == "approve") {
          act = Approve{};
        } else if (action == "override") {
          if (!body.contains("verdict")) throw Error("MissingField", "override needs a verdict");
          act = Override{body.at("verdict").get<Verdict>(), body.value("reason", "")};
        } else {
          throw Error("UnknownEnumValue", "action must be approve or override");
        }
        auto final_decision = engine->sign_off(req.matches[1], reviewer, act);
        send_json(res, 200, json{{"decision", final_decision}, {"ticket_id", std::string(req.matches[1])}});
      });
    });

    server.Get("/v1/escalations", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json list = json::array();
        for (const auto& e : engine->reviews().escalations()) list.push_back(e);
        send_json(res, 200, json{{"escalations", list}});
      });
    });

    server.Get("/v1/audit", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        AuditFilter f;
        if (req.has_param("request_id")) f.request_id = req.get_param_value("request_id");
        for (const char* key : {"from", "to"}) {
          if (!req.has_param(key)) continue;
          auto t = parse_iso8601(req.get_param_value(key));
          if (!t) throw Error("WrongType", std::string(key) + " must be an ISO-8601 UTC timestamp");
          (std::string(key) == "from" ? f.from : f.to) = *t;
        }
        json list = json::array();
        for (const auto& r : audit_trail(*journal, f)) list.push_back(json::parse(audit_record_to_json(r).dump()));
        send_json(res, 200, json{{"records", list}});
      });
    });

    server.Post("/v1/evaluate", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body = parse_body(req);
        if (!body.contains("corpus_path")) throw Error("MissingField", "corpus_path is required");
        auto corpus = load_corpus(body.at("corpus_path").get<std::string>());
        auto backend = make_backend(body.value("backend", config.backend), body.value("mock_script", config.mock_script),
                                    config.llm, config.transport);
        EvalOptions opts;
        opts.clock = &clock;
        opts.jobs = body.value("jobs", config.eval_jobs);
        auto report = run_evaluation(*engine->ontology(), corpus, backend, opts);
        json out = json::parse(report_to_json(report).dump());
        {
          std::lock_guard lock(report_mu);
          latest_report = out;
        }
        send_json(res, 200, out);
      });
    });

    server.Get("/v1/metrics/latest", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(report_mu);
      if (!latest_report) {
        send_error(res, 404, "NoReport", "no evaluation has run yet");
        return;
      }
      send_json(res, 200, *latest_report);
    });
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

void Service::start() {
  auto& s = impl_->server;
  if (impl_->config.port == 0) {
    impl_->port = s.bind_to_any_port(impl_->config.host);
    if (impl_->port <= 0) throw PortInUse("could not bind any port on " + impl_->config.host);
  } else {
    if (!s.bind_to_port(impl_->config.host, impl_->config.port)) {
      throw PortInUse(impl_->config.host + ":" + std::to_string(impl_->config.port) + " is not available");
    }
    impl_->port = impl_->config.port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const { return impl_->port; }

Engine& Service::engine() { return *impl_->engine; }

}  // namespace ontoguard::net
