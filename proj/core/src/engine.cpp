#include "ontoguard/engine.hpp"

#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;

Engine::Engine(Ontology ontology, std::shared_ptr<DecisionBackend> backend, Journal& journal, const Clock& clock)
    : ontology_(std::make_shared<const Ontology>(std::move(ontology))),
      backend_(std::move(backend)),
      journal_(journal),
      clock_(clock),
      queue_(journal, clock) {}

Submission Engine::submit(const AccessRequest& request, const ContextOverrides& overrides,
                          const std::string& extra_context) {
  auto onto = ontology();
  RawContext raw{extra_context, overrides, clock_.now()};

  journal_.append(AuditEvent::Submitted, request.request_id,
                  json{{"request", request}, {"overrides", overrides_to_json(overrides)}}, raw.timestamp);
  Submission s;
  s.draft = decide(*onto, request, raw, *backend_);
  journal_.append(AuditEvent::Drafted, request.request_id, json(s.draft), clock_.now());
  s.resolved = resolve(s.draft, s.draft.conflicts);
  journal_.append(AuditEvent::Resolved, request.request_id, json(s.resolved), clock_.now());
  s.ticket = queue_.submit_for_review(s.resolved);
  return s;
}

Decision Engine::sign_off(const std::string& ticket_id, const std::string& reviewer_id,
                          const SignOffAction& action) {
  return queue_.sign_off(ticket_id, reviewer_id, action);
}

std::shared_ptr<const Ontology> Engine::ontology() const {
  std::lock_guard lock(ontology_mu_);
  return ontology_;
}

void Engine::replace_ontology(Ontology ontology) {
  auto next = std::make_shared<const Ontology>(std::move(ontology));
  std::lock_guard lock(ontology_mu_);
  ontology_ = std::move(next);
}

}  // namespace ontoguard
