#pragma once

// Runs requests through the pipeline into the review queue, journaling the
// full lineage: Submitted, Drafted, Resolved, ReviewOpened, then SignedOff
// or Overridden + Escalated.

#include <memory>
#include <mutex>

#include "ontoguard/backend.hpp"
#include "ontoguard/caabac.hpp"
#include "ontoguard/ontology.hpp"
#include "ontoguard/oversight.hpp"
#include "ontoguard/pipeline.hpp"

namespace ontoguard {

struct Submission {
  Decision draft;
  Decision resolved;
  ReviewTicket ticket;
};

class Engine {
 public:
  Engine(Ontology ontology, std::shared_ptr<DecisionBackend> backend, Journal& journal,
         const Clock& clock = system_clock());

  // The context timestamp is taken from the engine's clock.
  Submission submit(const AccessRequest& request, const ContextOverrides& overrides = {},
                    const std::string& extra_context = {});

  Decision sign_off(const std::string& ticket_id, const std::string& reviewer_id, const SignOffAction& action);

  std::shared_ptr<const Ontology> ontology() const;
  void replace_ontology(Ontology ontology);

  DecisionBackend& backend() { return *backend_; }
  ReviewQueue& reviews() { return queue_; }
  const ReviewQueue& reviews() const { return queue_; }
  Journal& journal() { return journal_; }
  const Clock& clock() const { return clock_; }

 private:
  mutable std::mutex ontology_mu_;
  std::shared_ptr<const Ontology> ontology_;
  std::shared_ptr<DecisionBackend> backend_;
  Journal& journal_;
  const Clock& clock_;
  ReviewQueue queue_;
};

}  // namespace ontoguard
