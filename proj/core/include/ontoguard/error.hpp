#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ontoguard {

// Base of every error thrown by the engine. `code()` is the stable
// machine-readable name that also appears in service error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define ONTOGUARD_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(#Name, message) {}  \
  }

// policy-ontology
ONTOGUARD_DEFINE_ERROR(FileUnreadable);
ONTOGUARD_DEFINE_ERROR(DuplicateProvisionId);
ONTOGUARD_DEFINE_ERROR(UnknownAct);

class ParseError : public Error {
 public:
  ParseError(std::string path, int line, const std::string& message)
      : Error("ParseError", path + ":" + std::to_string(line) + ": " + message),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }

 private:
  std::string path_;
  int line_;
};

// caabac-engine
ONTOGUARD_DEFINE_ERROR(ContradictoryOverride);

// decision-pipeline
ONTOGUARD_DEFINE_ERROR(BackendUnavailable);
ONTOGUARD_DEFINE_ERROR(NoProvisionCorpus);
ONTOGUARD_DEFINE_ERROR(InvalidStage);
ONTOGUARD_DEFINE_ERROR(NotADenial);

// backends
ONTOGUARD_DEFINE_ERROR(Timeout);
ONTOGUARD_DEFINE_ERROR(TransportError);
ONTOGUARD_DEFINE_ERROR(UnparseableResponse);

// oversight
ONTOGUARD_DEFINE_ERROR(TicketNotFound);
ONTOGUARD_DEFINE_ERROR(AlreadyClosed);
ONTOGUARD_DEFINE_ERROR(EmptyOverrideReason);
ONTOGUARD_DEFINE_ERROR(InvalidVerdict);
ONTOGUARD_DEFINE_ERROR(JournalUnwritable);

class JournalCorrupt : public Error {
 public:
  JournalCorrupt(long long seq, const std::string& message)
      : Error("JournalCorrupt", "journal corrupt at seq " + std::to_string(seq) + ": " + message),
        seq_(seq) {}

  long long seq() const noexcept { return seq_; }

 private:
  long long seq_;
};

// eval-harness
ONTOGUARD_DEFINE_ERROR(CategoryCountViolation);
ONTOGUARD_DEFINE_ERROR(MissingKey);
ONTOGUARD_DEFINE_ERROR(EmptySample);
ONTOGUARD_DEFINE_ERROR(NoConflictCases);
ONTOGUARD_DEFINE_ERROR(ZeroBaseline);
ONTOGUARD_DEFINE_ERROR(UnknownScenario);
ONTOGUARD_DEFINE_ERROR(EmptyCategory);

// service-api
ONTOGUARD_DEFINE_ERROR(PortInUse);
ONTOGUARD_DEFINE_ERROR(CorpusInvalid);

#undef ONTOGUARD_DEFINE_ERROR

}  // namespace ontoguard
