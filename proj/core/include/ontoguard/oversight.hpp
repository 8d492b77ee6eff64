#pragma once

// Human sign-off and the append-only audit journal.

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoguard/domain.hpp"

namespace ontoguard {

enum class TicketStatus : std::uint8_t { Pending, SignedOff, Escalated };
ONTOGUARD_ENUM_NAMES(TicketStatus, "ticket_status",
                     {TicketStatus::Pending, "pending"},
                     {TicketStatus::SignedOff, "signed-off"},
                     {TicketStatus::Escalated, "escalated"});

enum class AuditEvent : std::uint8_t { Submitted, Drafted, Resolved, ReviewOpened, SignedOff, Overridden, Escalated };
ONTOGUARD_ENUM_NAMES(AuditEvent, "audit_event",
                     {AuditEvent::Submitted, "Submitted"},
                     {AuditEvent::Drafted, "Drafted"},
                     {AuditEvent::Resolved, "Resolved"},
                     {AuditEvent::ReviewOpened, "ReviewOpened"},
                     {AuditEvent::SignedOff, "SignedOff"},
                     {AuditEvent::Overridden, "Overridden"},
                     {AuditEvent::Escalated, "Escalated"});

struct AuditRecord {
  long long seq = 0;
  AuditEvent event = AuditEvent::Submitted;
  std::string request_id;
  nlohmann::json payload;
  Timestamp at;

  bool operator==(const AuditRecord&) const = default;
};

nlohmann::ordered_json audit_record_to_json(const AuditRecord& r);
AuditRecord audit_record_from_json(const nlohmann::json& j);

// Append-only JSON Lines journal. Without a path the journal lives in
// memory only. Appends are serialized and flushed line by line.
class Journal {
 public:
  Journal() = default;
  // Resumes numbering after the last record. Throws JournalUnwritable,
  // JournalCorrupt.
  explicit Journal(std::filesystem::path path);

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  AuditRecord append(AuditEvent event, const std::string& request_id, nlohmann::json payload, Timestamp at);

  std::vector<AuditRecord> records() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }
  long long last_seq() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::vector<AuditRecord> records_;
  long long seq_ = 0;
};

// Parses and validates a journal file: seq must run 1, 2, 3, ... with no
// gaps. Throws JournalCorrupt. A missing file is an empty journal.
std::vector<AuditRecord> read_journal(const std::filesystem::path& path);
void validate_sequence(const std::vector<AuditRecord>& records);  // throws JournalCorrupt

struct AuditFilter {
  std::optional<std::string> request_id;
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> to;    // inclusive
};

std::vector<AuditRecord> audit_trail(const std::vector<AuditRecord>& records, const AuditFilter& filter = {});
std::vector<AuditRecord> audit_trail(const Journal& journal, const AuditFilter& filter = {});
std::vector<AuditRecord> audit_trail(const std::filesystem::path& path, const AuditFilter& filter = {});

// ---------------------------------------------------------------------------

inline constexpr std::string_view kConflictsFlag = "conflicts present";

struct ReviewTicket {
  std::string ticket_id;
  Decision decision;  // stage Resolved
  TicketStatus status = TicketStatus::Pending;
  std::vector<std::string> flags;
  std::optional<Verdict> reviewer_verdict;
  std::optional<std::string> reviewer_id;
  std::optional<std::string> reason;
  Timestamp created_at;
  std::optional<Timestamp> closed_at;

  bool operator==(const ReviewTicket&) const = default;
};

void to_json(nlohmann::json& j, const ReviewTicket& t);

struct Approve {};
struct Override {
  Verdict verdict;
  std::string reason;
};
using SignOffAction = std::variant<Approve, Override>;

// Secondary-review entry created by every override.
struct Escalation {
  std::string ticket_id;
  std::string request_id;
  Verdict resolved_verdict;
  Verdict reviewer_verdict;
  std::string reviewer_id;
  std::string reason;
  Timestamp at;

  bool operator==(const Escalation&) const = default;
};

void to_json(nlohmann::json& j, const Escalation& e);

class ReviewQueue {
 public:
  ReviewQueue(Journal& journal, const Clock& clock);

  // Throws InvalidStage.
  ReviewTicket submit_for_review(const Decision& resolved);

  // Throws TicketNotFound, AlreadyClosed, EmptyOverrideReason, InvalidVerdict.
  Decision sign_off(const std::string& ticket_id, const std::string& reviewer_id, const SignOffAction& action);

  std::optional<ReviewTicket> ticket(const std::string& ticket_id) const;
  std::vector<ReviewTicket> tickets(std::optional<TicketStatus> status = std::nullopt) const;
  std::vector<Escalation> escalations() const;
  std::optional<Decision> final_decision(const std::string& ticket_id) const;

 private:
  Journal& journal_;
  const Clock& clock_;
  mutable std::mutex mu_;
  std::map<std::string, ReviewTicket> tickets_;
  std::map<std::string, Decision> finals_;
  std::vector<Escalation> escalations_;
  long long next_ticket_ = 1;
};

}  // namespace ontoguard
