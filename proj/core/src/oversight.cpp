#include "ontoguard/oversight.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json audit_record_to_json(const AuditRecord& r) {
  ordered_json j;
  j["seq"] = r.seq;
  j["event"] = std::string(to_string(r.event));
  j["request_id"] = r.request_id;
  j["at"] = to_iso8601(r.at);
  j["payload"] = ordered_json::parse(r.payload.dump());
  return j;
}

AuditRecord audit_record_from_json(const json& j) {
  AuditRecord r;
  r.seq = j.at("seq").get<long long>();
  r.event = j.at("event").get<AuditEvent>();
  r.request_id = j.value("request_id", "");
  r.at = j.at("at").get<Timestamp>();
  r.payload = j.contains("payload") ? j.at("payload") : json(nullptr);
  return r;
}

void validate_sequence(const std::vector<AuditRecord>& records) {
  long long expected = 1;
  for (const auto& r : records) {
    if (r.seq != expected) {
      throw JournalCorrupt(r.seq, "expected seq " + std::to_string(expected));
    }
    ++expected;
  }
}

std::vector<AuditRecord> read_journal(const std::filesystem::path& path) {
  std::vector<AuditRecord> out;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JournalUnwritable("cannot read journal " + path.string());
  std::string line;
  long long expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    AuditRecord r;
    try {
      r = audit_record_from_json(json::parse(line));
    } catch (const std::exception& e) {
      throw JournalCorrupt(expected, std::string("unreadable record: ") + e.what());
    }
    if (r.seq != expected) throw JournalCorrupt(r.seq, "expected seq " + std::to_string(expected));
    ++expected;
    out.push_back(std::move(r));
  }
  return out;
}

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
  records_ = read_journal(*path_);
  seq_ = records_.empty() ? 0 : records_.back().seq;
  if (path_->has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_->parent_path(), ec);
  }
  out_.open(*path_, std::ios::app | std::ios::binary);
  if (!out_) throw JournalUnwritable("cannot open journal " + path_->string() + " for append");
}

AuditRecord Journal::append(AuditEvent event, const std::string& request_id, json payload, Timestamp at) {
  std::lock_guard lock(mu_);
  AuditRecord r{seq_ + 1, event, request_id, std::move(payload), at};
  if (path_) {
    out_ << audit_record_to_json(r).dump() << '\n';
    out_.flush();
    if (!out_) throw JournalUnwritable("write failed on " + path_->string());
  }
  ++seq_;
  records_.push_back(r);
  return r;
}

std::vector<AuditRecord> Journal::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

long long Journal::last_seq() const {
  std::lock_guard lock(mu_);
  return seq_;
}

std::vector<AuditRecord> audit_trail(const std::vector<AuditRecord>& records, const AuditFilter& f) {
  validate_sequence(records);
  std::vector<AuditRecord> out;
  for (const auto& r : records) {
    if (f.request_id && r.request_id != *f.request_id) continue;
    if (f.from && r.at < *f.from) continue;
    if (f.to && *f.to < r.at) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<AuditRecord> audit_trail(const Journal& journal, const AuditFilter& f) {
  return audit_trail(journal.records(), f);
}

std::vector<AuditRecord> audit_trail(const std::filesystem::path& path, const AuditFilter& f) {
  return audit_trail(read_journal(path), f);
}

// ---------------------------------------------------------------------------

void to_json(json& j, const ReviewTicket& t) {
  j = json{{"ticket_id", t.ticket_id},
           {"request_id", t.decision.request_id},
           {"decision", t.decision},
           {"status", t.status},
           {"flags", t.flags},
           {"reviewer_verdict", t.reviewer_verdict ? json(*t.reviewer_verdict) : json(nullptr)},
           {"reviewer_id", t.reviewer_id ? json(*t.reviewer_id) : json(nullptr)},
           {"reason", t.reason ? json(*t.reason) : json(nullptr)},
           {"created_at", t.created_at},
           {"closed_at", t.closed_at ? json(*t.closed_at) : json(nullptr)}};
}

void to_json(json& j, const Escalation& e) {
  j = json{{"ticket_id", e.ticket_id},         {"request_id", e.request_id},
           {"resolved_verdict", e.resolved_verdict}, {"reviewer_verdict", e.reviewer_verdict},
           {"reviewer_id", e.reviewer_id},     {"reason", e.reason},
           {"at", e.at}};
}

ReviewQueue::ReviewQueue(Journal& journal, const Clock& clock) : journal_(journal), clock_(clock) {
  // Continue numbering after any tickets already in a resumed journal.
  for (const auto& r : journal_.records()) {
    if (r.event != AuditEvent::ReviewOpened || !r.payload.is_object()) continue;
    const std::string id = r.payload.value("ticket_id", "");
    long long n = 0;
    if (std::sscanf(id.c_str(), "T-%lld", &n) == 1) next_ticket_ = std::max(next_ticket_, n + 1);
  }
}

ReviewTicket ReviewQueue::submit_for_review(const Decision& resolved) {
  if (resolved.stage != Stage::Resolved) {
    throw InvalidStage("only Resolved decisions enter review, got " + std::string(to_string(resolved.stage)));
  }
  std::lock_guard lock(mu_);
  ReviewTicket t;
  char id[32];
  std::snprintf(id, sizeof id, "T-%06lld", next_ticket_++);
  t.ticket_id = id;
  t.decision = resolved;
  t.created_at = clock_.now();
  if (!resolved.conflicts.empty()) t.flags.emplace_back(kConflictsFlag);
  if (resolved.backend_fault) t.flags.emplace_back("backend fallback used");
  journal_.append(AuditEvent::ReviewOpened, resolved.request_id,
                  json{{"ticket_id", t.ticket_id}, {"flags", t.flags}, {"verdict", resolved.verdict}}, t.created_at);
  tickets_[t.ticket_id] = t;
  return t;
}

Decision ReviewQueue::sign_off(const std::string& ticket_id, const std::string& reviewer_id,
                               const SignOffAction& action) {
  std::lock_guard lock(mu_);
  auto it = tickets_.find(ticket_id);
  if (it == tickets_.end()) throw TicketNotFound(ticket_id);
  ReviewTicket& t = it->second;
  if (t.status != TicketStatus::Pending) throw AlreadyClosed(ticket_id + " is " + std::string(to_string(t.status)));

  const Timestamp now = clock_.now();
  Decision final_decision = t.decision;
  final_decision.stage = Stage::Final;
  final_decision.reviewer = reviewer_id;
  final_decision.produced_at = now;

  if (const auto* over = std::get_if<Override>(&action)) {
    if (over->reason.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw EmptyOverrideReason("override of " + ticket_id + " needs a reason");
    }
    if (auto problem = verdict_violation(over->verdict)) throw InvalidVerdict(*problem);
    final_decision.verdict = over->verdict;
    t.status = TicketStatus::Escalated;
    t.reviewer_verdict = over->verdict;
    t.reason = over->reason;
    Escalation e{ticket_id, t.decision.request_id, t.decision.verdict, over->verdict, reviewer_id, over->reason, now};
    journal_.append(AuditEvent::Overridden, t.decision.request_id,
                    json{{"ticket_id", ticket_id},
                         {"reviewer_id", reviewer_id},
                         {"reason", over->reason},
                         {"decision", final_decision}},
                    now);
    journal_.append(AuditEvent::Escalated, t.decision.request_id, json(e), now);
    escalations_.push_back(std::move(e));
  } else {
    t.status = TicketStatus::SignedOff;
    t.reviewer_verdict = t.decision.verdict;
    journal_.append(AuditEvent::SignedOff, t.decision.request_id,
                    json{{"ticket_id", ticket_id}, {"reviewer_id", reviewer_id}, {"decision", final_decision}}, now);
  }
  t.reviewer_id = reviewer_id;
  t.closed_at = now;
  finals_[ticket_id] = final_decision;
  return final_decision;
}

std::optional<ReviewTicket> ReviewQueue::ticket(const std::string& ticket_id) const {
  std::lock_guard lock(mu_);
  auto it = tickets_.find(ticket_id);
  if (it == tickets_.end()) return std::nullopt;
  return it->second;
}

std::vector<ReviewTicket> ReviewQueue::tickets(std::optional<TicketStatus> status) const {
  std::lock_guard lock(mu_);
  std::vector<ReviewTicket> out;
  for (const auto& [_, t] : tickets_) {
    if (!status || t.status == *status) out.push_back(t);
  }
  return out;
}

std::vector<Escalation> ReviewQueue::escalations() const {
  std::lock_guard lock(mu_);
  return escalations_;
}

std::optional<Decision> ReviewQueue::final_decision(const std::string& ticket_id) const {
  std::lock_guard lock(mu_);
  auto it = finals_.find(ticket_id);
  if (it == finals_.end()) return std::nullopt;
  return it->second;
}

}  // namespace ontoguard
