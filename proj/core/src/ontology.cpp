#include "ontoguard/ontology.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ontoguard/error.hpp"
#include "ontoguard/json_io.hpp"

namespace ontoguard {

using nlohmann::json;

bool Matcher::accepts(const AccessRequest& r) const {
  return roles.accepts(r.subject.actor_role) && purposes.accepts(r.purpose) &&
         scopes.accepts(r.resource.record_scope) && relationships.accepts(r.subject.relationship_to_patient) &&
         registration.accepts(r.subject.registration_status);
}

bool Matcher::covers(const Matcher& o) const {
  return roles.covers(o.roles) && purposes.covers(o.purposes) && scopes.covers(o.scopes) &&
         relationships.covers(o.relationships) && registration.covers(o.registration);
}

const Provision* Ontology::find(std::string_view id) const {
  for (const auto& p : provisions) {
    if (p.provision_id == id) return &p;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort location of a provision inside the source text.
int line_of_provision(const std::string& text, const std::string& id, int fallback) {
  if (id.empty()) return fallback;
  auto pos = text.find("\"" + id + "\"");
  return pos == std::string::npos ? fallback : line_of_offset(text, pos);
}

class FileParser {
 public:
  FileParser(const std::string& text, const std::string& path) : text_(text), path_(path) {}

  [[noreturn]] void fail(const std::string& id, const std::string& msg) const {
    throw ParseError(path_, line_of_provision(text_, id, 1), msg);
  }

  template <typename E>
  E parse_enum(const json& j, const std::string& id, const std::string& field) const {
    if (!j.is_string()) fail(id, field + " must be a string");
    auto v = enum_from_string<E>(j.get<std::string>());
    if (!v) fail(id, "unknown " + field + " value '" + j.get<std::string>() + "'");
    return *v;
  }

  template <typename E>
  Selector<E> parse_selector(const json& matcher, const char* key, const std::string& id) const {
    if (!matcher.contains(key)) return Selector<E>::wildcard();
    const json& v = matcher.at(key);
    if (v.is_string() && v.get<std::string>() == "*") return Selector<E>::wildcard();
    if (!v.is_array()) fail(id, std::string("applies_to.") + key + " must be \"*\" or a list");
    std::vector<E> values;
    for (const auto& item : v) {
      E e = parse_enum<E>(item, id, std::string("applies_to.") + key);
      if (std::ranges::find(values, e) == values.end()) values.push_back(e);
    }
    return Selector<E>::of(std::move(values));
  }

  Provision parse_provision(const json& j, SourceAct file_act) const {
    if (!j.is_object()) fail("", "provision entries must be objects");
    std::string id;
    if (j.contains("provision_id") && j.at("provision_id").is_string()) id = j.at("provision_id").get<std::string>();
    if (id.empty()) fail("", "provision without provision_id");

    static const std::set<std::string> known = {"provision_id", "source_act", "effect", "applies_to",
                                                "conditions",   "priority",   "summary"};
    for (const auto& [key, _] : j.items()) {
      if (!known.contains(key)) fail(id, "unknown provision field '" + key + "'");
    }

    Provision p;
    p.provision_id = id;
    if (!j.contains("source_act")) fail(id, "missing source_act");
    if (!j.at("source_act").is_string()) fail(id, "source_act must be a string");
    auto act = enum_from_string<SourceAct>(j.at("source_act").get<std::string>());
    if (!act) throw UnknownAct(j.at("source_act").get<std::string>());
    if (*act != file_act) fail(id, "source_act differs from the file's act");
    p.source_act = *act;

    if (!j.contains("effect")) fail(id, "missing effect");
    p.effect = parse_enum<Effect>(j.at("effect"), id, "effect");
    p.priority = j.contains("priority") ? parse_enum<Priority>(j.at("priority"), id, "priority") : Priority::Default;

    if (!j.contains("applies_to") || !j.at("applies_to").is_object()) fail(id, "missing applies_to object");
    const json& m = j.at("applies_to");
    static const std::set<std::string> dims = {"roles", "purposes", "scopes", "relationships", "registration"};
    for (const auto& [key, _] : m.items()) {
      if (!dims.contains(key)) fail(id, "unknown matcher dimension '" + key + "'");
    }
    p.applies_to.roles = parse_selector<Role>(m, "roles", id);
    p.applies_to.purposes = parse_selector<Purpose>(m, "purposes", id);
    p.applies_to.scopes = parse_selector<RecordScope>(m, "scopes", id);
    p.applies_to.relationships = parse_selector<Relationship>(m, "relationships", id);
    p.applies_to.registration = parse_selector<RegistrationStatus>(m, "registration", id);

    if (j.contains("conditions")) {
      if (!j.at("conditions").is_array()) fail(id, "conditions must be a list");
      for (const auto& c : j.at("conditions")) {
        Condition cond = parse_enum<Condition>(c, id, "condition");
        if (!p.has(cond)) p.conditions.push_back(cond);
      }
    }
    if (p.effect == Effect::Prohibit && !p.conditions.empty()) fail(id, "Prohibit provisions carry no conditions");
    if (j.contains("summary") && j.at("summary").is_string()) p.summary = j.at("summary").get<std::string>();
    return p;
  }

 private:
  const std::string& text_;
  const std::string& path_;
};

}  // namespace

std::vector<Provision> parse_policy_file(const std::string& text, const std::string& path, SourceAct* act_out,
                                         std::string* version_out) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path, line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  FileParser parser(text, path);
  if (!doc.is_object()) throw ParseError(path, 1, "top level must be an object");
  if (!doc.contains("act") || !doc.at("act").is_string()) throw ParseError(path, 1, "missing \"act\"");
  auto act = enum_from_string<SourceAct>(doc.at("act").get<std::string>());
  if (!act) throw UnknownAct(doc.at("act").get<std::string>());
  if (!doc.contains("version") || !doc.at("version").is_string()) throw ParseError(path, 1, "missing \"version\"");
  if (!doc.contains("provisions") || !doc.at("provisions").is_array()) {
    throw ParseError(path, 1, "missing \"provisions\" list");
  }
  std::vector<Provision> out;
  for (const auto& entry : doc.at("provisions")) out.push_back(parser.parse_provision(entry, *act));
  if (act_out) *act_out = *act;
  if (version_out) *version_out = doc.at("version").get<std::string>();
  return out;
}

Ontology load_policy_corpus(const std::vector<std::filesystem::path>& paths) {
  Ontology onto;
  std::map<std::string, std::string> seen;  // id -> file
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) throw FileUnreadable(path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    SourceAct act{};
    std::string version;
    auto provisions = parse_policy_file(buf.str(), path.string(), &act, &version);
    for (auto& p : provisions) {
      auto [it, fresh] = seen.emplace(p.provision_id, path.string());
      if (!fresh) throw DuplicateProvisionId(p.provision_id + " in " + it->second + " and " + path.string());
      onto.provisions.push_back(std::move(p));
    }
    onto.act_versions[act] = version;
    onto.loaded_from.push_back(path.string());
  }
  return onto;
}

std::vector<std::filesystem::path> policy_files_in(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw FileUnreadable(dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::ranges::sort(out);
  return out;
}

// ---------------------------------------------------------------------------

ConditionStatus evaluate_condition(Condition c, const AccessRequest& r) {
  switch (c) {
    case Condition::ConsentRequired:
      switch (r.consent) {
        case Consent::Granted:
          return ConditionStatus::Satisfied;
        case Consent::Absent:
          return ConditionStatus::Unsatisfied;
        case Consent::Unknown:
          return ConditionStatus::Indeterminate;
      }
      break;
    case Condition::SupervisionRequired:
      return r.supervision == Supervision::Supervised ? ConditionStatus::Satisfied : ConditionStatus::Unsatisfied;
    case Condition::PurposeMustBeHealthcare:
      return r.purpose == Purpose::HealthcareProvision ? ConditionStatus::Satisfied : ConditionStatus::Unsatisfied;
    case Condition::RegisteredProviderRequired:
      return r.subject.registration_status == RegistrationStatus::RegisteredProvider ? ConditionStatus::Satisfied
                                                                                      : ConditionStatus::Unsatisfied;
    default:
      break;
  }
  return ConditionStatus::Indeterminate;
}

std::vector<ProvisionMatch> applicable_provisions(const Ontology& ontology, const AccessRequest& request) {
  std::vector<ProvisionMatch> out;
  for (const auto& p : ontology.provisions) {
    if (!p.applies_to.accepts(request)) continue;
    ProvisionMatch m;
    m.provision_id = p.provision_id;
    m.source_act = p.source_act;
    m.effect = p.effect;
    m.priority = p.priority;
    for (Condition c : p.conditions) {
      if (is_attribute_condition(c)) {
        m.attribute_checks.push_back({c, evaluate_condition(c, request)});
      } else if (is_context_condition(c)) {
        m.context_conditions.push_back(c);
      } else if (c == Condition::EmergencyOverridable) {
        m.emergency_overridable = true;
      }
    }
    out.push_back(std::move(m));
  }
  std::ranges::sort(out, [](const ProvisionMatch& a, const ProvisionMatch& b) {
    if (a.priority != b.priority) return a.priority == Priority::Mandatory;
    return a.provision_id < b.provision_id;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<OntologyProblem> validate_ontology(const Ontology& ontology) {
  std::vector<OntologyProblem> problems;
  if (ontology.provisions.empty()) {
    problems.push_back({"empty ontology", "", "the ontology holds no provisions"});
    return problems;
  }
  for (const auto& [act, version] : ontology.act_versions) {
    bool any = std::ranges::any_of(ontology.provisions, [&](const Provision& p) { return p.source_act == act; });
    if (!any) {
      problems.push_back({"act without provisions", "",
                          std::string(to_string(act)) + " (" + version + ") contributes no provisions"});
    }
  }
  for (const auto& p : ontology.provisions) {
    const auto& m = p.applies_to;
    if (m.roles.never_fires() || m.purposes.never_fires() || m.scopes.never_fires() ||
        m.relationships.never_fires() || m.registration.never_fires()) {
      problems.push_back({"never fires", p.provision_id, "a matcher dimension lists no values"});
    }
    if (p.has(Condition::PurposeMustBeHealthcare) && !m.purposes.accepts(Purpose::HealthcareProvision)) {
      problems.push_back({"unsatisfiable condition", p.provision_id,
                          "purpose-must-be-healthcare on a matcher that excludes healthcare-provision"});
    }
    if (p.has(Condition::RegisteredProviderRequired) &&
        !m.registration.accepts(RegistrationStatus::RegisteredProvider)) {
      problems.push_back({"unsatisfiable condition", p.provision_id,
                          "registered-provider-required on a matcher that excludes registered providers"});
    }
  }
  for (const auto& p : ontology.provisions) {
    if (p.priority != Priority::Default || p.effect == Effect::Prohibit) continue;
    for (const auto& q : ontology.provisions) {
      if (q.priority != Priority::Mandatory || q.effect != Effect::Prohibit) continue;
      if (q.applies_to.covers(p.applies_to)) {
        problems.push_back({"shadowed provision", p.provision_id,
                            "every request it matches is also matched by " + q.provision_id});
        break;
      }
    }
  }
  return problems;
}

nlohmann::json provision_to_json(const Provision& p) {
  auto selector = [](const auto& s) -> json {
    if (s.any) return "*";
    json arr = json::array();
    for (auto v : s.values) arr.push_back(std::string(to_string(v)));
    return arr;
  };
  json j{{"provision_id", p.provision_id},
         {"source_act", p.source_act},
         {"effect", p.effect},
         {"priority", p.priority},
         {"applies_to",
          {{"roles", selector(p.applies_to.roles)},
           {"purposes", selector(p.applies_to.purposes)},
           {"scopes", selector(p.applies_to.scopes)},
           {"relationships", selector(p.applies_to.relationships)},
           {"registration", selector(p.applies_to.registration)}}},
         {"conditions", p.conditions}};
  if (!p.summary.empty()) j["summary"] = p.summary;
  return j;
}

}  // namespace ontoguard
