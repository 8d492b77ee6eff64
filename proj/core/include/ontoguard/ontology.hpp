#pragma once

// The provision store: one JSON file per Act, loaded into an immutable
// Ontology and queried per request.

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ontoguard/domain.hpp"

namespace ontoguard {

// Set-membership test with a wildcard. `any` accepts everything; otherwise
// only the listed values (an empty list never accepts).
template <typename E>
struct Selector {
  bool any = true;
  std::vector<E> values;

  static Selector wildcard() { return {}; }
  static Selector of(std::vector<E> v) { return {false, std::move(v)}; }

  bool accepts(E value) const { return any || std::ranges::find(values, value) != values.end(); }
  // Every value accepted by `other` is accepted by this selector.
  bool covers(const Selector& other) const {
    if (any) return true;
    if (other.any) return std::ranges::all_of(enum_values<E>(), [&](E e) { return accepts(e); });
    return std::ranges::all_of(other.values, [&](E e) { return accepts(e); });
  }
  bool never_fires() const { return !any && values.empty(); }

  bool operator==(const Selector&) const = default;
};

struct Matcher {
  Selector<Role> roles;
  Selector<Purpose> purposes;
  Selector<RecordScope> scopes;
  Selector<Relationship> relationships;
  Selector<RegistrationStatus> registration;

  bool accepts(const AccessRequest& r) const;
  bool covers(const Matcher& other) const;

  bool operator==(const Matcher&) const = default;
};

struct Provision {
  std::string provision_id;
  SourceAct source_act = SourceAct::PrivacyAct1988;
  Effect effect = Effect::Authorize;
  Matcher applies_to;
  std::vector<Condition> conditions;
  Priority priority = Priority::Default;
  std::string summary;

  bool has(Condition c) const { return std::ranges::find(conditions, c) != conditions.end(); }
  bool operator==(const Provision&) const = default;
};

struct Ontology {
  std::vector<Provision> provisions;
  std::map<SourceAct, std::string> act_versions;
  std::vector<std::string> loaded_from;

  const Provision* find(std::string_view id) const;
};

// Parses one provision file. `path` is used only for error messages.
// Throws ParseError, UnknownAct.
std::vector<Provision> parse_policy_file(const std::string& text, const std::string& path,
                                         SourceAct* act_out = nullptr, std::string* version_out = nullptr);

// Throws FileUnreadable, ParseError, DuplicateProvisionId, UnknownAct.
Ontology load_policy_corpus(const std::vector<std::filesystem::path>& paths);

// Every *.json file directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> policy_files_in(const std::filesystem::path& dir);

// Status of one attribute condition against the request's own fields.
ConditionStatus evaluate_condition(Condition c, const AccessRequest& r);

// Mandatory before Default, then by provision_id.
std::vector<ProvisionMatch> applicable_provisions(const Ontology& ontology, const AccessRequest& request);

struct OntologyProblem {
  std::string kind;          // "empty ontology", "act without provisions", "never fires", ...
  std::string provision_id;  // empty for corpus-level problems
  std::string message;

  bool operator==(const OntologyProblem&) const = default;
};

std::vector<OntologyProblem> validate_ontology(const Ontology& ontology);

nlohmann::json provision_to_json(const Provision& p);

}  // namespace ontoguard
