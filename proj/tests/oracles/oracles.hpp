#pragma once

// Independent reference implementations the engine is checked against.
// None of these call into the code under test for the quantity they compute.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ontoguard/ontology.hpp"

namespace ontoguard::oracle {

// Percentile by selecting the two neighbouring order statistics of an
// unsorted copy with nth_element, interpolated in long double.
inline double percentile(std::vector<double> values, double p) {
  const std::size_t n = values.size();
  const long double h = static_cast<long double>(n - 1) * static_cast<long double>(p);
  const auto k = static_cast<std::size_t>(std::floor(h));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  const long double lo = values[k];
  if (k + 1 >= n) return static_cast<double>(lo);
  const long double hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(k) + 1, values.end());
  return static_cast<double>(lo + (h - static_cast<long double>(k)) * (hi - lo));
}

struct Box {
  double min, q1, median, q3, max;
};

inline Box box(const std::vector<double>& values) {
  return {*std::min_element(values.begin(), values.end()), percentile(values, 0.25), percentile(values, 0.5),
          percentile(values, 0.75), *std::max_element(values.begin(), values.end())};
}

// Rubric total for a proposed (cc, re) pair on the 0 / 0.25 / 0.5 grid.
inline double rubric_total(double cc, double re) { return cc == 0.0 ? 0.0 : cc + re; }

inline bool on_total_grid(double total) {
  for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    if (total == g) return true;
  }
  return false;
}

template <typename E>
bool selector_admits(const Selector<E>& s, E value) {
  if (s.any) return true;
  for (E v : s.values) {
    if (v == value) return true;
  }
  return false;
}

// True when some Mandatory Prohibit provision's matcher accepts the request.
inline bool mandatory_prohibit_applies(const Ontology& o, const AccessRequest& r) {
  for (const Provision& p : o.provisions) {
    if (p.effect != Effect::Prohibit || p.priority != Priority::Mandatory) continue;
    const Matcher& m = p.applies_to;
    if (selector_admits(m.roles, r.subject.actor_role) && selector_admits(m.purposes, r.purpose) &&
        selector_admits(m.scopes, r.resource.record_scope) &&
        selector_admits(m.relationships, r.subject.relationship_to_patient) &&
        selector_admits(m.registration, r.subject.registration_status)) {
      return true;
    }
  }
  return false;
}

}  // namespace ontoguard::oracle
