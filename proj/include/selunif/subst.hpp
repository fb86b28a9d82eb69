#pragma once

// Substitutions over first-order terms: application, composition,
// restriction, most general unifiers (with occurs check), one-sided
// matching, and parallel composition via equation solving.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selunif/terms.hpp"

namespace selunif {

/// A finite map from variables to terms.  Identity bindings are never
/// stored, so the domain is exactly the set of variables the substitution
/// moves.  Bindings iterate in ascending variable-id order.
class Substitution {
 public:
  Substitution() = default;

  static Substitution identity() { return {}; }

  static Substitution bind(const Variable& v, Term t) {
    Substitution s;
    s.insert(v, std::move(t));
    return s;
  }

  static Substitution from_bindings(std::span<const std::pair<Variable, Term>> bindings) {
    Substitution s;
    for (const auto& [v, t] : bindings) s.insert(v, t);
    return s;
  }

  bool is_identity() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  const std::map<Variable, Term>& bindings() const { return bindings_; }

  std::optional<Term> lookup(const Variable& v) const {
    auto it = bindings_.find(v);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Variable> domain() const {
    std::vector<Variable> out;
    out.reserve(bindings_.size());
    for (const auto& [v, t] : bindings_) out.push_back(v);
    return out;
  }

  /// Variables occurring in range terms, in binding order then first
  /// occurrence.
  std::vector<Variable> range_variables() const {
    std::vector<Variable> out;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& [v, t] : bindings_) detail::collect_vars(t, out, seen);
    return out;
  }

  Term operator()(const Term& t) const {
    if (bindings_.empty()) return t;
    if (t.is_variable()) {
      auto it = bindings_.find(t.var());
      return it == bindings_.end() ? t : it->second;
    }
    std::vector<Term> kids;
    kids.reserve(t.args().size());
    bool changed = false;
    for (const Term& k : t.args()) {
      kids.push_back((*this)(k));
      if (kids.back() != k) changed = true;
    }
    if (!changed) return t;
    return Term::compound(t.functor(), std::move(kids));
  }

  Atom operator()(const Atom& a) const {
    std::vector<Term> args;
    args.reserve(a.args.size());
    for (const Term& t : a.args) args.push_back((*this)(t));
    return Atom(a.predicate, std::move(args));
  }

  /// Adds or overwrites a binding, dropping identities.
  void insert(const Variable& v, Term t) {
    if (t.is_variable() && t.var() == v) {
      bindings_.erase(v);
      return;
    }
    bindings_.insert_or_assign(v, std::move(t));
  }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.bindings_ == b.bindings_;
  }

 private:
  std::map<Variable, Term> bindings_;
};

inline Term apply(const Substitution& s, const Term& t) { return s(t); }
inline Atom apply(const Substitution& s, const Atom& a) { return s(a); }

inline std::vector<Atom> apply(const Substitution& s, std::span<const Atom> atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(s(a));
  return out;
}

/// Composition: apply(compose(s, t), x) == apply(t, apply(s, x)).
inline Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [v, t] : first.bindings()) out.insert(v, second(t));
  for (const auto& [v, t] : second.bindings())
    if (!first.lookup(v)) out.insert(v, t);
  return out;
}

inline Substitution restrict_to(const Substitution& s, std::span<const Variable> vars) {
  Substitution out;
  for (const auto& [v, t] : s.bindings())
    if (contains_var(vars, v)) out.insert(v, t);
  return out;
}

/// Idempotence: domain and range variables are disjoint, so applying twice
/// equals applying once.
inline bool is_idempotent(const Substitution& s) {
  for (const auto& [v, t] : s.bindings())
    for (const auto& [w, u] : s.bindings())
      if (occurs(v, u)) return false;
  return true;
}

/// Range terms are pairwise variable-disjoint and each is linear.
inline bool is_linear(const Substitution& s) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& [v, t] : s.bindings())
    if (!detail::linear_walk(t, seen)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// unification

struct Equation {
  Term lhs;
  Term rhs;
};

using EquationSet = std::vector<Equation>;

/// Most general unifier of a set of equations, or nullopt when none exists.
/// Always runs the occurs check; the result is idempotent, and deterministic
/// for a given equation order.
inline std::optional<Substitution> mgu(const EquationSet& equations) {
  Substitution sigma;
  std::vector<Equation> work(equations.rbegin(), equations.rend());
  while (!work.empty()) {
    Equation eq = std::move(work.back());
    work.pop_back();
    Term lhs = sigma(eq.lhs);
    Term rhs = sigma(eq.rhs);
    if (lhs == rhs) continue;
    if (lhs.is_variable()) {
      if (occurs(lhs.var(), rhs)) return std::nullopt;
      sigma = compose(sigma, Substitution::bind(lhs.var(), rhs));
      continue;
    }
    if (rhs.is_variable()) {
      if (occurs(rhs.var(), lhs)) return std::nullopt;
      sigma = compose(sigma, Substitution::bind(rhs.var(), lhs));
      continue;
    }
    if (lhs.functor() != rhs.functor()) return std::nullopt;
    // Push argument pairs so they are processed left to right.
    for (std::size_t i = lhs.args().size(); i-- > 0;)
      work.push_back({lhs.args()[i], rhs.args()[i]});
  }
  return sigma;
}

inline std::optional<Substitution> mgu(const Term& a, const Term& b) {
  return mgu(EquationSet{{a, b}});
}

inline std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate) return std::nullopt;
  EquationSet eqs;
  eqs.reserve(a.args.size());
  for (std::size_t i = 0; i < a.args.size(); ++i) eqs.push_back({a.args[i], b.args[i]});
  return mgu(eqs);
}

inline bool unifiable(const Term& a, const Term& b) { return mgu(a, b).has_value(); }
inline bool unifiable(const Atom& a, const Atom& b) { return mgu(a, b).has_value(); }

/// One-sided matching: a substitution m with Dom(m) subset of Var(pattern)
/// and apply(m, pattern) == target, or nullopt.  The target is not changed.
inline std::optional<Substitution> match(const Term& pattern, const Term& target) {
  Substitution m;
  auto walk = [&](auto&& self, const Term& p, const Term& t) -> bool {
    if (p.is_variable()) {
      auto bound = m.lookup(p.var());
      if (bound) return *bound == t;
      if (t.is_variable() && t.var() == p.var()) return true;
      m.insert(p.var(), t);
      return true;
    }
    if (t.is_variable() || p.functor() != t.functor()) return false;
    for (std::size_t i = 0; i < p.args().size(); ++i)
      if (!self(self, p.args()[i], t.args()[i])) return false;
    return true;
  };
  if (!walk(walk, pattern, target)) return std::nullopt;
  return m;
}

inline std::optional<Substitution> match(const Atom& pattern, const Atom& target) {
  if (pattern.predicate != target.predicate) return std::nullopt;
  Substitution m;
  auto walk = [&](auto&& self, const Term& p, const Term& t) -> bool {
    if (p.is_variable()) {
      auto bound = m.lookup(p.var());
      if (bound) return *bound == t;
      if (t.is_variable() && t.var() == p.var()) return true;
      m.insert(p.var(), t);
      return true;
    }
    if (t.is_variable() || p.functor() != t.functor()) return false;
    for (std::size_t i = 0; i < p.args().size(); ++i)
      if (!self(self, p.args()[i], t.args()[i])) return false;
    return true;
  };
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!walk(walk, pattern.args[i], target.args[i])) return std::nullopt;
  return m;
}

// ---------------------------------------------------------------------------
// equational representation and parallel composition

/// The equation set { v = t : v/t in s }, in binding order.
inline EquationSet equational_repr(const Substitution& s) {
  EquationSet eqs;
  eqs.reserve(s.size());
  for (const auto& [v, t] : s.bindings()) eqs.push_back({Term::variable(v), t});
  return eqs;
}

/// Parallel composition: the mgu of the union of both equational
/// representations, or nullopt when the union is unsolvable.  Requires both
/// inputs idempotent.
inline std::optional<Substitution> parallel_compose(const Substitution& a,
                                                    const Substitution& b) {
  detail::require(is_idempotent(a) && is_idempotent(b),
                  "parallel composition requires idempotent substitutions");
  EquationSet eqs = equational_repr(a);
  EquationSet more = equational_repr(b);
  eqs.insert(eqs.end(), more.begin(), more.end());
  return mgu(eqs);
}

// ---------------------------------------------------------------------------
// printing

/// Renders as {X/t, Y/s} in ascending variable-id order; the identity prints
/// as "id".  Pair with the optional-failure convention: absent results print
/// as "fail".
inline std::string to_string(const Substitution& s) {
  if (s.is_identity()) return "id";
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += to_string(v);
    out += '/';
    out += to_string(t);
  }
  out += '}';
  return out;
}

inline std::string to_string(const std::optional<Substitution>& s) {
  return s ? to_string(*s) : "fail";
}

}  // namespace selunif
