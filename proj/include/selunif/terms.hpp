#pragma once

// Core representation of variables, terms, atoms and positions, plus the
// structural predicates (depth, linearity, groundness, variants) everything
// else is built on.  All values are immutable after construction; every
// operation here is a pure function.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace selunif {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A position does not address a node of the given term or atom.
class InvalidPositionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A search or enumeration exceeded its safety limit.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline void require(bool cond, const char* msg) {
  if (!cond) throw PreconditionError(msg);
}
// Internal invariant check; violations indicate a bug, not bad input.
inline void invariant(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(std::string("internal invariant violated: ") + msg);
}
}  // namespace detail

/// Variables live in one of two namespaces.  Ordinary variables are freely
/// bindable.  Frozen variables (printed U0, U1, ...) form a reserved
/// namespace marking positions where further instantiation may break
/// positive unification; ordinary substitution streams never bind them.
enum class VarSpace : std::uint8_t { Ordinary, Frozen };

/// A variable.  Identity is the numeric id alone; the namespace is fixed at
/// creation and the hint is a display-only source name.
struct Variable {
  std::uint64_t id = 0;
  VarSpace space = VarSpace::Ordinary;
  std::string hint;

  friend bool operator==(const Variable& a, const Variable& b) { return a.id == b.id; }
  friend std::strong_ordering operator<=>(const Variable& a, const Variable& b) {
    return a.id <=> b.id;
  }
};

namespace detail {
inline std::atomic<std::uint64_t>& variable_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// Creates a variable guaranteed distinct from every other variable in this
/// process.  The counter is atomic, so concurrent solves stay safe.
inline Variable fresh_variable(VarSpace space = VarSpace::Ordinary, std::string hint = {}) {
  return Variable{++detail::variable_counter(), space, std::move(hint)};
}

inline bool is_frozen(const Variable& v) { return v.space == VarSpace::Frozen; }

/// A function symbol.  (name, arity) pairs are the identity; constants have
/// arity 0.  Also used for predicate symbols.
struct FunctorSymbol {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const FunctorSymbol&, const FunctorSymbol&) = default;
  friend auto operator<=>(const FunctorSymbol&, const FunctorSymbol&) = default;
};

/// A first-order term: either a variable or a function symbol applied to
/// exactly `arity` argument terms.  Terms are immutable and cheap to copy
/// (shared structure under the hood).
class Term {
 public:
  Term() : Term(variable(Variable{})) {}

  static Term variable(Variable v) {
    auto node = std::make_shared<Node>();
    node->is_var = true;
    node->var = std::move(v);
    return Term(std::move(node));
  }

  static Term compound(FunctorSymbol f, std::vector<Term> args) {
    if (f.arity != args.size())
      throw PreconditionError("term arity does not match its symbol: " + f.name);
    auto node = std::make_shared<Node>();
    node->is_var = false;
    node->sym = std::move(f);
    node->kids = std::move(args);
    return Term(std::move(node));
  }

  static Term constant(std::string name) {
    return compound(FunctorSymbol{std::move(name), 0}, {});
  }

  bool is_variable() const { return node_->is_var; }
  bool is_compound() const { return !node_->is_var; }

  const Variable& var() const {
    detail::invariant(node_->is_var, "Term::var on a compound term");
    return node_->var;
  }
  const FunctorSymbol& functor() const {
    detail::invariant(!node_->is_var, "Term::functor on a variable");
    return node_->sym;
  }
  std::span<const Term> args() const {
    detail::invariant(!node_->is_var, "Term::args on a variable");
    return node_->kids;
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->is_var != b.node_->is_var) return false;
    if (a.node_->is_var) return a.node_->var == b.node_->var;
    if (a.node_->sym != b.node_->sym) return false;
    return std::equal(a.node_->kids.begin(), a.node_->kids.end(), b.node_->kids.begin());
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    bool is_var = true;
    Variable var;
    FunctorSymbol sym;
    std::vector<Term> kids;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// A predicate applied to terms, p(t1,...,tn).
struct Atom {
  FunctorSymbol predicate;
  std::vector<Term> args;

  Atom(FunctorSymbol pred, std::vector<Term> arguments)
      : predicate(std::move(pred)), args(std::move(arguments)) {
    if (predicate.arity != args.size())
      throw PreconditionError("atom arity does not match its predicate: " + predicate.name);
  }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.predicate == b.predicate &&
           std::equal(a.args.begin(), a.args.end(), b.args.begin());
  }
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
};

/// A path of 1-based child indices; the empty path is the root.
struct Position {
  std::vector<std::size_t> path;

  Position() = default;
  Position(std::initializer_list<std::size_t> steps) : path(steps) {}
  explicit Position(std::vector<std::size_t> steps) : path(std::move(steps)) {}

  bool is_root() const { return path.empty(); }
  std::size_t length() const { return path.size(); }

  Position descend(std::size_t index) const {
    Position p = *this;
    p.path.push_back(index);
    return p;
  }

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

// ---------------------------------------------------------------------------
// depth

/// depth(X) = 0; depth(f(t1,...,tn)) = 1 + max of the argument depths, where
/// the max over no arguments is 0.  Note constants therefore have depth 1.
inline std::size_t depth(const Term& t) {
  if (t.is_variable()) return 0;
  std::size_t best = 0;
  for (const Term& k : t.args()) best = std::max(best, depth(k));
  return 1 + best;
}

/// Atom depth is the maximum over argument depths (0 for a 0-ary predicate).
inline std::size_t depth(const Atom& a) {
  std::size_t best = 0;
  for (const Term& t : a.args) best = std::max(best, depth(t));
  return best;
}

// ---------------------------------------------------------------------------
// positions

inline Term subterm_at(const Term& t, const Position& p) {
  Term cur = t;
  for (std::size_t step : p.path) {
    if (cur.is_variable() || step < 1 || step > cur.args().size())
      throw InvalidPositionError("position does not address a subterm");
    cur = cur.args()[step - 1];
  }
  return cur;
}

inline Term subterm_at(const Atom& a, const Position& p) {
  if (p.is_root()) throw InvalidPositionError("the root of an atom is not a term");
  std::size_t first = p.path.front();
  if (first < 1 || first > a.args.size())
    throw InvalidPositionError("position does not address a subterm");
  Position rest(std::vector<std::size_t>(p.path.begin() + 1, p.path.end()));
  return subterm_at(a.args[first - 1], rest);
}

inline Term replace_at(const Term& t, const Position& p, const Term& s) {
  if (p.is_root()) return s;
  if (t.is_variable()) throw InvalidPositionError("position does not address a subterm");
  std::size_t step = p.path.front();
  if (step < 1 || step > t.args().size())
    throw InvalidPositionError("position does not address a subterm");
  Position rest(std::vector<std::size_t>(p.path.begin() + 1, p.path.end()));
  std::vector<Term> kids(t.args().begin(), t.args().end());
  kids[step - 1] = replace_at(kids[step - 1], rest, s);
  return Term::compound(t.functor(), std::move(kids));
}

inline Atom replace_at(const Atom& a, const Position& p, const Term& s) {
  if (p.is_root()) throw InvalidPositionError("the root of an atom cannot be replaced by a term");
  std::size_t first = p.path.front();
  if (first < 1 || first > a.args.size())
    throw InvalidPositionError("position does not address a subterm");
  Position rest(std::vector<std::size_t>(p.path.begin() + 1, p.path.end()));
  std::vector<Term> args = a.args;
  args[first - 1] = replace_at(args[first - 1], rest, s);
  return Atom(a.predicate, std::move(args));
}

/// All positions of t in pre-order, paired with the subterm they address
/// (includes the root).
inline std::vector<std::pair<Position, Term>> subterm_positions(const Term& t) {
  std::vector<std::pair<Position, Term>> out;
  auto walk = [&](auto&& self, const Term& cur, const Position& pos) -> void {
    out.emplace_back(pos, cur);
    if (cur.is_compound()) {
      std::size_t i = 1;
      for (const Term& k : cur.args()) self(self, k, pos.descend(i++));
    }
  };
  walk(walk, t, Position{});
  return out;
}

/// All positions of the atom's arguments in pre-order (no root position).
inline std::vector<std::pair<Position, Term>> subterm_positions(const Atom& a) {
  std::vector<std::pair<Position, Term>> out;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    for (auto& [pos, sub] : subterm_positions(a.args[i])) {
      std::vector<std::size_t> steps;
      steps.reserve(pos.path.size() + 1);
      steps.push_back(i + 1);
      steps.insert(steps.end(), pos.path.begin(), pos.path.end());
      out.emplace_back(Position(std::move(steps)), sub);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// variable queries

namespace detail {
inline void collect_vars(const Term& t, std::vector<Variable>& out,
                         std::unordered_set<std::uint64_t>& seen) {
  if (t.is_variable()) {
    if (seen.insert(t.var().id).second) out.push_back(t.var());
    return;
  }
  for (const Term& k : t.args()) collect_vars(k, out, seen);
}
}  // namespace detail

/// Free variables in first-occurrence order (left to right), deduplicated.
inline std::vector<Variable> vars_of(const Term& t) {
  std::vector<Variable> out;
  std::unordered_set<std::uint64_t> seen;
  detail::collect_vars(t, out, seen);
  return out;
}

inline std::vector<Variable> vars_of(const Atom& a) {
  std::vector<Variable> out;
  std::unordered_set<std::uint64_t> seen;
  for (const Term& t : a.args) detail::collect_vars(t, out, seen);
  return out;
}

inline std::vector<Variable> vars_of(std::span<const Atom> atoms) {
  std::vector<Variable> out;
  std::unordered_set<std::uint64_t> seen;
  for (const Atom& a : atoms)
    for (const Term& t : a.args) detail::collect_vars(t, out, seen);
  return out;
}

inline std::vector<Variable> vars_of(std::span<const Term> terms) {
  std::vector<Variable> out;
  std::unordered_set<std::uint64_t> seen;
  for (const Term& t : terms) detail::collect_vars(t, out, seen);
  return out;
}

inline bool contains_var(std::span<const Variable> vars, const Variable& v) {
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

namespace detail {
inline void collect_symbols(const Term& t, std::vector<FunctorSymbol>& out) {
  if (t.is_variable()) return;
  if (std::find(out.begin(), out.end(), t.functor()) == out.end()) out.push_back(t.functor());
  for (const Term& k : t.args()) collect_symbols(k, out);
}
}  // namespace detail

/// Function symbols in first-occurrence order, deduplicated.  Predicate
/// symbols are not included.
inline std::vector<FunctorSymbol> symbols_of(const Term& t) {
  std::vector<FunctorSymbol> out;
  detail::collect_symbols(t, out);
  return out;
}

inline std::vector<FunctorSymbol> symbols_of(const Atom& a) {
  std::vector<FunctorSymbol> out;
  for (const Term& t : a.args) detail::collect_symbols(t, out);
  return out;
}

inline std::vector<FunctorSymbol> symbols_of(std::span<const Atom> atoms) {
  std::vector<FunctorSymbol> out;
  for (const Atom& a : atoms)
    for (const Term& t : a.args) detail::collect_symbols(t, out);
  return out;
}

inline bool occurs(const Variable& v, const Term& t) {
  if (t.is_variable()) return t.var() == v;
  for (const Term& k : t.args())
    if (occurs(v, k)) return true;
  return false;
}

inline bool contains_frozen_var(const Term& t) {
  if (t.is_variable()) return is_frozen(t.var());
  for (const Term& k : t.args())
    if (contains_frozen_var(k)) return true;
  return false;
}

inline bool contains_frozen_var(const Atom& a) {
  for (const Term& t : a.args)
    if (contains_frozen_var(t)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// structural predicates

namespace detail {
inline bool linear_walk(const Term& t, std::unordered_set<std::uint64_t>& seen) {
  if (t.is_variable()) return seen.insert(t.var().id).second;
  for (const Term& k : t.args())
    if (!linear_walk(k, seen)) return false;
  return true;
}
}  // namespace detail

/// True iff no variable occurs more than once.
inline bool is_linear(const Term& t) {
  std::unordered_set<std::uint64_t> seen;
  return detail::linear_walk(t, seen);
}

inline bool is_linear(const Atom& a) {
  std::unordered_set<std::uint64_t> seen;
  for (const Term& t : a.args)
    if (!detail::linear_walk(t, seen)) return false;
  return true;
}

inline bool is_ground(const Term& t) {
  if (t.is_variable()) return false;
  for (const Term& k : t.args())
    if (!is_ground(k)) return false;
  return true;
}

inline bool is_ground(const Atom& a) {
  for (const Term& t : a.args)
    if (!is_ground(t)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// variants

namespace detail {
struct VariantMaps {
  std::unordered_map<std::uint64_t, std::uint64_t> fwd;
  std::unordered_map<std::uint64_t, std::uint64_t> bwd;
};

inline bool variant_walk(const Term& a, const Term& b, VariantMaps& maps,
                         bool respect_namespace) {
  if (a.is_variable() != b.is_variable()) return false;
  if (a.is_variable()) {
    if (respect_namespace && a.var().space != b.var().space) return false;
    auto [fit, fnew] = maps.fwd.emplace(a.var().id, b.var().id);
    if (!fnew && fit->second != b.var().id) return false;
    auto [bit, bnew] = maps.bwd.emplace(b.var().id, a.var().id);
    if (!bnew && bit->second != a.var().id) return false;
    return true;
  }
  if (a.functor() != b.functor()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!variant_walk(a.args()[i], b.args()[i], maps, respect_namespace)) return false;
  return true;
}
}  // namespace detail

/// True iff the two terms are equal up to a bijective variable renaming that
/// maps ordinary variables to ordinary ones and frozen to frozen.
inline bool variant_eq(const Term& a, const Term& b) {
  detail::VariantMaps maps;
  return detail::variant_walk(a, b, maps, /*respect_namespace=*/true);
}

inline bool variant_eq(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate) return false;
  detail::VariantMaps maps;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!detail::variant_walk(a.args[i], b.args[i], maps, true)) return false;
  return true;
}

/// Variant check where the renaming may cross the ordinary/frozen split.
inline bool variant_eq_up_to_namespace(const Term& a, const Term& b) {
  detail::VariantMaps maps;
  return detail::variant_walk(a, b, maps, /*respect_namespace=*/false);
}

inline bool variant_eq_up_to_namespace(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate) return false;
  detail::VariantMaps maps;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!detail::variant_walk(a.args[i], b.args[i], maps, false)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// canonical forms

namespace detail {
struct Canonicalizer {
  std::unordered_map<std::uint64_t, std::size_t> indices;

  void walk(const Term& t, std::string& out) {
    if (t.is_variable()) {
      auto [it, fresh] = indices.emplace(t.var().id, indices.size());
      out += is_frozen(t.var()) ? "?u" : "?v";
      out += std::to_string(it->second);
      return;
    }
    out += t.functor().name;
    if (!t.args().empty()) {
      out += '(';
      bool first = true;
      for (const Term& k : t.args()) {
        if (!first) out += ',';
        first = false;
        walk(k, out);
      }
      out += ')';
    }
  }
};
}  // namespace detail

/// A string that is identical for two terms exactly when they are variants
/// (namespace-preserving).  Used as a dedup key for variant classes.
inline std::string canonical_form(const Term& t) {
  detail::Canonicalizer c;
  std::string out;
  c.walk(t, out);
  return out;
}

inline std::string canonical_form(const Atom& a) {
  detail::Canonicalizer c;
  std::string out = a.predicate.name;
  out += '/';
  out += std::to_string(a.predicate.arity);
  out += '(';
  bool first = true;
  for (const Term& t : a.args) {
    if (!first) out += ',';
    first = false;
    c.walk(t, out);
  }
  out += ')';
  return out;
}

inline std::string canonical_form(std::span<const Term> terms) {
  detail::Canonicalizer c;
  std::string out;
  bool first = true;
  for (const Term& t : terms) {
    if (!first) out += ';';
    first = false;
    c.walk(t, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// renaming

namespace detail {
inline Term rename_term(const Term& t,
                        const std::unordered_map<std::uint64_t, Variable>& map) {
  if (t.is_variable()) {
    auto it = map.find(t.var().id);
    return it == map.end() ? t : Term::variable(it->second);
  }
  std::vector<Term> kids;
  kids.reserve(t.args().size());
  for (const Term& k : t.args()) kids.push_back(rename_term(k, map));
  return Term::compound(t.functor(), std::move(kids));
}
}  // namespace detail

/// A variant of `a` whose variables are all fresh, drawn from `space`.
/// Repeated occurrences of one variable stay identified.
inline Atom fresh_renamed(const Atom& a, VarSpace space = VarSpace::Ordinary) {
  std::unordered_map<std::uint64_t, Variable> map;
  for (const Variable& v : vars_of(a)) map.emplace(v.id, fresh_variable(space, v.hint));
  std::vector<Term> args;
  args.reserve(a.args.size());
  for (const Term& t : a.args) args.push_back(detail::rename_term(t, map));
  return Atom(a.predicate, std::move(args));
}

/// Variants of the inputs with mutually disjoint, all-fresh variables.
/// Each atom gets its own renaming, so variables shared between two input
/// atoms come out distinct.
inline std::vector<Atom> rename_apart(std::span<const Atom> atoms,
                                      VarSpace space = VarSpace::Ordinary) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(fresh_renamed(a, space));
  return out;
}

// ---------------------------------------------------------------------------
// printing

inline std::string to_string(const Variable& v) {
  if (!v.hint.empty()) return v.hint;
  return (is_frozen(v) ? "U" : "_") + std::to_string(v.id);
}

inline std::string to_string(const Term& t) {
  if (t.is_variable()) return to_string(t.var());
  std::string out = t.functor().name;
  if (!t.args().empty()) {
    out += '(';
    bool first = true;
    for (const Term& k : t.args()) {
      if (!first) out += ',';
      first = false;
      out += to_string(k);
    }
    out += ')';
  }
  return out;
}

inline std::string to_string(const Atom& a) {
  std::string out = a.predicate.name;
  if (!a.args.empty()) {
    out += '(';
    bool first = true;
    for (const Term& t : a.args) {
      if (!first) out += ',';
      first = false;
      out += to_string(t);
    }
    out += ')';
  }
  return out;
}

inline std::string to_string(const Position& p) {
  if (p.is_root()) return "[]";
  std::string out = "[";
  bool first = true;
  for (std::size_t s : p.path) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(s);
  }
  out += ']';
  return out;
}

}  // namespace selunif

template <>
struct std::hash<selunif::Variable> {
  std::size_t operator()(const selunif::Variable& v) const noexcept {
    return std::hash<std::uint64_t>{}(v.id);
  }
};

template <>
struct std::hash<selunif::FunctorSymbol> {
  std::size_t operator()(const selunif::FunctorSymbol& f) const noexcept {
    return std::hash<std::string>{}(f.name) * 31 + f.arity;
  }
};
