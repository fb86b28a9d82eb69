#pragma once

// Positive unification.  Given a start atom A and a set of atoms it must
// keep unifying with, compute instantiations theta of A such that A*theta
// unifies with every atom of the set no matter how its ordinary variables
// are further instantiated.  Frozen variables in the result mark the
// positions that must stay untouched for that guarantee to hold.

#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selunif/disagree.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"
#include "selunif/termspace.hpp"

namespace selunif {

/// One don't-know choice taken during the search: the simple-pair binding
/// var/term that was applied.
struct BranchStep {
  Variable var;
  Term term;
};

struct PositiveResult {
  /// Dom(theta) is a subset of Var(A); the instantiated atom carries only
  /// fresh ordinary variables and frozen variables, never input variables.
  Substitution theta;
  /// The simple-pair bindings applied along this branch, in order.
  std::vector<BranchStep> branch_trace;
};

namespace detail {

inline std::optional<Substitution> binding_toward(const DisagreementPair& d, const Variable& x) {
  if (!is_simple(d)) return std::nullopt;
  if (d.left.is_variable() && d.left.var() == x && !occurs(x, d.right))
    return Substitution::bind(x, d.right);
  if (d.right.is_variable() && d.right.var() == x && !occurs(x, d.left))
    return Substitution::bind(x, d.left);
  return std::nullopt;
}

struct PositiveSearch {
  PositiveSearch(const Atom& start_atom, bool deterministic_mode)
      : start(start_atom), deterministic(deterministic_mode) {}

  const Atom& start;
  bool deterministic;  // take the first choice everywhere, no fan-out

  std::vector<PositiveResult> results;
  std::unordered_set<std::string> seen;
  std::uint64_t steps = 0;
  std::uint64_t dropped_branches = 0;

  static constexpr std::uint64_t kStepLimit = 1u << 21;

  void bump() {
    if (++steps > kStepLimit)
      throw EnumerationLimitError("positive unification search exceeded its step limit");
  }

  static std::size_t pairs_between_first_two(const WorkingSet& b) {
    std::size_t n = 0;
    for (const DisagreementPair& d : disagreement_pairs(b))
      if (d.left_atom == 0 && d.right_atom == 1) ++n;
    return n;
  }

  void run(WorkingSet b, std::vector<BranchStep> trace) {
    // Phase 1: apply simple-pair bindings.  Each application eliminates the
    // bound variable from the whole set, so the distinct-variable count is a
    // strictly decreasing measure.
    for (;;) {
      bump();
      std::vector<DisagreementPair> simples;
      for (DisagreementPair& d : disagreement_pairs(b))
        if (is_simple(d)) simples.push_back(std::move(d));
      if (simples.empty()) break;

      std::size_t vars_before = vars_of(b.atoms()).size();

      const Substitution canonical = determined_binding(simples.front());
      const Variable x = canonical.bindings().begin()->first;

      // Pairs that bind a different variable are don't-care: any fixed order
      // reaches the same results, so they simply wait their turn.  Pairs
      // that can be read as binding x form the don't-know group and every
      // one of them spawns a branch.
      std::vector<Substitution> group;
      for (const DisagreementPair& d : simples) {
        auto opt = binding_toward(d, x);
        if (!opt) continue;
        bool dup = false;
        for (const Substitution& have : group)
          if (have == *opt) {
            dup = true;
            break;
          }
        if (!dup) group.push_back(std::move(*opt));
      }
      invariant(!group.empty() && group.front() == canonical,
                "the first simple pair must lead its own don't-know group");

      if (group.size() == 1 || deterministic) {
        const Substitution& eta = group.front();
        trace.push_back({x, eta.bindings().begin()->second});
        b = b.mapped(eta);
        invariant(vars_of(b.atoms()).size() < vars_before,
                  "simple-pair binding did not eliminate a variable");
        continue;
      }
      for (const Substitution& eta : group) {
        std::vector<BranchStep> sub_trace = trace;
        sub_trace.push_back({x, eta.bindings().begin()->second});
        WorkingSet mapped = b.mapped(eta);
        invariant(vars_of(mapped.atoms()).size() < vars_before,
                  "simple-pair binding did not eliminate a variable");
        run(std::move(mapped), std::move(sub_trace));
      }
      return;
    }

    // Phase 2: no simple pairs remain; merge the leftover differences by
    // replacing both sides of a disagreement with one shared fresh frozen
    // variable.  The canonical choice is always a pair between atoms 0 and
    // 1, whose disagreement count strictly shrinks until the atoms merge.
    while (b.size() != 1) {
      bump();
      std::vector<DisagreementPair> pairs = disagreement_pairs(b);
      invariant(!pairs.empty(), "distinct atoms must disagree somewhere");
      const DisagreementPair& d = pairs.front();
      invariant(d.left_atom == 0 && d.right_atom == 1,
                "canonical disagreement must involve the first two atoms");

      std::size_t size_before = b.size();
      std::size_t d01_before = pairs_between_first_two(b);
      Term shared = Term::variable(fresh_variable(VarSpace::Frozen));
      b = b.replaced(d.left_atom, d.right_atom, d.position, shared);
      invariant(b.size() < size_before ||
                    pairs_between_first_two(b) < d01_before,
                "merge step did not decrease the termination measure");
    }
    finish(b.atoms().front(), std::move(trace));
  }

  void finish(const Atom& target, std::vector<BranchStep> trace) {
    auto m = match(start, target);
    if (!m) {
      // A merge replaced rigid structure that the start atom still carries
      // (possible when the must-unify atoms are non-linear and their rigid
      // parts clash).  The final atom is then no instance of the start atom
      // and the branch contributes nothing.
      ++dropped_branches;
      invariant(!deterministic,
                "deterministic run on linear inputs lost the start atom's structure");
      return;
    }
    // Rename the ordinary variables of the instance fresh, so results share
    // nothing with the inputs.
    Atom instance = (*m)(start);
    Substitution gamma;
    for (const Variable& v : vars_of(instance))
      if (!is_frozen(v))
        gamma.insert(v, Term::variable(fresh_variable(VarSpace::Ordinary, v.hint)));
    Substitution theta = restrict_to(compose(*m, gamma), vars_of(start));
    if (seen.insert(canonical_form(theta(start))).second)
      results.push_back({std::move(theta), std::move(trace)});
  }
};

inline void check_positive_inputs(const Atom& a, const std::vector<Atom>& must_unify) {
  require(!must_unify.empty(), "the must-unify set may not be empty");
  std::vector<std::vector<Variable>> var_sets;
  var_sets.push_back(vars_of(a));
  for (const Atom& h : must_unify) var_sets.push_back(vars_of(h));
  for (std::size_t i = 0; i < var_sets.size(); ++i)
    for (std::size_t j = i + 1; j < var_sets.size(); ++j)
      for (const Variable& v : var_sets[i])
        require(!contains_var(var_sets[j], v), "input atoms must be pairwise variable-disjoint");
  for (const Atom& h : must_unify)
    require(unifiable(a, h), "the start atom must unify with every must-unify atom");
}

}  // namespace detail

/// All instantiation classes of `a` that keep unifying with every atom in
/// `must_unify` under arbitrary further bindings of their ordinary
/// variables.  Results are deduplicated up to variants of the instantiated
/// atom and returned in deterministic search order.
///
/// Branches where the final merged atom is no longer an instance of `a`
/// (a rigid clash between non-linear must-unify atoms can overwrite `a`'s
/// own structure) are dropped; they denote no instantiation of `a`.
inline std::vector<PositiveResult> su_plus(const Atom& a, const std::vector<Atom>& must_unify) {
  detail::check_positive_inputs(a, must_unify);
  std::vector<Atom> all;
  all.reserve(1 + must_unify.size());
  all.push_back(a);
  all.insert(all.end(), must_unify.begin(), must_unify.end());
  detail::PositiveSearch search(a, /*deterministic_mode=*/false);
  search.run(WorkingSet(std::move(all)), {});
  return search.results;
}

/// Deterministic variant for linear inputs: always applies the first simple
/// pair in canonical order.  For linear `a` and `must_unify` the result is
/// the unique maximal instantiation class.
inline PositiveResult su_plus_lin(const Atom& a, const std::vector<Atom>& must_unify) {
  detail::check_positive_inputs(a, must_unify);
  detail::require(is_linear(a), "the start atom must be linear");
  for (const Atom& h : must_unify)
    detail::require(is_linear(h), "every must-unify atom must be linear");
  std::vector<Atom> all;
  all.reserve(1 + must_unify.size());
  all.push_back(a);
  all.insert(all.end(), must_unify.begin(), must_unify.end());
  detail::PositiveSearch search(a, /*deterministic_mode=*/true);
  search.run(WorkingSet(std::move(all)), {});
  detail::invariant(search.results.size() == 1, "deterministic run must yield one result");
  return std::move(search.results.front());
}

/// Bounded verification that `theta` is a maximal solution for linear
/// inputs:
///   1. binding its ordinary variables (terms up to depth `bound`, singly
///      and in shallow pairs) never leaves the solution set;
///   2. binding any frozen variable to any non-variable term up to depth
///      `bound` always leaves it;
///   3. each rigid symbol in the ranges is forced: replacing it by any other
///      signature symbol (fresh-variable children) leaves the set.
/// The alphabet is the input symbols plus one spare constant and unary.
inline bool check_maximal(const Substitution& theta, const Atom& a,
                          const std::vector<Atom>& must_unify, std::size_t bound) {
  detail::require(is_linear(a), "the start atom must be linear");
  for (const Atom& h : must_unify)
    detail::require(is_linear(h), "every must-unify atom must be linear");

  const std::vector<Atom> hs = rename_apart(must_unify);
  const std::vector<Variable> avars = vars_of(a);

  auto member = [&](const Substitution& sigma) {
    Substitution r = restrict_to(sigma, avars);
    if (!is_linear(r)) return false;
    Atom inst = r(a);
    for (const Atom& h : hs)
      if (!unifiable(inst, h)) return false;
    return true;
  };

  if (!member(theta)) return false;

  std::vector<Atom> all;
  all.push_back(a);
  all.insert(all.end(), must_unify.begin(), must_unify.end());
  std::vector<FunctorSymbol> sig = symbols_of(std::span<const Atom>(all));
  termspace::augment_signature(sig, sig.size());

  Atom instance = theta(a);
  std::vector<Variable> ordinary;
  std::vector<Variable> frozen;
  for (const Variable& v : vars_of(instance))
    (is_frozen(v) ? frozen : ordinary).push_back(v);

  const std::vector<Term> nonvar_terms = termspace::fresh_terms_up_to(sig, bound, false);

  // Condition 1, single bindings.
  for (const Variable& v : ordinary)
    for (const Term& t : nonvar_terms)
      if (!member(compose(theta, Substitution::bind(v, t)))) return false;
  // Condition 1, joint shallow bindings of variable pairs.
  for (std::size_t i = 0; i < ordinary.size(); ++i)
    for (std::size_t j = i + 1; j < ordinary.size(); ++j)
      for (const Term& t1 : termspace::fresh_terms_up_to(sig, 1, false))
        for (const Term& t2 : termspace::fresh_terms_up_to(sig, 1, false)) {
          Substitution gamma;
          gamma.insert(ordinary[i], t1);
          gamma.insert(ordinary[j], t2);
          if (!member(compose(theta, gamma))) return false;
        }

  // Condition 2.
  for (const Variable& u : frozen)
    for (const Term& t : nonvar_terms)
      if (member(compose(theta, Substitution::bind(u, t)))) return false;

  // Condition 3.
  for (const auto& [x, t] : theta.bindings())
    for (const auto& [pos, sub] : subterm_positions(t)) {
      if (sub.is_variable()) continue;
      for (const FunctorSymbol& g : sig) {
        if (g == sub.functor()) continue;
        std::vector<Term> kids;
        kids.reserve(g.arity);
        for (std::size_t k = 0; k < g.arity; ++k)
          kids.push_back(Term::variable(fresh_variable()));
        Term mutated = replace_at(t, pos, Term::compound(g, std::move(kids)));
        Substitution changed;
        for (const auto& [v, range] : theta.bindings())
          changed.insert(v, v == x ? mutated : range);
        if (member(changed)) return false;
      }
    }

  return true;
}

}  // namespace selunif
