#pragma once

// Disagreement pairs between atoms of a working set: the positioned subterm
// pairs where two atoms first differ.  These drive the positive-unification
// search.

#include <cstddef>
#include <string>
#include <vector>

#include "selunif/subst.hpp"
#include "selunif/terms.hpp"

namespace selunif {

/// determined_binding was asked for a pair that is not simple.
class NotSimpleError : public Error {
 public:
  using Error::Error;
};

/// A deduplicated, order-stable set of atoms sharing one predicate.
class WorkingSet {
 public:
  explicit WorkingSet(std::vector<Atom> atoms) {
    detail::require(!atoms.empty(), "working set must contain at least one atom");
    const FunctorSymbol pred = atoms.front().predicate;
    for (Atom& a : atoms) {
      detail::require(a.predicate == pred, "working set atoms must share one predicate");
      bool dup = false;
      for (const Atom& have : atoms_)
        if (have == a) {
          dup = true;
          break;
        }
      if (!dup) atoms_.push_back(std::move(a));
    }
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  /// The same set with a substitution applied and duplicates merged.
  WorkingSet mapped(const Substitution& s) const {
    std::vector<Atom> next;
    next.reserve(atoms_.size());
    for (const Atom& a : atoms_) next.push_back(s(a));
    return WorkingSet(std::move(next));
  }

  /// The same set with both sides of a positioned pair replaced by `t` in
  /// the two owning atoms, duplicates merged.
  WorkingSet replaced(std::size_t left_atom, std::size_t right_atom, const Position& p,
                      const Term& t) const {
    std::vector<Atom> next = atoms_;
    next[left_atom] = replace_at(next[left_atom], p, t);
    next[right_atom] = replace_at(next[right_atom], p, t);
    return WorkingSet(std::move(next));
  }

 private:
  std::vector<Atom> atoms_;
};

/// Subterms of two working-set atoms at one shared position whose root
/// symbols differ while everything above the position coincides.
struct DisagreementPair {
  Position position;
  Term left;
  Term right;
  std::size_t left_atom = 0;
  std::size_t right_atom = 0;
};

namespace detail {
inline void disagreements_between(const Term& a, const Term& b, const Position& pos,
                                  std::size_t i, std::size_t j,
                                  std::vector<DisagreementPair>& out) {
  if (a == b) return;
  if (a.is_compound() && b.is_compound() && a.functor() == b.functor()) {
    for (std::size_t k = 0; k < a.args().size(); ++k)
      disagreements_between(a.args()[k], b.args()[k], pos.descend(k + 1), i, j, out);
    return;
  }
  // Outermost difference only: never descend below a disagreement.
  out.push_back({pos, a, b, i, j});
}
}  // namespace detail

/// All disagreement pairs of the set, in canonical order: by atom index pair
/// (lexicographic, i < j), then by position (pre-order, which is
/// lexicographic with prefixes first).
inline std::vector<DisagreementPair> disagreement_pairs(const WorkingSet& b) {
  std::vector<DisagreementPair> out;
  const auto& atoms = b.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      for (std::size_t arg = 0; arg < atoms[i].args.size(); ++arg)
        detail::disagreements_between(atoms[i].args[arg], atoms[j].args[arg],
                                      Position{arg + 1}, i, j, out);
  return out;
}

/// A pair is simple when one side is a variable that does not occur in the
/// other side and no frozen variable occurs in either side.
inline bool is_simple(const DisagreementPair& d) {
  if (contains_frozen_var(d.left) || contains_frozen_var(d.right)) return false;
  if (d.left.is_variable() && !occurs(d.left.var(), d.right)) return true;
  if (d.right.is_variable() && !occurs(d.right.var(), d.left)) return true;
  return false;
}

/// The binding {X/s} a simple pair determines.  When both sides are
/// variables the left one is bound, so the choice is deterministic.
inline Substitution determined_binding(const DisagreementPair& d) {
  if (!is_simple(d)) throw NotSimpleError("disagreement pair has no determined binding");
  if (d.left.is_variable() && !occurs(d.left.var(), d.right))
    return Substitution::bind(d.left.var(), d.right);
  return Substitution::bind(d.right.var(), d.left);
}

inline std::string to_string(const DisagreementPair& d) {
  return "(" + to_string(d.left) + ", " + to_string(d.right) + ")@" + to_string(d.position) +
         " atoms " + std::to_string(d.left_atom) + "," + std::to_string(d.right_atom);
}

}  // namespace selunif
