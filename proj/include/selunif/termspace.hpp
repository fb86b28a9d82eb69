#pragma once

// Depth-layered enumeration of term shapes over a finite signature.  A
// shape is a term skeleton whose leaves may be holes; holes are later
// materialized as variables (all distinct, or shared according to a set
// partition).  The enumeration order is deterministic: for each depth,
// symbols in signature order, child combinations lexicographic with
// shallower shapes first.

#include <cstddef>
#include <functional>
#include <vector>

#include "selunif/terms.hpp"

namespace selunif::termspace {

struct Shape {
  int sym = -1;  // index into the signature; -1 marks a hole
  std::vector<Shape> kids;
};

inline std::size_t shape_depth(const Shape& s) {
  if (s.sym < 0) return 0;
  std::size_t best = 0;
  for (const Shape& k : s.kids) best = std::max(best, shape_depth(k));
  return 1 + best;
}

inline std::size_t hole_count(const Shape& s) {
  if (s.sym < 0) return 1;
  std::size_t n = 0;
  for (const Shape& k : s.kids) n += hole_count(k);
  return n;
}

/// Shapes grouped by exact depth: result[d] holds every shape of depth d
/// over the signature, for d = 0..max_depth.  Depth 0 is the lone hole;
/// constants appear at depth 1.
inline std::vector<std::vector<Shape>> shapes_by_depth(const std::vector<FunctorSymbol>& sig,
                                                       std::size_t max_depth) {
  std::vector<std::vector<Shape>> exact(max_depth + 1);
  exact[0] = {Shape{}};
  std::vector<Shape> shallow;  // all shapes of depth < d, shallow-first
  for (std::size_t d = 1; d <= max_depth; ++d) {
    shallow.clear();
    for (std::size_t e = 0; e < d; ++e)
      shallow.insert(shallow.end(), exact[e].begin(), exact[e].end());
    for (std::size_t si = 0; si < sig.size(); ++si) {
      const FunctorSymbol& f = sig[si];
      if (f.arity == 0) {
        if (d == 1) exact[d].push_back(Shape{static_cast<int>(si), {}});
        continue;
      }
      std::vector<Shape> slots(f.arity);
      auto rec = [&](auto&& self, std::size_t slot, bool has_max) -> void {
        if (slot == f.arity) {
          if (has_max) exact[d].push_back(Shape{static_cast<int>(si), slots});
          return;
        }
        for (const Shape& choice : shallow) {
          slots[slot] = choice;
          self(self, slot + 1, has_max || shape_depth(choice) == d - 1);
        }
      };
      rec(rec, 0, false);
    }
  }
  return exact;
}

/// Builds the term for a shape; `hole` is called once per hole in pre-order
/// and supplies the variable term to plug in.
template <class HoleFn>
inline Term materialize(const Shape& s, const std::vector<FunctorSymbol>& sig, HoleFn&& hole) {
  if (s.sym < 0) return hole();
  std::vector<Term> kids;
  kids.reserve(s.kids.size());
  for (const Shape& k : s.kids) kids.push_back(materialize(k, sig, hole));
  return Term::compound(sig[static_cast<std::size_t>(s.sym)], std::move(kids));
}

/// All set partitions of n items as restricted-growth strings: out[i] is the
/// group of item i, groups numbered in first-use order.  The first partition
/// is all-in-one-group; the all-distinct partition comes last.
inline std::vector<std::vector<std::size_t>> partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> labels(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t groups) -> void {
    if (i == n) {
      out.push_back(labels);
      return;
    }
    for (std::size_t g = 0; g <= groups; ++g) {
      labels[i] = g;
      self(self, i + 1, std::max(groups, g + 1));
    }
  };
  if (n == 0)
    out.push_back({});
  else
    rec(rec, 0, 0);
  return out;
}

/// Extends the signature with one spare constant and one spare unary symbol
/// whose names collide with nothing already present.  Spare symbols let the
/// enumeration build witnesses that clash with every problem symbol (and
/// ground terms even when the problem itself has no constant).
///
/// The first `atom_symbols` entries are the symbols the problem's atoms use;
/// anything after them is an explicitly declared extra.  Extras of the right
/// arity already serve as spares, which keeps this idempotent when a printed
/// problem is parsed back.
inline void augment_signature(std::vector<FunctorSymbol>& sig, std::size_t atom_symbols) {
  auto name_taken = [&](const std::string& n) {
    for (const FunctorSymbol& f : sig)
      if (f.name == n) return true;
    return false;
  };
  auto add_fresh = [&](const char* stem, std::size_t arity) {
    for (std::size_t i = 0;; ++i) {
      std::string name = stem + std::to_string(i);
      if (!name_taken(name)) {
        sig.push_back({name, arity});
        return;
      }
    }
  };
  bool have_spare_const = false;
  bool have_spare_unary = false;
  for (std::size_t i = atom_symbols; i < sig.size(); ++i) {
    if (sig[i].arity == 0) have_spare_const = true;
    if (sig[i].arity == 1) have_spare_unary = true;
  }
  if (!have_spare_const) add_fresh("c", 0);
  if (!have_spare_unary) add_fresh("f", 1);
}

/// Every term of depth <= max_depth over the signature, holes materialized
/// with distinct fresh ordinary variables.  With include_variable, a lone
/// fresh variable (depth 0) leads the list.
inline std::vector<Term> fresh_terms_up_to(const std::vector<FunctorSymbol>& sig,
                                           std::size_t max_depth, bool include_variable) {
  std::vector<Term> out;
  auto layers = shapes_by_depth(sig, max_depth);
  for (std::size_t d = 0; d <= max_depth; ++d)
    for (const Shape& s : layers[d]) {
      if (s.sym < 0 && !include_variable) continue;
      out.push_back(materialize(s, sig, [] { return Term::variable(fresh_variable()); }));
    }
  return out;
}

}  // namespace selunif::termspace
