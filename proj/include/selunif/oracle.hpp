#pragma once

// Brute-force reference solver.  It enumerates instantiations of the atom's
// variables directly, layered by instance depth, and tests each candidate
// against the problem definition.  Slow but simple enough to trust: the
// solvers in selective.hpp are differentially tested against it.

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "selunif/selective.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"
#include "selunif/termspace.hpp"

namespace selunif {

/// Enumerates candidate substitutions over the atom's variables, one
/// representative per variant class of the instantiated atom.  Layer d
/// holds exactly the candidates whose instance has depth d, so the identity
/// comes first and no deep candidate preempts a shallow one.  Every range
/// is built from signature shapes whose holes are filled with fresh
/// variables, shared according to a set partition (all-distinct first);
/// with linear_only, holes are never shared.
class ThetaEnumerator {
 public:
  struct Item {
    Substitution theta;
    std::size_t layer = 0;
  };

  ThetaEnumerator(const Problem& p, std::size_t max_depth, bool linear_only)
      : atom_(p.atom),
        vars_(vars_of(p.atom)),
        sig_(p.signature),
        max_depth_(max_depth),
        linear_only_(linear_only) {
    shape_layers_ = termspace::shapes_by_depth(sig_, max_depth_);
    enter_layer(0);
  }

  std::optional<Item> next() {
    for (;;) {
      if (part_idx_ < parts_.size()) {
        Substitution theta = build(parts_[part_idx_++]);
        if (!seen_.insert(canonical_form(theta(atom_))).second) continue;
        return Item{std::move(theta), layer_};
      }
      bool found = false;
      while (advance_choice()) {
        if (instance_depth() == layer_) {
          found = true;
          break;
        }
      }
      if (found) {
        load_partitions();
        continue;
      }
      if (layer_ >= max_depth_) return std::nullopt;
      enter_layer(layer_ + 1);
    }
  }

 private:
  static constexpr std::size_t kHoleCap = 8;

  void enter_layer(std::size_t layer) {
    layer_ = layer;
    opts_.clear();
    for (std::size_t d = 0; d <= layer_ && d < shape_layers_.size(); ++d)
      for (const termspace::Shape& s : shape_layers_[d]) opts_.push_back(&s);
    choice_.assign(vars_.size(), -1);
    started_ = false;
    parts_.clear();
    part_idx_ = 0;
  }

  bool advance_choice() {
    if (!started_) {
      started_ = true;
      return true;
    }
    for (std::size_t i = vars_.size(); i-- > 0;) {
      if (choice_[i] + 1 < static_cast<int>(opts_.size())) {
        ++choice_[i];
        for (std::size_t j = i + 1; j < vars_.size(); ++j) choice_[j] = -1;
        return true;
      }
    }
    return false;
  }

  // The instance depth is the same for every hole filling, so one dummy
  // materialization decides the layer of the whole assignment.
  std::size_t instance_depth() const {
    Substitution probe;
    Term dummy = Term::variable(fresh_variable());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (choice_[i] < 0) continue;
      probe.insert(vars_[i], termspace::materialize(
                                 *opts_[static_cast<std::size_t>(choice_[i])], sig_,
                                 [&] { return dummy; }));
    }
    return depth(probe(atom_));
  }

  void load_partitions() {
    std::size_t holes = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (choice_[i] >= 0)
        holes += termspace::hole_count(*opts_[static_cast<std::size_t>(choice_[i])]);
    parts_.clear();
    part_idx_ = 0;
    if (linear_only_) {
      std::vector<std::size_t> distinct(holes);
      for (std::size_t i = 0; i < holes; ++i) distinct[i] = i;
      parts_.push_back(std::move(distinct));
      return;
    }
    // Unlike the solvers' binding streams, the oracle may not silently
    // narrow its candidate space: a conclusive verdict depends on it.
    if (holes > kHoleCap)
      throw EnumerationLimitError(
          "candidate space too large: an assignment needs " + std::to_string(holes) +
          " shared hole variables (cap " + std::to_string(kHoleCap) + ")");
    parts_ = termspace::partitions(holes);
    std::reverse(parts_.begin(), parts_.end());
  }

  Substitution build(const std::vector<std::size_t>& labels) const {
    Substitution theta;
    std::vector<Term> group_vars;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (choice_[i] < 0) continue;
      Term t = termspace::materialize(
          *opts_[static_cast<std::size_t>(choice_[i])], sig_, [&] {
            std::size_t label = labels[cursor++];
            while (group_vars.size() <= label)
              group_vars.push_back(Term::variable(fresh_variable()));
            return group_vars[label];
          });
      theta.insert(vars_[i], std::move(t));
    }
    return theta;
  }

  Atom atom_;
  std::vector<Variable> vars_;
  std::vector<FunctorSymbol> sig_;
  std::size_t max_depth_;
  bool linear_only_;
  std::vector<std::vector<termspace::Shape>> shape_layers_;

  std::size_t layer_ = 0;
  std::vector<const termspace::Shape*> opts_;
  std::vector<int> choice_;
  bool started_ = false;
  std::vector<std::vector<std::size_t>> parts_;
  std::size_t part_idx_ = 0;
  std::unordered_set<std::string> seen_;
};

/// All candidate substitutions up to the depth bound, in emission order.
/// Mostly useful for tests and for inspecting the candidate space.
inline std::vector<Substitution> enumerate_theta(const Problem& p, std::size_t max_depth,
                                                 bool linear_only = false) {
  ThetaEnumerator en(p, max_depth, linear_only);
  std::vector<Substitution> out;
  while (auto item = en.next()) out.push_back(std::move(item->theta));
  return out;
}

/// Depth-bounded generate-and-test.  Within the bound this is a decision
/// procedure: for linear inputs over an augmented signature at the default
/// bound, a fail verdict proves unsatisfiability of the linear problem.
inline SolveResult naive_solve(const Problem& p, const SolveOptions& opts = {}) {
  SolveResult res;
  res.depth_bound =
      opts.max_depth ? *opts.max_depth : p.depth_override.value_or(default_bound(p));
  ThetaEnumerator en(p, res.depth_bound, opts.linear_only);
  while (auto item = en.next()) {
    if (res.stats.candidates_tested >= opts.max_candidates) {
      res.capped = true;
      break;
    }
    ++res.stats.candidates_tested;
    if (!check_solution(item->theta, p)) continue;
    res.solution =
        Solution{canonicalize_solution(item->theta, p.atom), AlgorithmTag::Oracle,
                 std::nullopt};
    res.conclusive = true;
    return res;
  }
  bool inputs_linear = is_linear(p.atom);
  for (const Atom& h : p.must_unify) inputs_linear = inputs_linear && is_linear(h);
  res.conclusive = !res.capped && inputs_linear &&
                   res.depth_bound >= default_bound(p) && p.augmented;
  return res;
}

inline SolveResult solve(const Problem& p, AlgorithmTag alg, const SolveOptions& opts = {}) {
  switch (alg) {
    case AlgorithmTag::Su: return su(p, opts);
    case AlgorithmTag::SuStar: return su_star(p, opts);
    case AlgorithmTag::SuLin: return su_lin(p, opts);
    case AlgorithmTag::Oracle: break;
  }
  return naive_solve(p, opts);
}

/// Every solution within the depth bound, one representative per variant
/// class of the instantiated atom, in emission order.  When `envelope` is
/// given it receives the depth bound, conclusiveness and stats of the sweep
/// (its solution field holds the first hit, if any).
inline std::vector<Solution> solve_all(const Problem& p, AlgorithmTag alg,
                                       const SolveOptions& opts = {},
                                       SolveResult* envelope = nullptr) {
  std::vector<Solution> out;
  SolveResult res;
  if (alg == AlgorithmTag::Oracle) {
    res.depth_bound =
        opts.max_depth ? *opts.max_depth : p.depth_override.value_or(default_bound(p));
    ThetaEnumerator en(p, res.depth_bound, opts.linear_only);
    while (auto item = en.next()) {
      if (res.stats.candidates_tested >= opts.max_candidates) {
        res.capped = true;
        break;
      }
      ++res.stats.candidates_tested;
      if (!check_solution(item->theta, p)) continue;
      out.push_back(Solution{canonicalize_solution(item->theta, p.atom),
                             AlgorithmTag::Oracle, std::nullopt});
    }
    bool inputs_linear = is_linear(p.atom);
    for (const Atom& h : p.must_unify) inputs_linear = inputs_linear && is_linear(h);
    res.conclusive = !res.capped && inputs_linear &&
                     res.depth_bound >= default_bound(p) && p.augmented;
  } else {
    detail::SolveMode mode = detail::SolveMode::Su;
    if (alg == AlgorithmTag::SuStar) mode = detail::SolveMode::SuStar;
    if (alg == AlgorithmTag::SuLin) mode = detail::SolveMode::SuLin;
    res = detail::solve_core(p, opts, mode, true, &out);
  }
  if (envelope) {
    if (!out.empty()) res.solution = out.front();
    *envelope = std::move(res);
  }
  return out;
}

}  // namespace selunif
