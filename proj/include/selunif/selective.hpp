#pragma once

// Selective unification problems and their solvers.  A problem asks for an
// instantiation of a start atom that still unifies with every atom of a
// must-unify set, unifies with no atom of a must-not-unify set, and grounds
// a chosen set of the start atom's variables.  The solvers pair a positive
// instantiation with a fair, depth-layered stream of further bindings and
// test candidates until one passes or the depth horizon is exhausted.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selunif/positive.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"
#include "selunif/termspace.hpp"

namespace selunif {

struct Problem {
  Atom atom;                              // the atom to instantiate
  std::vector<Atom> must_unify;           // every candidate must unify with these
  std::vector<Atom> must_not_unify;       // ... and with none of these
  std::vector<Variable> ground_vars;      // atom variables a candidate must ground
  std::vector<FunctorSymbol> signature;   // enumeration alphabet, ordered
  std::size_t atom_symbol_count = 0;      // signature prefix collected from the atoms
  bool augmented = false;                 // signature carries spare constant + unary
  std::optional<std::size_t> depth_override;  // file-level depth directive
};

/// Depth horizon used when neither the caller nor the problem names one:
/// one more than the deepest input atom.  Within this bound, an exhaustive
/// sweep is a decision procedure for linear inputs over an augmented
/// signature.
inline std::size_t default_bound(const Problem& p) {
  std::size_t k = depth(p.atom);
  for (const Atom& h : p.must_unify) k = std::max(k, depth(h));
  for (const Atom& h : p.must_not_unify) k = std::max(k, depth(h));
  return k + 1;
}

/// Validates the problem invariants and fills in the signature: symbols of
/// the atoms in first-occurrence order, then the extras, then (by default) a
/// spare constant and unary symbol.
inline Problem make_problem(Atom atom, std::vector<Atom> must_unify,
                            std::vector<Atom> must_not_unify,
                            std::vector<Variable> ground_vars,
                            std::vector<FunctorSymbol> extra_symbols = {},
                            bool augment = true) {
  detail::require(!must_unify.empty(), "a problem needs at least one must-unify atom");
  std::vector<const Atom*> all;
  all.push_back(&atom);
  for (const Atom& h : must_unify) all.push_back(&h);
  for (const Atom& h : must_not_unify) all.push_back(&h);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      auto vi = vars_of(*all[i]);
      for (const Variable& v : vars_of(*all[j]))
        detail::require(!contains_var(vi, v), "problem atoms must be pairwise variable-disjoint");
    }
  for (const Atom& h : must_unify)
    detail::require(unifiable(atom, h), "the atom must unify with every must-unify atom");
  for (const Atom& h : must_not_unify)
    detail::require(unifiable(atom, h), "the atom must unify with every must-not-unify atom");
  auto avars = vars_of(atom);
  for (const Variable& g : ground_vars)
    detail::require(contains_var(avars, g), "ground variables must occur in the atom");

  std::vector<FunctorSymbol> sig;
  auto add = [&](const FunctorSymbol& f) {
    for (const FunctorSymbol& have : sig) {
      detail::require(have.name != f.name || have.arity == f.arity,
                      "one functor name may not carry two arities");
      if (have == f) return;
    }
    sig.push_back(f);
  };
  for (const Atom* a : all)
    for (const FunctorSymbol& f : symbols_of(*a)) add(f);
  std::size_t atom_symbol_count = sig.size();
  for (const FunctorSymbol& f : extra_symbols) add(f);
  if (augment) termspace::augment_signature(sig, atom_symbol_count);

  return Problem{std::move(atom),      std::move(must_unify), std::move(must_not_unify),
                 std::move(ground_vars), std::move(sig),        atom_symbol_count,
                 augment,              std::nullopt};
}

/// Whether sigma solves the problem: the instantiated atom unifies with
/// every must-unify atom and no must-not-unify atom (fresh copies, so the
/// verdict cannot depend on accidental variable sharing), and every ground
/// variable maps to a ground term.
inline bool check_solution(const Substitution& sigma, const Problem& p) {
  Atom inst = sigma(p.atom);
  for (const Atom& h : p.must_unify)
    if (!unifiable(inst, fresh_renamed(h))) return false;
  for (const Atom& h : p.must_not_unify)
    if (unifiable(inst, fresh_renamed(h))) return false;
  for (const Variable& v : p.ground_vars)
    if (!is_ground(sigma(Term::variable(v)))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// the fair enumerator

struct EnumeratorConfig {
  std::size_t max_depth = 0;
  bool allow_frozen_bindings = false;  // may the stream bind frozen variables?
  bool linear_only = false;            // ranges linear and pairwise disjoint
  bool prioritize_unfrozen = false;    // per layer, frozen-free bindings first
  std::optional<std::uint64_t> seed;   // randomized tie-breaking within layers
};

/// A fair, duplicate-free stream of idempotent substitutions over a fixed
/// variable list.  Layer d holds exactly the substitutions whose deepest
/// range term has depth d (the identity opens layer 0), so no candidate of
/// depth d appears before every candidate of depth d-1.  Range variables
/// are always fresh ordinary ones, which keeps every emission idempotent
/// and disjoint from the inputs.  Duplicates are skipped up to variants of
/// the induced instance of the variable list.
class FairEtaStream {
 public:
  struct Item {
    Substitution eta;
    std::size_t layer = 0;
  };

  FairEtaStream(std::vector<Variable> vars, EnumeratorConfig cfg, const Problem& p)
      : cfg_(cfg), sig_(p.signature) {
    for (Variable& v : vars)
      if (cfg_.allow_frozen_bindings || !is_frozen(v)) vars_.push_back(std::move(v));
    shape_layers_ = termspace::shapes_by_depth(sig_, cfg_.max_depth);
    two_pass_ = cfg_.allow_frozen_bindings && cfg_.prioritize_unfrozen &&
                std::any_of(vars_.begin(), vars_.end(),
                            [](const Variable& v) { return is_frozen(v); });
    if (cfg_.seed) rng_.emplace(*cfg_.seed);
    enter_layer(0);
  }

  std::optional<Item> next() {
    if (!rng_) return next_raw();
    // Seeded mode buffers one layer at a time and shuffles within it, so
    // fairness across layers is untouched.
    if (buf_pos_ < layer_buf_.size()) return layer_buf_[buf_pos_++];
    if (!pending_) pending_ = next_raw();
    if (!pending_) return std::nullopt;
    layer_buf_.clear();
    buf_pos_ = 0;
    std::size_t current = pending_->layer;
    while (pending_ && pending_->layer == current) {
      layer_buf_.push_back(std::move(*pending_));
      pending_ = next_raw();
    }
    std::shuffle(layer_buf_.begin(), layer_buf_.end(), *rng_);
    if (two_pass_)
      std::stable_partition(layer_buf_.begin(), layer_buf_.end(), [](const Item& it) {
        for (const auto& [v, t] : it.eta.bindings())
          if (is_frozen(v)) return false;
        return true;
      });
    return layer_buf_[buf_pos_++];
  }

  std::uint64_t emitted() const { return emitted_; }

 private:
  static constexpr std::size_t kHoleCap = 8;

  void enter_layer(std::size_t layer) {
    layer_ = layer;
    opts_.clear();
    opt_depth_.clear();
    for (std::size_t d = 0; d <= layer_ && d < shape_layers_.size(); ++d)
      for (const termspace::Shape& s : shape_layers_[d]) {
        opts_.push_back(&s);
        opt_depth_.push_back(d);
      }
    pass_ = two_pass_ ? 0 : -1;
    reset_odometer();
  }

  void reset_odometer() {
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

  bool assignment_ok() const {
    std::size_t maxd = 0;
    bool frozen_bound = false;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (choice_[i] < 0) continue;
      maxd = std::max(maxd, opt_depth_[static_cast<std::size_t>(choice_[i])]);
      if (is_frozen(vars_[i])) frozen_bound = true;
    }
    if (maxd != layer_) return false;
    if (pass_ == 0 && frozen_bound) return false;
    if (pass_ == 1 && !frozen_bound) return false;
    return true;
  }

  void load_partitions() {
    std::size_t holes = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (choice_[i] >= 0)
        holes += termspace::hole_count(*opts_[static_cast<std::size_t>(choice_[i])]);
    parts_.clear();
    part_idx_ = 0;
    if (cfg_.linear_only || holes > kHoleCap) {
      // Oversized assignments fall back to all-distinct holes; that only
      // narrows the non-linear candidates, never the linear ones that back
      // conclusive verdicts.
      std::vector<std::size_t> distinct(holes);
      for (std::size_t i = 0; i < holes; ++i) distinct[i] = i;
      parts_.push_back(std::move(distinct));
      return;
    }
    parts_ = termspace::partitions(holes);
    // Most general first: the all-distinct partition ahead of shared ones.
    std::reverse(parts_.begin(), parts_.end());
  }

  std::optional<Item> next_raw() {
    for (;;) {
      if (part_idx_ < parts_.size()) {
        const std::vector<std::size_t>& labels = parts_[part_idx_++];
        std::vector<Term> group_vars;
        std::size_t cursor = 0;
        Substitution eta;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
          if (choice_[i] < 0) continue;
          Term t = termspace::materialize(
              *opts_[static_cast<std::size_t>(choice_[i])], sig_, [&] {
                std::size_t label = labels[cursor++];
                while (group_vars.size() <= label)
                  group_vars.push_back(Term::variable(fresh_variable()));
                return group_vars[label];
              });
          eta.insert(vars_[i], std::move(t));
        }
        std::vector<Term> tuple;
        tuple.reserve(vars_.size());
        for (const Variable& v : vars_) tuple.push_back(eta(Term::variable(v)));
        if (!seen_.insert(canonical_form(std::span<const Term>(tuple))).second) continue;
        ++emitted_;
        return Item{std::move(eta), layer_};
      }
      // next assignment in this pass
      bool found = false;
      while (advance_choice()) {
        if (assignment_ok()) {
          found = true;
          break;
        }
      }
      if (found) {
        load_partitions();
        continue;
      }
      // pass or layer exhausted
      if (pass_ == 0) {
        pass_ = 1;
        reset_odometer();
        continue;
      }
      if (layer_ >= cfg_.max_depth) return std::nullopt;
      enter_layer(layer_ + 1);
    }
  }

  std::vector<Variable> vars_;
  EnumeratorConfig cfg_;
  std::vector<FunctorSymbol> sig_;
  std::vector<std::vector<termspace::Shape>> shape_layers_;

  std::size_t layer_ = 0;
  int pass_ = -1;  // -1 single pass; 0 frozen-free; 1 frozen-involving
  bool two_pass_ = false;
  std::vector<const termspace::Shape*> opts_;
  std::vector<std::size_t> opt_depth_;
  std::vector<int> choice_;
  bool started_ = false;
  std::vector<std::vector<std::size_t>> parts_;
  std::size_t part_idx_ = 0;
  std::unordered_set<std::string> seen_;
  std::uint64_t emitted_ = 0;

  std::optional<std::mt19937_64> rng_;
  std::optional<Item> pending_;
  std::vector<Item> layer_buf_;
  std::size_t buf_pos_ = 0;
};

inline FairEtaStream fair_eta_stream(std::vector<Variable> vars, EnumeratorConfig cfg,
                                     const Problem& p) {
  return FairEtaStream(std::move(vars), cfg, p);
}

// ---------------------------------------------------------------------------
// solvers

enum class AlgorithmTag { Su, SuStar, SuLin, Oracle };

inline std::string to_string(AlgorithmTag t) {
  switch (t) {
    case AlgorithmTag::Su: return "su";
    case AlgorithmTag::SuStar: return "su-star";
    case AlgorithmTag::SuLin: return "su-lin";
    case AlgorithmTag::Oracle: return "oracle";
  }
  return "?";
}

inline std::optional<AlgorithmTag> algorithm_from_string(const std::string& name) {
  if (name == "su") return AlgorithmTag::Su;
  if (name == "su-star") return AlgorithmTag::SuStar;
  if (name == "su-lin") return AlgorithmTag::SuLin;
  if (name == "oracle") return AlgorithmTag::Oracle;
  return std::nullopt;
}

struct SolveStats {
  std::uint64_t candidates_tested = 0;
  std::uint64_t branches = 0;
};

struct Solution {
  /// Canonical form: Dom is a subset of Var(atom), every variable of the
  /// instantiated atom is a fresh ordinary variable displayed _0, _1, ... in
  /// first-occurrence order, and no frozen variable remains.
  Substitution sigma;
  AlgorithmTag algorithm = AlgorithmTag::Su;
  /// The positive-stage result the solution grew from (absent for the
  /// brute-force oracle).
  std::optional<PositiveResult> branch;
};

struct SolveResult {
  std::optional<Solution> solution;
  std::size_t depth_bound = 0;
  /// The verdict is definitive: a found solution is its own witness, and a
  /// fail verdict is conclusive when the sweep proves no linear solution
  /// exists (all inputs linear, full default bound, augmented signature, no
  /// cap hit).
  bool conclusive = false;
  /// The candidate cap stopped the sweep before the bound was exhausted.
  bool capped = false;
  SolveStats stats;

  bool failed() const { return !solution.has_value(); }
};

struct SolveOptions {
  std::optional<std::size_t> max_depth;  // default: problem override or default_bound
  bool linear_only = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t max_candidates = ~std::uint64_t{0};
};

/// Restricts sigma to the atom's variables and renames every variable of
/// the instantiated atom to a fresh ordinary variable hinted _0, _1, ... in
/// first-occurrence order.  This erases frozen variables from solutions and
/// makes output independent of internal variable identities.
inline Substitution canonicalize_solution(const Substitution& sigma, const Atom& atom) {
  Substitution r = restrict_to(sigma, vars_of(atom));
  Atom inst = r(atom);
  Substitution gamma;
  std::size_t k = 0;
  for (const Variable& v : vars_of(inst))
    gamma.insert(v, Term::variable(fresh_variable(VarSpace::Ordinary,
                                                  "_" + std::to_string(k++))));
  return restrict_to(compose(r, gamma), vars_of(atom));
}

namespace detail {

enum class SolveMode { Su, SuStar, SuLin };

inline AlgorithmTag tag_of(SolveMode m) {
  switch (m) {
    case SolveMode::Su: return AlgorithmTag::Su;
    case SolveMode::SuStar: return AlgorithmTag::SuStar;
    case SolveMode::SuLin: return AlgorithmTag::SuLin;
  }
  return AlgorithmTag::Su;
}

/// Core generate-and-test loop shared by the three solvers.  Streams are
/// advanced round-robin one depth layer per branch and turn, so no branch
/// can starve another.  When `collect_all` is set, every passing candidate
/// within the bound is gathered (deduplicated up to variants of the
/// instantiated atom); otherwise the first hit wins.
inline SolveResult solve_core(const Problem& p, const SolveOptions& opts, SolveMode mode,
                              bool collect_all, std::vector<Solution>* all_out) {
  SolveResult res;
  res.depth_bound = opts.max_depth ? *opts.max_depth
                                   : p.depth_override.value_or(default_bound(p));

  std::vector<PositiveResult> branches;
  if (mode == SolveMode::SuLin) {
    branches.push_back(su_plus_lin(p.atom, p.must_unify));
  } else {
    branches = su_plus(p.atom, p.must_unify);
  }
  res.stats.branches = branches.size();

  struct BranchState {
    PositiveResult positive;
    FairEtaStream stream;
    std::optional<FairEtaStream::Item> pending;
    bool exhausted = false;
  };

  EnumeratorConfig cfg;
  cfg.max_depth = res.depth_bound;
  cfg.allow_frozen_bindings = mode == SolveMode::SuStar;
  cfg.linear_only = mode == SolveMode::SuLin || opts.linear_only;
  cfg.prioritize_unfrozen = mode == SolveMode::SuStar;
  cfg.seed = opts.seed;

  std::vector<BranchState> states;
  states.reserve(branches.size());
  for (PositiveResult& b : branches) {
    Atom instance = b.theta(p.atom);
    FairEtaStream stream(vars_of(instance), cfg, p);
    states.push_back({std::move(b), std::move(stream), std::nullopt, false});
  }

  // Candidate instances only carry fresh and frozen variables, both disjoint
  // from the input atoms, so unification checks need no extra renaming.
  auto passes = [&](const Substitution& sigma) {
    for (const Variable& v : p.ground_vars)
      if (!is_ground(sigma(Term::variable(v)))) return false;
    Atom inst = sigma(p.atom);
    if (mode == SolveMode::SuStar) {
      // Binding frozen variables can break positive unification, so the
      // must-unify side is re-checked here.
      for (const Atom& h : p.must_unify)
        if (!unifiable(inst, h)) return false;
    }
    for (const Atom& h : p.must_not_unify)
      if (unifiable(inst, h)) return false;
    return true;
  };

  std::unordered_set<std::string> collected;

  for (std::size_t layer = 0; layer <= res.depth_bound && !res.capped; ++layer) {
    for (BranchState& st : states) {
      if (st.exhausted) continue;
      if (!st.pending) {
        st.pending = st.stream.next();
        if (!st.pending) {
          st.exhausted = true;
          continue;
        }
      }
      while (st.pending && st.pending->layer == layer) {
        if (res.stats.candidates_tested >= opts.max_candidates) {
          res.capped = true;
          break;
        }
        Substitution candidate = compose(st.positive.theta, st.pending->eta);
        st.pending = st.stream.next();
        if (!st.pending) st.exhausted = true;
        ++res.stats.candidates_tested;
        if (!passes(candidate)) continue;
        Solution sol{canonicalize_solution(candidate, p.atom), tag_of(mode), st.positive};
        if (!collect_all) {
          res.solution = std::move(sol);
          res.conclusive = true;
          return res;
        }
        if (collected.insert(canonical_form(sol.sigma(p.atom))).second)
          all_out->push_back(std::move(sol));
      }
      if (res.capped) break;
    }
  }

  bool inputs_linear = is_linear(p.atom);
  for (const Atom& h : p.must_unify) inputs_linear = inputs_linear && is_linear(h);
  res.conclusive = !res.capped && inputs_linear &&
                   res.depth_bound >= default_bound(p) && p.augmented;
  return res;
}

}  // namespace detail

/// First solution via positive instantiation plus ordinary-variable
/// bindings only (frozen positions stay untouched), or a fail verdict.
inline SolveResult su(const Problem& p, const SolveOptions& opts = {}) {
  return detail::solve_core(p, opts, detail::SolveMode::Su, false, nullptr);
}

/// Like su, but the binding stream may also touch frozen variables, trying
/// frozen-free candidates first within each depth layer.  Candidates that
/// bind frozen variables are re-checked against the must-unify set.
inline SolveResult su_star(const Problem& p, const SolveOptions& opts = {}) {
  return detail::solve_core(p, opts, detail::SolveMode::SuStar, false, nullptr);
}

/// Deterministic solver for linear inputs: the unique maximal positive
/// instantiation plus linear bindings.  A fail verdict at the default bound
/// is conclusive: the problem has no linear solution at all.
inline SolveResult su_lin(const Problem& p, const SolveOptions& opts = {}) {
  return detail::solve_core(p, opts, detail::SolveMode::SuLin, false, nullptr);
}

}  // namespace selunif
