#pragma once

// Deterministic random problem generation for differential testing.  The
// same seed always yields the same problem sequence, so failures reported
// by the harness can be replayed.  Generated problems satisfy the problem
// invariants by construction: atoms are pairwise variable-disjoint (each
// atom draws its own fresh variables) and every constraint atom unifies
// with the goal atom (rejection sampling with a guaranteed fallback).

#include <random>
#include <string>
#include <vector>

#include "selunif/selective.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"

namespace selunif {

struct GenConfig {
  std::size_t max_extra_symbols = 2;  // beyond the guaranteed constant a/0
  bool allow_binary = true;           // admit h/2 into the signature
  std::size_t max_term_depth = 2;     // constraint-atom argument depth
  std::size_t max_pos = 2;
  std::size_t max_neg = 2;
  bool linear = false;  // force the goal and must-unify atoms linear
  double ground_prob = 0.35;
  double structured_arg_prob = 0.25;  // goal-atom argument is a depth-1 term
  double reuse_var_prob = 0.25;       // within-atom variable reuse (non-linear)
};

class ProblemGenerator {
 public:
  explicit ProblemGenerator(std::uint64_t seed, GenConfig cfg = {})
      : rng_(seed), cfg_(cfg) {}

  Problem next() {
    std::vector<FunctorSymbol> sig{{"a", 0}};
    {
      std::vector<FunctorSymbol> pool{{"b", 0}, {"f", 1}, {"g", 1}};
      if (cfg_.allow_binary) pool.push_back({"h", 2});
      for (std::size_t k = 0; k < cfg_.max_extra_symbols && !pool.empty(); ++k) {
        std::size_t i = below(pool.size());
        sig.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<long>(i));
      }
    }
    sig_ = &sig;

    std::size_t arity = chance(0.75) ? 2 : 1;
    FunctorSymbol pred{"p", arity};

    std::vector<Variable> goal_vars;
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity; ++i) {
      if (chance(cfg_.structured_arg_prob))
        args.push_back(random_term(1, &goal_vars));
      else
        args.push_back(new_var(&goal_vars));
    }
    Atom goal(pred, std::move(args));

    std::vector<Atom> pos;
    std::size_t npos = 1 + below(cfg_.max_pos);
    for (std::size_t i = 0; i < npos; ++i)
      pos.push_back(constraint_atom(goal, /*fallback_to_goal_copy=*/true));

    std::vector<Atom> neg;
    std::size_t nneg = below(cfg_.max_neg + 1);
    for (std::size_t i = 0; i < nneg; ++i) {
      Atom h = constraint_atom(goal, /*fallback_to_goal_copy=*/false);
      if (unifiable(goal, h)) neg.push_back(std::move(h));
    }

    std::vector<Variable> ground;
    for (const Variable& v : vars_of(goal))
      if (chance(cfg_.ground_prob)) ground.push_back(v);

    sig_ = nullptr;
    return make_problem(std::move(goal), std::move(pos), std::move(neg),
                        std::move(ground));
  }

 private:
  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(rng_() % n) : 0; }

  bool chance(double p) {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p;
  }

  Term new_var(std::vector<Variable>* pool) {
    if (!cfg_.linear && pool && !pool->empty() && chance(cfg_.reuse_var_prob))
      return Term::variable((*pool)[below(pool->size())]);
    Variable v = fresh_variable();
    if (pool) pool->push_back(v);
    return Term::variable(v);
  }

  Term random_term(std::size_t budget, std::vector<Variable>* pool) {
    if (budget == 0 || chance(0.3)) return new_var(pool);
    const FunctorSymbol& f = (*sig_)[below(sig_->size())];
    std::vector<Term> kids;
    for (std::size_t i = 0; i < f.arity; ++i) kids.push_back(random_term(budget - 1, pool));
    return Term::compound(f, std::move(kids));
  }

  Atom constraint_atom(const Atom& goal, bool fallback_to_goal_copy) {
    for (int tries = 0; tries < 40; ++tries) {
      std::vector<Variable> pool;
      std::vector<Variable>* scope = cfg_.linear ? nullptr : &pool;
      std::vector<Term> args;
      for (std::size_t i = 0; i < goal.predicate.arity; ++i)
        args.push_back(random_term(cfg_.max_term_depth, scope));
      Atom h(goal.predicate, std::move(args));
      if (unifiable(goal, h)) return h;
    }
    if (fallback_to_goal_copy) return fresh_renamed(goal, VarSpace::Ordinary);
    // Caller drops non-unifiable results; returning the last attempt keeps
    // the control flow simple.
    std::vector<Term> args;
    for (std::size_t i = 0; i < goal.predicate.arity; ++i)
      args.push_back(Term::compound((*sig_)[0], {}));
    return Atom(goal.predicate, std::move(args));
  }

  std::mt19937_64 rng_;
  GenConfig cfg_;
  const std::vector<FunctorSymbol>* sig_ = nullptr;
};

}  // namespace selunif
