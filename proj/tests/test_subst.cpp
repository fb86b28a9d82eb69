#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <vector>

#include "builders.hpp"
#include "selunif/subst.hpp"

using namespace selunif;
using namespace builders;

TEST_CASE("application replaces exactly the bound variables") {
  Variable x = var("X"), y = var("Y");
  Substitution s = Substitution::bind(x, app("f", {v(y)}));
  REQUIRE(s(v(x)) == app("f", {v(y)}));
  REQUIRE(s(v(y)) == v(y));
  REQUIRE(s(atom("p", {v(x), v(y), cst("a")})) ==
          atom("p", {app("f", {v(y)}), v(y), cst("a")}));
}

TEST_CASE("application is one pass, not iterated") {
  Variable x = var("X"), y = var("Y");
  Substitution s;
  s.insert(x, v(y));
  s.insert(y, cst("a"));
  REQUIRE(s(v(x)) == v(y));  // the x binding's range is not rewritten again
}

TEST_CASE("identity bindings are dropped on insert") {
  Variable x = var("X");
  Substitution s;
  s.insert(x, v(x));
  REQUIRE(s.is_identity());
  s.insert(x, cst("a"));
  s.insert(x, v(x));  // rebinding to itself removes the entry
  REQUIRE(s.is_identity());
}

TEST_CASE("compose applies the first substitution, then the second") {
  Variable x = var("X"), y = var("Y");
  Substitution first = Substitution::bind(x, app("f", {v(y)}));
  Substitution second = Substitution::bind(y, cst("a"));
  Substitution both = compose(first, second);
  REQUIRE(both(v(x)) == app("f", {cst("a")}));
  REQUIRE(both(v(y)) == cst("a"));
  // Composition in the other order leaves x's range untouched.
  Substitution other = compose(second, first);
  REQUIRE(other(v(x)) == app("f", {v(y)}));
}

TEST_CASE("compose drops bindings that become identities") {
  Variable x = var("X"), y = var("Y");
  Substitution first = Substitution::bind(x, v(y));
  Substitution second = Substitution::bind(y, v(x));
  Substitution both = compose(first, second);
  // x -> y -> x collapses to identity on x; y -> x stays.
  REQUIRE(both.lookup(x) == std::nullopt);
  REQUIRE(both(v(y)) == v(x));
}

TEST_CASE("restrict_to keeps only the named variables") {
  Variable x = var("X"), y = var("Y"), z = var("Z");
  Substitution s;
  s.insert(x, cst("a"));
  s.insert(y, cst("b"));
  std::vector<Variable> keep = {x, z};
  Substitution r = restrict_to(s, keep);
  REQUIRE(r.lookup(x).has_value());
  REQUIRE_FALSE(r.lookup(y).has_value());
  REQUIRE(r.size() == 1);
}

TEST_CASE("idempotence holds exactly when domain and range variables are disjoint") {
  Variable x = var("X"), y = var("Y");
  REQUIRE(is_idempotent(Substitution::bind(x, app("f", {v(y)}))));
  Substitution chained;
  chained.insert(x, v(y));
  chained.insert(y, cst("a"));
  REQUIRE_FALSE(is_idempotent(chained));
  REQUIRE(is_idempotent(Substitution::identity()));
}

TEST_CASE("substitution linearity needs linear ranges without shared variables") {
  Variable x = var("X"), y = var("Y"), z = var("Z"), w = var("W");
  Substitution ok;
  ok.insert(x, app("f", {v(z)}));
  ok.insert(y, v(w));
  REQUIRE(is_linear(ok));
  Substitution shared;
  shared.insert(x, v(z));
  shared.insert(y, v(z));
  REQUIRE_FALSE(is_linear(shared));
  Substitution doubled = Substitution::bind(x, app("h", {v(z), v(z)}));
  REQUIRE_FALSE(is_linear(doubled));
}

TEST_CASE("mgu solves standard cases") {
  Variable x = var("X"), y = var("Y");
  SECTION("variable against term") {
    auto s = mgu(v(x), app("f", {cst("a")}));
    REQUIRE(s);
    REQUIRE((*s)(v(x)) == app("f", {cst("a")}));
  }
  SECTION("descends into matching structure") {
    auto s = mgu(app("h", {v(x), cst("b")}), app("h", {cst("a"), v(y)}));
    REQUIRE(s);
    REQUIRE((*s)(v(x)) == cst("a"));
    REQUIRE((*s)(v(y)) == cst("b"));
  }
  SECTION("variable-variable chains collapse") {
    auto s = mgu(app("h", {v(x), v(x)}), app("h", {v(y), cst("a")}));
    REQUIRE(s);
    REQUIRE((*s)(v(x)) == cst("a"));
    REQUIRE((*s)(v(y)) == cst("a"));
  }
  SECTION("atom overload requires the same predicate") {
    REQUIRE(mgu(atom("p", {v(x)}), atom("p", {cst("a")})));
    REQUIRE_FALSE(mgu(atom("p", {v(x)}), atom("q", {cst("a")})));
  }
}

TEST_CASE("mgu rejects clashes and occurs-check violations") {
  Variable x = var("X");
  REQUIRE_FALSE(mgu(cst("a"), cst("b")));
  REQUIRE_FALSE(mgu(app("f", {v(x)}), app("g", {v(x)})));
  REQUIRE_FALSE(mgu(v(x), app("f", {v(x)})));
  REQUIRE_FALSE(mgu(app("h", {v(x), v(x)}), app("h", {v(x), app("f", {v(x)})})));
}

TEST_CASE("mgu results are idempotent") {
  Variable x = var("X"), y = var("Y"), z = var("Z");
  auto s = mgu(app("h", {v(x), app("f", {v(x)})}), app("h", {v(y), v(z)}));
  REQUIRE(s);
  REQUIRE(is_idempotent(*s));
  REQUIRE((*s)(v(z)) == (*s)(app("f", {v(x)})));
}

TEST_CASE("match is one-sided") {
  Variable x = var("X"), y = var("Y");
  auto s = match(app("f", {v(x)}), app("f", {cst("a")}));
  REQUIRE(s);
  REQUIRE((*s)(v(x)) == cst("a"));
  // The target's variables are never bound.
  REQUIRE_FALSE(match(app("f", {cst("a")}), app("f", {v(y)})));
  // Repeated pattern variables must map consistently.
  REQUIRE(match(app("h", {v(x), v(x)}), app("h", {cst("a"), cst("a")})));
  REQUIRE_FALSE(match(app("h", {v(x), v(x)}), app("h", {cst("a"), cst("b")})));
}

TEST_CASE("parallel_compose merges compatible substitutions and fails otherwise") {
  Variable x = var("X"), y = var("Y"), z = var("Z");
  Substitution a = Substitution::bind(x, app("f", {v(z)}));
  Substitution b = Substitution::bind(y, cst("b"));
  auto merged = parallel_compose(a, b);
  REQUIRE(merged);
  REQUIRE((*merged)(v(x)) == app("f", {v(z)}));
  REQUIRE((*merged)(v(y)) == cst("b"));

  // Overlapping domains merge by unifying the two ranges.
  Substitution c = Substitution::bind(x, app("f", {cst("a")}));
  auto refined = parallel_compose(a, c);
  REQUIRE(refined);
  REQUIRE((*refined)(v(x)) == app("f", {cst("a")}));
  REQUIRE((*refined)(v(z)) == cst("a"));

  Substitution d = Substitution::bind(x, cst("b"));
  REQUIRE_FALSE(parallel_compose(a, d));
}

TEST_CASE("to_string formats substitutions with comma-space separators") {
  Variable x = var("X"), y = var("Y");
  Substitution s;
  s.insert(x, app("f", {v(y)}));
  s.insert(y, cst("a"));
  std::string text = to_string(s);
  bool xy = text == "{X/f(Y), Y/a}";
  bool yx = text == "{Y/a, X/f(Y)}";
  REQUIRE((xy || yx));
  REQUIRE(to_string(Substitution::identity()) == "id");
  REQUIRE(to_string(std::optional<Substitution>{}) == "fail");
}

// ---------------------------------------------------------------------------
// randomized differential check against an independent reference unifier

namespace {

// Deliberately different algorithm from the library's worklist solver:
// naive recursive descent threading an eagerly-applied substitution.
bool ref_unify(const Term& a, const Term& b, Substitution& s);

bool ref_bind(const Variable& x, const Term& t, Substitution& s) {
  Term target = s(t);
  if (target.is_variable() && target.var() == x) return true;
  if (occurs(x, target)) return false;
  // Rewrite existing ranges so the substitution stays fully applied.
  Substitution step = Substitution::bind(x, target);
  Substitution next;
  for (const auto& [w, range] : s.bindings()) next.insert(w, step(range));
  next.insert(x, target);
  s = next;
  return true;
}

bool ref_unify(const Term& a, const Term& b, Substitution& s) {
  Term lhs = s(a), rhs = s(b);
  if (lhs.is_variable()) return ref_bind(lhs.var(), rhs, s);
  if (rhs.is_variable()) return ref_bind(rhs.var(), lhs, s);
  if (lhs.functor() != rhs.functor()) return false;
  for (std::size_t i = 0; i < lhs.args().size(); ++i)
    if (!ref_unify(lhs.args()[i], rhs.args()[i], s)) return false;
  return true;
}

Term random_term(std::mt19937_64& rng, std::vector<Variable>& pool, int fuel) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  if (fuel <= 0 || pick(4) == 0) {
    if (!pool.empty() && pick(3) != 0) return v(pool[pick(pool.size())]);
    pool.push_back(var());
    return v(pool.back());
  }
  switch (pick(5)) {
    case 0: return cst("a");
    case 1: return cst("b");
    case 2: return app("f", {random_term(rng, pool, fuel - 1)});
    case 3: return app("g", {random_term(rng, pool, fuel - 1)});
    default:
      return app("h", {random_term(rng, pool, fuel - 1), random_term(rng, pool, fuel - 1)});
  }
}

}  // namespace

TEST_CASE("mgu agrees with a reference unifier on random pairs") {
  std::mt19937_64 rng(20240817);
  std::size_t unified = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Variable> pool;
    Term a = random_term(rng, pool, 3);
    // Half the trials share the variable pool to exercise entangled cases.
    if (rng() % 2 == 0) pool.clear();
    Term b = random_term(rng, pool, 3);

    Substitution ref;
    bool ref_ok = ref_unify(a, b, ref);
    auto ours = mgu(a, b);

    INFO("a = " << to_string(a) << ", b = " << to_string(b));
    REQUIRE(ours.has_value() == ref_ok);
    if (!ours) continue;
    ++unified;
    REQUIRE((*ours)(a) == (*ours)(b));
    REQUIRE(is_idempotent(*ours));
    // Most general: the reference's unified term is an instance of ours.
    REQUIRE(match((*ours)(a), ref(a)).has_value());
  }
  REQUIRE(unified > 50);  // the generator must exercise both outcomes
}
