#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "repfair/axioms.hpp"
#include "support.hpp"

using namespace repfair;
using testsupport::matrix;
using testsupport::uniform;

namespace {

// Reference versions written directly over explicit item sets.
using ItemSet = std::set<ItemIndex>;

Rational set_value(const Instance& inst, AgentIndex i, const ItemSet& s) {
  Rational v;
  for (const auto o : s) v += inst.utility(i, o);
  return v;
}

ItemSet bundle_set(const Allocation& a, AgentIndex i) {
  const auto b = a.bundle(i);
  return ItemSet(b.begin(), b.end());
}

ItemSet plus(ItemSet s, ItemIndex o) {
  s.insert(o);
  return s;
}

ItemSet minus(ItemSet s, ItemIndex o) {
  s.erase(o);
  return s;
}

bool ref_ef1(const Instance& inst, const Allocation& a, bool weak) {
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    for (AgentIndex j = 0; j < inst.num_agents(); ++j) {
      if (i == j) continue;
      const ItemSet pi = bundle_set(a, i);
      const ItemSet pj = bundle_set(a, j);
      if (set_value(inst, i, pi) >= set_value(inst, i, pj)) continue;
      ItemSet both = pi;
      both.insert(pj.begin(), pj.end());
      bool ok = false;
      for (const auto o : both) {
        if (!weak) {
          ok = ok || set_value(inst, i, minus(pi, o)) >= set_value(inst, i, minus(pj, o));
        } else {
          ok = ok || set_value(inst, i, plus(pi, o)) >= set_value(inst, i, minus(pj, o)) ||
               set_value(inst, i, minus(pi, o)) >= set_value(inst, i, plus(pj, o));
        }
      }
      if (!ok) return false;
    }
  }
  return true;
}

bool ref_prop_relaxed(const Instance& inst, const Allocation& a, bool pair) {
  const Rational n(static_cast<long>(inst.num_agents()));
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    const ItemSet pi = bundle_set(a, i);
    ItemSet all;
    for (ItemIndex o = 0; o < inst.num_items(); ++o) all.insert(o);
    const Rational share = set_value(inst, i, all) / n;
    // X subset of pi, Y subset of the rest, both of size <= 1, given as optional picks.
    bool ok = false;
    std::vector<std::optional<ItemIndex>> xs{std::nullopt};
    std::vector<std::optional<ItemIndex>> ys{std::nullopt};
    for (const auto o : all) (pi.count(o) ? xs : ys).push_back(o);
    for (const auto& x : xs) {
      for (const auto& y : ys) {
        if (!pair && x && y) continue;
        ItemSet s = pi;
        if (x) s.erase(*x);
        if (y) s.insert(*y);
        ok = ok || set_value(inst, i, s) >= share;
      }
    }
    if (!ok) return false;
  }
  return true;
}

// Every count matrix with columns summing to k.
std::vector<CountMatrix> all_count_matrices(std::size_t n, std::size_t m, std::int64_t k) {
  std::vector<std::vector<std::int64_t>> columns;
  std::vector<std::int64_t> col(n, 0);
  auto fill = [&](auto&& self, std::size_t a, std::int64_t left) -> void {
    if (a + 1 == n) {
      col[a] = left;
      columns.push_back(col);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      col[a] = v;
      self(self, a + 1, left - v);
    }
  };
  fill(fill, 0, k);
  std::vector<CountMatrix> out;
  std::vector<std::size_t> pick(m, 0);
  for (;;) {
    std::vector<std::int64_t> flat(n * m);
    for (std::size_t o = 0; o < m; ++o) {
      for (std::size_t a = 0; a < n; ++a) flat[a * m + o] = columns[pick[o]][a];
    }
    out.emplace_back(n, m, k, std::move(flat));
    std::size_t pos = m;
    while (pos > 0 && pick[pos - 1] + 1 == columns.size()) pick[--pos] = 0;
    if (pos == 0) break;
    ++pick[pos - 1];
  }
  return out;
}

bool dominates(const Instance& inst, const CountMatrix& y, const CountMatrix& x) {
  bool strict = false;
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    const Rational a = row_utility(inst, i, y, i);
    const Rational b = row_utility(inst, i, x, i);
    if (a < b) return false;
    strict = strict || a > b;
  }
  return strict;
}

bool pins_nulls(const Instance& inst, const CountMatrix& cm) {
  for (ItemIndex o = 0; o < inst.num_items(); ++o) {
    if (classify_item(inst, o) == ItemClass::ObjectiveNull && cm.count(0, o) != cm.rounds()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("check_ef examples") {
  SUBCASE("envy on the two-round counts of the 4.5/3/7 instance") {
    const Instance inst = matrix({{Rational(9, 2), 3, 7}, {9, 5, 10}});
    const CountMatrix cm(2, 3, 2, {0, 1, 2, 2, 1, 0});
    const AxiomVerdict v = check_ef(inst, cm);
    REQUIRE_FALSE(v.holds);
    const auto& w = std::get<EnvyWitness>(*v.witness);
    CHECK(w.envious == 1);
    CHECK(w.envied == 0);
    CHECK(w.own_value == Rational(23));
    CHECK(w.other_value == Rational(25));
    CHECK(describe(inst, v) == "agent a2 envies a1 (23 < 25)");
  }
  SUBCASE("single agent") {
    CHECK(check_ef(matrix({{-3, 4}}), CountMatrix(1, 2, 2, {2, 2})).holds);
  }
}

TEST_CASE("check_ef1 examples") {
  SUBCASE("one good") {
    CHECK(check_ef1(matrix({{1}, {1}}), Allocation(2, {0})).holds);
  }
  SUBCASE("two identical goods to one agent") {
    // Agent 2 still sees a gap of 1 after either removal.
    const Instance inst = matrix({{1, 1}, {1, 1}});
    CHECK_FALSE(check_ef1(inst, Allocation(2, {0, 0})).holds);
    CHECK(check_weak_ef1(inst, Allocation(2, {0, 0})).holds);
    CHECK(check_ef1(inst, Allocation(2, {0, 1})).holds);
  }
  SUBCASE("empty bundle against both items") {
    const Instance inst = matrix({{1, 3}, {1, 2}});
    const AxiomVerdict v = check_ef1(inst, Allocation(2, {1, 1}));
    REQUIRE_FALSE(v.holds);
    CHECK(std::get<EnvyWitness>(*v.witness).envious == 0);
  }
}

TEST_CASE("check_weak_ef1 examples") {
  SUBCASE("two chores to one agent") {
    const Instance inst = matrix({{-1, -1}, {-1, -1}});
    CHECK_FALSE(check_ef1(inst, Allocation(2, {0, 0})).holds);
    CHECK(check_weak_ef1(inst, Allocation(2, {0, 0})).holds);
  }
  SUBCASE("empty bundle against two goods worth 5") {
    // Copying one good to the empty side gives 5 >= 5, so weak EF1 holds while EF1 does not.
    const Instance inst = matrix({{5, 5}, {5, 5}});
    CHECK_FALSE(check_ef1(inst, Allocation(2, {1, 1})).holds);
    CHECK(check_weak_ef1(inst, Allocation(2, {1, 1})).holds);
  }
  SUBCASE("empty bundle against three goods worth 5") {
    const Instance inst = matrix({{5, 5, 5}, {5, 5, 5}});
    CHECK_FALSE(check_ef1(inst, Allocation(2, {1, 1, 1})).holds);
    CHECK_FALSE(check_weak_ef1(inst, Allocation(2, {1, 1, 1})).holds);
  }
  SUBCASE("copy of a chore pushed to the envied agent") {
    // Agent 1 holds chores -1,-3 and agent 2 nothing; shifting -3 over gives -1 >= -3.
    const Instance inst = matrix({{-1, -3}, {-1, -3}});
    CHECK_FALSE(check_ef1(inst, Allocation(2, {0, 0})).holds);
    CHECK(check_weak_ef1(inst, Allocation(2, {0, 0})).holds);
    const Instance harsh = matrix({{-2, -2, -2}, {-1, -1, -1}});
    CHECK_FALSE(check_ef1(harsh, Allocation(2, {0, 0, 0})).holds);
    CHECK_FALSE(check_weak_ef1(harsh, Allocation(2, {0, 0, 0})).holds);
  }
}

TEST_CASE("EF1 and weak EF1 agree with the set-based reference") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 1500; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 2, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 0, 5));
    const Instance inst = testsupport::random_instance(rng, n, m, -6, 6);
    const Allocation a = testsupport::random_allocation(rng, n, m);
    const bool ef1 = check_ef1(inst, a).holds;
    const bool wef1 = check_weak_ef1(inst, a).holds;
    CHECK(ef1 == ref_ef1(inst, a, false));
    CHECK(wef1 == ref_ef1(inst, a, true));
    if (ef1) CHECK(wef1);
    if (check_ef(inst, CountMatrix::of(a)).holds) CHECK(ef1);
  }
}

TEST_CASE("check_prop examples") {
  SUBCASE("goods and a chore") {
    const Instance inst = matrix({{3, -1}, {3, -1}});
    const Allocation a(2, {1, 0});
    const AxiomVerdict prop = check_prop(inst, CountMatrix::of(a));
    REQUIRE_FALSE(prop.holds);
    const auto& w = std::get<ShortfallWitness>(*prop.witness);
    CHECK(w.agent == 0);
    CHECK(w.value == Rational(-1));
    CHECK(w.share == Rational(1));
    CHECK(check_prop11(inst, a).holds);
  }
  SUBCASE("all-null instance") {
    const Instance inst = matrix({{0, 0}, {0, 0}, {0, 0}});
    CHECK(check_prop(inst, CountMatrix(3, 2, 2, {2, 0, 0, 2, 0, 0})).holds);
  }
  SUBCASE("overall share scales with k") {
    const Instance inst = matrix({{1, 4}, {1, 4}});
    // Over 3 rounds each share is 7.5; agent 2 gets only o2 once and o1 three times.
    const CountMatrix cm(2, 2, 3, {0, 2, 3, 1});
    CHECK_FALSE(check_prop(inst, cm).holds);
  }
  SUBCASE("PROP1 needs a single change; PROP[1,1] allows one of each") {
    // Agent 1 share is 3/2. It holds chore o3 (-2) and misses good o1 (3) and o2 (1).
    const Instance inst = matrix({{3, 1, -2, 1}, {1, 1, 1, 1}});
    const Allocation a(2, {1, 1, 0, 1});
    CHECK_FALSE(check_prop1(inst, a).holds);
    CHECK(check_prop11(inst, a).holds);
  }
}

TEST_CASE("PROP1 and PROP[1,1] agree with the set-based reference") {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 1500; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 0, 5));
    const Instance inst = testsupport::random_instance(rng, n, m, -6, 6);
    const Allocation a = testsupport::random_allocation(rng, n, m);
    CHECK(check_prop1(inst, a).holds == ref_prop_relaxed(inst, a, false));
    CHECK(check_prop11(inst, a).holds == ref_prop_relaxed(inst, a, true));
  }
}

TEST_CASE("PROP1 and PROP[1,1] coincide without mixed signs") {
  std::mt19937_64 rng(92);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 4));
    const auto m = static_cast<std::size_t>(uniform(rng, 1, 5));
    const auto signs = t % 2 == 0 ? testsupport::Signs::Goods : testsupport::Signs::Chores;
    const Instance inst = testsupport::random_instance(rng, n, m, -7, 7, signs);
    const Allocation a = testsupport::random_allocation(rng, n, m);
    CHECK(check_prop1(inst, a).holds == check_prop11(inst, a).holds);
  }
}

TEST_CASE("check_po_round") {
  SUBCASE("utilitarian optimum") {
    const Instance inst = matrix({{2, 1, -1}, {1, 2, -3}, {0, 3, -1}});
    CHECK(check_po_round(inst, Allocation(3, {0, 2, 0})).holds);
  }
  SUBCASE("agent 1 gets both items in the (4,5)/(3,9) instance") {
    const Instance inst = matrix({{4, 5}, {3, 9}});
    CHECK(check_po_round(inst, Allocation(2, {0, 0})).holds);
    CHECK(check_po_round(inst, Allocation(2, {1, 1})).holds);
  }
  SUBCASE("wasted item") {
    const Instance inst = matrix({{1}, {0}});
    const AxiomVerdict v = check_po_round(inst, Allocation(2, {1}));
    REQUIRE_FALSE(v.holds);
    CHECK(std::get<DominatingAllocation>(*v.witness).allocation.owner(0) == 0);
  }
  SUBCASE("budget") {
    std::mt19937_64 rng(1);
    const Instance inst = testsupport::random_instance(rng, 3, 8, -3, 3);
    CHECK_THROWS_AS(check_po_round(inst, Allocation(3, std::vector<AgentIndex>(8, 0)), SearchBudget{100, 10}),
                    BudgetExceeded);
  }
}

TEST_CASE("check_po_overall on the repeated (4,5)/(3,9) example") {
  const Instance inst = matrix({{4, 5}, {3, 9}});
  const CountMatrix cm(2, 2, 4, {2, 2, 2, 2});
  CHECK(utility_vector(inst, cm) == std::vector<Rational>{18, 24});
  const AxiomVerdict v = check_po_overall(inst, cm);
  REQUIRE_FALSE(v.holds);
  const CountMatrix& y = std::get<DominatingCounts>(*v.witness).counts;
  CHECK(y == CountMatrix(2, 2, 4, {4, 1, 0, 3}));
  CHECK(utility_vector(inst, y) == std::vector<Rational>{21, 27});
  CHECK(check_po_overall(inst, y).holds);
}

TEST_CASE("check_po_overall with k=1 matches check_po_round") {
  std::mt19937_64 rng(123);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 0, 4));
    const Instance inst = testsupport::random_instance(rng, n, m, -3, 3);
    const Allocation a = testsupport::random_allocation(rng, n, m);
    CHECK(check_po_overall(inst, CountMatrix::of(a)).holds == check_po_round(inst, a).holds);
  }
}

TEST_CASE("check_po_overall agrees with full count-matrix enumeration") {
  std::mt19937_64 rng(321);
  int failing = 0;
  for (int t = 0; t < 250; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto k = uniform(rng, 1, n == 3 ? 2 : 4);
    const Instance inst = testsupport::random_instance(rng, n, m, -3, 3);
    const auto universe = all_count_matrices(n, m, k);
    const CountMatrix& x = universe[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(universe.size()) - 1))];
    std::optional<CountMatrix> best;
    for (const auto& y : universe) {
      if (!pins_nulls(inst, y) || !dominates(inst, y, x)) continue;
      if (!best || welfare(inst, y) > welfare(inst, *best) ||
          (welfare(inst, y) == welfare(inst, *best) && y.flat() < best->flat())) {
        best = y;
      }
    }
    const AxiomVerdict v = check_po_overall(inst, x);
    CHECK(v.holds == !best.has_value());
    if (best && !v.holds) {
      CHECK(std::get<DominatingCounts>(*v.witness).counts == *best);
      ++failing;
    }
  }
  CHECK(failing > 50);
}

TEST_CASE("implications between axioms") {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 1, 4));
    const auto k = static_cast<std::size_t>(uniform(rng, 1, 4));
    const Instance inst = testsupport::random_instance(rng, n, m, -4, 4);
    const Sequence seq = testsupport::random_sequence(rng, n, m, k);
    const CountMatrix cm = overall(seq);
    if (check_ef(inst, cm).holds) CHECK(check_prop(inst, cm).holds);
    if (n == 2) CHECK(check_ef(inst, cm).holds == check_prop(inst, cm).holds);
    if (check_po_overall(inst, cm).holds) {
      for (const auto& round : seq) CHECK(check_po_round(inst, round).holds);
    }
  }
}

TEST_CASE("witnesses re-verify") {
  std::mt19937_64 rng(505);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(uniform(rng, 2, 3));
    const auto m = static_cast<std::size_t>(uniform(rng, 1, 4));
    const auto k = static_cast<std::size_t>(uniform(rng, 1, 3));
    const Instance inst = testsupport::random_instance(rng, n, m, -4, 4);
    const CountMatrix cm = overall(testsupport::random_sequence(rng, n, m, k));
    if (const auto v = check_ef(inst, cm); !v.holds) {
      const auto& w = std::get<EnvyWitness>(*v.witness);
      CHECK(row_utility(inst, w.envious, cm, w.envious) < row_utility(inst, w.envious, cm, w.envied));
    }
    if (const auto v = check_prop(inst, cm); !v.holds) {
      const auto& w = std::get<ShortfallWitness>(*v.witness);
      CHECK(row_utility(inst, w.agent, cm, w.agent) < w.share);
    }
    if (const auto v = check_po_overall(inst, cm); !v.holds) {
      CHECK(dominates(inst, std::get<DominatingCounts>(*v.witness).counts, cm));
    }
  }
}

TEST_CASE("evaluate") {
  const Instance inst = matrix({{4, 5}, {3, 9}});
  const Sequence seq({Allocation(2, {0, 0}), Allocation(2, {0, 0}), Allocation(2, {1, 1}),
                      Allocation(2, {1, 1})});
  const auto per_round = evaluate(inst, seq, {Axiom::PO}, Scope::PerRound);
  REQUIRE(per_round.size() == 1);
  CHECK(per_round[0].verdicts.size() == 4);
  CHECK(per_round[0].holds());
  const auto whole = evaluate(inst, seq, {Axiom::PO, Axiom::EF}, Scope::Overall);
  CHECK_FALSE(whole[0].holds());
  CHECK(whole[1].holds() == check_ef(inst, overall(seq)).holds);
  CHECK_THROWS_AS(evaluate(inst, seq, {Axiom::EF1}, Scope::Overall), PreconditionError);
  CHECK_THROWS_AS(parse_axiom("envy"), PreconditionError);
  CHECK(parse_axiom("PROP[1,1]") == Axiom::PROP11);
  CHECK(parse_scope("per-round") == Scope::PerRound);
}

TEST_CASE("per-round EF implies overall EF") {
  std::mt19937_64 rng(606);
  int hits = 0;
  for (int t = 0; t < 3000 && hits < 100; ++t) {
    const Instance inst = testsupport::random_instance(rng, 2, 3, -3, 3);
    const Sequence seq = testsupport::random_sequence(rng, 2, 3, 3);
    const bool per_round = std::all_of(seq.begin(), seq.end(), [&](const Allocation& a) {
      return check_ef(inst, CountMatrix::of(a)).holds;
    });
    if (!per_round) continue;
    ++hits;
    CHECK(check_ef(inst, overall(seq)).holds);
    CHECK(check_prop(inst, overall(seq)).holds);
  }
  CHECK(hits > 20);
}
