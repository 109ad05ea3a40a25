#include "repfair/repro.hpp"

#include <functional>
#include <sstream>

#include "repfair/axioms.hpp"
#include "repfair/solvers_general.hpp"
#include "repfair/solvers_two.hpp"

namespace repfair {

namespace {

Instance rows(std::vector<std::vector<Rational>> u) { return Instance::from_matrix(std::move(u)); }

Sequence repeat_each(const std::vector<std::pair<Allocation, int>>& parts) {
  Sequence seq;
  for (const auto& [a, times] : parts) {
    for (int r = 0; r < times; ++r) seq.push_back(a);
  }
  return seq;
}

std::string join(const std::vector<Rational>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

bool every_round(const Instance& inst, const Sequence& seq, Axiom a, const SearchBudget& budget) {
  for (const auto& r : seq) {
    if (!check_round(inst, r, a, budget).holds) return false;
  }
  return true;
}

}  // namespace

std::vector<ReproCheck> run_reference_examples(const SearchBudget& budget) {
  std::vector<ReproCheck> out;
  auto run = [&](std::string name, const std::function<std::pair<bool, std::string>()>& body) {
    ReproCheck c{std::move(name), false, ""};
    try {
      auto [ok, detail] = body();
      c.passed = ok;
      c.detail = std::move(detail);
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(c));
  };

  const Instance two_items = rows({{4, 5}, {3, 9}});
  const Sequence two_items_seq =
      repeat_each({{Allocation(2, {0, 0}), 2}, {Allocation(2, {1, 1}), 2}});
  const Instance aw = rows({{Rational(9, 2), 3, 7}, {9, 5, 10}});
  const Instance goods3 = rows({{1, 2}, {1, 2}, {1, 1}});
  const Instance chores3 = rows({{-1, -3}, {-1, -3}, {-1, -1}});
  const Instance prop_gap = rows({{1, 4}, {1, 4}});
  const Instance ef1_gap = rows({{1, 3}, {1, 2}});

  run("(4,5)/(3,9): u_1({o1,o2}) = 9", [&] {
    const std::vector<ItemIndex> both{0, 1};
    const Rational v = bundle_utility(two_items, 0, both);
    return std::pair{v == Rational(9), v.str()};
  });
  run("(4,5)/(3,9), 4 rounds: counts (2,2)/(2,2), utilities (18,24)", [&] {
    const CountMatrix cm = overall(two_items_seq);
    const auto u = utility_vector(two_items, cm);
    return std::pair{cm.flat() == std::vector<std::int64_t>{2, 2, 2, 2} && u == std::vector<Rational>{18, 24}, join(u)};
  });
  run("(4,5)/(3,9): giving both items to agent 1 is PO", [&] {
    return std::pair{check_po_round(two_items, Allocation(2, {0, 0}), budget).holds, std::string()};
  });
  run("(4,5)/(3,9), 4 rounds: PO in every round", [&] {
    return std::pair{every_round(two_items, two_items_seq, Axiom::PO, budget), std::string()};
  });
  run("(4,5)/(3,9), 4 rounds: not PO overall, dominated at (21,27)", [&] {
    const AxiomVerdict v = check_po_overall(two_items, overall(two_items_seq), budget);
    if (v.holds || !v.witness) return std::pair{false, std::string("no witness")};
    const auto& w = std::get<DominatingCounts>(*v.witness);
    const auto u = utility_vector(two_items, w.counts);
    return std::pair{u == std::vector<Rational>{21, 27}, join(u)};
  });
  run("(9/2,3,7)/(9,5,10): counts {o2,o3x2}/{o1x2,o2} leave agent 2 envious", [&] {
    const CountMatrix cm(2, 3, 2, {0, 1, 2, 2, 1, 0});
    const AxiomVerdict v = check_ef(aw, cm);
    if (v.holds || !v.witness) return std::pair{false, std::string("EF holds")};
    const auto& w = std::get<EnvyWitness>(*v.witness);
    return std::pair{w.envious == 1 && w.envied == 0, describe(aw, v)};
  });
  run("(1,3)/(1,2): an empty bundle against both items is not EF1", [&] {
    return std::pair{!check_ef1(ef1_gap, Allocation(2, {1, 1})).holds, std::string()};
  });
  run("(1,4)/(1,4), k=3: no sequence is PROP overall", [&] {
    const auto r = exhaustive_search(prop_gap, 3, Predicate::parse("prop"), budget);
    return std::pair{r.status == ExhaustiveResult::Status::CertifiedNone, std::to_string(r.nodes) + " nodes"};
  });
  run("rotation over 3 agents is EF overall", [&] {
    const Instance inst = rows({{5, 1, 0, 2}, {1, 1, 1, 1}, {-1, 3, 2, 0}});
    const Sequence seq = rotation_sequence(inst, Allocation(3, {0, 0, 1, 2}), 3);
    return std::pair{check_ef(inst, overall(seq)).holds, std::string()};
  });
  run("per-round EF implies EF overall", [&] {
    const Instance inst = rows({{3, 1, 1}, {1, 3, 1}});
    const Sequence seq = repeat_each({{Allocation(2, {0, 1, 0}), 1}, {Allocation(2, {0, 1, 1}), 1}});
    const bool per_round = every_round(inst, seq, Axiom::EF, budget);
    return std::pair{per_round && check_ef(inst, overall(seq)).holds, std::string()};
  });
  run("rotation with k=3, n=2 is rejected", [&] {
    try {
      rotation_sequence(prop_gap, Allocation(2, {0, 1}), 3);
    } catch (const PreconditionError&) {
      return std::pair{true, std::string()};
    }
    return std::pair{false, std::string("accepted")};
  });
  run("(1,2)/(1,2)/(1,1), k=3: welfare-optimal PROP utilities (4,3,2)", [&] {
    const auto sol = solve_prop_po(goods3, 3, budget);
    const auto u = utility_vector(goods3, sol.counts);
    return std::pair{u == std::vector<Rational>{4, 3, 2}, join(u)};
  });
  run("(1,2)/(1,2)/(1,1), k=3: no EF + PO overall", [&] {
    const auto r = exhaustive_search(goods3, 3, Predicate::parse("ef & po"), budget);
    return std::pair{r.status == ExhaustiveResult::Status::CertifiedNone, std::to_string(r.nodes) + " nodes"};
  });
  run("chores (-1,-3)x2/(-1,-1), k=3: no EF + PO overall", [&] {
    const auto r = exhaustive_search(chores3, 3, Predicate::parse("ef & po"), budget);
    return std::pair{r.status == ExhaustiveResult::Status::CertifiedNone, std::to_string(r.nodes) + " nodes"};
  });
  run("(1,3)/(1,2), k=4: no EF + PO overall with EF1 per round", [&] {
    const auto r = exhaustive_search(ef1_gap, 4, Predicate::parse("ef & po & ef1:per-round"), budget);
    return std::pair{r.status == ExhaustiveResult::Status::CertifiedNone, std::to_string(r.nodes) + " nodes"};
  });
  run("(1,3)/(1,2), k=4: dominating sequence has utilities (9,6)", [&] {
    const Sequence seq = repeat_each({{Allocation(2, {1, 0}), 3}, {Allocation(2, {1, 1}), 1}});
    const auto u = utility_vector(ef1_gap, overall(seq));
    return std::pair{u == std::vector<Rational>{9, 6}, join(u)};
  });
  run("(1,3)/(1,2), k=4: EF + PO overall exists", [&] {
    const auto sol = solve_ef_po_two(ef1_gap, 4, budget);
    return std::pair{check_ef(ef1_gap, sol.counts).holds && check_po_overall(ef1_gap, sol.counts, budget).holds,
                     join(utility_vector(ef1_gap, sol.counts))};
  });
  run("(1,3)/(1,2), k=4: EF + PO overall with weak EF1 per round", [&] {
    const auto sol = solve_ef_po_two(ef1_gap, 4, budget);
    const Sequence seq = refine_weak_ef1(ef1_gap, sol.sequence, nullptr, budget);
    return std::pair{satisfies(ef1_gap, seq, Predicate::parse("ef & po & weak-ef1:per-round"), budget),
                     std::string()};
  });
  run("(1,3)/(1,2), k=4: EF overall with EF1 per round, not PO", [&] {
    const Sequence seq = solve_ef_perround_ef1(ef1_gap, 4);
    const bool ok = satisfies(ef1_gap, seq, Predicate::parse("ef & ef1:per-round"), budget) &&
                    !check_po_overall(ef1_gap, overall(seq), budget).holds;
    return std::pair{ok, std::string()};
  });
  return out;
}

}  // namespace repfair
