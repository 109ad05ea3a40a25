#include "repfair/solvers_two.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "repfair/axioms.hpp"

namespace repfair {

namespace {

void require_two_agents(const Instance& inst) {
  if (inst.num_agents() != 2) {
    throw PreconditionError("this procedure needs exactly 2 agents, got " + std::to_string(inst.num_agents()));
  }
}

void require_even(std::int64_t k) {
  if (k < 2 || k % 2 != 0) throw PreconditionError("k=" + std::to_string(k) + " must be a positive even number");
}

void require_ef_po(const Instance& inst, const Sequence& seq, const SearchBudget& budget) {
  seq.validate(inst);
  const CountMatrix cm = overall(seq);
  if (const auto v = check_ef(inst, cm); !v.holds) {
    throw PreconditionError("input sequence is not envy-free overall: " + describe(inst, v));
  }
  if (const auto v = check_po_overall(inst, cm, budget); !v.holds) {
    throw PreconditionError("input sequence is not Pareto-optimal overall: " + describe(inst, v));
  }
}

// The agent an item must go to under PO, if any (one agent likes it and the other does not).
std::optional<AgentIndex> po_forced_owner(const Instance& inst, ItemIndex o) {
  const int s1 = inst.utility(0, o).sign();
  const int s2 = inst.utility(1, o).sign();
  if ((s1 > 0 && s2 <= 0) || (s1 >= 0 && s2 < 0)) return AgentIndex{0};
  if ((s2 > 0 && s1 <= 0) || (s2 >= 0 && s1 < 0)) return AgentIndex{1};
  return std::nullopt;
}

bool ef1_round(const Instance& inst, const Allocation& a) {
  return ef1_for(inst, a, 0, 1) && ef1_for(inst, a, 1, 0);
}

}  // namespace

TwoAgentPartition partition_two_rounds(const Instance& inst, const Sequence& seq) {
  require_two_agents(inst);
  seq.validate(inst);
  if (seq.size() != 2) throw PreconditionError("expected a 2-round sequence");
  TwoAgentPartition p;
  for (ItemIndex o = 0; o < inst.num_items(); ++o) {
    const AgentIndex r0 = seq[0].owner(o);
    const AgentIndex r1 = seq[1].owner(o);
    const ItemClass c = classify_item(inst, o);
    if (c == ItemClass::ObjectiveNull) {
      p.nulls.push_back(o);
    } else if (r0 == r1) {
      (r0 == 0 ? p.kept_by_first : p.kept_by_second).push_back(o);
    } else if (c == ItemClass::ObjectiveGood) {
      p.goods.push_back(o);
    } else if (c == ItemClass::ObjectiveChore) {
      p.chores.push_back(o);
    } else {
      throw PreconditionError("subjective item '" + inst.items()[o] +
                              "' is split between the agents; PO forces it to one agent");
    }
  }
  return p;
}

CountSolution solve_ef_po_two(const Instance& inst, std::int64_t k, const SearchBudget& budget) {
  require_two_agents(inst);
  require_even(k);
  // For two agents proportionality and envy-freeness coincide.
  return solve_prop_po(inst, k, budget);
}

Sequence refine_ef1_k2(const Instance& inst, const Sequence& seq, const SearchBudget& budget) {
  require_two_agents(inst);
  if (seq.size() != 2) throw PreconditionError("expected a 2-round sequence");
  require_ef_po(inst, seq, budget);
  for (ItemIndex o = 0; o < inst.num_items(); ++o) {
    const auto forced = po_forced_owner(inst, o);
    if (forced && (seq[0].owner(o) != *forced || seq[1].owner(o) != *forced)) {
      throw PreconditionError("item '" + inst.items()[o] + "' is not with its PO-forced owner in both rounds");
    }
  }
  const TwoAgentPartition part = partition_two_rounds(inst, seq);

  Sequence out = seq;
  for (const ItemIndex o : part.chores) {
    out[0].assign(o, 0);
    out[1].assign(o, 1);
  }
  for (const ItemIndex o : part.goods) {
    out[0].assign(o, 1);
    out[1].assign(o, 0);
  }
  std::vector<ItemIndex> order = part.goods;
  order.insert(order.end(), part.chores.begin(), part.chores.end());
  std::sort(order.begin(), order.end());

  std::size_t next = 0;
  while (!ef1_round(inst, out[0]) || !ef1_round(inst, out[1])) {
    if (next == order.size()) {
      throw PreconditionError("ran out of items before reaching per-round EF1; input violates the preconditions");
    }
    const ItemIndex o = order[next++];
    const bool chore = classify_item(inst, o) == ItemClass::ObjectiveChore;
    out[0].assign(o, chore ? 1 : 0);
    out[1].assign(o, chore ? 0 : 1);
  }
  if (overall(out) != overall(seq)) throw std::logic_error("refinement changed the count matrix");
  return out;
}

Sequence refine_weak_ef1(const Instance& inst, const Sequence& seq, std::size_t* transfers,
                         const SearchBudget& budget) {
  require_two_agents(inst);
  require_ef_po(inst, seq, budget);
  const std::size_t k = seq.size();
  const std::size_t m = inst.num_items();
  const std::size_t limit = 2 * k * m;
  std::size_t moves = 0;
  Sequence out = seq;

  for (AgentIndex a = 0; a < 2; ++a) {
    const AgentIndex b = 1 - a;
    std::vector<bool> envious(k);
    for (std::size_t r = 0; r < k; ++r) envious[r] = envies(inst, out[r], a, b);
    for (;;) {
      std::size_t j = k;
      for (std::size_t r = 0; r < k; ++r) {
        if (envious[r] && !weak_ef1_for(inst, out[r], a, b)) {
          j = r;
          break;
        }
      }
      if (j == k) break;
      while (!weak_ef1_for(inst, out[j], a, b)) {
        std::size_t i = k;
        for (std::size_t r = 0; r < k; ++r) {
          if (!envious[r]) {
            i = r;
            break;
          }
        }
        if (i == k) throw PreconditionError("no envy-free round left; input is not EF overall");
        std::optional<ItemIndex> pick;
        for (ItemIndex o = 0; o < m && !pick; ++o) {
          const int s = inst.utility(a, o).sign();
          const bool good_move = s > 0 && out[i].owner(o) == a && out[j].owner(o) != a;
          const bool chore_move = s < 0 && out[j].owner(o) == a && out[i].owner(o) != a;
          if (good_move || chore_move) pick = o;
        }
        if (!pick) throw PreconditionError("no transferable item between rounds; input violates the preconditions");
        const ItemIndex o = *pick;
        if (inst.utility(a, o) > Rational(0)) {
          out[i].assign(o, b);
          out[j].assign(o, a);
        } else {
          out[j].assign(o, b);
          out[i].assign(o, a);
        }
        if (++moves > limit) throw std::logic_error("weak EF1 refinement exceeded 2km transfers");
        if (envies(inst, out[i], a, b)) envious[i] = true;
      }
    }
  }
  if (overall(out) != overall(seq)) throw std::logic_error("refinement changed the count matrix");
  if (transfers) *transfers = moves;
  return out;
}

Sequence solve_ef_perround_ef1(const Instance& inst, std::int64_t k) {
  require_two_agents(inst);
  require_even(k);
  const std::size_t m = inst.num_items();
  auto repeat = [&](const std::vector<AgentIndex>& owners) {
    Sequence seq;
    for (std::int64_t r = 0; r < k; ++r) seq.push_back(Allocation(2, owners));
    return seq;
  };
  if (m == 0) return repeat({});

  // f(j) = u_1(I_j) - u_1(complement of I_j) over prefixes of the item order.
  std::vector<Rational> f(m + 1);
  f[0] = -inst.total_utility(0);
  for (ItemIndex o = 0; o < m; ++o) f[o + 1] = f[o] + Rational(2) * inst.utility(0, o);
  std::size_t j = 0;
  bool case_one = false;
  for (std::size_t t = 1; t <= m && j == 0; ++t) {
    if (f[t - 1] <= Rational(0) && f[t] >= Rational(0)) {
      j = t;
      case_one = true;
    } else if (f[t - 1] >= Rational(0) && f[t] <= Rational(0)) {
      j = t;
    }
  }
  if (j == 0) throw std::logic_error("no switching index found");

  const ItemIndex pivot = j - 1;
  // side[o]: 0 for L = I_{j-1}, 1 for R = items after o_j.
  std::vector<int> side(m, 0);
  for (ItemIndex o = j; o < m; ++o) side[o] = 1;
  auto value = [&](AgentIndex agent, int s, bool with_pivot) {
    Rational v;
    for (ItemIndex o = 0; o < m; ++o) {
      if (o != pivot && side[o] == s) v += inst.utility(agent, o);
    }
    if (with_pivot) v += inst.utility(agent, pivot);
    return v;
  };
  if (value(0, 0, false) < value(0, 1, false)) {
    for (ItemIndex o = 0; o < m; ++o) {
      if (o != pivot) side[o] = 1 - side[o];
    }
  }
  constexpr int L = 0;
  constexpr int R = 1;
  // Owners when agent 1 takes bundle `mine` (agent 2 the other) and the pivot goes to `pivot_owner`.
  auto layout = [&](int mine, AgentIndex pivot_owner) {
    std::vector<AgentIndex> owners(m);
    for (ItemIndex o = 0; o < m; ++o) owners[o] = side[o] == mine ? 0 : 1;
    owners[pivot] = pivot_owner;
    return owners;
  };
  auto alternate = [&](const std::vector<AgentIndex>& odd, const std::vector<AgentIndex>& even) {
    Sequence seq;
    for (std::int64_t r = 0; r < k; ++r) seq.push_back(Allocation(2, r % 2 == 0 ? odd : even));
    return seq;
  };

  const Rational u2_l = value(1, L, false);
  const Rational u2_r = value(1, R, false);
  const Rational u2_lo = value(1, L, true);
  const Rational u2_ro = value(1, R, true);
  if (case_one) {
    if (u2_l >= u2_ro) return repeat(layout(R, 0));
    if (u2_r >= u2_lo) return repeat(layout(L, 0));
    if (u2_r <= u2_l) return alternate(layout(L, 1), layout(R, 0));
    return alternate(layout(L, 0), layout(L, 1));
  }
  if (u2_ro >= u2_l) return repeat(layout(L, 1));
  if (u2_lo >= u2_r) return repeat(layout(R, 1));
  if (u2_l >= u2_r) return alternate(layout(L, 0), layout(R, 1));
  return alternate(layout(L, 0), layout(L, 1));
}

}  // namespace repfair
