#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "repfair/core.hpp"
#include "repfair/verdict.hpp"

namespace repfair {

/// n = 2: an envy-free, fractionally Pareto-optimal allocation with at most one split item.
/// Walks the Pareto frontier (items ordered by u_1/u_2) and stops at the first point meeting
/// agent 1's proportional share, preferring a nearby integral point when agent 2 still meets its own.
FractionalAllocation fractional_po_ef_two(const Instance& inst);

using Cell = std::pair<AgentIndex, ItemIndex>;

struct QuotaSet {
  enum class Kind { Singleton, GoodPrefix, ChorePrefix };
  Kind kind = Kind::Singleton;
  AgentIndex agent = 0;
  std::vector<Cell> cells;
  std::int64_t floor = 0;
  std::int64_t ceiling = 0;
};

/// Laminar family of agent-item sets with integer lower and upper quotas.
struct LaminarConstraintSet {
  std::size_t num_agents = 0;
  std::size_t num_items = 0;
  std::vector<QuotaSet> sets;

  bool is_laminar() const;
  /// Index of the first set whose quota `alloc` breaks.
  std::optional<std::size_t> first_violation(const Allocation& alloc) const;
  bool admits(const FractionalAllocation& x) const;
};

/// Singletons, plus for each agent the prefixes of its goods (u >= 0, best first) and of its
/// chores (u < 0, worst first). Ties are broken by item index. Quotas are floor/ceil of x_S.
LaminarConstraintSet build_laminar_constraints(const Instance& inst, const FractionalAllocation& x);

struct RandomizedAllocation {
  std::vector<std::pair<Rational, Allocation>> support;

  /// Throws PreconditionError unless probabilities are positive, sum to 1, and dimensions agree.
  void validate() const;
  /// x_{i,o} = sum_t p_t [o in pi^t_i].
  FractionalAllocation implemented() const;
};

/// Lottery over quota-feasible integral allocations implementing x exactly.
RandomizedAllocation decompose(const FractionalAllocation& x, const LaminarConstraintSet& quotas);

/// Every support allocation is PROP[1,1], and the good/chore slack bounds used to prove it hold.
AxiomVerdict verify_prop11_support(const Instance& inst, const RandomizedAllocation& ra);

struct RepeatedTranslation {
  std::int64_t k = 0;
  Sequence sequence;
};

/// k = lcm of the probability denominators; allocation t is repeated p_t * k times, in support order.
RepeatedTranslation repeated_translation(const RandomizedAllocation& ra);

struct VariableKSolution {
  FractionalAllocation fraction;
  RandomizedAllocation lottery;
  std::int64_t k = 0;
  Sequence sequence;
};

/// Fractional EF + PO allocation (found for n = 2, otherwise supplied and certified), decomposed
/// and translated into a k-round sequence.
VariableKSolution solve_variable_k(const Instance& inst, const std::optional<FractionalAllocation>& x = std::nullopt);

}  // namespace repfair
