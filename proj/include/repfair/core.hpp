#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "repfair/rational.hpp"

namespace repfair {

using AgentIndex = std::size_t;
using ItemIndex = std::size_t;

/// An input violates an operation's precondition (wrong n, odd k, invalid sequence, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A search ran out of its node or time budget before reaching a verdict.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Limits for exhaustive and branch-and-bound searches.
struct SearchBudget {
  std::uint64_t max_nodes = 10'000'000;
  std::uint64_t max_seconds = 600;

  /// Default budget, with REPFAIR_BUDGET_NODES overriding the node limit.
  static SearchBudget from_environment();
};

/// Counts search nodes against a budget; throws BudgetExceeded on overrun.
class BudgetMeter {
 public:
  explicit BudgetMeter(const SearchBudget& budget);
  void tick();
  std::uint64_t nodes() const { return nodes_; }

 private:
  SearchBudget budget_;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

enum class ItemClass { ObjectiveGood, ObjectiveChore, ObjectiveNull, Subjective };

std::string_view to_string(ItemClass c);

/// Agents, items and the additive utility matrix u_i(o).
class Instance {
 public:
  Instance(std::vector<std::string> agents, std::vector<std::string> items,
           std::vector<std::vector<Rational>> utilities);

  /// Anonymous ids a1..an and o1..om.
  static Instance from_matrix(std::vector<std::vector<Rational>> utilities);

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_items() const { return items_.size(); }
  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<std::string>& items() const { return items_; }

  const Rational& utility(AgentIndex agent, ItemIndex item) const {
    return utilities_[agent * items_.size() + item];
  }
  /// u_i(I).
  const Rational& total_utility(AgentIndex agent) const { return totals_[agent]; }

  AgentIndex agent_index(std::string_view id) const;
  ItemIndex item_index(std::string_view id) const;

 private:
  std::vector<std::string> agents_;
  std::vector<std::string> items_;
  std::vector<Rational> utilities_;
  std::vector<Rational> totals_;
};

/// One exhaustive assignment of every item to exactly one agent.
class Allocation {
 public:
  Allocation(std::size_t num_agents, std::vector<AgentIndex> owners);

  static Allocation from_bundles(const Instance& inst,
                                 const std::vector<std::vector<ItemIndex>>& bundles);

  std::size_t num_agents() const { return num_agents_; }
  std::size_t num_items() const { return owners_.size(); }
  AgentIndex owner(ItemIndex item) const { return owners_.at(item); }
  const std::vector<AgentIndex>& owners() const { return owners_; }
  bool holds(AgentIndex agent, ItemIndex item) const { return owners_.at(item) == agent; }
  std::vector<ItemIndex> bundle(AgentIndex agent) const;

  void assign(ItemIndex item, AgentIndex agent);

  friend bool operator==(const Allocation&, const Allocation&) = default;
  friend auto operator<=>(const Allocation&, const Allocation&) = default;

 private:
  std::size_t num_agents_;
  std::vector<AgentIndex> owners_;
};

/// Ordered k-round allocation sequence over a fixed instance.
class Sequence {
 public:
  Sequence() = default;
  explicit Sequence(std::vector<Allocation> rounds);

  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  const Allocation& operator[](std::size_t r) const { return rounds_[r]; }
  Allocation& operator[](std::size_t r) { return rounds_[r]; }
  const std::vector<Allocation>& rounds() const { return rounds_; }
  auto begin() const { return rounds_.begin(); }
  auto end() const { return rounds_.end(); }
  void push_back(Allocation alloc);

  /// Throws PreconditionError unless non-empty and every round matches inst's dimensions.
  void validate(const Instance& inst) const;

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<Allocation> rounds_;
};

/// Per-agent item multiplicities; every column sums to the round count k.
class CountMatrix {
 public:
  CountMatrix(std::size_t num_agents, std::size_t num_items, std::int64_t rounds,
              std::vector<std::int64_t> counts);

  static CountMatrix of(const Allocation& alloc);

  std::size_t num_agents() const { return num_agents_; }
  std::size_t num_items() const { return num_items_; }
  std::int64_t rounds() const { return rounds_; }
  std::int64_t count(AgentIndex agent, ItemIndex item) const {
    return counts_[agent * num_items_ + item];
  }
  const std::vector<std::int64_t>& flat() const { return counts_; }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;
  friend auto operator<=>(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t num_agents_;
  std::size_t num_items_;
  std::int64_t rounds_;
  std::vector<std::int64_t> counts_;
};

/// Fractional division of every item: entries in [0,1], unit column sums.
class FractionalAllocation {
 public:
  /// Throws PreconditionError when x is not a feasible fractional allocation.
  FractionalAllocation(std::size_t num_agents, std::size_t num_items, std::vector<Rational> shares);

  static FractionalAllocation of(const CountMatrix& counts);

  std::size_t num_agents() const { return num_agents_; }
  std::size_t num_items() const { return num_items_; }
  const Rational& share(AgentIndex agent, ItemIndex item) const {
    return shares_[agent * num_items_ + item];
  }
  const std::vector<Rational>& flat() const { return shares_; }
  bool is_integral() const;

  friend bool operator==(const FractionalAllocation&, const FractionalAllocation&) = default;

 private:
  std::size_t num_agents_;
  std::size_t num_items_;
  std::vector<Rational> shares_;
};

ItemClass classify_item(const Instance& inst, ItemIndex item);
ItemClass classify_item(const Instance& inst, std::string_view item_id);

/// Additive value of a multiset of items (repeated indices count as copies).
Rational bundle_utility(const Instance& inst, AgentIndex agent, std::span<const ItemIndex> bundle);
Rational bundle_utility(const Instance& inst, std::string_view agent_id,
                        std::span<const std::string> bundle);

/// Value that `viewer` assigns to the overall bundle held by `holder`.
Rational row_utility(const Instance& inst, AgentIndex viewer, const CountMatrix& counts,
                     AgentIndex holder);
/// u_i(row i) for every agent.
std::vector<Rational> utility_vector(const Instance& inst, const CountMatrix& counts);
Rational welfare(const Instance& inst, const CountMatrix& counts);

Rational fractional_utility(const Instance& inst, AgentIndex viewer, const FractionalAllocation& x,
                            AgentIndex holder);

/// The overall allocation pi^{cup k}.
CountMatrix overall(const Sequence& seq);

/// Fills rounds item by item, handing consecutive rounds to agents in index order.
Sequence materialize(const CountMatrix& counts);

}  // namespace repfair
