#include "repfair/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>

namespace repfair {

SearchBudget SearchBudget::from_environment() {
  SearchBudget budget;
  if (const char* env = std::getenv("REPFAIR_BUDGET_NODES"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long nodes = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || nodes == 0) {
      throw PreconditionError("REPFAIR_BUDGET_NODES must be a positive integer");
    }
    budget.max_nodes = nodes;
  }
  return budget;
}

BudgetMeter::BudgetMeter(const SearchBudget& budget)
    : budget_(budget), start_(std::chrono::steady_clock::now()) {
  if (budget.max_nodes == 0 || budget.max_seconds == 0) {
    throw PreconditionError("search budget limits must be positive");
  }
}

void BudgetMeter::tick() {
  if (++nodes_ > budget_.max_nodes) {
    throw BudgetExceeded("search exceeded node budget of " + std::to_string(budget_.max_nodes));
  }
  if ((nodes_ & 0x3ff) == 0) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed > std::chrono::seconds(budget_.max_seconds)) {
      throw BudgetExceeded("search exceeded time budget of " +
                           std::to_string(budget_.max_seconds) + " s");
    }
  }
}

std::string_view to_string(ItemClass c) {
  switch (c) {
    case ItemClass::ObjectiveGood: return "objective-good";
    case ItemClass::ObjectiveChore: return "objective-chore";
    case ItemClass::ObjectiveNull: return "objective-null";
    case ItemClass::Subjective: return "subjective";
  }
  return "?";
}

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw PreconditionError(std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

}  // namespace

Instance::Instance(std::vector<std::string> agents, std::vector<std::string> items,
                   std::vector<std::vector<Rational>> utilities)
    : agents_(std::move(agents)), items_(std::move(items)) {
  if (agents_.empty()) throw PreconditionError("an instance needs at least one agent");
  require_unique(agents_, "agent");
  require_unique(items_, "item");
  if (utilities.size() != agents_.size()) {
    throw PreconditionError("utility matrix has " + std::to_string(utilities.size()) +
                            " rows for " + std::to_string(agents_.size()) + " agents");
  }
  utilities_.reserve(agents_.size() * items_.size());
  for (auto& row : utilities) {
    if (row.size() != items_.size()) {
      throw PreconditionError("utility row has " + std::to_string(row.size()) +
                              " entries for " + std::to_string(items_.size()) + " items");
    }
    Rational total;
    for (auto& u : row) {
      total += u;
      utilities_.push_back(std::move(u));
    }
    totals_.push_back(std::move(total));
  }
}

Instance Instance::from_matrix(std::vector<std::vector<Rational>> utilities) {
  std::vector<std::string> agents;
  std::vector<std::string> items;
  for (std::size_t i = 0; i < utilities.size(); ++i) agents.push_back("a" + std::to_string(i + 1));
  const std::size_t m = utilities.empty() ? 0 : utilities.front().size();
  for (std::size_t o = 0; o < m; ++o) items.push_back("o" + std::to_string(o + 1));
  return Instance(std::move(agents), std::move(items), std::move(utilities));
}

AgentIndex Instance::agent_index(std::string_view id) const {
  const auto it = std::find(agents_.begin(), agents_.end(), id);
  if (it == agents_.end()) throw PreconditionError("unknown agent id '" + std::string(id) + "'");
  return static_cast<AgentIndex>(it - agents_.begin());
}

ItemIndex Instance::item_index(std::string_view id) const {
  const auto it = std::find(items_.begin(), items_.end(), id);
  if (it == items_.end()) throw PreconditionError("unknown item id '" + std::string(id) + "'");
  return static_cast<ItemIndex>(it - items_.begin());
}

Allocation::Allocation(std::size_t num_agents, std::vector<AgentIndex> owners)
    : num_agents_(num_agents), owners_(std::move(owners)) {
  if (num_agents_ == 0) throw PreconditionError("allocation over zero agents");
  for (const AgentIndex a : owners_) {
    if (a >= num_agents_) throw PreconditionError("allocation names an agent out of range");
  }
}

Allocation Allocation::from_bundles(const Instance& inst,
                                    const std::vector<std::vector<ItemIndex>>& bundles) {
  if (bundles.size() != inst.num_agents()) {
    throw PreconditionError("expected one bundle per agent");
  }
  constexpr AgentIndex unassigned = static_cast<AgentIndex>(-1);
  std::vector<AgentIndex> owners(inst.num_items(), unassigned);
  for (AgentIndex a = 0; a < bundles.size(); ++a) {
    for (const ItemIndex o : bundles[a]) {
      if (o >= inst.num_items()) throw PreconditionError("bundle names an item out of range");
      if (owners[o] != unassigned) {
        throw PreconditionError("item '" + inst.items()[o] + "' assigned more than once");
      }
      owners[o] = a;
    }
  }
  for (ItemIndex o = 0; o < owners.size(); ++o) {
    if (owners[o] == unassigned) {
      throw PreconditionError("allocation is not exhaustive: item '" + inst.items()[o] +
                              "' unassigned");
    }
  }
  return Allocation(inst.num_agents(), std::move(owners));
}

std::vector<ItemIndex> Allocation::bundle(AgentIndex agent) const {
  std::vector<ItemIndex> items;
  for (ItemIndex o = 0; o < owners_.size(); ++o) {
    if (owners_[o] == agent) items.push_back(o);
  }
  return items;
}

void Allocation::assign(ItemIndex item, AgentIndex agent) {
  if (agent >= num_agents_) throw PreconditionError("agent out of range");
  owners_.at(item) = agent;
}

Sequence::Sequence(std::vector<Allocation> rounds) : rounds_(std::move(rounds)) {}

void Sequence::push_back(Allocation alloc) { rounds_.push_back(std::move(alloc)); }

void Sequence::validate(const Instance& inst) const {
  if (rounds_.empty()) throw PreconditionError("a sequence needs at least one round");
  for (const auto& round : rounds_) {
    if (round.num_agents() != inst.num_agents() || round.num_items() != inst.num_items()) {
      throw PreconditionError("sequence round does not match the instance dimensions");
    }
  }
}

CountMatrix::CountMatrix(std::size_t num_agents, std::size_t num_items, std::int64_t rounds,
                         std::vector<std::int64_t> counts)
    : num_agents_(num_agents), num_items_(num_items), rounds_(rounds), counts_(std::move(counts)) {
  if (counts_.size() != num_agents_ * num_items_) {
    throw PreconditionError("count matrix has the wrong number of entries");
  }
  if (rounds_ < 1) throw PreconditionError("count matrix needs k >= 1");
  for (ItemIndex o = 0; o < num_items_; ++o) {
    std::int64_t column = 0;
    for (AgentIndex a = 0; a < num_agents_; ++a) {
      const auto c = counts_[a * num_items_ + o];
      if (c < 0) throw PreconditionError("negative count in count matrix");
      column += c;
    }
    if (column != rounds_) {
      throw PreconditionError("count matrix column " + std::to_string(o) + " sums to " +
                              std::to_string(column) + ", expected k=" + std::to_string(rounds_));
    }
  }
}

CountMatrix CountMatrix::of(const Allocation& alloc) {
  std::vector<std::int64_t> counts(alloc.num_agents() * alloc.num_items(), 0);
  for (ItemIndex o = 0; o < alloc.num_items(); ++o) {
    counts[alloc.owner(o) * alloc.num_items() + o] = 1;
  }
  return CountMatrix(alloc.num_agents(), alloc.num_items(), 1, std::move(counts));
}

FractionalAllocation::FractionalAllocation(std::size_t num_agents, std::size_t num_items,
                                           std::vector<Rational> shares)
    : num_agents_(num_agents), num_items_(num_items), shares_(std::move(shares)) {
  if (num_agents_ == 0) throw PreconditionError("fractional allocation over zero agents");
  if (shares_.size() != num_agents_ * num_items_) {
    throw PreconditionError("fractional allocation has the wrong number of entries");
  }
  for (ItemIndex o = 0; o < num_items_; ++o) {
    Rational column;
    for (AgentIndex a = 0; a < num_agents_; ++a) {
      const Rational& x = shares_[a * num_items_ + o];
      if (x < Rational(0) || x > Rational(1)) {
        throw PreconditionError("fractional share " + x.str() + " outside [0,1]");
      }
      column += x;
    }
    if (column != Rational(1)) {
      throw PreconditionError("fractional column " + std::to_string(o) + " sums to " +
                              column.str() + ", expected 1");
    }
  }
}

FractionalAllocation FractionalAllocation::of(const CountMatrix& counts) {
  std::vector<Rational> shares;
  shares.reserve(counts.flat().size());
  for (const auto c : counts.flat()) shares.push_back(Rational(c, counts.rounds()));
  return FractionalAllocation(counts.num_agents(), counts.num_items(), std::move(shares));
}

bool FractionalAllocation::is_integral() const {
  return std::all_of(shares_.begin(), shares_.end(), [](const Rational& q) { return q.is_integer(); });
}

ItemClass classify_item(const Instance& inst, ItemIndex item) {
  if (item >= inst.num_items()) throw PreconditionError("item index out of range");
  bool all_pos = true;
  bool all_neg = true;
  bool all_zero = true;
  for (AgentIndex a = 0; a < inst.num_agents(); ++a) {
    const int s = inst.utility(a, item).sign();
    all_pos = all_pos && s > 0;
    all_neg = all_neg && s < 0;
    all_zero = all_zero && s == 0;
  }
  if (all_pos) return ItemClass::ObjectiveGood;
  if (all_neg) return ItemClass::ObjectiveChore;
  if (all_zero) return ItemClass::ObjectiveNull;
  return ItemClass::Subjective;
}

ItemClass classify_item(const Instance& inst, std::string_view item_id) {
  return classify_item(inst, inst.item_index(item_id));
}

Rational bundle_utility(const Instance& inst, AgentIndex agent, std::span<const ItemIndex> bundle) {
  if (agent >= inst.num_agents()) throw PreconditionError("agent index out of range");
  Rational total;
  for (const ItemIndex o : bundle) {
    if (o >= inst.num_items()) throw PreconditionError("item index out of range");
    total += inst.utility(agent, o);
  }
  return total;
}

Rational bundle_utility(const Instance& inst, std::string_view agent_id,
                        std::span<const std::string> bundle) {
  std::vector<ItemIndex> items;
  items.reserve(bundle.size());
  for (const auto& id : bundle) items.push_back(inst.item_index(id));
  return bundle_utility(inst, inst.agent_index(agent_id), items);
}

namespace {

void require_matching(const Instance& inst, const CountMatrix& counts) {
  if (counts.num_agents() != inst.num_agents() || counts.num_items() != inst.num_items()) {
    throw PreconditionError("count matrix dimensions do not match the instance");
  }
}

}  // namespace

Rational row_utility(const Instance& inst, AgentIndex viewer, const CountMatrix& counts,
                     AgentIndex holder) {
  require_matching(inst, counts);
  Rational total;
  for (ItemIndex o = 0; o < inst.num_items(); ++o) {
    if (const auto c = counts.count(holder, o); c != 0) total += inst.utility(viewer, o) * Rational(c);
  }
  return total;
}

std::vector<Rational> utility_vector(const Instance& inst, const CountMatrix& counts) {
  std::vector<Rational> out;
  out.reserve(inst.num_agents());
  for (AgentIndex a = 0; a < inst.num_agents(); ++a) out.push_back(row_utility(inst, a, counts, a));
  return out;
}

Rational welfare(const Instance& inst, const CountMatrix& counts) {
  const auto utils = utility_vector(inst, counts);
  return std::accumulate(utils.begin(), utils.end(), Rational(0));
}

Rational fractional_utility(const Instance& inst, AgentIndex viewer, const FractionalAllocation& x,
                            AgentIndex holder) {
  if (x.num_agents() != inst.num_agents() || x.num_items() != inst.num_items()) {
    throw PreconditionError("fractional allocation dimensions do not match the instance");
  }
  Rational total;
  for (ItemIndex o = 0; o < inst.num_items(); ++o) total += inst.utility(viewer, o) * x.share(holder, o);
  return total;
}

CountMatrix overall(const Sequence& seq) {
  if (seq.empty()) throw PreconditionError("a sequence needs at least one round");
  const std::size_t n = seq[0].num_agents();
  const std::size_t m = seq[0].num_items();
  std::vector<std::int64_t> counts(n * m, 0);
  for (const auto& round : seq) {
    if (round.num_agents() != n || round.num_items() != m) {
      throw PreconditionError("sequence rounds have inconsistent dimensions");
    }
    for (ItemIndex o = 0; o < m; ++o) ++counts[round.owner(o) * m + o];
  }
  return CountMatrix(n, m, static_cast<std::int64_t>(seq.size()), std::move(counts));
}

Sequence materialize(const CountMatrix& counts) {
  const std::size_t n = counts.num_agents();
  const std::size_t m = counts.num_items();
  std::vector<std::vector<AgentIndex>> owners(static_cast<std::size_t>(counts.rounds()),
                                              std::vector<AgentIndex>(m, 0));
  for (ItemIndex o = 0; o < m; ++o) {
    std::size_t r = 0;
    for (AgentIndex a = 0; a < n; ++a) {
      for (std::int64_t c = 0; c < counts.count(a, o); ++c) owners[r++][o] = a;
    }
  }
  Sequence seq;
  for (auto& row : owners) seq.push_back(Allocation(n, std::move(row)));
  return seq;
}

}  // namespace repfair
