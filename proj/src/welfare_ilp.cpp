#include "repfair/welfare_ilp.hpp"

#include <algorithm>
#include <numeric>

#include "repfair/exactlp.hpp"

namespace repfair {

namespace {

struct Var {
  AgentIndex agent;
  ItemIndex item;
};

// Partial count matrix: for every item the agents below free_from[item] are fixed.
struct Node {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> remaining;
  std::vector<AgentIndex> free_from;
};

struct Bound {
  bool feasible = false;
  Rational value;  // upper bound on total welfare in the subtree
  std::optional<std::vector<std::int64_t>> integral_completion;
};

class WelfareSearch {
 public:
  WelfareSearch(const Instance& inst, const WelfareQuery& q, BudgetMeter& meter)
      : inst_(inst), q_(q), meter_(meter), n_(inst.num_agents()), m_(inst.num_items()) {
    if (q.rounds < 1) throw PreconditionError("k must be positive");
    if (q.floors.size() != n_) throw PreconditionError("one floor slot per agent expected");
  }

  std::optional<CountMatrix> run() {
    Node root = root_node();

    // Phase 1: optimal welfare by branch-and-bound.
    std::vector<ItemIndex> items;
    for (ItemIndex o = 0; o < m_; ++o) {
      if (root.free_from[o] < n_) items.push_back(o);
    }
    std::stable_sort(items.begin(), items.end(), [&](ItemIndex a, ItemIndex b) {
      return max_abs(a) > max_abs(b);
    });
    std::vector<Var> order;
    for (const ItemIndex o : items) {
      for (AgentIndex a = 0; a + 1 < n_; ++a) order.push_back({a, o});
    }
    best_ = q_.exceed;
    found_ = false;
    Node n1 = root;
    maximize(n1, order, 0);
    if (!found_) return std::nullopt;

    // Phase 2: lexicographically smallest matrix reaching the optimum.
    target_ = *best_;
    std::vector<Var> lex;
    for (AgentIndex a = 0; a + 1 < n_; ++a) {
      for (const ItemIndex o : [&] {
             std::vector<ItemIndex> sorted = items;
             std::sort(sorted.begin(), sorted.end());
             return sorted;
           }()) {
        lex.push_back({a, o});
      }
    }
    Node n2 = root;
    std::optional<CountMatrix> result = lex_first(n2, lex, 0);
    if (!result) throw std::logic_error("welfare search lost its optimum in the lex phase");
    return result;
  }

 private:
  Rational max_abs(ItemIndex o) const {
    Rational best;
    for (AgentIndex a = 0; a < n_; ++a) best = std::max(best, inst_.utility(a, o).abs());
    return best;
  }

  Node root_node() const {
    Node node{std::vector<std::int64_t>(n_ * m_, 0), std::vector<std::int64_t>(m_, q_.rounds),
              std::vector<AgentIndex>(m_, 0)};
    for (ItemIndex o = 0; o < m_; ++o) {
      if (n_ == 1 || classify_item(inst_, o) == ItemClass::ObjectiveNull) {
        node.counts[o] = q_.rounds;
        node.remaining[o] = 0;
        node.free_from[o] = n_;
      }
    }
    return node;
  }

  void set(Node& node, const Var& v, std::int64_t value) const {
    node.counts[v.agent * m_ + v.item] = value;
    node.remaining[v.item] -= value;
    node.free_from[v.item] = v.agent + 1;
    if (v.agent + 2 == n_) {
      node.counts[(n_ - 1) * m_ + v.item] = node.remaining[v.item];
      node.remaining[v.item] = 0;
      node.free_from[v.item] = n_;
    }
  }

  std::vector<Rational> assigned_utilities(const Node& node) const {
    std::vector<Rational> u(n_);
    for (AgentIndex a = 0; a < n_; ++a) {
      for (ItemIndex o = 0; o < m_; ++o) {
        if (const auto c = node.counts[a * m_ + o]; c != 0 && a < node.free_from[o]) {
          u[a] += inst_.utility(a, o) * Rational(c);
        }
      }
    }
    return u;
  }

  Bound bound(const Node& node) const {
    Bound b;
    const auto assigned = assigned_utilities(node);
    Rational fixed_welfare = std::accumulate(assigned.begin(), assigned.end(), Rational(0));

    // Cheap screens before the LP.
    Rational cheap = fixed_welfare;
    for (ItemIndex o = 0; o < m_; ++o) {
      if (node.remaining[o] == 0) continue;
      Rational best = inst_.utility(node.free_from[o], o);
      for (AgentIndex a = node.free_from[o] + 1; a < n_; ++a) best = std::max(best, inst_.utility(a, o));
      cheap += best * Rational(node.remaining[o]);
    }
    if (!admissible(cheap)) return b;
    for (AgentIndex a = 0; a < n_; ++a) {
      if (!q_.floors[a]) continue;
      Rational reach = assigned[a];
      for (ItemIndex o = 0; o < m_; ++o) {
        if (node.free_from[o] <= a && inst_.utility(a, o) > Rational(0)) {
          reach += inst_.utility(a, o) * Rational(node.remaining[o]);
        }
      }
      if (reach < *q_.floors[a]) return b;
    }

    std::vector<Var> vars;
    for (ItemIndex o = 0; o < m_; ++o) {
      if (node.remaining[o] == 0) continue;
      for (AgentIndex a = node.free_from[o]; a < n_; ++a) vars.push_back({a, o});
    }
    if (vars.empty()) {
      for (AgentIndex a = 0; a < n_; ++a) {
        if (q_.floors[a] && assigned[a] < *q_.floors[a]) return b;
      }
      b.feasible = true;
      b.value = fixed_welfare;
      b.integral_completion = node.counts;
      return b;
    }

    LinearProgram lp(vars.size(), Sense::Maximize);
    for (std::size_t j = 0; j < vars.size(); ++j) lp.objective[j] = inst_.utility(vars[j].agent, vars[j].item);
    for (ItemIndex o = 0; o < m_; ++o) {
      if (node.remaining[o] == 0) continue;
      std::vector<Rational> row(vars.size());
      for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].item == o) row[j] = Rational(1);
      }
      lp.add_constraint(std::move(row), Relation::Equal, Rational(node.remaining[o]));
    }
    for (AgentIndex a = 0; a < n_; ++a) {
      if (!q_.floors[a]) continue;
      std::vector<Rational> row(vars.size());
      bool any = false;
      for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].agent == a) {
          row[j] = inst_.utility(a, vars[j].item);
          any = any || !row[j].is_zero();
        }
      }
      if (!any) {
        if (assigned[a] < *q_.floors[a]) return b;
        continue;
      }
      lp.add_constraint(std::move(row), Relation::GreaterEqual, *q_.floors[a] - assigned[a]);
    }
    const LpOutcome res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return b;
    b.feasible = true;
    b.value = fixed_welfare + res.objective;
    if (std::all_of(res.solution.begin(), res.solution.end(),
                    [](const Rational& v) { return v.is_integer(); })) {
      auto counts = node.counts;
      for (std::size_t j = 0; j < vars.size(); ++j) {
        counts[vars[j].agent * m_ + vars[j].item] = res.solution[j].to_int64();
      }
      b.integral_completion = std::move(counts);
    }
    return b;
  }

  bool admissible(const Rational& upper) const {
    if (target_) return upper >= *target_;
    return !best_ || upper > *best_;
  }

  void maximize(Node& node, const std::vector<Var>& order, std::size_t depth) {
    meter_.tick();
    const Bound b = bound(node);
    if (!b.feasible || !admissible(b.value)) return;
    if (b.integral_completion) {
      best_ = b.value;
      found_ = true;
      return;
    }
    const Var& v = order.at(depth);
    for (std::int64_t value = node.remaining[v.item]; value >= 0; --value) {
      Node child = node;
      set(child, v, value);
      maximize(child, order, depth + 1);
    }
  }

  std::optional<CountMatrix> lex_first(Node& node, const std::vector<Var>& order, std::size_t depth) {
    meter_.tick();
    const Bound b = bound(node);
    if (!b.feasible || !admissible(b.value)) return std::nullopt;
    if (depth == order.size()) {
      // Every variable fixed: the bound is the exact welfare.
      return CountMatrix(n_, m_, q_.rounds, node.counts);
    }
    const Var& v = order[depth];
    for (std::int64_t value = 0; value <= node.remaining[v.item]; ++value) {
      Node child = node;
      set(child, v, value);
      if (auto r = lex_first(child, order, depth + 1)) return r;
    }
    return std::nullopt;
  }

  const Instance& inst_;
  const WelfareQuery& q_;
  BudgetMeter& meter_;
  std::size_t n_;
  std::size_t m_;
  std::optional<Rational> best_;
  std::optional<Rational> target_;
  bool found_ = false;
};

}  // namespace

std::optional<CountMatrix> max_welfare_counts(const Instance& inst, const WelfareQuery& query,
                                              BudgetMeter& meter) {
  return WelfareSearch(inst, query, meter).run();
}

}  // namespace repfair
