#include "repfair/solvers_general.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <string>

#include "repfair/welfare_ilp.hpp"

namespace repfair {

namespace {

void require_multiple_of_n(const Instance& inst, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(inst.num_agents());
  if (k < 1 || k % n != 0) {
    throw PreconditionError("k=" + std::to_string(k) + " must be a positive multiple of n=" +
                            std::to_string(n));
  }
}

bool single_round_only(Axiom a) {
  return a == Axiom::EF1 || a == Axiom::WeakEF1 || a == Axiom::PROP1 || a == Axiom::PROP11;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Sequence rotation_sequence(const Instance& inst, const Allocation& initial, std::int64_t k) {
  require_multiple_of_n(inst, k);
  if (initial.num_agents() != inst.num_agents() || initial.num_items() != inst.num_items()) {
    throw PreconditionError("initial allocation does not match the instance");
  }
  const std::size_t n = inst.num_agents();
  Sequence seq;
  for (std::int64_t r = 0; r < k; ++r) {
    std::vector<AgentIndex> owners(inst.num_items());
    for (ItemIndex o = 0; o < owners.size(); ++o) {
      // The holder j of o in round 1 passes it to agent j + r.
      owners[o] = (initial.owner(o) + static_cast<std::size_t>(r)) % n;
    }
    seq.push_back(Allocation(n, std::move(owners)));
  }
  return seq;
}

CountSolution solve_prop_po(const Instance& inst, std::int64_t k, const SearchBudget& budget) {
  require_multiple_of_n(inst, k);
  WelfareQuery q;
  q.rounds = k;
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    q.floors.emplace_back(inst.total_utility(i) * Rational(k, static_cast<long>(inst.num_agents())));
  }
  BudgetMeter meter(budget);
  auto counts = max_welfare_counts(inst, q, meter);
  if (!counts) throw std::logic_error("no proportional count matrix found although k is a multiple of n");
  Sequence seq = materialize(*counts);
  return {std::move(*counts), std::move(seq)};
}

Predicate::Predicate(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
  if (clauses_.empty()) throw PreconditionError("predicate needs at least one clause");
  for (const auto& c : clauses_) {
    if (c.scope == Scope::Overall && single_round_only(c.axiom)) {
      throw PreconditionError(std::string(axiom_name(c.axiom)) + " is defined for single rounds only");
    }
  }
}

Predicate Predicate::parse(std::string_view text) {
  std::vector<Clause> clauses;
  std::size_t start = 0;
  for (;;) {
    const auto amp = text.find('&', start);
    const auto part = trim(text.substr(start, amp == std::string_view::npos ? std::string_view::npos : amp - start));
    if (part.empty()) throw PreconditionError("empty clause in predicate '" + std::string(text) + "'");
    const auto colon = part.find(':');
    const Axiom a = parse_axiom(trim(part.substr(0, colon)));
    Scope s = single_round_only(a) ? Scope::PerRound : Scope::Overall;
    if (colon != std::string_view::npos) s = parse_scope(trim(part.substr(colon + 1)));
    clauses.push_back({a, s});
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  return Predicate(std::move(clauses));
}

std::string Predicate::str() const {
  std::string out;
  for (const auto& c : clauses_) {
    if (!out.empty()) out += " & ";
    out += std::string(axiom_name(c.axiom)) + ":" + std::string(scope_name(c.scope));
  }
  return out;
}

bool satisfies(const Instance& inst, const Sequence& seq, const Predicate& pred, const SearchBudget& budget) {
  seq.validate(inst);
  const CountMatrix cm = overall(seq);
  for (const auto& c : pred.clauses()) {
    if (c.scope == Scope::Overall) {
      if (!check_overall(inst, cm, c.axiom, budget).holds) return false;
    } else {
      for (const auto& round : seq) {
        if (!check_round(inst, round, c.axiom, budget).holds) return false;
      }
    }
  }
  return true;
}

ExhaustiveResult exhaustive_search(const Instance& inst, std::int64_t k, const Predicate& pred,
                                   const SearchBudget& budget, SearchMode mode) {
  if (k < 1) throw PreconditionError("k must be positive");
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_items();
  BudgetMeter meter(budget);

  std::vector<Clause> round_clauses;
  std::vector<Clause> overall_clauses;
  for (const auto& c : pred.clauses()) (c.scope == Scope::PerRound ? round_clauses : overall_clauses).push_back(c);
  // PO is the expensive overall test; run it last.
  std::stable_partition(overall_clauses.begin(), overall_clauses.end(),
                        [](const Clause& c) { return c.axiom != Axiom::PO; });

  // Single rounds passing every per-round clause, in owner-vector order.
  std::vector<Allocation> rounds;
  {
    std::vector<AgentIndex> owners(m, 0);
    for (;;) {
      meter.tick();
      Allocation a(n, owners);
      bool ok = true;
      for (const auto& c : round_clauses) {
        if (!check_round(inst, a, c.axiom, budget).holds) {
          ok = false;
          break;
        }
      }
      if (ok) rounds.push_back(std::move(a));
      std::size_t pos = m;
      while (pos > 0 && owners[pos - 1] + 1 == n) owners[--pos] = 0;
      if (pos == 0) break;
      ++owners[pos - 1];
    }
  }

  ExhaustiveResult result;
  std::map<std::vector<std::int64_t>, bool> po_memo;
  std::vector<std::int64_t> counts(n * m, 0);
  std::vector<std::size_t> chosen;
  std::optional<Rational> best_welfare;
  std::optional<std::vector<std::int64_t>> best_counts;

  auto leaf_ok = [&]() {
    const CountMatrix cm(n, m, k, counts);
    for (const auto& c : overall_clauses) {
      if (c.axiom == Axiom::PO) {
        auto it = po_memo.find(counts);
        if (it == po_memo.end()) {
          it = po_memo.emplace(counts, check_po_overall(inst, cm, budget).holds).first;
        }
        if (!it->second) return false;
      } else if (!check_overall(inst, cm, c.axiom, budget).holds) {
        return false;
      }
    }
    return true;
  };

  auto record = [&]() {
    Sequence seq;
    for (const auto idx : chosen) seq.push_back(rounds[idx]);
    result.sequence = std::move(seq);
    result.status = ExhaustiveResult::Status::Found;
  };

  // Multisets of k rounds as nondecreasing index tuples; returns true to stop.
  auto dfs = [&](auto&& self, std::size_t from) -> bool {
    meter.tick();
    if (chosen.size() == static_cast<std::size_t>(k)) {
      if (mode == SearchMode::MaxWelfare) {
        const CountMatrix cm(n, m, k, counts);
        const Rational w = welfare(inst, cm);
        if (best_welfare && (w < *best_welfare || (w == *best_welfare && counts >= *best_counts))) {
          return false;
        }
        if (!leaf_ok()) return false;
        best_welfare = w;
        best_counts = counts;
        record();
        return false;
      }
      if (!leaf_ok()) return false;
      record();
      return true;
    }
    for (std::size_t i = from; i < rounds.size(); ++i) {
      for (ItemIndex o = 0; o < m; ++o) ++counts[rounds[i].owner(o) * m + o];
      chosen.push_back(i);
      const bool stop = self(self, i);
      chosen.pop_back();
      for (ItemIndex o = 0; o < m; ++o) --counts[rounds[i].owner(o) * m + o];
      if (stop) return true;
    }
    return false;
  };
  dfs(dfs, 0);
  result.nodes = meter.nodes();
  return result;
}

}  // namespace repfair
