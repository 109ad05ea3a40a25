#include "repfair/axioms.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "repfair/welfare_ilp.hpp"

namespace repfair {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require_alloc(const Instance& inst, const Allocation& alloc) {
  if (alloc.num_agents() != inst.num_agents() || alloc.num_items() != inst.num_items()) {
    throw PreconditionError("allocation dimensions do not match the instance");
  }
}

void require_counts(const Instance& inst, const CountMatrix& cm) {
  if (cm.num_agents() != inst.num_agents() || cm.num_items() != inst.num_items()) {
    throw PreconditionError("count matrix dimensions do not match the instance");
  }
}

Rational value_of(const Instance& inst, const Allocation& alloc, AgentIndex viewer, AgentIndex holder) {
  Rational v;
  for (ItemIndex o = 0; o < alloc.num_items(); ++o) {
    if (alloc.owner(o) == holder) v += inst.utility(viewer, o);
  }
  return v;
}

// Set semantics: adding an item the holder already has changes nothing.
Rational with_item(const Instance& inst, const Allocation& alloc, const Rational& base,
                   AgentIndex viewer, AgentIndex holder, ItemIndex o) {
  return alloc.owner(o) == holder ? base : base + inst.utility(viewer, o);
}

Rational without_item(const Instance& inst, const Allocation& alloc, const Rational& base,
                      AgentIndex viewer, AgentIndex holder, ItemIndex o) {
  return alloc.owner(o) == holder ? base - inst.utility(viewer, o) : base;
}

Rational proportional_share(const Instance& inst, AgentIndex i, std::int64_t rounds) {
  return inst.total_utility(i) * Rational(rounds, static_cast<long>(inst.num_agents()));
}

// PROP1 (one removal or one addition) or, with allow_both, PROP[1,1] (one of each).
bool prop_relaxed(const Instance& inst, const Allocation& alloc, AgentIndex i, bool allow_both,
                  Rational* value_out, Rational* share_out) {
  const Rational own = value_of(inst, alloc, i, i);
  const Rational share = proportional_share(inst, i, 1);
  *value_out = own;
  *share_out = share;
  if (own >= share) return true;
  std::vector<ItemIndex> inside;
  std::vector<ItemIndex> outside;
  for (ItemIndex o = 0; o < alloc.num_items(); ++o) {
    (alloc.owner(o) == i ? inside : outside).push_back(o);
  }
  for (const ItemIndex x : inside) {
    if (own - inst.utility(i, x) >= share) return true;
  }
  for (const ItemIndex y : outside) {
    if (own + inst.utility(i, y) >= share) return true;
  }
  if (allow_both) {
    for (const ItemIndex x : inside) {
      for (const ItemIndex y : outside) {
        if (own - inst.utility(i, x) + inst.utility(i, y) >= share) return true;
      }
    }
  }
  return false;
}

AxiomVerdict pairwise(const Instance& inst, const Allocation& alloc,
                      bool (*ok)(const Instance&, const Allocation&, AgentIndex, AgentIndex)) {
  require_alloc(inst, alloc);
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    for (AgentIndex j = 0; j < inst.num_agents(); ++j) {
      if (i == j || ok(inst, alloc, i, j)) continue;
      return AxiomVerdict::fail(
          EnvyWitness{i, j, value_of(inst, alloc, i, i), value_of(inst, alloc, i, j)});
    }
  }
  return AxiomVerdict::ok();
}

}  // namespace

Axiom parse_axiom(std::string_view name) {
  const std::string s = lower(name);
  if (s == "ef") return Axiom::EF;
  if (s == "ef1") return Axiom::EF1;
  if (s == "weak-ef1" || s == "wef1" || s == "weak_ef1") return Axiom::WeakEF1;
  if (s == "prop") return Axiom::PROP;
  if (s == "prop1") return Axiom::PROP1;
  if (s == "prop11" || s == "prop[1,1]" || s == "prop-1-1") return Axiom::PROP11;
  if (s == "po") return Axiom::PO;
  throw PreconditionError("unknown axiom '" + std::string(name) + "'");
}

std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::EF: return "ef";
    case Axiom::EF1: return "ef1";
    case Axiom::WeakEF1: return "weak-ef1";
    case Axiom::PROP: return "prop";
    case Axiom::PROP1: return "prop1";
    case Axiom::PROP11: return "prop11";
    case Axiom::PO: return "po";
  }
  return "?";
}

Scope parse_scope(std::string_view name) {
  const std::string s = lower(name);
  if (s == "per-round" || s == "perround" || s == "round") return Scope::PerRound;
  if (s == "overall") return Scope::Overall;
  throw PreconditionError("unknown scope '" + std::string(name) + "'");
}

std::string_view scope_name(Scope s) { return s == Scope::PerRound ? "per-round" : "overall"; }

bool envies(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j) {
  return value_of(inst, alloc, i, i) < value_of(inst, alloc, i, j);
}

bool ef1_for(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j) {
  const Rational own = value_of(inst, alloc, i, i);
  const Rational other = value_of(inst, alloc, i, j);
  if (own >= other) return true;
  for (ItemIndex o = 0; o < alloc.num_items(); ++o) {
    if (alloc.owner(o) != i && alloc.owner(o) != j) continue;
    if (without_item(inst, alloc, own, i, i, o) >= without_item(inst, alloc, other, i, j, o)) {
      return true;
    }
  }
  return false;
}

bool weak_ef1_for(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j) {
  const Rational own = value_of(inst, alloc, i, i);
  const Rational other = value_of(inst, alloc, i, j);
  if (own >= other) return true;
  for (ItemIndex o = 0; o < alloc.num_items(); ++o) {
    if (alloc.owner(o) != i && alloc.owner(o) != j) continue;
    if (with_item(inst, alloc, own, i, i, o) >= without_item(inst, alloc, other, i, j, o)) return true;
    if (without_item(inst, alloc, own, i, i, o) >= with_item(inst, alloc, other, i, j, o)) return true;
  }
  return false;
}

AxiomVerdict check_ef(const Instance& inst, const CountMatrix& cm) {
  require_counts(inst, cm);
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    const Rational own = row_utility(inst, i, cm, i);
    for (AgentIndex j = 0; j < inst.num_agents(); ++j) {
      if (i == j) continue;
      Rational other = row_utility(inst, i, cm, j);
      if (own < other) return AxiomVerdict::fail(EnvyWitness{i, j, own, std::move(other)});
    }
  }
  return AxiomVerdict::ok();
}

AxiomVerdict check_ef1(const Instance& inst, const Allocation& alloc) {
  return pairwise(inst, alloc, &ef1_for);
}

AxiomVerdict check_weak_ef1(const Instance& inst, const Allocation& alloc) {
  return pairwise(inst, alloc, &weak_ef1_for);
}

AxiomVerdict check_prop(const Instance& inst, const CountMatrix& cm) {
  require_counts(inst, cm);
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    Rational value = row_utility(inst, i, cm, i);
    Rational share = proportional_share(inst, i, cm.rounds());
    if (value < share) return AxiomVerdict::fail(ShortfallWitness{i, std::move(value), std::move(share)});
  }
  return AxiomVerdict::ok();
}

AxiomVerdict check_prop1(const Instance& inst, const Allocation& alloc) {
  require_alloc(inst, alloc);
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    Rational value;
    Rational share;
    if (!prop_relaxed(inst, alloc, i, false, &value, &share)) {
      return AxiomVerdict::fail(ShortfallWitness{i, std::move(value), std::move(share)});
    }
  }
  return AxiomVerdict::ok();
}

AxiomVerdict check_prop11(const Instance& inst, const Allocation& alloc) {
  require_alloc(inst, alloc);
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    Rational value;
    Rational share;
    if (!prop_relaxed(inst, alloc, i, true, &value, &share)) {
      return AxiomVerdict::fail(ShortfallWitness{i, std::move(value), std::move(share)});
    }
  }
  return AxiomVerdict::ok();
}

AxiomVerdict check_po_round(const Instance& inst, const Allocation& alloc, const SearchBudget& budget) {
  require_alloc(inst, alloc);
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_items();
  std::vector<Rational> base(n);
  for (AgentIndex i = 0; i < n; ++i) base[i] = value_of(inst, alloc, i, i);

  BudgetMeter meter(budget);
  std::vector<AgentIndex> owners(m, 0);
  std::optional<Allocation> best;
  Rational best_welfare;
  for (;;) {
    meter.tick();
    std::vector<Rational> u(n);
    for (ItemIndex o = 0; o < m; ++o) u[owners[o]] += inst.utility(owners[o], o);
    bool weakly = true;
    bool strictly = false;
    for (AgentIndex i = 0; i < n && weakly; ++i) {
      weakly = u[i] >= base[i];
      strictly = strictly || u[i] > base[i];
    }
    if (weakly && strictly) {
      Rational w;
      for (const auto& x : u) w += x;
      if (!best || w > best_welfare) {
        best = Allocation(n, owners);
        best_welfare = w;
      }
    }
    // Next owner vector, last item varying fastest.
    std::size_t pos = m;
    while (pos > 0 && owners[pos - 1] + 1 == n) owners[--pos] = 0;
    if (pos == 0) break;
    ++owners[pos - 1];
  }
  if (best) return AxiomVerdict::fail(DominatingAllocation{*best});
  return AxiomVerdict::ok();
}

AxiomVerdict check_po_overall(const Instance& inst, const CountMatrix& cm, const SearchBudget& budget) {
  require_counts(inst, cm);
  WelfareQuery q;
  q.rounds = cm.rounds();
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) q.floors.emplace_back(row_utility(inst, i, cm, i));
  q.exceed = welfare(inst, cm);
  BudgetMeter meter(budget);
  if (auto dominator = max_welfare_counts(inst, q, meter)) {
    return AxiomVerdict::fail(DominatingCounts{*dominator});
  }
  return AxiomVerdict::ok();
}

bool AxiomReport::holds() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const AxiomVerdict& v) { return v.holds; });
}

AxiomVerdict check_round(const Instance& inst, const Allocation& alloc, Axiom axiom,
                         const SearchBudget& budget) {
  switch (axiom) {
    case Axiom::EF: return check_ef(inst, CountMatrix::of(alloc));
    case Axiom::EF1: return check_ef1(inst, alloc);
    case Axiom::WeakEF1: return check_weak_ef1(inst, alloc);
    case Axiom::PROP: return check_prop(inst, CountMatrix::of(alloc));
    case Axiom::PROP1: return check_prop1(inst, alloc);
    case Axiom::PROP11: return check_prop11(inst, alloc);
    case Axiom::PO: return check_po_round(inst, alloc, budget);
  }
  throw std::logic_error("unhandled axiom");
}

AxiomVerdict check_overall(const Instance& inst, const CountMatrix& cm, Axiom axiom,
                           const SearchBudget& budget) {
  switch (axiom) {
    case Axiom::EF: return check_ef(inst, cm);
    case Axiom::PROP: return check_prop(inst, cm);
    case Axiom::PO: return check_po_overall(inst, cm, budget);
    case Axiom::EF1:
    case Axiom::WeakEF1:
    case Axiom::PROP1:
    case Axiom::PROP11:
      throw PreconditionError(std::string(axiom_name(axiom)) +
                              " is defined for single rounds only; use per-round scope");
  }
  throw std::logic_error("unhandled axiom");
}

std::vector<AxiomReport> evaluate(const Instance& inst, const Sequence& seq,
                                  const std::vector<Axiom>& axioms, Scope scope,
                                  const SearchBudget& budget) {
  seq.validate(inst);
  if (axioms.empty()) throw PreconditionError("no axioms requested");
  std::vector<AxiomReport> reports;
  for (const Axiom a : axioms) {
    AxiomReport report{a, scope, {}};
    if (scope == Scope::PerRound) {
      for (const auto& round : seq) report.verdicts.push_back(check_round(inst, round, a, budget));
    } else {
      report.verdicts.push_back(check_overall(inst, overall(seq), a, budget));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace repfair
