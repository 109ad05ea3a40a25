#include "repfair/variable_k.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "repfair/axioms.hpp"
#include "repfair/exactlp.hpp"

namespace repfair {

namespace {

// Items with u >= 0 from best to worst, and items with u < 0 from worst to best.
std::pair<std::vector<ItemIndex>, std::vector<ItemIndex>> goods_and_chores(const Instance& inst, AgentIndex i) {
  std::vector<ItemIndex> goods;
  std::vector<ItemIndex> chores;
  for (ItemIndex o = 0; o < inst.num_items(); ++o) {
    (inst.utility(i, o).sign() >= 0 ? goods : chores).push_back(o);
  }
  std::stable_sort(goods.begin(), goods.end(),
                   [&](ItemIndex a, ItemIndex b) { return inst.utility(i, a) > inst.utility(i, b); });
  std::stable_sort(chores.begin(), chores.end(),
                   [&](ItemIndex a, ItemIndex b) { return inst.utility(i, a) < inst.utility(i, b); });
  return {std::move(goods), std::move(chores)};
}

Rational set_value(const QuotaSet& s, std::size_t m, const std::vector<Rational>& flat) {
  Rational v;
  for (const auto& [i, o] : s.cells) v += flat[i * m + o];
  return v;
}

std::vector<Cell> sorted_cells(const QuotaSet& s) {
  auto c = s.cells;
  std::sort(c.begin(), c.end());
  return c;
}

Allocation allocation_of(std::size_t n, std::size_t m, const std::vector<Rational>& y) {
  std::vector<AgentIndex> owners(m, 0);
  for (AgentIndex i = 0; i < n; ++i) {
    for (ItemIndex o = 0; o < m; ++o) {
      if (y[i * m + o] == Rational(1)) owners[o] = i;
    }
  }
  return Allocation(n, std::move(owners));
}

}  // namespace

FractionalAllocation fractional_po_ef_two(const Instance& inst) {
  if (inst.num_agents() != 2) throw PreconditionError("the fractional finder handles exactly 2 agents");
  const std::size_t m = inst.num_items();
  // Agent 1's share of each item; agent 2 holds the rest.
  std::vector<Rational> share(m);
  std::vector<ItemIndex> movable;
  for (ItemIndex o = 0; o < m; ++o) {
    const int s1 = inst.utility(0, o).sign();
    const int s2 = inst.utility(1, o).sign();
    if (s1 > 0 && s2 > 0) {
      movable.push_back(o);
    } else if (s1 < 0 && s2 < 0) {
      share[o] = 1;
      movable.push_back(o);
    } else if ((s2 > 0 && s1 <= 0) || (s2 >= 0 && s1 < 0)) {
      share[o] = 0;
    } else {
      share[o] = 1;  // forced to agent 1, or null
    }
  }
  // Descending u_1/u_2: goods agent 1 values most relatively come first, chores it minds least too.
  std::stable_sort(movable.begin(), movable.end(), [&](ItemIndex a, ItemIndex b) {
    return inst.utility(0, a) / inst.utility(1, a) > inst.utility(0, b) / inst.utility(1, b);
  });

  const Rational target1 = inst.total_utility(0) / Rational(2);
  const Rational target2 = inst.total_utility(1) / Rational(2);
  Rational f1;
  Rational f2;
  for (ItemIndex o = 0; o < m; ++o) {
    f1 += share[o] * inst.utility(0, o);
    f2 += (Rational(1) - share[o]) * inst.utility(1, o);
  }
  bool reached = f1 >= target1;
  for (std::size_t t = 0; t < movable.size() && !reached; ++t) {
    const ItemIndex o = movable[t];
    const bool good = inst.utility(0, o).sign() > 0;
    const Rational gain = inst.utility(0, o).abs();
    const Rational loss = inst.utility(1, o).abs();
    if (f1 + gain >= target1 && f2 - loss < target2) {
      const Rational alpha = (target1 - f1) / gain;
      share[o] = good ? alpha : Rational(1) - alpha;
    } else {
      share[o] = good ? 1 : 0;
    }
    f1 += gain;
    f2 -= loss;
    reached = f1 >= target1;
  }
  if (!reached) throw std::logic_error("frontier walk never met agent 1's proportional share");

  std::vector<Rational> flat(share);
  for (ItemIndex o = 0; o < m; ++o) flat.push_back(Rational(1) - share[o]);
  FractionalAllocation x(2, m, std::move(flat));
  if (const auto v = check_ef_fractional(inst, x); !v.holds) {
    throw std::logic_error("fractional finder produced an envious allocation: " + describe(inst, v));
  }
  if (const auto v = check_po_fractional(inst, x); !v.holds) {
    throw std::logic_error("fractional finder produced a dominated allocation: " + describe(inst, v));
  }
  return x;
}

bool LaminarConstraintSet::is_laminar() const {
  std::vector<std::vector<Cell>> sorted;
  for (const auto& s : sets) sorted.push_back(sorted_cells(s));
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const auto& A = sorted[a];
      const auto& B = sorted[b];
      if (std::includes(A.begin(), A.end(), B.begin(), B.end())) continue;
      if (std::includes(B.begin(), B.end(), A.begin(), A.end())) continue;
      std::vector<Cell> common;
      std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(common));
      if (!common.empty()) return false;
    }
  }
  return true;
}

std::optional<std::size_t> LaminarConstraintSet::first_violation(const Allocation& alloc) const {
  for (std::size_t s = 0; s < sets.size(); ++s) {
    std::int64_t c = 0;
    for (const auto& [i, o] : sets[s].cells) c += alloc.owner(o) == i ? 1 : 0;
    if (c < sets[s].floor || c > sets[s].ceiling) return s;
  }
  return std::nullopt;
}

bool LaminarConstraintSet::admits(const FractionalAllocation& x) const {
  if (x.num_agents() != num_agents || x.num_items() != num_items) return false;
  return std::all_of(sets.begin(), sets.end(), [&](const QuotaSet& s) {
    const Rational v = set_value(s, num_items, x.flat());
    return Rational(s.floor) <= v && v <= Rational(s.ceiling);
  });
}

LaminarConstraintSet build_laminar_constraints(const Instance& inst, const FractionalAllocation& x) {
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_items();
  if (x.num_agents() != n || x.num_items() != m) throw PreconditionError("fractional allocation does not match the instance");
  LaminarConstraintSet h{n, m, {}};
  auto add = [&](QuotaSet::Kind kind, AgentIndex i, std::vector<Cell> cells) {
    QuotaSet s{kind, i, std::move(cells), 0, 0};
    const Rational v = set_value(s, m, x.flat());
    s.floor = v.floor().to_int64();
    s.ceiling = v.ceil().to_int64();
    h.sets.push_back(std::move(s));
  };
  for (AgentIndex i = 0; i < n; ++i) {
    for (ItemIndex o = 0; o < m; ++o) add(QuotaSet::Kind::Singleton, i, {{i, o}});
  }
  for (AgentIndex i = 0; i < n; ++i) {
    const auto [goods, chores] = goods_and_chores(inst, i);
    std::vector<Cell> prefix;
    for (const ItemIndex g : goods) {
      prefix.emplace_back(i, g);
      add(QuotaSet::Kind::GoodPrefix, i, prefix);
    }
    prefix.clear();
    for (const ItemIndex c : chores) {
      prefix.emplace_back(i, c);
      add(QuotaSet::Kind::ChorePrefix, i, prefix);
    }
  }
  if (!h.is_laminar()) throw std::logic_error("prefix family is not laminar");
  return h;
}

void RandomizedAllocation::validate() const {
  if (support.empty()) throw PreconditionError("randomized allocation has an empty support");
  Rational total;
  for (const auto& [p, a] : support) {
    if (p <= Rational(0)) throw PreconditionError("support probability " + p.str() + " is not positive");
    if (a.num_agents() != support[0].second.num_agents() || a.num_items() != support[0].second.num_items()) {
      throw PreconditionError("support allocations differ in shape");
    }
    total += p;
  }
  if (total != Rational(1)) throw PreconditionError("support probabilities sum to " + total.str() + ", not 1");
}

FractionalAllocation RandomizedAllocation::implemented() const {
  validate();
  const std::size_t n = support[0].second.num_agents();
  const std::size_t m = support[0].second.num_items();
  std::vector<Rational> flat(n * m);
  for (const auto& [p, a] : support) {
    for (ItemIndex o = 0; o < m; ++o) flat[a.owner(o) * m + o] += p;
  }
  return FractionalAllocation(n, m, std::move(flat));
}

// Caratheodory peeling over {0 <= y <= 1, unit columns, quotas}. The constraint matrix (two laminar
// families) is totally unimodular, so an optimal basic solution of the face through the current point
// is an integral allocation; step away from it as far as the polytope allows and repeat.
RandomizedAllocation decompose(const FractionalAllocation& x, const LaminarConstraintSet& quotas) {
  if (!quotas.admits(x)) throw PreconditionError("fractional allocation violates the quota constraints");
  const std::size_t n = x.num_agents();
  const std::size_t m = x.num_items();
  const std::size_t vars = n * m;
  const std::size_t cap = quotas.sets.size() + vars + m + 1;

  std::vector<std::vector<std::size_t>> set_vars;
  for (const auto& s : quotas.sets) {
    std::vector<std::size_t> v;
    for (const auto& [i, o] : s.cells) v.push_back(i * m + o);
    set_vars.push_back(std::move(v));
  }
  auto sum_over = [](const std::vector<std::size_t>& idx, const std::vector<Rational>& p) {
    Rational s;
    for (const auto v : idx) s += p[v];
    return s;
  };

  RandomizedAllocation ra;
  std::vector<Rational> cur = x.flat();
  Rational mass = 1;
  for (;;) {
    if (std::all_of(cur.begin(), cur.end(), [](const Rational& q) { return q.is_integer(); })) {
      ra.support.emplace_back(mass, allocation_of(n, m, cur));
      break;
    }
    if (ra.support.size() + 1 >= cap) throw std::logic_error("decomposition exceeded its support cap");

    LinearProgram lp(vars, Sense::Maximize);
    lp.objective = cur;
    for (std::size_t v = 0; v < vars; ++v) {
      lp.bounds[v] = cur[v].is_integer() ? VariableBounds{cur[v], cur[v]} : VariableBounds{Rational(0), Rational(1)};
    }
    for (ItemIndex o = 0; o < m; ++o) {
      std::vector<Rational> row(vars);
      for (AgentIndex i = 0; i < n; ++i) row[i * m + o] = 1;
      lp.add_constraint(std::move(row), Relation::Equal, 1);
    }
    for (std::size_t s = 0; s < quotas.sets.size(); ++s) {
      if (set_vars[s].size() < 2) continue;  // singletons are variable bounds
      std::vector<Rational> row(vars);
      for (const auto v : set_vars[s]) row[v] = 1;
      const Rational val = sum_over(set_vars[s], cur);
      if (val.is_integer()) {
        lp.add_constraint(std::move(row), Relation::Equal, val);
      } else {
        lp.add_constraint(row, Relation::GreaterEqual, quotas.sets[s].floor);
        lp.add_constraint(std::move(row), Relation::LessEqual, quotas.sets[s].ceiling);
      }
    }
    const LpOutcome out = solve_lp(lp);
    if (out.status != LpStatus::Optimal) throw std::logic_error("no integral point on the current face");
    const std::vector<Rational>& y = out.solution;
    if (!std::all_of(y.begin(), y.end(), [](const Rational& q) { return q.is_integer(); })) {
      throw std::logic_error("face vertex is not integral");
    }

    // Largest lambda with (cur - lambda*y)/(1 - lambda) still feasible.
    Rational lambda = 1;
    auto limit = [&](const Rational& at_x, const Rational& at_y, const Rational& lo, const Rational& hi) {
      if (at_y > lo) lambda = std::min(lambda, (at_x - lo) / (at_y - lo));
      if (at_y < hi) lambda = std::min(lambda, (hi - at_x) / (hi - at_y));
    };
    for (std::size_t v = 0; v < vars; ++v) limit(cur[v], y[v], 0, 1);
    for (std::size_t s = 0; s < quotas.sets.size(); ++s) {
      limit(sum_over(set_vars[s], cur), sum_over(set_vars[s], y), quotas.sets[s].floor, quotas.sets[s].ceiling);
    }
    if (lambda <= Rational(0) || lambda >= Rational(1)) throw std::logic_error("degenerate decomposition step");
    ra.support.emplace_back(mass * lambda, allocation_of(n, m, y));
    for (std::size_t v = 0; v < vars; ++v) cur[v] = (cur[v] - lambda * y[v]) / (Rational(1) - lambda);
    mass *= Rational(1) - lambda;
  }

  RandomizedAllocation merged;
  for (auto& [p, a] : ra.support) {
    auto it = std::find_if(merged.support.begin(), merged.support.end(),
                           [&](const auto& e) { return e.second == a; });
    if (it == merged.support.end()) {
      merged.support.emplace_back(p, std::move(a));
    } else {
      it->first += p;
    }
  }
  if (merged.implemented() != x) throw std::logic_error("decomposition does not implement x");
  for (const auto& [p, a] : merged.support) {
    if (quotas.first_violation(a)) throw std::logic_error("support allocation breaks a quota");
  }
  return merged;
}

AxiomVerdict verify_prop11_support(const Instance& inst, const RandomizedAllocation& ra) {
  const FractionalAllocation x = ra.implemented();
  if (x.num_agents() != inst.num_agents() || x.num_items() != inst.num_items()) {
    throw PreconditionError("randomized allocation does not match the instance");
  }
  for (std::size_t t = 0; t < ra.support.size(); ++t) {
    const Allocation& a = ra.support[t].second;
    if (const auto v = check_prop11(inst, a); !v.holds) {
      AgentIndex who = 0;
      if (v.witness) {
        if (const auto* w = std::get_if<ShortfallWitness>(&*v.witness)) who = w->agent;
      }
      return AxiomVerdict::fail(SupportWitness{t, who, "not PROP[1,1]"});
    }
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
      const auto [goods, chores] = goods_and_chores(inst, i);
      Rational upper_goods;  // U+
      Rational held_goods;
      for (const ItemIndex g : goods) {
        upper_goods += x.share(i, g) * inst.utility(i, g);
        if (a.owner(g) == i) held_goods += inst.utility(i, g);
      }
      if (held_goods < upper_goods) {
        const auto it = std::find_if(goods.begin(), goods.end(), [&](ItemIndex g) {
          return x.share(i, g) > Rational(0) && a.owner(g) != i;
        });
        if (it == goods.end() || upper_goods - held_goods > inst.utility(i, *it)) {
          return AxiomVerdict::fail(SupportWitness{t, i, "missing-good bound fails"});
        }
      }
      Rational lower_chores;  // U-
      Rational held_chores;
      for (const ItemIndex c : chores) {
        lower_chores += x.share(i, c) * inst.utility(i, c);
        if (a.owner(c) == i) held_chores += inst.utility(i, c);
      }
      if (held_chores < lower_chores) {
        const auto it = std::find_if(chores.begin(), chores.end(), [&](ItemIndex c) {
          return x.share(i, c) > Rational(0) && a.owner(c) == i;
        });
        if (it == chores.end() || held_chores - inst.utility(i, *it) < lower_chores) {
          return AxiomVerdict::fail(SupportWitness{t, i, "excess-chore bound fails"});
        }
      }
    }
  }
  return AxiomVerdict::ok();
}

RepeatedTranslation repeated_translation(const RandomizedAllocation& ra) {
  ra.validate();
  mpz_class l = 1;
  for (const auto& [p, a] : ra.support) {
    const mpz_class d = p.denominator();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  if (!l.fits_slong_p()) throw std::overflow_error("round count does not fit in 64 bits");
  RepeatedTranslation out;
  out.k = l.get_si();
  for (const auto& [p, a] : ra.support) {
    const std::int64_t times = (p * Rational(out.k)).to_int64();
    for (std::int64_t r = 0; r < times; ++r) out.sequence.push_back(a);
  }
  return out;
}

VariableKSolution solve_variable_k(const Instance& inst, const std::optional<FractionalAllocation>& x) {
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_items();
  std::optional<FractionalAllocation> frac;
  if (x) {
    if (x->num_agents() != n || x->num_items() != m) {
      throw PreconditionError("fractional allocation does not match the instance");
    }
    if (const auto v = check_ef_fractional(inst, *x); !v.holds) {
      throw PreconditionError("supplied fractional allocation is not envy-free: " + describe(inst, v));
    }
    if (const auto v = check_po_fractional(inst, *x); !v.holds) {
      throw PreconditionError("supplied fractional allocation is not Pareto-optimal: " + describe(inst, v));
    }
    frac = *x;
  } else if (n == 1) {
    frac = FractionalAllocation(1, m, std::vector<Rational>(m, Rational(1)));
  } else if (n == 2) {
    frac = fractional_po_ef_two(inst);
  } else {
    throw PreconditionError("no fractional EF + PO finder for n=" + std::to_string(n) +
                            "; supply a fractional allocation");
  }
  const LaminarConstraintSet quotas = build_laminar_constraints(inst, *frac);
  RandomizedAllocation lottery = decompose(*frac, quotas);
  RepeatedTranslation tr = repeated_translation(lottery);
  return {std::move(*frac), std::move(lottery), tr.k, std::move(tr.sequence)};
}

}  // namespace repfair
