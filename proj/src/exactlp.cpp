#include "repfair/exactlp.hpp"

#include <string>

namespace repfair {

LinearProgram::LinearProgram(std::size_t num_variables, Sense s)
    : sense(s), objective(num_variables), bounds(num_variables) {}

void LinearProgram::add_constraint(std::vector<Rational> coefficients, Relation relation,
                                   Rational rhs) {
  constraints.push_back({std::move(coefficients), relation, std::move(rhs)});
}

void LinearProgram::validate() const {
  if (bounds.size() != objective.size()) throw PreconditionError("LP bounds size mismatch");
  for (const auto& row : constraints) {
    if (row.coefficients.size() != objective.size()) {
      throw PreconditionError("LP constraint has " + std::to_string(row.coefficients.size()) +
                              " coefficients for " + std::to_string(objective.size()) +
                              " variables");
    }
  }
  for (const auto& b : bounds) {
    if (b.lower && b.upper && *b.lower > *b.upper) throw PreconditionError("LP bounds crossed");
  }
}

bool LinearProgram::is_feasible_point(const std::vector<Rational>& point) const {
  if (point.size() != objective.size()) return false;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (bounds[j].lower && point[j] < *bounds[j].lower) return false;
    if (bounds[j].upper && point[j] > *bounds[j].upper) return false;
  }
  for (const auto& row : constraints) {
    Rational lhs;
    for (std::size_t j = 0; j < point.size(); ++j) {
      if (!row.coefficients[j].is_zero()) lhs += row.coefficients[j] * point[j];
    }
    switch (row.relation) {
      case Relation::LessEqual:
        if (lhs > row.rhs) return false;
        break;
      case Relation::Equal:
        if (lhs != row.rhs) return false;
        break;
      case Relation::GreaterEqual:
        if (lhs < row.rhs) return false;
        break;
    }
  }
  return true;
}

Rational LinearProgram::objective_value(const std::vector<Rational>& point) const {
  Rational z;
  for (std::size_t j = 0; j < objective.size(); ++j) z += objective[j] * point[j];
  return z;
}

namespace {

// x = offset + sign * x'   (Shift: +1, Mirror: -1), or x = x+ - x- (Split).
enum class Transform { Shift, Mirror, Split };

struct ColumnMap {
  Transform kind;
  Rational offset;
  std::size_t column;  // x' or x+; x- is column + 1
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cols_(cols), t_(rows, std::vector<Rational>(cols + 1)), obj_(cols + 1),
        basis_(rows), allowed_(cols, true) {}

  Rational& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  Rational& rhs(std::size_t i) { return t_[i][cols_]; }
  std::size_t rows() const { return t_.size(); }
  std::size_t& basic(std::size_t i) { return basis_[i]; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  std::vector<Rational>& objective_row() { return obj_; }
  void forbid(std::size_t j) { allowed_[j] = false; }

  void pivot(std::size_t p, std::size_t q) {
    ++pivots;
    auto& prow = t_[p];
    const Rational pv = prow[q];
    if (pv != Rational(1)) {
      for (auto& e : prow) {
        if (!e.is_zero()) e /= pv;
      }
    }
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (!prow[j].is_zero()) nz.push_back(j);
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[q].is_zero()) return;
      const Rational f = row[q];
      for (const std::size_t j : nz) row[j].sub_mul(f, prow[j]);
    };
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i != p) eliminate(t_[i]);
    }
    eliminate(obj_);
    basis_[p] = q;
  }

  /// Maximizes the objective row; false when unbounded.
  bool optimize() {
    for (;;) {
      std::size_t q = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed_[j] && obj_[j] > Rational(0)) {
          q = j;
          break;
        }
      }
      if (q == cols_) return true;
      std::size_t p = t_.size();
      Rational best;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i][q] <= Rational(0)) continue;
        Rational ratio = t_[i][cols_] / t_[i][q];
        if (p == t_.size() || ratio < best || (ratio == best && basis_[i] < basis_[p])) {
          p = i;
          best = std::move(ratio);
        }
      }
      if (p == t_.size()) return false;
      pivot(p, q);
    }
  }

  void drop_row(std::size_t i) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
  }

  std::size_t pivots = 0;

 private:
  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> obj_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_variables();

  std::vector<ColumnMap> maps;
  std::size_t structural = 0;
  for (const auto& b : lp.bounds) {
    if (b.lower) {
      maps.push_back({Transform::Shift, *b.lower, structural++});
    } else if (b.upper) {
      maps.push_back({Transform::Mirror, *b.upper, structural++});
    } else {
      maps.push_back({Transform::Split, Rational(0), structural});
      structural += 2;
    }
  }

  struct Row {
    std::vector<Rational> coeffs;  // over structural columns
    Relation relation;
    Rational rhs;
  };
  std::vector<Row> rows;
  auto translate = [&](const std::vector<Rational>& coeffs, Relation rel, Rational rhs) {
    Row row{std::vector<Rational>(structural), rel, std::move(rhs)};
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& a = coeffs[j];
      if (a.is_zero()) continue;
      const auto& m = maps[j];
      switch (m.kind) {
        case Transform::Shift:
          row.coeffs[m.column] += a;
          row.rhs.sub_mul(a, m.offset);
          break;
        case Transform::Mirror:
          row.coeffs[m.column] -= a;
          row.rhs.sub_mul(a, m.offset);
          break;
        case Transform::Split:
          row.coeffs[m.column] += a;
          row.coeffs[m.column + 1] -= a;
          break;
      }
    }
    if (row.rhs < Rational(0)) {
      for (auto& c : row.coeffs) c = -c;
      row.rhs = -row.rhs;
      if (row.relation == Relation::LessEqual) {
        row.relation = Relation::GreaterEqual;
      } else if (row.relation == Relation::GreaterEqual) {
        row.relation = Relation::LessEqual;
      }
    }
    rows.push_back(std::move(row));
  };
  for (const auto& c : lp.constraints) translate(c.coefficients, c.relation, c.rhs);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& b = lp.bounds[j];
    if (b.lower && b.upper) {
      std::vector<Rational> unit(n);
      unit[j] = Rational(1);
      translate(unit, Relation::LessEqual, *b.upper);
    }
  }

  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& r : rows) {
    if (r.relation != Relation::Equal) ++slack_count;
    if (r.relation != Relation::LessEqual) ++artificial_count;
  }
  const std::size_t first_artificial = structural + slack_count;
  const std::size_t cols = first_artificial + artificial_count;
  Tableau tab(rows.size(), cols);

  std::size_t next_slack = structural;
  std::size_t next_art = first_artificial;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < structural; ++j) tab.at(i, j) = rows[i].coeffs[j];
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::LessEqual:
        tab.at(i, next_slack) = Rational(1);
        tab.basic(i) = next_slack++;
        break;
      case Relation::GreaterEqual:
        tab.at(i, next_slack++) = Rational(-1);
        tab.at(i, next_art) = Rational(1);
        tab.basic(i) = next_art++;
        break;
      case Relation::Equal:
        tab.at(i, next_art) = Rational(1);
        tab.basic(i) = next_art++;
        break;
    }
  }

  LpOutcome out;
  auto& obj = tab.objective_row();
  if (artificial_count > 0) {
    // Phase 1: maximize -(sum of artificials).
    for (std::size_t j = first_artificial; j < cols; ++j) obj[j] = Rational(-1);
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      if (tab.basic(i) < first_artificial) continue;
      for (std::size_t j = 0; j <= cols; ++j) {
        if (!tab.at(i, j).is_zero()) obj[j] += tab.at(i, j);
      }
    }
    tab.optimize();
    if (obj[cols] > Rational(0)) {
      out.status = LpStatus::Infeasible;
      out.pivots = tab.pivots;
      return out;
    }
    for (std::size_t i = tab.rows(); i-- > 0;) {
      if (tab.basic(i) < first_artificial) continue;
      std::size_t q = first_artificial;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (!tab.at(i, j).is_zero()) {
          q = j;
          break;
        }
      }
      if (q == first_artificial) {
        tab.drop_row(i);
      } else {
        tab.pivot(i, q);
      }
    }
    for (std::size_t j = first_artificial; j < cols; ++j) tab.forbid(j);
  }

  // Phase 2 objective over structural columns (always posed as maximization).
  std::vector<Rational> cost(cols);
  Rational constant;
  for (std::size_t j = 0; j < n; ++j) {
    Rational c = lp.sense == Sense::Maximize ? lp.objective[j] : -lp.objective[j];
    if (c.is_zero()) continue;
    const auto& m = maps[j];
    switch (m.kind) {
      case Transform::Shift: cost[m.column] += c; break;
      case Transform::Mirror: cost[m.column] -= c; break;
      case Transform::Split:
        cost[m.column] += c;
        cost[m.column + 1] -= c;
        break;
    }
  }
  for (std::size_t j = 0; j <= cols; ++j) obj[j] = j < cols ? cost[j] : Rational(0);
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    const Rational& cb = cost[tab.basic(i)];
    if (cb.is_zero()) continue;
    for (std::size_t j = 0; j <= cols; ++j) {
      if (!tab.at(i, j).is_zero()) obj[j].sub_mul(cb, tab.at(i, j));
    }
  }
  if (!tab.optimize()) {
    out.status = LpStatus::Unbounded;
    out.pivots = tab.pivots;
    return out;
  }

  std::vector<Rational> value(cols);
  for (std::size_t i = 0; i < tab.rows(); ++i) value[tab.basic(i)] = tab.rhs(i);
  out.solution.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = maps[j];
    switch (m.kind) {
      case Transform::Shift: out.solution[j] = m.offset + value[m.column]; break;
      case Transform::Mirror: out.solution[j] = m.offset - value[m.column]; break;
      case Transform::Split: out.solution[j] = value[m.column] - value[m.column + 1]; break;
    }
  }
  out.status = LpStatus::Optimal;
  out.objective = lp.objective_value(out.solution);
  out.pivots = tab.pivots;
  return out;
}

AxiomVerdict check_po_fractional(const Instance& inst, const FractionalAllocation& x) {
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_items();
  if (x.num_agents() != n || x.num_items() != m) {
    throw PreconditionError("fractional allocation dimensions do not match the instance");
  }
  // Variables: y_{i,o} (row-major), then delta_i.
  LinearProgram lp(n * m + n, Sense::Maximize);
  for (AgentIndex i = 0; i < n; ++i) lp.objective[n * m + i] = Rational(1);
  for (AgentIndex i = 0; i < n; ++i) {
    std::vector<Rational> row(n * m + n);
    for (ItemIndex o = 0; o < m; ++o) row[i * m + o] = inst.utility(i, o);
    row[n * m + i] = Rational(-1);
    lp.add_constraint(std::move(row), Relation::GreaterEqual, fractional_utility(inst, i, x, i));
  }
  for (ItemIndex o = 0; o < m; ++o) {
    std::vector<Rational> row(n * m + n);
    for (AgentIndex i = 0; i < n; ++i) row[i * m + o] = Rational(1);
    lp.add_constraint(std::move(row), Relation::Equal, Rational(1));
  }
  const LpOutcome res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) {
    throw std::logic_error("fractional dominance LP not optimal; x must be feasible");
  }
  if (res.objective.is_zero()) return AxiomVerdict::ok();
  std::vector<Rational> y(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(n * m));
  return AxiomVerdict::fail(DominatingFraction{FractionalAllocation(n, m, std::move(y))});
}

AxiomVerdict check_ef_fractional(const Instance& inst, const FractionalAllocation& x) {
  const std::size_t n = inst.num_agents();
  for (AgentIndex i = 0; i < n; ++i) {
    const Rational own = fractional_utility(inst, i, x, i);
    for (AgentIndex j = 0; j < n; ++j) {
      if (i == j) continue;
      Rational other = fractional_utility(inst, i, x, j);
      if (own < other) return AxiomVerdict::fail(EnvyWitness{i, j, own, std::move(other)});
    }
  }
  return AxiomVerdict::ok();
}

}  // namespace repfair
