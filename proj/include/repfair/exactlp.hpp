#pragma once

#include <optional>
#include <vector>

#include "repfair/core.hpp"
#include "repfair/verdict.hpp"

namespace repfair {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Closed interval; a missing end is infinite.
struct VariableBounds {
  std::optional<Rational> lower = Rational(0);
  std::optional<Rational> upper;
};

struct LinearConstraint {
  std::vector<Rational> coefficients;
  Relation relation = Relation::LessEqual;
  Rational rhs;
};

struct LinearProgram {
  Sense sense = Sense::Maximize;
  std::vector<Rational> objective;
  std::vector<LinearConstraint> constraints;
  /// One entry per variable; defaults to [0, inf).
  std::vector<VariableBounds> bounds;

  explicit LinearProgram(std::size_t num_variables, Sense s = Sense::Maximize);

  std::size_t num_variables() const { return objective.size(); }
  void add_constraint(std::vector<Rational> coefficients, Relation relation, Rational rhs);
  /// Throws PreconditionError on inconsistent dimensions or crossed bounds.
  void validate() const;
  /// Exact check of every constraint and bound.
  bool is_feasible_point(const std::vector<Rational>& point) const;
  Rational objective_value(const std::vector<Rational>& point) const;
};

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> solution;
  Rational objective;
  std::size_t pivots = 0;
};

/// Two-phase dense-tableau primal simplex with Bland's rule, in exact arithmetic.
LpOutcome solve_lp(const LinearProgram& lp);

/// PO against all fractional allocations; witness is a dominating fractional allocation.
AxiomVerdict check_po_fractional(const Instance& inst, const FractionalAllocation& x);
AxiomVerdict check_ef_fractional(const Instance& inst, const FractionalAllocation& x);

}  // namespace repfair
