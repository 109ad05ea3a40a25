#pragma once

#include <optional>
#include <vector>

#include "repfair/core.hpp"

namespace repfair {

/// max sum_i u_i(row i) over count matrices with columns summing to k,
/// subject to u_i(row i) >= floors[i] where a floor is given.
struct WelfareQuery {
  std::int64_t rounds = 1;
  std::vector<std::optional<Rational>> floors;
  /// Only solutions with welfare strictly above this value count.
  std::optional<Rational> exceed;
};

/// Lexicographically smallest (row-major) optimal count matrix, null items pinned to agent 0.
/// nullopt when no matrix satisfies the floors (and the exceed threshold).
std::optional<CountMatrix> max_welfare_counts(const Instance& inst, const WelfareQuery& query,
                                              BudgetMeter& meter);

}  // namespace repfair
