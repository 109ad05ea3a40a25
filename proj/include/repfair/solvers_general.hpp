#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "repfair/axioms.hpp"
#include "repfair/core.hpp"

namespace repfair {

/// Round r gives agent i the initial bundle of agent (i - r) mod n. Requires k a positive multiple of n.
Sequence rotation_sequence(const Instance& inst, const Allocation& initial, std::int64_t k);

struct CountSolution {
  CountMatrix counts;
  Sequence sequence;
};

/// Welfare-maximizing count matrix meeting every proportional share (k/n) u_i(I); ties go to the
/// lexicographically smallest matrix. Requires k a positive multiple of n.
CountSolution solve_prop_po(const Instance& inst, std::int64_t k,
                            const SearchBudget& budget = SearchBudget::from_environment());

struct Clause {
  Axiom axiom;
  Scope scope;
  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Non-empty conjunction of (axiom, scope) clauses.
class Predicate {
 public:
  explicit Predicate(std::vector<Clause> clauses);

  /// "ef & po & ef1:per-round". Scope defaults to overall, except for the single-round
  /// axioms (ef1, weak-ef1, prop1, prop11), which default to per-round.
  static Predicate parse(std::string_view text);

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::string str() const;

 private:
  std::vector<Clause> clauses_;
};

enum class SearchMode { FirstFound, MaxWelfare };

struct ExhaustiveResult {
  enum class Status { Found, CertifiedNone };
  Status status = Status::CertifiedNone;
  std::optional<Sequence> sequence;
  std::uint64_t nodes = 0;
};

/// Enumerates k-round sequences up to round order. FirstFound returns the first satisfier in
/// canonical order; MaxWelfare returns one realizing the lexicographically smallest count matrix
/// among the welfare-maximal satisfiers. Throws BudgetExceeded when the budget runs out.
ExhaustiveResult exhaustive_search(const Instance& inst, std::int64_t k, const Predicate& pred,
                                   const SearchBudget& budget = SearchBudget::from_environment(),
                                   SearchMode mode = SearchMode::FirstFound);

/// Re-checks every clause on a concrete sequence.
bool satisfies(const Instance& inst, const Sequence& seq, const Predicate& pred,
               const SearchBudget& budget = SearchBudget::from_environment());

}  // namespace repfair
