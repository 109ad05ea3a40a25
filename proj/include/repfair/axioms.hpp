#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "repfair/core.hpp"
#include "repfair/verdict.hpp"

namespace repfair {

enum class Axiom { EF, EF1, WeakEF1, PROP, PROP1, PROP11, PO };
enum class Scope { PerRound, Overall };

/// Accepts ef, ef1, weak-ef1 (wef1), prop, prop1, prop11 (prop[1,1]), po; case-insensitive.
Axiom parse_axiom(std::string_view name);
std::string_view axiom_name(Axiom a);
Scope parse_scope(std::string_view name);
std::string_view scope_name(Scope s);

AxiomVerdict check_ef(const Instance& inst, const CountMatrix& cm);
AxiomVerdict check_ef1(const Instance& inst, const Allocation& alloc);
AxiomVerdict check_weak_ef1(const Instance& inst, const Allocation& alloc);
AxiomVerdict check_prop(const Instance& inst, const CountMatrix& cm);
AxiomVerdict check_prop1(const Instance& inst, const Allocation& alloc);
AxiomVerdict check_prop11(const Instance& inst, const Allocation& alloc);

/// Single-agent-pair forms, used by the two-agent refinements.
bool envies(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j);
bool ef1_for(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j);
bool weak_ef1_for(const Instance& inst, const Allocation& alloc, AgentIndex i, AgentIndex j);

/// Exhaustive over all n^m allocations; witness is the max-welfare dominator
/// (first in enumeration order among ties).
AxiomVerdict check_po_round(const Instance& inst, const Allocation& alloc,
                            const SearchBudget& budget = SearchBudget::from_environment());

/// Branch-and-bound over count matrices with exact LP bounds; witness is the
/// lexicographically smallest max-welfare dominating count matrix.
AxiomVerdict check_po_overall(const Instance& inst, const CountMatrix& cm,
                              const SearchBudget& budget = SearchBudget::from_environment());

struct AxiomReport {
  Axiom axiom;
  Scope scope;
  /// One verdict per round for PerRound scope, a single verdict for Overall.
  std::vector<AxiomVerdict> verdicts;

  bool holds() const;
};

/// Throws PreconditionError for EF1, weak EF1, PROP1 or PROP[1,1] at Overall scope.
std::vector<AxiomReport> evaluate(const Instance& inst, const Sequence& seq,
                                  const std::vector<Axiom>& axioms, Scope scope,
                                  const SearchBudget& budget = SearchBudget::from_environment());

AxiomVerdict check_round(const Instance& inst, const Allocation& alloc, Axiom axiom,
                         const SearchBudget& budget);
AxiomVerdict check_overall(const Instance& inst, const CountMatrix& cm, Axiom axiom,
                           const SearchBudget& budget);

}  // namespace repfair
