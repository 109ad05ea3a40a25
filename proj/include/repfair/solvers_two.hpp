#pragma once

#include <vector>

#include "repfair/core.hpp"
#include "repfair/solvers_general.hpp"

namespace repfair {

/// Items of a 2-round, 2-agent sequence split by how often each agent holds them.
struct TwoAgentPartition {
  std::vector<ItemIndex> kept_by_first;   // I_1
  std::vector<ItemIndex> kept_by_second;  // I_2
  std::vector<ItemIndex> goods;           // O+
  std::vector<ItemIndex> chores;          // O-
  std::vector<ItemIndex> nulls;           // objective nulls, left where they are
};

TwoAgentPartition partition_two_rounds(const Instance& inst, const Sequence& seq);

/// Envy-free and PO overall for n = 2 and even k (a welfare-maximal PROP count matrix).
CountSolution solve_ef_po_two(const Instance& inst, std::int64_t k,
                              const SearchBudget& budget = SearchBudget::from_environment());

/// k = n = 2: re-bundles an EF + PO sequence so both rounds are EF1, keeping the count matrix.
Sequence refine_ef1_k2(const Instance& inst, const Sequence& seq,
                       const SearchBudget& budget = SearchBudget::from_environment());

/// n = 2: swaps items between envious and envy-free rounds until every round is weak EF1.
/// The number of item transfers is stored in *transfers when given.
Sequence refine_weak_ef1(const Instance& inst, const Sequence& seq, std::size_t* transfers = nullptr,
                         const SearchBudget& budget = SearchBudget::from_environment());

/// n = 2, even k: EF overall and EF1 in every round (no efficiency claim).
Sequence solve_ef_perround_ef1(const Instance& inst, std::int64_t k);

}  // namespace repfair
