#pragma once

#include <string>
#include <vector>

#include "repfair/core.hpp"

namespace repfair {

struct ReproCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Re-derives the worked examples and impossibility instances and compares against the known outcomes.
std::vector<ReproCheck> run_reference_examples(const SearchBudget& budget = SearchBudget::from_environment());

}  // namespace repfair
