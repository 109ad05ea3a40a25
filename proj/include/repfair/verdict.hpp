#pragma once

#include <optional>
#include <string>
#include <variant>

#include "repfair/core.hpp"

namespace repfair {

/// Agent `envious` prefers the bundle of `envied` (after whatever relaxation the axiom allows).
struct EnvyWitness {
  AgentIndex envious;
  AgentIndex envied;
  Rational own_value;
  Rational other_value;
};

/// Agent falls short of its proportional share, even after the allowed adjustments.
struct ShortfallWitness {
  AgentIndex agent;
  Rational value;
  Rational share;
};

struct DominatingAllocation {
  Allocation allocation;
};

struct DominatingCounts {
  CountMatrix counts;
};

struct DominatingFraction {
  FractionalAllocation fraction;
};

/// A support allocation of a lottery that breaks PROP[1,1] or one of the U+/U- bounds.
struct SupportWitness {
  std::size_t support_index;
  AgentIndex agent;
  std::string reason;
};

using Witness = std::variant<EnvyWitness, ShortfallWitness, DominatingAllocation, DominatingCounts,
                             DominatingFraction, SupportWitness>;

struct AxiomVerdict {
  bool holds = true;
  std::optional<Witness> witness;

  static AxiomVerdict ok() { return {}; }
  static AxiomVerdict fail(Witness w) { return {false, std::move(w)}; }
};

/// Human-readable witness text using the instance's ids.
std::string describe(const Instance& inst, const AxiomVerdict& verdict);

}  // namespace repfair
