#include "repfair/verdict.hpp"

#include <sstream>

namespace repfair {

namespace {

struct Describer {
  const Instance& inst;

  std::string operator()(const EnvyWitness& w) const {
    std::ostringstream os;
    os << "agent " << inst.agents()[w.envious] << " envies " << inst.agents()[w.envied] << " ("
       << w.own_value << " < " << w.other_value << ")";
    return os.str();
  }
  std::string operator()(const ShortfallWitness& w) const {
    std::ostringstream os;
    os << "agent " << inst.agents()[w.agent] << " gets " << w.value << " below share " << w.share;
    return os.str();
  }
  std::string operator()(const DominatingAllocation& w) const {
    std::ostringstream os;
    os << "dominated by allocation";
    for (AgentIndex a = 0; a < inst.num_agents(); ++a) {
      os << ' ' << inst.agents()[a] << "={";
      bool first = true;
      for (const ItemIndex o : w.allocation.bundle(a)) {
        os << (first ? "" : ",") << inst.items()[o];
        first = false;
      }
      os << '}';
    }
    return os.str();
  }
  std::string operator()(const DominatingCounts& w) const {
    std::ostringstream os;
    os << "dominated by counts";
    for (AgentIndex a = 0; a < inst.num_agents(); ++a) {
      os << ' ' << inst.agents()[a] << "=(";
      for (ItemIndex o = 0; o < inst.num_items(); ++o) os << (o ? "," : "") << w.counts.count(a, o);
      os << ") u=" << row_utility(inst, a, w.counts, a);
    }
    return os.str();
  }
  std::string operator()(const DominatingFraction& w) const {
    std::ostringstream os;
    os << "dominated by fractional allocation";
    for (AgentIndex a = 0; a < inst.num_agents(); ++a) {
      os << ' ' << inst.agents()[a] << "=(";
      for (ItemIndex o = 0; o < inst.num_items(); ++o) os << (o ? "," : "") << w.fraction.share(a, o);
      os << ")";
    }
    return os.str();
  }
  std::string operator()(const SupportWitness& w) const {
    std::ostringstream os;
    os << "support " << w.support_index << ", agent " << inst.agents()[w.agent] << ": " << w.reason;
    return os.str();
  }
};

}  // namespace

std::string describe(const Instance& inst, const AxiomVerdict& verdict) {
  if (verdict.holds) return "holds";
  if (!verdict.witness) return "fails";
  return std::visit(Describer{inst}, *verdict.witness);
}

}  // namespace repfair
