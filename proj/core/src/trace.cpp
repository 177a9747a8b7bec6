#include "marketsim/trace.hpp"

#include <algorithm>

namespace marketsim {

Price SimTrace::value_at(SimTime t) const {
  auto it = std::upper_bound(signal.begin(), signal.end(), t,
                             [](SimTime x, const SignalPoint& p) { return x < p.ts; });
  return it == signal.begin() ? initial_value : std::prev(it)->value;
}

const AgentInfo* SimTrace::agent(ParticipantId id) const {
  for (const auto& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

std::string SimTrace::agent_name(ParticipantId id) const {
  const AgentInfo* a = agent(id);
  return a ? a->name : std::to_string(id);
}

}  // namespace marketsim
