#include "marketsim/agents/latency_table.hpp"

#include <cmath>

namespace marketsim::agents {

void LatencyTable::add_sample(ParticipantId sender, SimTime observed) {
  auto& e = entries_[sender];
  e.sum += static_cast<double>(observed.value);
  ++e.n;
}

std::optional<double> LatencyTable::estimate(ParticipantId sender) const {
  auto it = entries_.find(sender);
  if (it == entries_.end() || it->second.n == 0) return std::nullopt;
  return it->second.sum / static_cast<double>(it->second.n);
}

size_t LatencyTable::samples(ParticipantId sender) const {
  auto it = entries_.find(sender);
  return it == entries_.end() ? 0 : it->second.n;
}

std::optional<ParticipantId> LatencyTable::attribute(SimTime observed) const {
  std::optional<ParticipantId> found;
  for (const auto& [sender, e] : entries_) {
    if (e.n == 0) continue;
    const double mean = e.sum / static_cast<double>(e.n);
    if (std::abs(static_cast<double>(observed.value) - mean) > static_cast<double>(epsilon_.value)) continue;
    if (found) return std::nullopt;
    found = sender;
  }
  return found;
}

}  // namespace marketsim::agents
