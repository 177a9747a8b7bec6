#pragma once

#include <map>
#include <optional>

#include "marketsim/types.hpp"

namespace marketsim::agents {

/// Running mean of (listing time - claimed submit time) per labeled sender.
class LatencyTable {
 public:
  explicit LatencyTable(SimTime epsilon = SimTime{50}) : epsilon_(epsilon) {}

  void add_sample(ParticipantId sender, SimTime observed);
  std::optional<double> estimate(ParticipantId sender) const;
  size_t samples(ParticipantId sender) const;
  size_t size() const { return entries_.size(); }

  /// The single sender whose estimate lies within epsilon of `observed`;
  /// empty when none or several qualify.
  std::optional<ParticipantId> attribute(SimTime observed) const;

 private:
  struct Entry {
    double sum{0.0};
    size_t n{0};
  };
  SimTime epsilon_;
  std::map<ParticipantId, Entry> entries_;
};

}  // namespace marketsim::agents
