#pragma once

#include <vector>

#include "marketsim/simnet/network.hpp"

namespace marketsim::simnet {

inline constexpr SimTime kDefaultSipLatency{90};

/// Consolidated quote over the venue L1s received so far. Ties go to the
/// lower venue id.
NbboQuote aggregate_nbbo(const std::map<VenueId, engine::L1View>& venues, SimTime ts);

/// Securities information processor: folds venue L1s into an NBBO and
/// broadcasts it to subscribers after its own processing latency.
class Sip {
 public:
  Sip(Network& net, EndpointId self, SimTime latency = kDefaultSipLatency)
      : net_(net), self_(self), latency_(latency) {}

  void subscribe(EndpointId subscriber) { subscribers_.push_back(subscriber); }
  void handle(const Event& ev);

  const NbboQuote& nbbo() const { return nbbo_; }
  EndpointId endpoint() const { return self_; }
  SimTime latency() const { return latency_; }

 private:
  Network& net_;
  EndpointId self_;
  SimTime latency_;
  std::vector<EndpointId> subscribers_;
  std::map<VenueId, engine::L1View> venues_;
  NbboQuote nbbo_;
};

}  // namespace marketsim::simnet
