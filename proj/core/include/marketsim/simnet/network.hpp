#pragma once

#include <map>
#include <optional>

#include "marketsim/rng.hpp"
#include "marketsim/simnet/scheduler.hpp"

namespace marketsim::simnet {

struct Link {
  SimTime base{};
  SimTime jitter{};           // delivery adds Uniform[0, jitter]
  SimTime timestamp_noise{};  // claimed_submit_ts perturbed by Uniform[-noise, +noise]
};

/// Directional point-to-point links on top of the scheduler. Each link owns
/// its own random substreams keyed by (src, dst).
class Network {
 public:
  Network(Scheduler& scheduler, uint64_t seed) : scheduler_(scheduler), seed_(seed) {}

  void add_link(EndpointId src, EndpointId dst, Link link);
  /// Latency used for pairs with no explicit link; unset means such sends throw.
  void set_default_latency(std::optional<SimTime> latency) { default_latency_ = latency; }

  bool connected(EndpointId src, EndpointId dst) const;
  SimTime base_latency(EndpointId src, EndpointId dst) const;

  /// Delivers at now + extra + base + jitter. `extra` models work done before
  /// the message hits the wire (speed bumps, SIP processing).
  uint64_t send(EndpointId src, EndpointId dst, Payload payload, SimTime extra = {});

  Scheduler& scheduler() { return scheduler_; }

 private:
  struct State {
    Link link;
    RngStream jitter;
    RngStream noise;
  };
  State& state(EndpointId src, EndpointId dst);

  Scheduler& scheduler_;
  uint64_t seed_;
  std::optional<SimTime> default_latency_;
  std::map<std::pair<EndpointId, EndpointId>, State> links_;
};

}  // namespace marketsim::simnet
