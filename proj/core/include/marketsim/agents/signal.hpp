#pragma once

#include <vector>

#include "marketsim/rng.hpp"
#include "marketsim/simnet/network.hpp"
#include "marketsim/trace.hpp"

namespace marketsim::agents {

struct SignalConfig {
  enum class Mode : uint8_t { None, Grid, Random };
  Mode mode{Mode::None};
  SimTime start{};
  SimTime interval{};  // grid spacing, or mean gap for Random
  int64_t jump_ticks{1};
  int64_t count{0};  // 0 = until the end of the run

  bool operator==(const SignalConfig&) const = default;
};

/// Piecewise-constant fundamental value. Each jump is broadcast to every
/// listener as a public signal over that listener's link.
class SignalProcess {
 public:
  SignalProcess(SignalConfig config, Price initial, simnet::Network& net, EndpointId self, SimTrace& trace,
                uint64_t seed);

  void add_listener(EndpointId ep) { listeners_.push_back(ep); }
  /// Schedules every jump up front.
  void start(SimTime horizon);
  void handle(const simnet::Event& ev);

  Price value() const { return value_; }

 private:
  SignalConfig config_;
  Price value_;
  simnet::Network& net_;
  EndpointId self_;
  SimTrace& trace_;
  RngStream times_;
  RngStream signs_;
  std::vector<EndpointId> listeners_;
};

}  // namespace marketsim::agents
