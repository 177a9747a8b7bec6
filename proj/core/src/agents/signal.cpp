#include "marketsim/agents/signal.hpp"

#include <cmath>

namespace marketsim::agents {

SignalProcess::SignalProcess(SignalConfig config, Price initial, simnet::Network& net, EndpointId self,
                             SimTrace& trace, uint64_t seed)
    : config_(config),
      value_(initial),
      net_(net),
      self_(self),
      trace_(trace),
      times_(seed, "signal-times"),
      signs_(seed, "signal-signs") {}

void SignalProcess::start(SimTime horizon) {
  if (config_.mode == SignalConfig::Mode::None) return;
  SimTime t = config_.start;
  for (int64_t k = 0; config_.count == 0 || k < config_.count; ++k) {
    if (config_.mode == SignalConfig::Mode::Grid) {
      if (k > 0) t += config_.interval;
      if (config_.interval.value <= 0 && config_.count == 0 && k > 0) break;
    } else {
      const double u = 1.0 - times_.unit();
      const auto gap = static_cast<int64_t>(std::llround(-std::log(u) * static_cast<double>(config_.interval.value)));
      t += SimTime{std::max<int64_t>(1, gap)};
    }
    if (t > horizon) break;
    net_.scheduler().schedule(t, self_, self_, Timer{static_cast<uint64_t>(k)});
  }
}

void SignalProcess::handle(const simnet::Event& ev) {
  if (!std::holds_alternative<Timer>(ev.payload)) return;
  const Price previous = value_;
  const int64_t sign = signs_.uniform(0, 1) == 0 ? -1 : 1;
  value_ = Price{std::max<int64_t>(1, value_.value + sign * config_.jump_ticks)};
  trace_.signal.push_back(SignalPoint{ev.deliver_at, value_});
  for (EndpointId ep : listeners_) net_.send(self_, ep, SignalUpdate{value_, previous, ev.deliver_at});
}

}  // namespace marketsim::agents
