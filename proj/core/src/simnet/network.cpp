#include "marketsim/simnet/network.hpp"

#include <string>

#include "marketsim/errors.hpp"

namespace marketsim::simnet {

namespace {
uint64_t pair_key(EndpointId src, EndpointId dst) { return (static_cast<uint64_t>(src) << 32) | dst; }
}  // namespace

void Network::add_link(EndpointId src, EndpointId dst, Link link) {
  if (src >= scheduler_.endpoint_count() || dst >= scheduler_.endpoint_count())
    throw Error(ErrorCode::UnknownEndpoint, "link " + std::to_string(src) + "->" + std::to_string(dst));
  links_[{src, dst}] = State{link, RngStream(seed_, "link-jitter", pair_key(src, dst)),
                             RngStream(seed_, "link-noise", pair_key(src, dst))};
}

bool Network::connected(EndpointId src, EndpointId dst) const {
  return links_.count({src, dst}) > 0 || default_latency_.has_value();
}

SimTime Network::base_latency(EndpointId src, EndpointId dst) const {
  auto it = links_.find({src, dst});
  if (it != links_.end()) return it->second.link.base;
  if (default_latency_) return *default_latency_;
  throw Error(ErrorCode::UnknownEndpoint, "no link " + scheduler_.name(src) + "->" + scheduler_.name(dst));
}

Network::State& Network::state(EndpointId src, EndpointId dst) {
  auto it = links_.find({src, dst});
  if (it != links_.end()) return it->second;
  if (!default_latency_)
    throw Error(ErrorCode::UnknownEndpoint, "no link " + scheduler_.name(src) + "->" + scheduler_.name(dst));
  add_link(src, dst, Link{*default_latency_, {}, {}});
  return links_.at({src, dst});
}

uint64_t Network::send(EndpointId src, EndpointId dst, Payload payload, SimTime extra) {
  State& s = state(src, dst);
  SimTime delay = extra + s.link.base;
  if (s.link.jitter.value > 0) delay += SimTime{s.jitter.uniform(0, s.link.jitter.value)};
  if (s.link.timestamp_noise.value > 0)
    if (auto* msg = std::get_if<OrderMessage>(&payload)) {
      const int64_t n = s.link.timestamp_noise.value;
      msg->claimed_submit_ts += SimTime{s.noise.uniform(-n, n)};
    }
  return scheduler_.schedule(scheduler_.now() + delay, src, dst, std::move(payload));
}

}  // namespace marketsim::simnet
