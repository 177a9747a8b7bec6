#include "marketsim/simnet/scheduler.hpp"

#include <algorithm>
#include <ostream>

#include "marketsim/errors.hpp"
#include "marketsim/rng.hpp"

namespace marketsim::simnet {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

EndpointId Scheduler::add_endpoint(std::string name, Handler handler) {
  endpoints_.push_back(Endpoint{std::move(name), std::move(handler)});
  return static_cast<EndpointId>(endpoints_.size() - 1);
}

void Scheduler::set_handler(EndpointId id, Handler handler) {
  if (id >= endpoints_.size()) throw Error(ErrorCode::UnknownEndpoint, "endpoint " + std::to_string(id));
  endpoints_[id].handler = std::move(handler);
}

const std::string& Scheduler::name(EndpointId id) const {
  if (id >= endpoints_.size()) throw Error(ErrorCode::UnknownEndpoint, "endpoint " + std::to_string(id));
  return endpoints_[id].name;
}

std::optional<EndpointId> Scheduler::find(std::string_view name) const {
  for (size_t i = 0; i < endpoints_.size(); ++i)
    if (endpoints_[i].name == name) return static_cast<EndpointId>(i);
  return std::nullopt;
}

uint64_t Scheduler::schedule(SimTime at, EndpointId src, EndpointId dst, Payload payload) {
  if (at < now_)
    throw Error(ErrorCode::SchedulingInPast,
                "event at " + std::to_string(at.value) + " before now " + std::to_string(now_.value));
  if (dst >= endpoints_.size()) throw Error(ErrorCode::UnknownEndpoint, "endpoint " + std::to_string(dst));
  const uint64_t seq = next_seq_++;
  heap_.push_back(Event{at, seq, src, dst, std::move(payload)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return seq;
}

size_t Scheduler::run_until(SimTime end) {
  size_t count = 0;
  while (!heap_.empty() && heap_.front().deliver_at <= end) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.deliver_at;
    const std::string summary = summarize(ev.payload);
    hash_ = mix(hash_, static_cast<uint64_t>(ev.deliver_at.value));
    hash_ = mix(hash_, ev.seq);
    hash_ = mix(hash_, ev.src);
    hash_ = mix(hash_, ev.dst);
    hash_ = fnv1a(summary, hash_);
    if (log_)
      *log_ << ev.deliver_at.value << '\t' << ev.seq << '\t' << endpoints_[ev.src].name << '\t'
            << endpoints_[ev.dst].name << '\t' << summary << '\n';
    ++count;
    ++processed_;
    if (const auto& h = endpoints_[ev.dst].handler) h(ev);
  }
  if (now_ < end) now_ = end;
  return count;
}

}  // namespace marketsim::simnet
