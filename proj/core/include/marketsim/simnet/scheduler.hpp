#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "marketsim/messages.hpp"

namespace marketsim::simnet {

struct Event {
  SimTime deliver_at{};
  uint64_t seq{0};
  EndpointId src{0};
  EndpointId dst{0};
  Payload payload;
};

/// Single-threaded discrete-event loop. Events pop in (deliver_at, seq)
/// order, so equal-time events run in the order they were scheduled.
class Scheduler {
 public:
  using Handler = std::function<void(const Event&)>;

  EndpointId add_endpoint(std::string name, Handler handler = {});
  void set_handler(EndpointId id, Handler handler);
  const std::string& name(EndpointId id) const;
  std::optional<EndpointId> find(std::string_view name) const;
  size_t endpoint_count() const { return endpoints_.size(); }

  /// Throws SchedulingInPast when `at` < now(), UnknownEndpoint for a bad dst.
  uint64_t schedule(SimTime at, EndpointId src, EndpointId dst, Payload payload);

  /// Runs every event with deliver_at <= end; the clock then rests at `end`.
  size_t run_until(SimTime end);

  SimTime now() const { return now_; }
  bool idle() const { return heap_.empty(); }
  size_t processed() const { return processed_; }

  /// FNV-1a over every executed event's (deliver_at, seq, src, dst, summary).
  uint64_t trace_hash() const { return hash_; }

  /// Tab-separated event log: deliver_at, seq, src, dst, summary.
  void set_log(std::ostream* os) { log_ = os; }

 private:
  struct Endpoint {
    std::string name;
    Handler handler;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return std::pair(a.deliver_at, a.seq) > std::pair(b.deliver_at, b.seq);
    }
  };

  std::vector<Endpoint> endpoints_;
  std::vector<Event> heap_;
  SimTime now_{};
  uint64_t next_seq_{0};
  size_t processed_{0};
  uint64_t hash_{0xCBF29CE484222325ULL};
  std::ostream* log_{nullptr};
};

}  // namespace marketsim::simnet
