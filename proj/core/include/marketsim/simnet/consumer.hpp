#pragma once

#include <optional>
#include <vector>

#include "marketsim/types.hpp"

namespace marketsim::simnet {

/// Single-server FIFO queue in front of a participant's market-data handler.
/// Service time per message is exactly 1/rate; a rate of 0 means unbounded.
class ConsumerModel {
 public:
  struct Sample {
    SimTime arrival;
    SimTime completion;
    SimTime venue_ts;
  };

  explicit ConsumerModel(double msgs_per_ms = 0.0);

  /// Enqueues one message; returns the time its processing completes.
  SimTime ingest(SimTime arrival, SimTime venue_ts);

  /// now minus the venue time of the newest message fully processed by now.
  /// Empty when nothing has been processed yet.
  std::optional<SimTime> staleness(SimTime now) const;
  /// Messages received but not yet fully processed at `now`.
  size_t backlog(SimTime now) const;

  const std::vector<Sample>& history() const { return history_; }
  int64_t msgs_per_second() const { return rate_per_s_; }

 private:
  int64_t rate_per_s_{0};
  __extension__ __int128 busy_scaled_{0};  // microseconds * rate_per_s_
  std::vector<Sample> history_;
  std::vector<SimTime> newest_venue_ts_;  // prefix max of venue_ts
};

}  // namespace marketsim::simnet
