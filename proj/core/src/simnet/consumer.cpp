#include "marketsim/simnet/consumer.hpp"

#include <algorithm>
#include <cmath>

namespace marketsim::simnet {

ConsumerModel::ConsumerModel(double msgs_per_ms)
    : rate_per_s_(msgs_per_ms > 0 ? std::llround(msgs_per_ms * 1000.0) : 0) {}

SimTime ConsumerModel::ingest(SimTime arrival, SimTime venue_ts) {
  SimTime done = arrival;
  if (rate_per_s_ > 0) {
    using Wide = decltype(busy_scaled_);
    const Wide start = std::max(busy_scaled_, static_cast<Wide>(arrival.value) * rate_per_s_);
    busy_scaled_ = start + 1'000'000;  // one message = 1e6 / rate microseconds
    done = SimTime{static_cast<int64_t>((busy_scaled_ + rate_per_s_ - 1) / rate_per_s_)};
  }
  const SimTime newest = newest_venue_ts_.empty() ? venue_ts : std::max(newest_venue_ts_.back(), venue_ts);
  history_.push_back(Sample{arrival, done, venue_ts});
  newest_venue_ts_.push_back(newest);
  return done;
}

std::optional<SimTime> ConsumerModel::staleness(SimTime now) const {
  // Completions are non-decreasing, so the processed set is a prefix.
  auto it = std::upper_bound(history_.begin(), history_.end(), now,
                             [](SimTime t, const Sample& s) { return t < s.completion; });
  if (it == history_.begin()) return std::nullopt;
  const size_t idx = static_cast<size_t>(it - history_.begin()) - 1;
  return now - newest_venue_ts_[idx];
}

size_t ConsumerModel::backlog(SimTime now) const {
  size_t n = 0;
  for (auto it = history_.rbegin(); it != history_.rend() && it->completion > now; ++it)
    if (it->arrival <= now) ++n;
  return n;
}

}  // namespace marketsim::simnet
