#include "marketsim/monitors/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace marketsim::monitors {

namespace {

using engine::ChangeKind;
using engine::DisplayClass;
using Arrival = std::pair<SimTime, uint64_t>;

/// Nearest-rank percentile of an unsorted sample.
SimTime percentile(std::vector<SimTime> v, double q) {
  if (v.empty()) return SimTime{};
  std::sort(v.begin(), v.end());
  auto rank = static_cast<size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<size_t>(rank, 1, v.size()) - 1];
}

std::map<std::pair<VenueId, OrderId>, const OrderRecord*> index_orders(const SimTrace& trace) {
  std::map<std::pair<VenueId, OrderId>, const OrderRecord*> out;
  for (const auto& o : trace.orders) out.emplace(std::pair(o.venue, o.order), &o);
  return out;
}

}  // namespace

std::string_view to_string(Property p) {
  switch (p) {
    case Property::TradingIntegrity: return "TradingIntegrity";
    case Property::FairMarketAccess: return "FairMarketAccess";
    case Property::SymmetricInformation: return "SymmetricInformation";
    case Property::QueueIntegrity: return "QueueIntegrity";
    case Property::ParticipantAnonymity: return "ParticipantAnonymity";
    case Property::DataConfidentiality: return "DataConfidentiality";
  }
  return "?";
}

const std::vector<Property>& all_properties() {
  static const std::vector<Property> all = {Property::TradingIntegrity,     Property::FairMarketAccess,
                                            Property::SymmetricInformation, Property::QueueIntegrity,
                                            Property::ParticipantAnonymity, Property::DataConfidentiality};
  return all;
}

std::vector<Violation> audit_queue_integrity(const SimTrace& trace) {
  struct Resting {
    Side side;
    Price price;
    DisplayClass cls;
    Arrival arrival;
    Qty open;
  };
  std::vector<Violation> out;
  for (const auto& [venue, name] : trace.venue_names) {
    auto algo = trace.venue_algo.find(venue);
    auto batch = trace.venue_batch.find(venue);
    if (algo != trace.venue_algo.end() && algo->second == engine::MatchingAlgo::ProRata) continue;
    if (batch != trace.venue_batch.end() && batch->second) continue;

    std::vector<const TradeRecord*> trades;
    for (const auto& t : trace.trades)
      if (t.venue == venue && !t.auction) trades.push_back(&t);
    size_t next_trade = 0;
    std::unordered_map<OrderId, Resting> book;

    for (const auto& ev : trace.book_events) {
      if (ev.venue != venue) continue;
      auto it = book.find(ev.order);
      switch (ev.kind) {
        case ChangeKind::Added:
          book[ev.order] = Resting{ev.side, ev.price, ev.display_class, {ev.entry_ts, ev.entry_seq}, ev.open};
          break;
        case ChangeKind::Filled: {
          const TradeRecord* trade = next_trade < trades.size() ? trades[next_trade++] : nullptr;
          if (it != book.end()) {
            const Resting& m = it->second;
            std::optional<std::pair<OrderId, Arrival>> ahead;
            for (const auto& [id, o] : book) {
              if (id == ev.order || o.open.value <= 0 || o.side != m.side || o.price != m.price || o.cls != m.cls)
                continue;
              if (o.arrival < m.arrival && (!ahead || o.arrival < ahead->second)) ahead = std::pair(id, o.arrival);
            }
            if (ahead && trade) {
              std::ostringstream ev_text;
              ev_text << "order " << ev.order << " executed at " << m.price << " ahead of order " << ahead->first
                      << " which arrived earlier (" << ahead->second.first << "us vs " << m.arrival.first << "us)";
              out.push_back(Violation{Property::QueueIntegrity, ev.ts, {trade->maker},
                                      {trade->trade_id, ev.order, ahead->first}, ev_text.str()});
            }
          }
          if (trade) {
            // A resting taker (a slid order reverting into the book) shrinks too.
            if (auto t = book.find(trade->taker_order); t != book.end()) {
              t->second.open -= trade->qty;
              if (t->second.open.value <= 0) book.erase(t);
            }
          }
          it = book.find(ev.order);
          if (it != book.end()) {
            if (ev.open.value <= 0)
              book.erase(it);
            else
              it->second.open = ev.open;
          }
          break;
        }
        case ChangeKind::Replenished:
          if (it != book.end()) {
            it->second.arrival = {ev.entry_ts, ev.entry_seq};
            it->second.open = ev.open;
          }
          break;
        case ChangeKind::Modified:
          if (it != book.end()) {
            if (ev.priority_reset) it->second.arrival = {ev.entry_ts, ev.entry_seq};
            it->second.open = ev.open;
          }
          break;
        case ChangeKind::Canceled:
          if (it != book.end()) book.erase(it);
          break;
        case ChangeKind::Repriced:
          if (it != book.end()) {
            it->second.price = ev.price;
            it->second.open = ev.open;
            it->second.cls = ev.display_class;
          }
          break;
        case ChangeKind::Reclassed:
          if (it != book.end()) it->second.cls = ev.display_class;
          break;
      }
    }
  }
  return out;
}

AnonymityResult measure_anonymity(const SimTrace& trace) {
  AnonymityResult r;
  std::map<std::pair<VenueId, uint64_t>, ParticipantId> truth;
  std::set<ParticipantId> senders;
  for (const auto& o : trace.orders) {
    if (!o.anonymous || o.routed) continue;
    truth[{o.venue, o.public_id}] = o.participant;
    senders.insert(o.participant);
  }
  r.anonymous_orders = truth.size();
  r.senders = senders.size();
  std::set<std::pair<VenueId, uint64_t>> seen;
  for (const auto& g : trace.guesses) {
    auto it = truth.find({g.venue, g.public_id});
    if (it == truth.end() || !seen.insert(it->first).second) continue;
    ++r.guesses;
    if (!g.guess) continue;
    ++r.decided;
    if (*g.guess == it->second) ++r.correct;
  }
  if (r.anonymous_orders > 0) r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.anonymous_orders);
  if (r.decided > 0) r.decided_accuracy = static_cast<double>(r.correct) / static_cast<double>(r.decided);
  if (r.guesses > 0)
    r.abstention = static_cast<double>(r.guesses - r.decided) / static_cast<double>(r.guesses);
  if (r.senders > 0) r.baseline = 1.0 / static_cast<double>(r.senders);
  if (r.decided > 0) r.std_error = std::sqrt(r.baseline * (1.0 - r.baseline) / static_cast<double>(r.decided));
  return r;
}

ConfidentialityResult measure_confidentiality(const SimTrace& trace) {
  ConfidentialityResult r;
  std::map<uint64_t, SimTime> published;
  for (const auto& p : trace.print_publications) {
    auto [it, fresh] = published.emplace(p.trade_id, p.ts);
    if (!fresh) it->second = std::min(it->second, p.ts);
  }
  std::map<std::pair<VenueId, OrderId>, SimTime> reveal;
  for (const auto& t : trace.trades) {
    auto p = published.find(t.trade_id);
    if (p == published.end()) continue;
    auto [it, fresh] = reveal.emplace(std::pair(t.venue, t.maker_order), p->second);
    if (!fresh) it->second = std::min(it->second, p->second);
  }

  double lead_sum = 0.0;
  size_t lead_n = 0;
  for (const auto& o : trace.orders) {
    const bool hidden = o.kind == engine::OrderKind::Hidden ||
                        (o.kind == engine::OrderKind::Reserve && o.total > o.display_size);
    if (!hidden || !o.price) continue;
    HiddenOrderOutcome h{o.order, o.venue, std::nullopt, std::nullopt, false};
    if (auto it = reveal.find({o.venue, o.order}); it != reveal.end()) h.reveal_ts = it->second;
    for (const auto& b : trace.beliefs) {
      if (b.venue != o.venue || b.side != o.side || b.price != *o.price || b.ts < o.accepted_ts) continue;
      if (h.reveal_ts && b.ts >= *h.reveal_ts) continue;
      if (!h.belief_ts || b.ts < *h.belief_ts) h.belief_ts = b.ts;
    }
    h.detected = h.belief_ts.has_value();
    ++r.hidden_orders;
    if (h.detected) {
      ++r.detected;
      if (h.reveal_ts) {
        const SimTime lead = *h.reveal_ts - *h.belief_ts;
        lead_sum += static_cast<double>(lead.value);
        ++lead_n;
        if (!r.min_lead || lead < *r.min_lead) r.min_lead = lead;
      }
    }
    r.orders.push_back(h);
  }
  if (r.hidden_orders > 0) r.rate = static_cast<double>(r.detected) / static_cast<double>(r.hidden_orders);
  if (lead_n > 0) r.mean_lead_us = lead_sum / static_cast<double>(lead_n);
  return r;
}

FairAccessResult measure_fair_access(const SimTrace& trace) {
  FairAccessResult r;
  for (const auto& a : trace.agents) r.agents[a.id];
  const auto orders = index_orders(trace);
  const Price final_value = trace.value_at(trace.duration);

  for (const auto& t : trace.trades) {
    const int64_t notional = t.price.value * t.qty.value;
    AgentPnl& buyer = r.agents[t.buyer()];
    AgentPnl& seller = r.agents[t.seller()];
    buyer.cash -= notional;
    buyer.position += t.qty.value;
    buyer.bought += t.qty;
    seller.cash += notional;
    seller.position -= t.qty.value;
    seller.sold += t.qty;
    ++buyer.trades;
    if (t.buyer() != t.seller()) ++seller.trades;

    if (t.auction || trace.signal.empty()) continue;
    auto jump = std::upper_bound(trace.signal.begin(), trace.signal.end(), t.ts,
                                 [](SimTime x, const SignalPoint& p) { return x < p.ts; });
    if (jump == trace.signal.begin()) continue;
    const SimTime jump_ts = std::prev(jump)->ts;
    auto maker = orders.find({t.venue, t.maker_order});
    auto taker = orders.find({t.venue, t.taker_order});
    if (maker == orders.end() || taker == orders.end()) continue;
    const bool stale_quote = maker->second->accepted_ts < jump_ts;
    const bool informed = taker->second->accepted_ts >= jump_ts;
    const Price v = trace.value_at(t.ts);
    const bool profitable = t.aggressor == Side::Buy ? t.price < v : t.price > v;
    if (stale_quote && informed && profitable) {
      ++r.stale_captures;
      ++r.agents[t.taker].stale_captures;
      r.capture_trades.push_back(t.trade_id);
    }
  }
  for (auto& [id, a] : r.agents) {
    a.pnl = a.cash + a.position * final_value.value;
    r.pnl_sum += a.pnl;
    const AgentInfo* info = trace.agent(id);
    r.cohorts[info ? info->cohort : std::string("unknown")] += a.pnl;
  }
  return r;
}

std::optional<SimTime> staleness_at(const std::vector<simnet::ConsumerModel::Sample>& history, SimTime t) {
  std::optional<SimTime> newest;
  for (const auto& s : history) {
    if (s.completion > t) continue;
    if (!newest || s.venue_ts > *newest) newest = s.venue_ts;
  }
  if (!newest) return std::nullopt;
  return t - *newest;
}

std::map<ParticipantId, StalenessStats> measure_info_symmetry(const SimTrace& trace, const MonitorConfig& config) {
  std::map<ParticipantId, StalenessStats> out;
  const SimTime step = config.staleness_sample.value > 0 ? config.staleness_sample : SimTime{1'000};
  for (const auto& [agent, history] : trace.feed_samples) {
    StalenessStats st;
    std::vector<SimTime> lags;
    lags.reserve(history.size());
    for (const auto& s : history) lags.push_back(s.completion - s.arrival);

    // Completion times are non-decreasing, so one forward pass suffices.
    std::vector<SimTime> stale;
    size_t i = 0;
    std::optional<SimTime> newest;
    for (SimTime t = step; t <= trace.duration; t += step) {
      while (i < history.size() && history[i].completion <= t) {
        if (!newest || history[i].venue_ts > *newest) newest = history[i].venue_ts;
        ++i;
      }
      if (newest) stale.push_back(t - *newest);
    }
    st.samples = stale.size();
    st.p50 = percentile(stale, 0.50);
    st.p99 = percentile(stale, 0.99);
    st.max = stale.empty() ? SimTime{} : *std::max_element(stale.begin(), stale.end());
    st.lag_p99 = percentile(lags, 0.99);
    st.lag_max = lags.empty() ? SimTime{} : *std::max_element(lags.begin(), lags.end());
    out[agent] = st;
  }
  return out;
}

std::map<ParticipantId, OtrStats> order_to_trade(const SimTrace& trace, const MonitorConfig& config) {
  std::map<ParticipantId, std::vector<SimTime>> news;
  std::map<ParticipantId, std::vector<SimTime>> fills;
  for (const auto& m : trace.messages)
    if (m.type == MsgType::New) news[m.participant].push_back(m.ts);
  for (const auto& t : trace.trades) {
    fills[t.taker].push_back(t.ts);
    if (t.maker != t.taker) fills[t.maker].push_back(t.ts);
  }

  std::map<ParticipantId, OtrStats> out;
  for (auto& [agent, times] : news) {
    OtrStats st;
    auto& tr = fills[agent];
    std::sort(times.begin(), times.end());
    std::sort(tr.begin(), tr.end());
    st.new_orders = times.size();
    st.trades = tr.size();
    st.overall = static_cast<double>(st.new_orders) / static_cast<double>(std::max<size_t>(1, st.trades));
    size_t lo = 0;
    size_t tlo = 0;
    size_t thi = 0;
    for (size_t hi = 0; hi < times.size(); ++hi) {
      const SimTime t = times[hi];
      while (times[lo] + config.otr_window <= t) ++lo;
      while (thi < tr.size() && tr[thi] <= t) ++thi;
      while (tlo < thi && tr[tlo] + config.otr_window <= t) ++tlo;
      const double ratio =
          static_cast<double>(hi - lo + 1) / static_cast<double>(std::max<size_t>(1, thi - tlo));
      st.worst_window = std::max(st.worst_window, ratio);
      if (!st.flagged_at && ratio > config.otr_threshold) st.flagged_at = t;
    }
    out[agent] = st;
  }
  return out;
}

std::vector<Violation> flag_trading_integrity(const SimTrace& trace, const MonitorConfig& config) {
  std::vector<Violation> out;
  for (const auto& [agent, st] : order_to_trade(trace, config)) {
    if (!st.flagged_at) continue;
    std::ostringstream text;
    text << "order-to-trade ratio " << st.worst_window << " over a " << config.otr_window << "us window exceeds "
         << config.otr_threshold << " (" << st.new_orders << " new orders, " << st.trades << " trades)";
    out.push_back(Violation{Property::TradingIntegrity, *st.flagged_at, {agent}, {}, text.str()});
  }
  return out;
}

size_t Report::count(Property p) const {
  return static_cast<size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.property == p; }));
}

Report evaluate(const SimTrace& trace, const MonitorConfig& config) {
  Report r;
  r.violations = audit_queue_integrity(trace);
  for (const auto& v : r.violations)
    if (!v.subjects.empty()) ++r.rank_inversions_won[v.subjects.front()];

  auto otr = flag_trading_integrity(trace, config);
  r.violations.insert(r.violations.end(), otr.begin(), otr.end());
  r.otr = order_to_trade(trace, config);

  r.staleness = measure_info_symmetry(trace, config);
  for (const auto& [agent, st] : r.staleness) {
    if (st.lag_p99 <= config.lag_threshold) continue;
    std::ostringstream text;
    text << "market-data processing lag p99 " << st.lag_p99 << "us exceeds " << config.lag_threshold
         << "us; staleness p99 " << st.p99 << "us";
    r.violations.push_back(Violation{Property::SymmetricInformation, trace.duration, {agent}, {}, text.str()});
  }

  r.anonymity = measure_anonymity(trace);
  const auto& an = r.anonymity;
  if (an.decided >= config.anonymity_min_decided &&
      an.decided_accuracy > an.baseline + config.anonymity_sigmas * an.std_error) {
    std::set<ParticipantId> guessers;
    for (const auto& g : trace.guesses) guessers.insert(g.agent);
    std::ostringstream text;
    text << "anonymous senders attributed with accuracy " << an.decided_accuracy << " over " << an.decided
         << " decided guesses; chance is " << an.baseline;
    r.violations.push_back(Violation{Property::ParticipantAnonymity, trace.duration,
                                     {guessers.begin(), guessers.end()}, {}, text.str()});
  }

  r.confidentiality = measure_confidentiality(trace);
  for (const auto& h : r.confidentiality.orders) {
    if (!h.detected) continue;
    std::set<ParticipantId> who;
    for (const auto& b : trace.beliefs)
      if (b.venue == h.venue && b.ts == *h.belief_ts) who.insert(b.agent);
    std::ostringstream text;
    text << "undisclosed liquidity of order " << h.order << " inferred at " << *h.belief_ts << "us";
    if (h.reveal_ts) text << ", first public print at " << *h.reveal_ts << "us";
    r.violations.push_back(
        Violation{Property::DataConfidentiality, *h.belief_ts, {who.begin(), who.end()}, {h.order}, text.str()});
  }

  r.fair_access = measure_fair_access(trace);
  for (uint64_t id : r.fair_access.capture_trades) {
    const TradeRecord& t = trace.trades.at(id - 1);
    std::ostringstream text;
    text << "stale quote of order " << t.maker_order << " hit at " << t.price << " while value was "
         << trace.value_at(t.ts);
    r.violations.push_back(Violation{Property::FairMarketAccess, t.ts, {t.taker, t.maker}, {id}, text.str()});
  }

  for (const auto& a : trace.agents) {
    r.buy_fills += a.reported_bought;
    r.sell_fills += a.reported_sold;
  }

  std::stable_sort(r.violations.begin(), r.violations.end(), [](const Violation& a, const Violation& b) {
    return std::pair(a.ts, a.property) < std::pair(b.ts, b.property);
  });
  return r;
}

}  // namespace marketsim::monitors
