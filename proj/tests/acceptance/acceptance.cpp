// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "equivalence.hpp"
#include "marketsim/engine/order_book.hpp"
#include "marketsim/monitors/monitors.hpp"
#include "scenario_helpers.hpp"

namespace {

using namespace marketsim;
using monitors::Property;
using oracle::bundled;
using oracle::participant;
namespace sc = marketsim::scenario;

struct Outcome {
  bool pass{false};
  std::string detail;
};

sc::RunResult run_bundled(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return sc::run(sc::load_scenario(bundled(name), overrides));
}

Qty filled_at(const SimTrace& trace, ParticipantId who, Price px) {
  Qty q{};
  for (const auto& t : trace.trades)
    if ((t.buyer() == who || t.seller() == who) && t.price == px) q += t.qty;
  return q;
}

Outcome worked_example(engine::MatchingAlgo algo, Qty want_a, Qty want_b) {
  engine::OrderBook book(engine::BookConfig{0, algo, Qty{100}, 1});
  auto limit = [](OrderId id, Side side, int64_t qty) {
    return engine::make_order(id, side, engine::OrderKind::Limit, Price{100}, Qty{qty}, static_cast<ParticipantId>(id));
  };
  book.insert_order(limit(1, Side::Buy, 200), SimTime{1});
  book.insert_order(limit(2, Side::Buy, 50), SimTime{2});
  const auto r = book.insert_order(limit(3, Side::Sell, 200), SimTime{3});
  Qty a{}, b{};
  for (const auto& t : r.trades) (t.maker_order_id == 1 ? a : b) += t.qty;
  std::ostringstream os;
  os << "A(200) filled " << a << ", B(50) filled " << b << " (want " << want_a << "/" << want_b << ")";
  return {a == want_a && b == want_b, os.str()};
}

Outcome criterion1() { return worked_example(engine::MatchingAlgo::ProRata, Qty{160}, Qty{40}); }
Outcome criterion2() { return worked_example(engine::MatchingAlgo::Fifo, Qty{200}, Qty{0}); }

Outcome criterion3() {
  size_t runs = 0, ops = 0;
  for (auto algo : {engine::MatchingAlgo::Fifo, engine::MatchingAlgo::ProRata}) {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      const auto r = oracle::check_equivalence(algo, seed, 10'000);
      if (!r.same || r.ops != 10'000)
        return {false, std::string(algo == engine::MatchingAlgo::Fifo ? "fifo" : "pro-rata") + " seed " +
                           std::to_string(seed) + ": " + r.mismatch};
      ++runs;
      ops += r.ops;
    }
  }
  return {true, std::to_string(runs) + " runs (2 algorithms x 20 seeds), " + std::to_string(ops) +
                    " ops, identical trades and books"};
}

Outcome criterion4() {
  const auto cfg = sc::load_scenario(bundled("scalp"));
  SimTime attacker_path{}, routing{};
  for (const auto& l : cfg.links) {
    if (l.from == "E1" && l.to == "scalper") attacker_path += l.base;
    if (l.from == "scalper" && l.to == "E2") attacker_path += l.base;
    if (l.from == "E1" && l.to == "E2") routing = l.base;
  }
  const auto base = sc::run(cfg);
  const auto bumped = sc::run(sc::load_scenario(bundled("scalp"), {"venues[1].speed_bump_in_us=350"}));
  const auto broker = participant(base.trace, "broker");
  const Qty base_up = filled_at(base.trace, broker, Price{1001});
  const Qty base_x = filled_at(base.trace, broker, Price{1000});
  const Qty bump_up = filled_at(bumped.trace, broker, Price{1001});
  const Qty bump_x = filled_at(bumped.trace, broker, Price{1000});
  std::ostringstream os;
  os << "attacker path " << attacker_path << "us < routing " << routing << "us: broker " << base_x << "@x + "
     << base_up << "@x+1; with 350us bump at E2: " << bump_x << "@x + " << bump_up << "@x+1";
  const bool pass = attacker_path < routing && SimTime{350} > routing - attacker_path && base_up == Qty{40'000} &&
                    base_x == Qty{60'000} && bump_up == Qty{0} && bump_x == Qty{100'000};
  return {pass, os.str()};
}

Outcome criterion5() {
  const auto base = run_bundled("snipe_baseline");
  const auto batch = run_bundled("snipe_baseline", {"venues[*].batch_interval_us=100000"});
  const auto bump900 = run_bundled("snipe_baseline", {"venues[*].speed_bump_in_us=900"});
  const auto bump1000 = run_bundled("snipe_baseline", {"venues[*].speed_bump_in_us=1000"});
  const auto sniper = participant(base.trace, "sniper");
  const int64_t pnl = base.report.fair_access.agents.at(sniper).pnl;
  const size_t jumps = base.trace.signal.size();
  std::ostringstream os;
  os << jumps << " jumps; captures " << base.report.fair_access.stale_captures << ", sniper P&L " << pnl
     << "; batch 100ms captures " << batch.report.fair_access.stale_captures << "; bump 900us captures "
     << bump900.report.fair_access.stale_captures << "; bump 1000us captures "
     << bump1000.report.fair_access.stale_captures;
  const bool pass = jumps >= 20 && base.report.fair_access.stale_captures > 0 && pnl > 0 &&
                    batch.report.fair_access.stale_captures == 0 && bump900.report.fair_access.stale_captures == 0 &&
                    bump1000.report.fair_access.stale_captures == 0;
  return {pass, os.str()};
}

Outcome criterion6() {
  const auto hl = run_bundled("queue_jump_hl");
  const auto control = run_bundled("queue_jump_hl_control");
  const size_t v = hl.report.count(Property::QueueIntegrity);
  const size_t vc = control.report.count(Property::QueueIntegrity);
  bool ahead = false;
  const auto attacker = participant(hl.trace, "attacker");
  const auto victim = oracle::orders_of(hl.trace, "victim");
  for (const auto& t : hl.trace.trades)
    if (t.maker == attacker && !victim.empty())
      for (const auto& o : hl.trace.orders)
        if (o.order == t.maker_order && victim.front()->accepted_ts < o.accepted_ts) ahead = true;
  std::ostringstream os;
  os << "H&L: attacker filled ahead of earlier slid order: " << (ahead ? "yes" : "no") << ", violations " << v
     << "; plain-limit control violations " << vc;
  return {ahead && v == 1 && vc == 0, os.str()};
}

Outcome criterion7() {
  const auto clean = run_bundled("fingerprint").report.anonymity;
  const auto noisy = run_bundled("fingerprint_noise").report.anonymity;
  const double dev = std::abs(noisy.decided_accuracy - noisy.baseline);
  std::ostringstream os;
  os << "zero jitter: accuracy " << clean.accuracy << " over " << clean.anonymous_orders
     << " anonymous orders; sigma 500us: accuracy " << noisy.decided_accuracy << " over " << noisy.decided
     << " attributed orders, |acc - " << noisy.baseline << "| = " << dev << " vs 3 SE = " << 3 * noisy.std_error;
  const bool pass = clean.accuracy == 1.0 && clean.anonymous_orders >= 100 && noisy.baseline == 0.5 &&
                    noisy.decided >= 30 && dev <= 3 * noisy.std_error;
  return {pass, os.str()};
}

// Independent queue model for the stuffing burst: every stuffer submit and
// cancel produces one L2 message at the venue, the victim receives it one
// link later and serves messages FIFO at a fixed rate.
SimTime expected_staleness(const sc::ScenarioConfig& cfg, SimTime at) {
  const auto& stuffer = cfg.agents.at(2).params;
  const int64_t start = std::get<int64_t>(stuffer.at("start_us"));
  const int64_t duration = std::get<int64_t>(stuffer.at("duration_us"));
  const int64_t period = std::get<int64_t>(stuffer.at("period_us"));
  const int64_t cancel = std::get<int64_t>(stuffer.at("cancel_delay_us"));
  const int64_t link = cfg.default_latency->value;
  const double service = 1000.0 / cfg.agents.at(1).processing_rate;
  std::vector<int64_t> venue_ts;
  for (int64_t t = start; t < start + duration; t += period) {
    venue_ts.push_back(t + link);
    venue_ts.push_back(t + cancel + link);
  }
  double busy = 0.0;
  int64_t newest = -1;
  for (int64_t ts : venue_ts) {
    busy = std::max(busy, static_cast<double>(ts + link)) + service;
    if (busy > static_cast<double>(at.value)) break;
    newest = ts;
  }
  return SimTime{at.value - newest};
}

Outcome criterion8() {
  const auto cfg = sc::load_scenario(bundled("quote_stuff"));
  const auto r = sc::run(cfg);
  const auto victim = participant(r.trace, "victim");
  const auto stuffer = participant(r.trace, "stuffer");
  const auto& history = r.trace.feed_samples.at(victim);
  const SimTime t0{std::get<int64_t>(cfg.agents.at(2).params.at("start_us"))};
  bool increasing = true;
  std::optional<SimTime> prev;
  SimTime peak{};
  for (int k = 1; k <= 100; ++k) {
    const auto s = monitors::staleness_at(history, t0 + SimTime{1000 * k});
    if (!s || (prev && *s <= *prev)) increasing = false;
    if (s) {
      prev = s;
      peak = std::max(peak, *s);
    }
  }
  const SimTime want = expected_staleness(cfg, t0 + SimTime{100'000});
  const double err = std::abs(static_cast<double>((peak - want).value)) / static_cast<double>(want.value);
  bool flagged = false;
  for (const auto& v : r.report.violations)
    if (v.property == Property::TradingIntegrity && v.subjects == std::vector<ParticipantId>{stuffer}) flagged = true;
  const double otr = r.report.otr.at(stuffer).worst_window;
  std::ostringstream os;
  os << "staleness strictly increasing over 100 ms: " << (increasing ? "yes" : "no") << ", peak " << peak
     << "us vs queue model " << want << "us (" << err * 100 << "% off); stuffer OTR " << otr
     << (flagged ? " flagged" : " not flagged") << " at threshold " << cfg.monitors.otr_threshold;
  return {increasing && peak >= SimTime{50'000} && err <= 0.10 && flagged, os.str()};
}

Outcome criterion9() {
  const auto ping = run_bundled("ping").report.confidentiality;
  const auto dark = run_bundled("ping_dark").report.confidentiality;
  const auto control = run_bundled("ping_control").report.confidentiality;
  std::ostringstream os;
  os << "iceberg: detection rate " << ping.rate << ", min lead "
     << (ping.min_lead ? std::to_string(ping.min_lead->value) + "us" : std::string("n/a")) << "; dark feed rate "
     << dark.rate << "; probing disabled rate " << control.rate;
  const bool pass = ping.rate > 0.0 && ping.min_lead && ping.min_lead->value > 0 && dark.rate == 0.0 &&
                    dark.hidden_orders > 0 && control.rate == 0.0 && control.hidden_orders > 0;
  return {pass, os.str()};
}

Outcome criterion10() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(MARKETSIM_SCENARIO_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ostringstream problems;
  double slowest = 0.0;
  size_t honest_violations = 0;
  bool saw_honest = false;
  for (const auto& f : files) {
    const auto cfg = sc::load_scenario(f);
    const auto t = std::chrono::steady_clock::now();
    const auto a = sc::run(cfg);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count());
    const auto b = sc::run(cfg);
    Qty tape{}, reported_buy{}, reported_sell{};
    for (const auto& tr : a.trace.trades) tape += tr.qty;
    for (const auto& ag : a.trace.agents) {
      reported_buy += ag.reported_bought;
      reported_sell += ag.reported_sold;
    }
    const std::string n = cfg.name;
    if (a.report.buy_fills != a.report.sell_fills || a.report.buy_fills != tape || reported_buy != tape ||
        reported_sell != tape)
      problems << n << ": fills not conserved; ";
    if (a.report.fair_access.pnl_sum != 0) problems << n << ": P&L sums to " << a.report.fair_access.pnl_sum << "; ";
    if (a.trace.event_hash != b.trace.event_hash || sc::trades_csv(a.trace) != sc::trades_csv(b.trace))
      problems << n << ": replay differs; ";
    if (n == "honest_baseline") {
      saw_honest = true;
      honest_violations = a.report.violations.size();
    }
  }
  if (!saw_honest) problems << "no honest_baseline scenario; ";
  if (honest_violations != 0) problems << "honest baseline has " << honest_violations << " violations; ";
  if (slowest >= 10.0) problems << "slowest run " << slowest << "s; ";
  std::ostringstream os;
  os << files.size() << " scenarios: conservation, P&L closure, replay hash; honest baseline violations "
     << honest_violations << "; slowest run " << slowest << "s";
  if (!problems.str().empty()) os << " -- " << problems.str();
  return {problems.str().empty(), os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"pro-rata worked example", criterion1},    {"FIFO worked example", criterion2},
      {"oracle equivalence", criterion3},         {"scalping narrative", criterion4},
      {"sniping and countermeasures", criterion5}, {"queue jumping", criterion6},
      {"latency fingerprinting", criterion7},     {"quote stuffing", criterion8},
      {"pinging", criterion9},                    {"global invariants", criterion10},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-28s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
