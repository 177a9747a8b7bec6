#include <gtest/gtest.h>

#include <string>

#include "scenario_helpers.hpp"

namespace marketsim {
namespace {

using engine::ChangeKind;
using oracle::book_events;
using oracle::orders_of;
using oracle::run_json;
using oracle::trades_with_maker;

// Two lit venues, 100 us everywhere, SIP at its default latency.
std::string two_venues(const std::string& agents) {
  return R"({"duration_us": 100000, "default_latency_us": 100,
             "venues": [{"id": 1, "name": "E1"}, {"id": 2, "name": "E2"}],
             "agents": )" +
         agents + "}";
}

std::string order(const std::string& name, int at, const std::string& venue, const std::string& side, int price,
                  int qty, const std::string& extra = "") {
  return R"({"name": ")" + name + R"(", "strategy": "scripted", "script": [{"at_us": )" + std::to_string(at) +
         R"(, "venue": ")" + venue + R"(", "side": ")" + side + R"(", "price": )" + std::to_string(price) +
         R"(, "qty": )" + std::to_string(qty) + extra + "}]}";
}

TEST(Venue, InboundBumpDelaysAcceptance) {
  const auto r = run_json(two_venues("[" + order("a", 1000, "E1", "buy", 999, 100) + "]"),
                          {"venues[0].speed_bump_in_us=300"});
  const auto o = orders_of(r.trace, "a");
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0]->accepted_ts, SimTime{1400});
  EXPECT_EQ(o[0]->claimed_submit_ts, SimTime{1000});
}

TEST(Venue, BumpExemptCancelsOvertakeBumpedTakers) {
  const std::string agents =
      R"([{"name": "maker", "strategy": "scripted", "script": [
            {"at_us": 1000, "tag": "q", "venue": "E1", "side": "sell", "price": 1001, "qty": 100},
            {"at_us": 5100, "op": "cancel", "tag": "q", "venue": "E1"}]},
          )" +
      order("taker", 5000, "E1", "buy", 1001, 100, R"(, "tif": "ioc")") + "]";
  const auto bumped = run_json(two_venues(agents), {"venues[0].speed_bump_in_us=500"});
  EXPECT_EQ(bumped.trace.trades.size(), 1u) << "cancel waits behind the taker in the bump";
  const auto exempt =
      run_json(two_venues(agents), {"venues[0].speed_bump_in_us=500", "venues[0].bump_exempt_cancels=true"});
  EXPECT_TRUE(exempt.trace.trades.empty());
  EXPECT_EQ(book_events(exempt.trace, ChangeKind::Canceled).size(), 1u);
}

TEST(Venue, LockingLimitSlidesOneTickAndRevertsOnUnlock) {
  const std::string agents =
      R"([{"name": "away", "strategy": "scripted", "script": [
            {"at_us": 500, "tag": "a", "venue": "E2", "side": "sell", "price": 1001, "qty": 100},
            {"at_us": 5000, "op": "cancel", "tag": "a", "venue": "E2"}]},
          )" +
      order("bidder", 2000, "E1", "buy", 1001, 100) + "]";
  const auto r = run_json(two_venues(agents));
  const auto added = book_events(r.trace, ChangeKind::Added);
  ASSERT_EQ(added.size(), 2u);
  EXPECT_EQ(added[1]->price, Price{1000}) << "rests one tick inside the away ask";
  const auto repriced = book_events(r.trace, ChangeKind::Repriced);
  ASSERT_EQ(repriced.size(), 1u);
  EXPECT_EQ(repriced[0]->price, Price{1001});
  EXPECT_GT(repriced[0]->ts, SimTime{5000});
  EXPECT_FALSE(repriced[0]->priority_reset);
}

TEST(Venue, HideAndLightHidesDuringLockAndRelights) {
  const std::string agents =
      R"([{"name": "away", "strategy": "scripted", "script": [
            {"at_us": 500, "tag": "a", "venue": "E2", "side": "sell", "price": 1001, "qty": 100},
            {"at_us": 5000, "op": "cancel", "tag": "a", "venue": "E2"}]},
          {"name": "hl", "strategy": "scripted", "knows_hide_and_light": true, "script": [
            {"at_us": 2000, "venue": "E1", "side": "buy", "kind": "hide_and_light", "price": 1001, "qty": 100}]}])";
  const auto r = run_json(two_venues(agents));
  const auto added = book_events(r.trace, ChangeKind::Added);
  ASSERT_EQ(added.size(), 2u);
  EXPECT_EQ(added[1]->display_class, engine::DisplayClass::Hidden);
  EXPECT_EQ(added[1]->price, Price{1001});
  const auto reclassed = book_events(r.trace, ChangeKind::Reclassed);
  ASSERT_EQ(reclassed.size(), 1u);
  EXPECT_EQ(reclassed[0]->display_class, engine::DisplayClass::Lit);
  EXPECT_EQ(reclassed[0]->price, Price{1001});
}

TEST(Venue, TradeThroughIsRoutedOrRejectedByPolicy) {
  const std::string agents = "[" + order("away", 500, "E2", "sell", 1000, 100) + "," +
                             order("local", 500, "E1", "sell", 1001, 100) + "," +
                             order("taker", 2000, "E1", "buy", 1001, 200, R"(, "routable": true, "tif": "ioc")") +
                             "]";
  const auto routed = run_json(two_venues(agents));
  ASSERT_EQ(routed.trace.trades.size(), 2u);
  // The protected away quote gets its displayed size; the rest sweeps locally.
  const auto& local = routed.trace.trades[0];
  const auto& away = routed.trace.trades[1];
  EXPECT_EQ(local.venue, 1u);
  EXPECT_EQ(local.price, Price{1001});
  EXPECT_EQ(local.qty, Qty{100});
  EXPECT_EQ(away.venue, 2u);
  EXPECT_EQ(away.price, Price{1000});
  EXPECT_EQ(away.qty, Qty{100});
  bool saw_routed = false;
  for (const auto& o : routed.trace.orders) saw_routed |= o.routed && o.venue == 2u;
  EXPECT_TRUE(saw_routed);

  const auto rejected = run_json(two_venues(agents), {"venues[0].protection=reject"});
  EXPECT_TRUE(rejected.trace.trades.empty());
}

TEST(Venue, ProRataVenueAllocatesWorkedExample) {
  const std::string agents = "[" + order("a", 500, "E1", "sell", 1000, 200) + "," +
                             order("b", 600, "E1", "sell", 1000, 50) + "," +
                             order("taker", 2000, "E1", "buy", 1000, 200, R"(, "tif": "ioc")") + "]";
  const auto r = run_json(two_venues(agents), {"venues[0].matching_algo=pro_rata"});
  Qty a{}, b{};
  for (const auto* t : trades_with_maker(r.trace, "a")) a += t->qty;
  for (const auto* t : trades_with_maker(r.trace, "b")) b += t->qty;
  EXPECT_EQ(a, Qty{160});
  EXPECT_EQ(b, Qty{40});
}

TEST(Venue, BatchVenueClearsAtIntervalBoundaryAtOnePrice) {
  const std::string agents = "[" + order("s1", 1000, "E1", "sell", 999, 100) + "," +
                             order("s2", 1200, "E1", "sell", 1000, 100) + "," +
                             order("b1", 1500, "E1", "buy", 1002, 200) + "]";
  const auto r = run_json(two_venues(agents), {"venues[0].batch_interval_us=10000"});
  ASSERT_EQ(r.trace.trades.size(), 2u);
  for (const auto& t : r.trace.trades) {
    EXPECT_EQ(t.ts, SimTime{10000});
    EXPECT_TRUE(t.auction);
    EXPECT_EQ(t.price, r.trace.trades[0].price);
  }
}

TEST(Venue, DarkVenuePublishesNoPreTradeData) {
  const std::string agents = "[" + order("a", 500, "E1", "sell", 1000, 100) + "," +
                             order("b", 600, "E1", "buy", 1000, 100) + "]";
  const std::string text = R"({"duration_us": 50000, "default_latency_us": 100,
      "venues": [{"id": 1, "name": "E1", "dark": true}],
      "agents": )" + agents.substr(0, agents.size() - 1) +
                           R"(, {"name": "watcher", "strategy": "scripted", "feeds": {"E1": "l2"}}]})";
  const auto r = run_json(text);
  EXPECT_EQ(r.trace.trades.size(), 1u);
  EXPECT_EQ(r.trace.pre_trade_messages, 0u);
  EXPECT_GT(r.trace.post_trade_messages, 0u);
  EXPECT_EQ(r.trace.print_publications.size(), 1u);
}

TEST(Venue, CancelOfAnotherParticipantsOrderIsIgnored) {
  // Each agent's order ids are its own; a scripted cancel of an unknown tag
  // is a no-op rather than an error.
  const std::string agents = R"([{"name": "a", "strategy": "scripted", "script": [
      {"at_us": 500, "tag": "x", "venue": "E1", "side": "sell", "price": 1001, "qty": 100}]},
    {"name": "b", "strategy": "scripted", "script": [
      {"at_us": 900, "op": "cancel", "tag": "x", "venue": "E1"}]}])";
  const auto r = run_json(two_venues(agents));
  EXPECT_TRUE(book_events(r.trace, ChangeKind::Canceled).empty());
}

TEST(Venue, ReserveOrderReplenishesWithFreshPriority) {
  const std::string agents =
      R"([{"name": "ice", "strategy": "scripted", "script": [
            {"at_us": 500, "venue": "E1", "side": "sell", "kind": "reserve", "price": 1000, "qty": 1000, "display": 200}]},
          )" +
      order("lit", 800, "E1", "sell", 1000, 100) + "," +
      order("taker", 2000, "E1", "buy", 1000, 300, R"(, "tif": "ioc")") + "]";
  const auto r = run_json(two_venues(agents));
  // 200 displayed from the iceberg, then the lit order (ahead of the refill).
  ASSERT_EQ(r.trace.trades.size(), 2u);
  EXPECT_EQ(r.trace.trades[0].qty, Qty{200});
  EXPECT_EQ(r.trace.trades[1].maker, oracle::participant(r.trace, "lit"));
  EXPECT_EQ(book_events(r.trace, ChangeKind::Replenished).size(), 1u);
}

}  // namespace
}  // namespace marketsim
