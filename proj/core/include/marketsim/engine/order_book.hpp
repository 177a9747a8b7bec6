#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "marketsim/engine/order.hpp"

namespace marketsim::engine {

enum class MatchingAlgo : uint8_t { Fifo, ProRata };

struct BookConfig {
  InstrumentId instrument{0};
  MatchingAlgo algo{MatchingAlgo::Fifo};
  Qty round_lot{100};
  uint64_t seed{0};  // reserve random-replenishment substreams
};

struct Trade {
  OrderId taker_order_id{0};
  OrderId maker_order_id{0};
  ParticipantId taker_participant{0};
  ParticipantId maker_participant{0};
  Price price{};
  Qty qty{};
  SimTime ts{};
  Side aggressor_side{Side::Buy};
  DisplayClass maker_class{DisplayClass::Lit};

  bool operator==(const Trade&) const = default;
};

enum class ChangeKind : uint8_t { Added, Filled, Canceled, Replenished, Modified, Repriced, Reclassed };

/// Journal entry for every mutation of a resting order. Venues turn these
/// into market-data adds and regulator trace records.
struct BookChange {
  ChangeKind kind{ChangeKind::Added};
  OrderId id{0};
  Side side{Side::Buy};
  Price price{};
  DisplayClass display_class{DisplayClass::Lit};
  Qty open_qty{};
  Qty displayed_qty{};
  SimTime ts{};
  bool priority_reset{false};
  SimTime entry_ts{};
  uint64_t entry_seq{0};
};

struct InsertResult {
  std::vector<Trade> trades;
  std::optional<Order> resting;
  Qty canceled{};  // Market / IOC remainder that was not allowed to rest
};

struct ModifyResult {
  Order order;
  std::vector<Trade> trades;
  bool resting{true};
};

struct QuoteView {
  Price price{};
  Qty qty{};
  bool operator==(const QuoteView&) const = default;
};

struct L1View {
  std::optional<QuoteView> bid;
  std::optional<QuoteView> ask;
  bool operator==(const L1View&) const = default;
};

struct LevelView {
  Price price{};
  Qty qty{};
  uint32_t orders{0};
  bool operator==(const LevelView&) const = default;
};

struct L2View {
  std::vector<LevelView> bids;
  std::vector<LevelView> asks;
  bool operator==(const L2View&) const = default;
};

struct AuctionResult {
  std::optional<Price> clearing_price;
  Qty volume{};
  std::vector<Trade> trades;
  std::vector<Order> expired;  // IOC / market remainders dropped after the call
};

/// Demand/supply volume at a candidate call-auction price.
struct AuctionVolume {
  Qty demand{};
  Qty supply{};
  Qty executable() const { return min(demand, supply); }
};

/// Single-instrument limit order book. Integer ticks and microseconds only;
/// every operation is deterministic in its inputs.
class OrderBook {
 public:
  explicit OrderBook(BookConfig config = {});

  const BookConfig& config() const { return config_; }

  /// Continuous-market entry: match, then rest the remainder if allowed.
  InsertResult insert_order(Order order, SimTime now);

  /// Matches `incoming` against the opposite side with the configured
  /// algorithm. `bound` caps the prices reachable beyond the order's own
  /// limit (a venue uses it to stop at a better away quote).
  std::vector<Trade> match(Order& incoming, SimTime now, std::optional<Price> bound = std::nullopt);
  std::vector<Trade> match_fifo(Order& incoming, SimTime now, std::optional<Price> limit,
                                bool lit_only = false);
  std::vector<Trade> match_pro_rata(Order& incoming, SimTime now, std::optional<Price> limit,
                                    bool lit_only = false);

  /// Second pass for discretionary orders: takes displayed liquidity up to
  /// price + range (buy) / price - range (sell) at the maker's price.
  std::vector<Trade> discretionary_probe(Order& incoming, SimTime now,
                                         std::optional<Price> bound = std::nullopt);

  /// Rests an order without matching; assigns (entry_ts, entry_seq).
  const Order& rest(Order order, SimTime now);

  Order cancel_order(OrderId id, SimTime now);
  ModifyResult modify_order(OrderId id, std::optional<Price> new_price, std::optional<Qty> new_qty,
                            SimTime now);

  /// Refills a depleted reserve slice. Returns false (and leaves the order
  /// alone) when the preconditions do not hold.
  bool replenish_reserve(Order& order, SimTime now);

  /// Batch-mode entry: limit orders rest unmatched, market orders wait for
  /// the next call.
  void add_to_auction(Order order, SimTime now);
  AuctionResult clear_batch_auction(SimTime now);
  AuctionVolume auction_volume_at(Price p) const;

  L1View best_quotes() const;
  L2View snapshot(size_t depth) const;

  /// Hide & Light order becomes displayed again, keeping its priority.
  void relight(OrderId id, SimTime now);
  /// Slid order goes back to its original price with fresh priority.
  /// Executes if that price is marketable against this book.
  std::vector<Trade> revert_slid(OrderId id, SimTime now);
  /// Moves a slid order to another adjusted price (fresh priority).
  void reslide(OrderId id, Price price, SimTime now);

  /// Resets the first-Day-ISO bookkeeping.
  void start_session() { iso_levels_.clear(); }

  const Order* find(OrderId id) const;
  bool contains(OrderId id) const { return find(id) != nullptr; }
  std::vector<Order> level_orders(Side side, Price price) const;
  std::vector<Order> resting_orders() const;  // bids then asks, best first
  std::vector<Order> pending_market_orders() const { return pending_market_; }
  std::optional<Price> best_price(Side side, bool displayed_only) const;
  std::optional<Price> last_trade_price() const { return last_trade_price_; }
  void set_last_trade_price(std::optional<Price> p) { last_trade_price_ = p; }
  size_t order_count() const { return orders_.size() + pending_market_.size(); }
  bool empty() const { return order_count() == 0; }

  std::vector<BookChange> drain_changes();
  uint64_t next_seq() { return ++seq_counter_; }

 private:
  struct PriceOrder {
    bool descending{false};
    bool operator()(Price a, Price b) const { return descending ? a > b : a < b; }
  };
  // TODO: removing from the front is O(depth); an intrusive list would make
  // deep sweeps linear.
  using LevelQueue = std::vector<OrderId>;
  using Levels = std::map<Price, LevelQueue, PriceOrder>;

  Levels& levels(Side side) { return side == Side::Buy ? bids_ : asks_; }
  const Levels& levels(Side side) const { return side == Side::Buy ? bids_ : asks_; }

  void link(const Order& order);
  void unlink(const Order& order);
  void reposition(Order& order);
  void fill(Order& taker, Order& maker, Qty qty, Price price, SimTime now, std::vector<Trade>& out);
  /// After a maker fill: removes it if done, or refills and requeues a reserve.
  /// Returns true when the maker left its slot in the level queue.
  bool settle_maker(OrderId maker_id, SimTime now);
  void record(ChangeKind kind, const Order& order, SimTime now, bool priority_reset);
  void validate_new(const Order& order) const;
  static std::optional<Price> tighter(Side taker_side, std::optional<Price> a, std::optional<Price> b);

  BookConfig config_;
  Levels bids_{PriceOrder{true}};
  Levels asks_{PriceOrder{false}};
  std::unordered_map<OrderId, Order> orders_;
  std::vector<Order> pending_market_;
  std::set<std::pair<Side, int64_t>> iso_levels_;
  std::optional<Price> last_trade_price_;
  uint64_t seq_counter_{0};
  std::vector<BookChange> changes_;
};

/// Largest-remainder pro-rata split of `incoming` across `resting`
/// quantities (given in time priority order). Remainder shares go to the
/// largest fractional parts, ties to the earlier order.
std::vector<Qty> pro_rata_allocation(Qty incoming, const std::vector<Qty>& resting);

}  // namespace marketsim::engine
