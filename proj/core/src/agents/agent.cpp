#include "marketsim/agents/agent.hpp"

#include "marketsim/errors.hpp"

namespace marketsim::agents {

namespace {

template <typename T>
const T* typed(const ParamMap& values, const std::string& key, const std::string& path, const char* want) {
  auto it = values.find(key);
  if (it == values.end()) return nullptr;
  if (const T* v = std::get_if<T>(&it->second)) return v;
  throw ConfigError(path + ".params." + key, std::string("expected ") + want);
}

}  // namespace

int64_t Params::get_int(const std::string& key, int64_t def) const {
  const auto* v = typed<int64_t>(values_, key, path_, "integer");
  return v ? *v : def;
}

double Params::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  if (it != values_.end())
    if (const auto* i = std::get_if<int64_t>(&it->second)) return static_cast<double>(*i);
  const auto* v = typed<double>(values_, key, path_, "number");
  return v ? *v : def;
}

bool Params::get_bool(const std::string& key, bool def) const {
  const auto* v = typed<bool>(values_, key, path_, "boolean");
  return v ? *v : def;
}

std::string Params::get_string(const std::string& key, const std::string& def) const {
  const auto* v = typed<std::string>(values_, key, path_, "string");
  return v ? *v : def;
}

std::vector<std::string> Params::get_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end())
    if (const auto* s = std::get_if<std::string>(&it->second)) return {*s};
  const auto* v = typed<std::vector<std::string>>(values_, key, path_, "list of strings");
  return v ? *v : std::vector<std::string>{};
}

Agent::Agent(ParticipantId id, std::string name, Capabilities caps, AgentEnv env, Params params)
    : id_(id),
      name_(std::move(name)),
      caps_(std::move(caps)),
      env_(std::move(env)),
      params_(std::move(params)),
      value_(env_.initial_value),
      consumer_(caps_.processing_rate) {}

void Agent::handle(const simnet::Event& ev) {
  if (const auto* r = std::get_if<ExecutionReport>(&ev.payload)) {
    bookkeep(*r);
    on_report(*r);
  } else if (const auto* md = std::get_if<MarketDataPtr>(&ev.payload)) {
    const SimTime done = consumer_.ingest(ev.deliver_at, (*md)->venue_ts);
    if (done == now())
      deliver(*md);
    else
      env_.net->scheduler().schedule(done, endpoint(), endpoint(), ProcessedFeed{*md, std::nullopt, ev.deliver_at});
  } else if (const auto* q = std::get_if<NbboQuote>(&ev.payload)) {
    const SimTime done = consumer_.ingest(ev.deliver_at, q->source_ts);
    if (done == now())
      deliver(*q);
    else
      env_.net->scheduler().schedule(done, endpoint(), endpoint(), ProcessedFeed{nullptr, *q, ev.deliver_at});
  } else if (const auto* p = std::get_if<ProcessedFeed>(&ev.payload)) {
    if (p->data)
      deliver(p->data);
    else if (p->nbbo)
      deliver(*p->nbbo);
  } else if (const auto* s = std::get_if<SignalUpdate>(&ev.payload)) {
    value_ = s->value;
    on_signal(*s);
  } else if (const auto* t = std::get_if<Timer>(&ev.payload)) {
    on_timer(t->tag);
  }
}

void Agent::deliver(const MarketDataPtr& md) {
  if (md->pre_trade) {
    l1_[md->venue] = md->l1;
    if (md->level == FeedLevel::L2) l2_[md->venue] = md->l2;
  }
  on_market_data(*md);
}

void Agent::deliver(const NbboQuote& q) {
  nbbo_ = q;
  on_nbbo(q);
}

void Agent::bookkeep(const ExecutionReport& r) {
  auto it = working_.find(r.order_id);
  switch (r.kind) {
    case ReportKind::Fill:
      (r.side == Side::Buy ? bought_ : sold_) += r.fill_qty;
      if (it != working_.end()) {
        it->second.leaves = r.leaves;
        if (r.leaves.value <= 0) working_.erase(it);
      }
      break;
    case ReportKind::Canceled:
    case ReportKind::Rejected:
      if (it != working_.end()) working_.erase(it);
      break;
    case ReportKind::Routed:
      if (it != working_.end() && r.routed_to && r.leaves.value <= 0) it->second.venue = *r.routed_to;
      break;
    case ReportKind::Modified:
      if (it != working_.end()) it->second.leaves = r.leaves;
      break;
    default:
      break;
  }
}

OrderId Agent::submit(VenueId venue, OrderMessage msg) {
  using engine::OrderKind;
  if (msg.kind == OrderKind::HideAndLight && !caps_.knows_hide_and_light)
    throw Error(ErrorCode::OrderTypeNotPermitted, name_ + " does not know the hide-and-light order type");
  if (msg.kind == OrderKind::DayIso && !caps_.knows_day_iso)
    throw Error(ErrorCode::OrderTypeNotPermitted, name_ + " does not know the day ISO order type");
  msg.type = MsgType::New;
  msg.order_id = (static_cast<OrderId>(id_) << 40) | next_order_++;
  msg.participant = id_;
  msg.instrument = env_.instrument;
  msg.claimed_submit_ts = now();
  working_[msg.order_id] = Working{venue, msg.side, msg.kind, msg.price, msg.qty};
  env_.net->send(endpoint(), env_.venues.at(venue), msg);
  return msg.order_id;
}

OrderId Agent::submit_limit(VenueId venue, Side side, Price price, Qty qty, engine::TimeInForce tif) {
  OrderMessage msg;
  msg.side = side;
  msg.kind = engine::OrderKind::Limit;
  msg.price = price;
  msg.qty = qty;
  msg.tif = tif;
  return submit(venue, msg);
}

void Agent::cancel(OrderId id) {
  auto it = working_.find(id);
  if (it == working_.end()) return;
  OrderMessage msg;
  msg.type = MsgType::Cancel;
  msg.order_id = id;
  msg.participant = id_;
  msg.instrument = env_.instrument;
  msg.side = it->second.side;
  msg.claimed_submit_ts = now();
  env_.net->send(endpoint(), env_.venues.at(it->second.venue), msg);
}

void Agent::modify(OrderId id, std::optional<Price> price, std::optional<Qty> qty) {
  auto it = working_.find(id);
  if (it == working_.end()) return;
  OrderMessage msg;
  msg.type = MsgType::Modify;
  msg.order_id = id;
  msg.participant = id_;
  msg.instrument = env_.instrument;
  msg.side = it->second.side;
  msg.new_price = price;
  msg.new_qty = qty;
  msg.claimed_submit_ts = now();
  env_.net->send(endpoint(), env_.venues.at(it->second.venue), msg);
}

void Agent::wake_at(SimTime at, uint64_t tag) {
  env_.net->scheduler().schedule(std::max(at, now()), endpoint(), endpoint(), Timer{tag});
}

VenueId Agent::venue_param(const std::string& key) const {
  const std::string name = params_.get_string(key, "");
  if (name.empty()) {
    if (env_.venue_ids.size() == 1) return env_.venue_ids.begin()->second;
    throw ConfigError(name_ + ".params." + key, "venue required");
  }
  auto it = env_.venue_ids.find(name);
  if (it == env_.venue_ids.end()) throw ConfigError(name_ + ".params." + key, "unknown venue " + name);
  return it->second;
}

std::vector<VenueId> Agent::venue_list_param(const std::string& key) const {
  std::vector<VenueId> out;
  const auto names = params_.get_list(key);
  if (names.empty())
    for (const auto& [name, id] : env_.venue_ids) out.push_back(id);
  for (const auto& n : names) {
    auto it = env_.venue_ids.find(n);
    if (it == env_.venue_ids.end()) throw ConfigError(name_ + ".params." + key, "unknown venue " + n);
    out.push_back(it->second);
  }
  return out;
}

Qty Agent::round_lot(VenueId venue) const {
  auto it = env_.round_lots.find(venue);
  return it == env_.round_lots.end() ? Qty{100} : it->second;
}

const engine::L1View* Agent::l1(VenueId venue) const {
  auto it = l1_.find(venue);
  return it == l1_.end() ? nullptr : &it->second;
}

const engine::L2View* Agent::l2(VenueId venue) const {
  auto it = l2_.find(venue);
  return it == l2_.end() ? nullptr : &it->second;
}

}  // namespace marketsim::agents
