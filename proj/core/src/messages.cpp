#include "marketsim/messages.hpp"

#include <sstream>

namespace marketsim {

namespace {

std::string_view type_name(MsgType t) {
  switch (t) {
    case MsgType::New: return "new";
    case MsgType::Cancel: return "cancel";
    case MsgType::Modify: return "modify";
  }
  return "?";
}

std::string_view report_name(ReportKind k) {
  switch (k) {
    case ReportKind::Accepted: return "accepted";
    case ReportKind::Fill: return "fill";
    case ReportKind::Canceled: return "canceled";
    case ReportKind::Rejected: return "rejected";
    case ReportKind::Routed: return "routed";
    case ReportKind::Modified: return "modified";
    case ReportKind::CancelRejected: return "cancel_rejected";
  }
  return "?";
}

void put_quote(std::ostringstream& os, const std::optional<engine::QuoteView>& q) {
  if (q)
    os << q->qty << '@' << q->price;
  else
    os << '-';
}

struct Summarizer {
  std::ostringstream& os;

  void operator()(const OrderMessage& m) const {
    os << "order " << type_name(m.type) << " id=" << m.order_id << " p=" << m.participant;
    if (m.type == MsgType::New) {
      os << ' ' << to_string(m.side) << ' ' << engine::to_string(m.kind) << ' ' << m.qty;
      if (m.price) os << '@' << *m.price;
      os << " claimed=" << m.claimed_submit_ts;
      if (m.routed) os << " routed";
    } else if (m.type == MsgType::Modify) {
      if (m.new_price) os << " px=" << *m.new_price;
      if (m.new_qty) os << " qty=" << *m.new_qty;
    }
  }
  void operator()(const ExecutionReport& r) const {
    os << "report " << report_name(r.kind) << " id=" << r.order_id << " v=" << r.venue;
    if (r.kind == ReportKind::Fill) os << ' ' << r.fill_qty << '@' << r.fill_price;
    os << " leaves=" << r.leaves;
  }
  void operator()(const MarketDataPtr& md) const {
    os << "md v=" << md->venue << (md->level == FeedLevel::L1 ? " l1 " : " l2 ");
    put_quote(os, md->l1.bid);
    os << '/';
    put_quote(os, md->l1.ask);
    os << " upd=" << md->updates.size() << " prints=" << md->prints.size();
  }
  void operator()(const VenueQuote& q) const {
    os << "quote v=" << q.venue << ' ';
    put_quote(os, q.l1.bid);
    os << '/';
    put_quote(os, q.l1.ask);
  }
  void operator()(const NbboQuote& q) const {
    os << "nbbo ";
    if (q.best_bid)
      os << q.best_bid->price << "@v" << q.best_bid->venue;
    else
      os << '-';
    os << '/';
    if (q.best_ask)
      os << q.best_ask->price << "@v" << q.best_ask->venue;
    else
      os << '-';
  }
  void operator()(const SignalUpdate& s) const { os << "signal " << s.previous << "->" << s.value; }
  void operator()(const Timer& t) const { os << "timer " << t.tag; }
  void operator()(const EngineTask& t) const {
    os << "engine ";
    (*this)(t.msg);
  }
  void operator()(const ProcessedFeed& p) const {
    os << "processed ";
    if (p.data)
      (*this)(p.data);
    else if (p.nbbo)
      (*this)(*p.nbbo);
  }
};

}  // namespace

std::string summarize(const Payload& payload) {
  std::ostringstream os;
  std::visit(Summarizer{os}, payload);
  return os.str();
}

}  // namespace marketsim
