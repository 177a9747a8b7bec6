#include "marketsim/simnet/sip.hpp"

namespace marketsim::simnet {

NbboQuote aggregate_nbbo(const std::map<VenueId, engine::L1View>& venues, SimTime ts) {
  NbboQuote q;
  q.ts = ts;
  q.venues = venues;
  for (const auto& [venue, l1] : venues) {
    if (l1.bid && (!q.best_bid || l1.bid->price > q.best_bid->price))
      q.best_bid = NbboSide{l1.bid->price, l1.bid->qty, venue};
    if (l1.ask && (!q.best_ask || l1.ask->price < q.best_ask->price))
      q.best_ask = NbboSide{l1.ask->price, l1.ask->qty, venue};
  }
  return q;
}

void Sip::handle(const Event& ev) {
  const auto* quote = std::get_if<VenueQuote>(&ev.payload);
  if (!quote) return;
  venues_[quote->venue] = quote->l1;
  nbbo_ = aggregate_nbbo(venues_, ev.deliver_at);
  nbbo_.source_ts = quote->venue_ts;
  for (EndpointId sub : subscribers_) net_.send(self_, sub, nbbo_, latency_);
}

}  // namespace marketsim::simnet
