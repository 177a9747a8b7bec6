#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "marketsim/errors.hpp"
#include "marketsim/scenario/scenario.hpp"
#include "marketsim/simnet/sip.hpp"

namespace marketsim::scenario {

namespace {

using json = nlohmann::ordered_json;

std::string hex(uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void require_link(const simnet::Network& net, const simnet::Scheduler& sched, EndpointId a, EndpointId b) {
  if (!net.connected(a, b))
    throw ConfigError("links", "no link from " + sched.name(a) + " to " + sched.name(b) +
                                   " and no default_latency_us");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Config, "cannot write " + path.string());
  out << text;
}

std::map<std::string, double> attack_summary(const RunResult& r) {
  const auto& rep = r.report;
  std::map<std::string, double> s;
  s["snipe_captures"] = static_cast<double>(rep.fair_access.stale_captures);
  s["trades"] = static_cast<double>(r.trace.trades.size());
  s["ping_detections"] = static_cast<double>(rep.confidentiality.detected);
  s["detection_rate"] = rep.confidentiality.rate;
  s["fingerprint_accuracy"] = rep.anonymity.accuracy;
  s["fingerprint_decided_accuracy"] = rep.anonymity.decided_accuracy;
  size_t inversions = 0;
  for (const auto& [agent, n] : rep.rank_inversions_won) inversions += n;
  s["rank_inversions_won"] = static_cast<double>(inversions);
  for (const auto& a : r.trace.agents) {
    auto pnl = rep.fair_access.agents.find(a.id);
    if (pnl != rep.fair_access.agents.end()) s["pnl." + a.name] = static_cast<double>(pnl->second.pnl);
  }
  for (auto p : monitors::all_properties())
    s["violations." + std::string(monitors::to_string(p))] = static_cast<double>(rep.count(p));
  s["violations.total"] = static_cast<double>(rep.violations.size());
  return s;
}

}  // namespace

RunResult run(const ScenarioConfig& c, const RunOptions& options) {
  validate(c);
  RunResult res;
  res.scenario = c.name;
  res.seed = c.seed;
  SimTrace& trace = res.trace;
  trace.duration = c.duration;
  trace.initial_value = c.initial_value;

  simnet::Scheduler sched;
  simnet::Network net(sched, c.seed);
  net.set_default_latency(c.default_latency);
  sched.set_log(options.events_log);

  std::map<std::string, EndpointId> ep;
  std::map<VenueId, EndpointId> venue_eps;
  for (const auto& v : c.venues) {
    ep[v.name] = sched.add_endpoint(v.name);
    venue_eps[v.id] = ep[v.name];
    trace.venue_names[v.id] = v.name;
    trace.venue_algo[v.id] = v.algo;
    trace.venue_batch[v.id] = v.batch_interval.value > 0;
  }
  const EndpointId sip_ep = sched.add_endpoint("sip");
  const EndpointId signal_ep = sched.add_endpoint("signal");
  ep["sip"] = sip_ep;
  ep["signal"] = signal_ep;
  for (const auto& a : c.agents) ep[a.name] = sched.add_endpoint(a.name);

  for (const auto& l : c.links) {
    const simnet::Link link{l.base, l.jitter, l.timestamp_noise};
    net.add_link(ep.at(l.from), ep.at(l.to), link);
    if (l.bidirectional) net.add_link(ep.at(l.to), ep.at(l.from), link);
  }

  std::vector<std::unique_ptr<venue::Venue>> venues;
  std::map<VenueId, venue::Venue*> venue_by_id;
  for (const auto& v : c.venues) {
    venue::VenueConfig cfg = v;
    cfg.instrument = c.instrument;
    cfg.seed = splitmix64(c.seed ^ splitmix64(v.id + 1));
    venues.push_back(std::make_unique<venue::Venue>(cfg, net, ep.at(v.name), trace));
    auto* raw = venues.back().get();
    venue_by_id[v.id] = raw;
    sched.set_handler(raw->endpoint(), [raw](const simnet::Event& e) { raw->handle(e); });
  }

  std::optional<simnet::Sip> sip;
  if (c.sip.enabled) {
    sip.emplace(net, sip_ep, c.sip.latency);
    sched.set_handler(sip_ep, [&sip](const simnet::Event& e) { sip->handle(e); });
  }
  for (auto& v : venues) {
    v->connect(c.sip.enabled ? std::optional(sip_ep) : std::nullopt, venue_eps);
    if (sip && !v->config().dark) {
      require_link(net, sched, v->endpoint(), sip_ep);
      sip->subscribe(v->endpoint());
      require_link(net, sched, sip_ep, v->endpoint());
    }
  }

  agents::SignalProcess signal(c.signal, c.initial_value, net, signal_ep, trace, c.seed);
  sched.set_handler(signal_ep, [&signal](const simnet::Event& e) { signal.handle(e); });

  agents::AgentEnv env;
  env.net = &net;
  env.trace = &trace;
  env.venues = venue_eps;
  for (const auto& v : c.venues) {
    env.venue_ids[v.name] = v.id;
    env.round_lots[v.id] = v.round_lot;
  }
  env.instrument = c.instrument;
  env.initial_value = c.initial_value;
  env.seed = c.seed;

  std::vector<std::unique_ptr<agents::Agent>> agents;
  for (size_t i = 0; i < c.agents.size(); ++i) {
    const auto& spec = c.agents[i];
    const EndpointId id = ep.at(spec.name);
    agents::Capabilities caps;
    for (const auto& [venue, level] : spec.feeds) {
      const VenueId vid = env.venue_ids.at(venue);
      caps.feeds[vid] = level;
      require_link(net, sched, venue_eps.at(vid), id);
      venue_by_id.at(vid)->subscribe(id, level);
    }
    caps.sip = spec.sip;
    caps.processing_rate = spec.processing_rate;
    caps.knows_hide_and_light = spec.knows_hide_and_light;
    caps.knows_day_iso = spec.knows_day_iso;
    if (spec.sip) {
      if (!sip) throw ConfigError("agents[" + std::to_string(i) + "].sip", "scenario has no SIP");
      require_link(net, sched, sip_ep, id);
      sip->subscribe(id);
    }
    // The public signal reaches agents with no explicit link instantly.
    if (!net.connected(signal_ep, id)) net.add_link(signal_ep, id, simnet::Link{});
    signal.add_listener(id);

    agents::Params params(spec.params, "agents[" + std::to_string(i) + "]");
    agents.push_back(agents::make_agent(spec.strategy, static_cast<ParticipantId>(id), spec.name, caps, env,
                                        std::move(params), spec.script));
    auto* raw = agents.back().get();
    sched.set_handler(id, [raw](const simnet::Event& e) { raw->handle(e); });
    trace.agents.push_back(AgentInfo{static_cast<ParticipantId>(id), spec.name, spec.strategy, spec.cohort, {}, {}});
  }

  for (auto& v : venues) v->start();
  signal.start(c.duration);
  for (auto& a : agents) a->start();

  sched.run_until(c.duration);

  for (size_t i = 0; i < agents.size(); ++i) {
    trace.agents[i].reported_bought = agents[i]->bought();
    trace.agents[i].reported_sold = agents[i]->sold();
    if (!agents[i]->consumer().history().empty()) trace.feed_samples[agents[i]->id()] = agents[i]->consumer().history();
  }
  trace.event_hash = sched.trace_hash();
  trace.event_count = sched.processed();
  res.report = monitors::evaluate(trace, c.monitors);
  return res;
}

std::string trades_csv(const SimTrace& trace) {
  std::ostringstream os;
  os << "ts_us,venue,instrument,price_ticks,qty,taker_order,maker_order,aggressor_side\n";
  for (const auto& t : trace.trades)
    os << t.ts << ',' << t.venue << ',' << t.instrument << ',' << t.price << ',' << t.qty << ',' << t.taker_order
       << ',' << t.maker_order << ',' << to_string(t.aggressor) << '\n';
  return os.str();
}

std::string metrics_json(const RunResult& r) {
  const auto& rep = r.report;
  const auto& trace = r.trace;
  json m;
  m["scenario"] = r.scenario;
  m["seed"] = r.seed;
  m["duration_us"] = trace.duration.value;
  m["trace_hash"] = hex(trace.event_hash);
  m["event_count"] = trace.event_count;
  int64_t volume = 0;
  for (const auto& t : trace.trades) volume += t.qty.value;
  m["trades"] = trace.trades.size();
  m["volume"] = volume;
  m["final_value"] = trace.value_at(trace.duration).value;
  m["conservation"] = {{"buy_qty", rep.buy_fills.value},
                       {"sell_qty", rep.sell_fills.value},
                       {"balanced", rep.buy_fills == rep.sell_fills}};
  m["pnl_sum"] = rep.fair_access.pnl_sum;

  auto strategy_pnl = [&](const std::string& strategy) {
    int64_t pnl = 0;
    for (const auto& a : trace.agents)
      if (a.strategy == strategy) pnl += rep.fair_access.agents.at(a.id).pnl;
    return pnl;
  };
  auto strategy_sold = [&](const std::string& strategy) {
    int64_t q = 0;
    for (const auto& a : trace.agents)
      if (a.strategy == strategy) q += rep.fair_access.agents.at(a.id).sold.value;
    return q;
  };
  size_t inversions = 0;
  for (const auto& [agent, n] : rep.rank_inversions_won) inversions += n;
  const auto& conf = rep.confidentiality;
  const auto& an = rep.anonymity;
  json attacks;
  attacks["snipe_captures"] = rep.fair_access.stale_captures;
  attacks["snipe_pnl"] = strategy_pnl("snipe");
  attacks["scalp_pnl"] = strategy_pnl("scalp");
  attacks["scalp_qty_sold"] = strategy_sold("scalp");
  attacks["ping_detections"] = conf.detected;
  attacks["hidden_orders"] = conf.hidden_orders;
  attacks["detection_rate"] = conf.rate;
  attacks["mean_lead_us"] = conf.mean_lead_us ? json(*conf.mean_lead_us) : json(nullptr);
  attacks["min_lead_us"] = conf.min_lead ? json(conf.min_lead->value) : json(nullptr);
  attacks["anonymous_orders"] = an.anonymous_orders;
  attacks["fingerprint_guesses"] = an.guesses;
  attacks["fingerprint_decided"] = an.decided;
  attacks["fingerprint_accuracy"] = an.accuracy;
  attacks["fingerprint_decided_accuracy"] = an.decided_accuracy;
  attacks["fingerprint_abstention"] = an.abstention;
  attacks["fingerprint_baseline"] = an.baseline;
  attacks["fingerprint_std_error"] = an.std_error;
  attacks["rank_inversions_won"] = inversions;
  m["attacks"] = attacks;

  json agents = json::object();
  for (const auto& a : trace.agents) {
    const auto& p = rep.fair_access.agents.at(a.id);
    json j;
    j["strategy"] = a.strategy;
    j["cohort"] = a.cohort;
    j["pnl"] = p.pnl;
    j["cash"] = p.cash;
    j["position"] = p.position;
    j["bought"] = p.bought.value;
    j["sold"] = p.sold.value;
    j["trades"] = p.trades;
    j["stale_captures"] = p.stale_captures;
    auto inv = rep.rank_inversions_won.find(a.id);
    j["rank_inversions_won"] = inv == rep.rank_inversions_won.end() ? 0 : inv->second;
    if (auto o = rep.otr.find(a.id); o != rep.otr.end()) {
      j["new_orders"] = o->second.new_orders;
      j["otr"] = o->second.overall;
      j["otr_worst_window"] = o->second.worst_window;
    } else {
      j["new_orders"] = 0;
      j["otr"] = 0.0;
      j["otr_worst_window"] = 0.0;
    }
    if (auto s = rep.staleness.find(a.id); s != rep.staleness.end()) {
      j["staleness_p50_us"] = s->second.p50.value;
      j["staleness_p99_us"] = s->second.p99.value;
      j["staleness_max_us"] = s->second.max.value;
      j["lag_p99_us"] = s->second.lag_p99.value;
    }
    agents[a.name] = j;
  }
  m["agents"] = agents;
  json cohorts = json::object();
  for (const auto& [name, pnl] : rep.fair_access.cohorts) cohorts[name] = pnl;
  m["cohorts"] = cohorts;
  m["feeds"] = {{"pre_trade_messages", trace.pre_trade_messages}, {"post_trade_messages", trace.post_trade_messages}};
  json counts = json::object();
  for (auto p : monitors::all_properties()) counts[std::string(monitors::to_string(p))] = rep.count(p);
  m["violations"] = {{"total", rep.violations.size()}, {"by_property", counts}};
  return m.dump(2) + "\n";
}

std::string violations_json(const RunResult& r) {
  json list = json::array();
  for (const auto& v : r.report.violations) {
    json subjects = json::array();
    for (auto s : v.subjects) subjects.push_back(r.trace.agent_name(s));
    list.push_back({{"property", monitors::to_string(v.property)},
                    {"ts_us", v.ts.value},
                    {"subjects", subjects},
                    {"events", v.events},
                    {"evidence", v.evidence}});
  }
  json out;
  out["count"] = r.report.violations.size();
  out["violations"] = list;
  return out.dump(2) + "\n";
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "trades.csv", trades_csv(result.trace));
  write_file(dir / "metrics.json", metrics_json(result));
  write_file(dir / "violations.json", violations_json(result));
}

RunResult run_to(const ScenarioConfig& config, const std::filesystem::path& dir, bool events_log) {
  std::filesystem::create_directories(dir);
  RunOptions options;
  std::ofstream log;
  if (events_log) {
    log.open(dir / "events.log", std::ios::binary);
    if (!log) throw Error(ErrorCode::Config, "cannot write " + (dir / "events.log").string());
    options.events_log = &log;
  }
  RunResult r = run(config, options);
  write_outputs(r, dir);
  return r;
}

std::string compare(const ScenarioConfig& baseline, const ScenarioConfig& toggled,
                    const std::vector<std::string>& toggles, const std::filesystem::path& dir, bool events_log) {
  auto base_leg = std::async(std::launch::async, [&] { return run_to(baseline, dir / "baseline", events_log); });
  auto tog_leg = std::async(std::launch::async, [&] { return run_to(toggled, dir / "toggled", events_log); });
  const RunResult a = base_leg.get();
  const RunResult b = tog_leg.get();

  const auto sa = attack_summary(a);
  const auto sb = attack_summary(b);
  json out;
  out["scenario"] = baseline.name;
  out["seed"] = baseline.seed;
  out["toggles"] = toggles;
  json jb = json::object();
  json jt = json::object();
  json jd = json::object();
  for (const auto& [k, v] : sa) {
    jb[k] = v;
    auto it = sb.find(k);
    const double other = it == sb.end() ? 0.0 : it->second;
    jt[k] = other;
    jd[k] = other - v;
  }
  out["baseline"] = jb;
  out["toggled"] = jt;
  out["delta"] = jd;
  const std::string text = out.dump(2) + "\n";
  write_file(dir / "compare.json", text);
  return text;
}

}  // namespace marketsim::scenario
