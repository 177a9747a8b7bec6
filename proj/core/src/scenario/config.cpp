#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "marketsim/errors.hpp"
#include "marketsim/scenario/scenario.hpp"

namespace marketsim::scenario {

namespace {

using json = nlohmann::ordered_json;
using agents::ScriptAction;

/// Field reader that tracks its path and rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
  bool has(const char* key) const { return j_.contains(key); }

  const json* child(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  int64_t integer(const char* key, std::optional<int64_t> def = std::nullopt) {
    const json* v = child(key);
    if (!v) return need(key, def);
    if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v->get<int64_t>();
  }

  int64_t non_negative(const char* key, int64_t def) {
    const int64_t v = integer(key, def);
    if (v < 0) throw ConfigError(at(key), "must be >= 0");
    return v;
  }

  uint64_t unsigned_integer(const char* key, uint64_t def) {
    const json* v = child(key);
    if (!v) return def;
    if (!v->is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
    return v->get<uint64_t>();
  }

  double number(const char* key, double def) {
    const json* v = child(key);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    return v->get<double>();
  }

  bool boolean(const char* key, bool def) {
    const json* v = child(key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const char* key, std::optional<std::string> def = std::nullopt) {
    const json* v = child(key);
    if (!v) return need(key, def);
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    return v->get<std::string>();
  }

  template <typename E>
  E choice(const char* key, const std::vector<std::pair<std::string, E>>& options, E def) {
    if (!has(key)) {
      used_.insert(key);
      return def;
    }
    const std::string s = string(key);
    for (const auto& [name, e] : options)
      if (name == s) return e;
    std::string want;
    for (const auto& [name, e] : options) want += (want.empty() ? "" : ", ") + name;
    throw ConfigError(at(key), "unknown value '" + s + "' (expected one of " + want + ")");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
  }

 private:
  template <typename T>
  T need(const char* key, const std::optional<T>& def) const {
    if (!def) throw ConfigError(at(key), "required field missing");
    return *def;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const std::vector<std::pair<std::string, engine::MatchingAlgo>> kAlgos = {{"fifo", engine::MatchingAlgo::Fifo},
                                                                          {"pro_rata", engine::MatchingAlgo::ProRata}};
const std::vector<std::pair<std::string, venue::ProtectionPolicy>> kProtection = {
    {"route", venue::ProtectionPolicy::Route}, {"reject", venue::ProtectionPolicy::Reject}};
const std::vector<std::pair<std::string, FeedLevel>> kFeeds = {{"l1", FeedLevel::L1}, {"l2", FeedLevel::L2}};
const std::vector<std::pair<std::string, agents::SignalConfig::Mode>> kModes = {
    {"none", agents::SignalConfig::Mode::None},
    {"grid", agents::SignalConfig::Mode::Grid},
    {"random", agents::SignalConfig::Mode::Random}};
const std::vector<std::pair<std::string, Side>> kSides = {{"buy", Side::Buy}, {"sell", Side::Sell}};
const std::vector<std::pair<std::string, engine::TimeInForce>> kTifs = {{"day", engine::TimeInForce::Day},
                                                                        {"ioc", engine::TimeInForce::Ioc}};
const std::vector<std::pair<std::string, ScriptAction::Op>> kOps = {
    {"new", ScriptAction::Op::New}, {"cancel", ScriptAction::Op::Cancel}, {"modify", ScriptAction::Op::Modify}};
const std::vector<std::pair<std::string, engine::OrderKind>> kKinds = {
    {"market", engine::OrderKind::Market},
    {"limit", engine::OrderKind::Limit},
    {"reserve", engine::OrderKind::Reserve},
    {"discretionary", engine::OrderKind::Discretionary},
    {"hidden", engine::OrderKind::Hidden},
    {"hide_and_light", engine::OrderKind::HideAndLight},
    {"day_iso", engine::OrderKind::DayIso}};

template <typename E>
std::string name_of(const std::vector<std::pair<std::string, E>>& options, E e) {
  for (const auto& [name, v] : options)
    if (v == e) return name;
  return "?";
}

venue::VenueConfig parse_venue(const json& j, const std::string& path) {
  Reader r(j, path);
  venue::VenueConfig v;
  const int64_t id = r.integer("id");
  if (id < 0) throw ConfigError(r.at("id"), "must be >= 0");
  v.id = static_cast<VenueId>(id);
  v.name = r.string("name");
  v.tick_size = r.integer("tick_size", 1);
  v.round_lot = Qty{r.integer("round_lot", 100)};
  v.algo = r.choice("matching_algo", kAlgos, engine::MatchingAlgo::Fifo);
  v.speed_bump_in = SimTime{r.non_negative("speed_bump_in_us", 0)};
  v.speed_bump_out = SimTime{r.non_negative("speed_bump_out_us", 0)};
  v.bump_exempt_cancels = r.boolean("bump_exempt_cancels", false);
  v.batch_interval = SimTime{r.non_negative("batch_interval_us", 0)};
  v.l1_interval = SimTime{r.non_negative("l1_interval_us", 0)};
  v.l2_interval = SimTime{r.non_negative("l2_interval_us", 0)};
  v.l2_depth = static_cast<size_t>(r.integer("l2_depth", 10));
  v.exec_report_immediate = r.boolean("exec_report_immediate", true);
  v.dark = r.boolean("dark", false);
  v.protection = r.choice("protection", kProtection, venue::ProtectionPolicy::Route);
  r.finish();
  return v;
}

agents::ParamValue parse_param(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::vector<std::string> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }
  throw ConfigError(path, "unsupported parameter value");
}

json param_to_json(const agents::ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

ScriptAction parse_action(const json& j, const std::string& path, const std::map<std::string, VenueId>& venues) {
  Reader r(j, path);
  ScriptAction a;
  a.at = SimTime{r.non_negative("at_us", 0)};
  a.op = r.choice("op", kOps, ScriptAction::Op::New);
  a.tag = r.string("tag", std::string{});
  const std::string venue = r.string("venue", std::string{});
  if (venue.empty()) {
    if (venues.size() != 1) throw ConfigError(r.at("venue"), "required field missing");
    a.venue = venues.begin()->second;
  } else {
    auto it = venues.find(venue);
    if (it == venues.end()) throw ConfigError(r.at("venue"), "unknown venue " + venue);
    a.venue = it->second;
  }
  a.side = r.choice("side", kSides, Side::Buy);
  a.kind = r.choice("kind", kKinds, engine::OrderKind::Limit);
  if (r.has("price")) a.price = Price{r.integer("price")};
  a.qty = Qty{r.integer("qty", 0)};
  a.display = Qty{r.integer("display", 0)};
  a.discretion = r.integer("discretion", 0);
  a.anonymous = r.boolean("anonymous", false);
  a.routable = r.boolean("routable", false);
  a.tif = r.choice("tif", kTifs, engine::TimeInForce::Day);
  if (r.has("new_price")) a.new_price = Price{r.integer("new_price")};
  if (r.has("new_qty")) a.new_qty = Qty{r.integer("new_qty")};
  r.finish();
  if (a.op == ScriptAction::Op::New) {
    if (a.qty.value <= 0) throw ConfigError(r.at("qty"), "must be > 0");
    if (a.kind != engine::OrderKind::Market && !a.price) throw ConfigError(r.at("price"), "required field missing");
  } else if (a.tag.empty()) {
    throw ConfigError(r.at("tag"), "required for cancel and modify");
  }
  return a;
}

AgentSpec parse_agent(const json& j, const std::string& path, const std::map<std::string, VenueId>& venues) {
  Reader r(j, path);
  AgentSpec a;
  a.name = r.string("name");
  a.strategy = r.string("strategy");
  a.cohort = r.string("cohort", a.strategy);
  if (const json* feeds = r.child("feeds")) {
    Reader f(*feeds, r.at("feeds"));
    for (auto it = feeds->begin(); it != feeds->end(); ++it) a.feeds[it.key()] = f.choice(it.key().c_str(), kFeeds, FeedLevel::L1);
    f.finish();
  }
  a.sip = r.boolean("sip", false);
  a.processing_rate = r.number("processing_rate", 0.0);
  a.knows_hide_and_light = r.boolean("knows_hide_and_light", false);
  a.knows_day_iso = r.boolean("knows_day_iso", false);
  if (const json* params = r.child("params")) {
    if (!params->is_object()) throw ConfigError(r.at("params"), "expected an object");
    for (auto it = params->begin(); it != params->end(); ++it)
      a.params[it.key()] = parse_param(it.value(), r.at("params") + "." + it.key());
  }
  if (const json* script = r.child("script")) {
    if (!script->is_array()) throw ConfigError(r.at("script"), "expected an array");
    for (size_t i = 0; i < script->size(); ++i)
      a.script.push_back(parse_action((*script)[i], r.at("script") + "[" + std::to_string(i) + "]", venues));
  }
  r.finish();
  return a;
}

ScenarioConfig from_json(const json& root) {
  Reader r(root, "");
  ScenarioConfig c;
  c.name = r.string("name", std::string{});
  c.duration = SimTime{r.integer("duration_us")};
  c.seed = r.unsigned_integer("seed", 1);
  c.instrument = static_cast<InstrumentId>(r.non_negative("instrument", 1));
  c.initial_value = Price{r.integer("initial_value", 1000)};

  const json* venues = r.child("venues");
  if (!venues || !venues->is_array()) throw ConfigError("venues", "expected an array of venues");
  for (size_t i = 0; i < venues->size(); ++i) {
    auto v = parse_venue((*venues)[i], "venues[" + std::to_string(i) + "]");
    v.instrument = c.instrument;
    c.venues.push_back(std::move(v));
  }
  std::map<std::string, VenueId> venue_ids;
  for (const auto& v : c.venues) venue_ids[v.name] = v.id;

  if (r.has("default_latency_us")) c.default_latency = SimTime{r.non_negative("default_latency_us", 0)};
  if (const json* links = r.child("links")) {
    if (!links->is_array()) throw ConfigError("links", "expected an array");
    for (size_t i = 0; i < links->size(); ++i) {
      Reader l((*links)[i], "links[" + std::to_string(i) + "]");
      LinkSpec spec;
      spec.from = l.string("from");
      spec.to = l.string("to");
      spec.base = SimTime{l.non_negative("base_us", 0)};
      spec.jitter = SimTime{l.non_negative("jitter_us", 0)};
      spec.timestamp_noise = SimTime{l.non_negative("timestamp_noise_us", 0)};
      spec.bidirectional = l.boolean("bidirectional", true);
      l.finish();
      c.links.push_back(spec);
    }
  }
  if (const json* sip = r.child("sip")) {
    Reader s(*sip, "sip");
    c.sip.enabled = s.boolean("enabled", true);
    c.sip.latency = SimTime{s.non_negative("latency_us", simnet::kDefaultSipLatency.value)};
    s.finish();
  }
  if (const json* signal = r.child("signal")) {
    Reader s(*signal, "signal");
    c.signal.mode = s.choice("mode", kModes, agents::SignalConfig::Mode::None);
    c.signal.start = SimTime{s.non_negative("start_us", 0)};
    c.signal.interval = SimTime{s.non_negative("interval_us", 0)};
    c.signal.jump_ticks = s.integer("jump_ticks", 1);
    c.signal.count = s.non_negative("count", 0);
    s.finish();
  }
  if (const json* mon = r.child("monitors")) {
    Reader m(*mon, "monitors");
    c.monitors.otr_threshold = m.number("otr_threshold", 50.0);
    c.monitors.otr_window = SimTime{m.non_negative("otr_window_us", 1'000'000)};
    c.monitors.staleness_sample = SimTime{m.non_negative("staleness_sample_us", 1'000)};
    c.monitors.lag_threshold = SimTime{m.non_negative("lag_threshold_us", 5'000)};
    c.monitors.anonymity_sigmas = m.number("anonymity_sigmas", 3.0);
    c.monitors.anonymity_min_decided = static_cast<size_t>(m.non_negative("anonymity_min_decided", 30));
    m.finish();
  }
  const json* ags = r.child("agents");
  if (ags) {
    if (!ags->is_array()) throw ConfigError("agents", "expected an array");
    for (size_t i = 0; i < ags->size(); ++i)
      c.agents.push_back(parse_agent((*ags)[i], "agents[" + std::to_string(i) + "]", venue_ids));
  }
  r.finish();
  return c;
}

std::vector<std::string> split_path(const std::string& path) {
  // a.b[0].c -> {a, b, [0], c}
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < path.size(); ++i) {
    const char ch = path[i];
    if (ch == '.') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch == '[') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      const size_t close = path.find(']', i);
      if (close == std::string::npos) throw ConfigError(path, "unterminated [");
      out.push_back(path.substr(i, close - i + 1));
      i = close;
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void assign(json& node, const std::vector<std::string>& parts, size_t k, const json& value, const std::string& path) {
  const std::string& part = parts[k];
  const bool last = k + 1 == parts.size();
  if (part.front() == '[') {
    if (!node.is_array()) throw ConfigError(path, "not an array at " + part);
    const std::string inner = part.substr(1, part.size() - 2);
    std::vector<size_t> targets;
    if (inner == "*") {
      for (size_t i = 0; i < node.size(); ++i) targets.push_back(i);
    } else {
      size_t idx = 0;
      try {
        idx = std::stoul(inner);
      } catch (const std::exception&) {
        throw ConfigError(path, "bad index " + part);
      }
      if (idx >= node.size()) throw ConfigError(path, "index " + inner + " out of range");
      targets.push_back(idx);
    }
    for (size_t i : targets) {
      if (last)
        node[i] = value;
      else
        assign(node[i], parts, k + 1, value, path);
    }
    return;
  }
  if (!node.is_object()) throw ConfigError(path, "not an object at " + part);
  if (last) {
    node[part] = value;
    return;
  }
  if (!node.contains(part)) {
    // Creating an intermediate object lets overrides reach optional sections.
    if (parts[k + 1].front() == '[') throw ConfigError(path, "no field " + part);
    node[part] = json::object();
  }
  assign(node[part], parts, k + 1, value, path);
}

void apply_override(json& root, const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(spec, "override must look like path=value");
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  const auto parts = split_path(path);
  if (parts.empty()) throw ConfigError(path, "empty override path");
  assign(root, parts, 0, value, path);
}

json to_json_value(const ScenarioConfig& c) {
  json root;
  root["name"] = c.name;
  root["duration_us"] = c.duration.value;
  root["seed"] = c.seed;
  root["instrument"] = c.instrument;
  root["initial_value"] = c.initial_value.value;
  std::map<VenueId, std::string> venue_names;
  json venues = json::array();
  for (const auto& v : c.venues) {
    venue_names[v.id] = v.name;
    json j;
    j["id"] = v.id;
    j["name"] = v.name;
    j["tick_size"] = v.tick_size;
    j["round_lot"] = v.round_lot.value;
    j["matching_algo"] = name_of(kAlgos, v.algo);
    j["speed_bump_in_us"] = v.speed_bump_in.value;
    j["speed_bump_out_us"] = v.speed_bump_out.value;
    j["bump_exempt_cancels"] = v.bump_exempt_cancels;
    j["batch_interval_us"] = v.batch_interval.value;
    j["l1_interval_us"] = v.l1_interval.value;
    j["l2_interval_us"] = v.l2_interval.value;
    j["l2_depth"] = v.l2_depth;
    j["exec_report_immediate"] = v.exec_report_immediate;
    j["dark"] = v.dark;
    j["protection"] = name_of(kProtection, v.protection);
    venues.push_back(j);
  }
  root["venues"] = venues;
  if (c.default_latency) root["default_latency_us"] = c.default_latency->value;
  json links = json::array();
  for (const auto& l : c.links)
    links.push_back({{"from", l.from},
                     {"to", l.to},
                     {"base_us", l.base.value},
                     {"jitter_us", l.jitter.value},
                     {"timestamp_noise_us", l.timestamp_noise.value},
                     {"bidirectional", l.bidirectional}});
  root["links"] = links;
  root["sip"] = {{"enabled", c.sip.enabled}, {"latency_us", c.sip.latency.value}};
  root["signal"] = {{"mode", name_of(kModes, c.signal.mode)},
                    {"start_us", c.signal.start.value},
                    {"interval_us", c.signal.interval.value},
                    {"jump_ticks", c.signal.jump_ticks},
                    {"count", c.signal.count}};
  root["monitors"] = {{"otr_threshold", c.monitors.otr_threshold},
                      {"otr_window_us", c.monitors.otr_window.value},
                      {"staleness_sample_us", c.monitors.staleness_sample.value},
                      {"lag_threshold_us", c.monitors.lag_threshold.value},
                      {"anonymity_sigmas", c.monitors.anonymity_sigmas},
                      {"anonymity_min_decided", c.monitors.anonymity_min_decided}};
  json ags = json::array();
  for (const auto& a : c.agents) {
    json j;
    j["name"] = a.name;
    j["strategy"] = a.strategy;
    j["cohort"] = a.cohort;
    json feeds = json::object();
    for (const auto& [venue, level] : a.feeds) feeds[venue] = name_of(kFeeds, level);
    j["feeds"] = feeds;
    j["sip"] = a.sip;
    j["processing_rate"] = a.processing_rate;
    j["knows_hide_and_light"] = a.knows_hide_and_light;
    j["knows_day_iso"] = a.knows_day_iso;
    json params = json::object();
    for (const auto& [k, v] : a.params) params[k] = param_to_json(v);
    j["params"] = params;
    json script = json::array();
    for (const auto& s : a.script) {
      json e;
      e["at_us"] = s.at.value;
      e["op"] = name_of(kOps, s.op);
      e["tag"] = s.tag;
      e["venue"] = venue_names.count(s.venue) ? venue_names.at(s.venue) : std::string{};
      e["side"] = name_of(kSides, s.side);
      e["kind"] = name_of(kKinds, s.kind);
      if (s.price) e["price"] = s.price->value;
      e["qty"] = s.qty.value;
      e["display"] = s.display.value;
      e["discretion"] = s.discretion;
      e["anonymous"] = s.anonymous;
      e["routable"] = s.routable;
      e["tif"] = name_of(kTifs, s.tif);
      if (s.new_price) e["new_price"] = s.new_price->value;
      if (s.new_qty) e["new_qty"] = s.new_qty->value;
      script.push_back(e);
    }
    j["script"] = script;
    ags.push_back(j);
  }
  root["agents"] = ags;
  return root;
}

std::string line_col(std::string_view text, size_t byte) {
  size_t line = 1;
  size_t col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_col(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
  }
  for (const auto& o : overrides) apply_override(root, o);
  ScenarioConfig c = from_json(root);
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_scenario(ss.str(), overrides);
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

std::string to_json(const ScenarioConfig& config) { return to_json_value(config).dump(2); }

void validate(const ScenarioConfig& c) {
  if (c.duration.value <= 0) throw ConfigError("duration_us", "must be > 0");
  if (c.venues.empty()) throw ConfigError("venues", "at least one venue required");
  if (c.initial_value.value <= 0) throw ConfigError("initial_value", "must be > 0");

  std::set<std::string> names = {"sip", "signal"};
  std::set<VenueId> ids;
  for (size_t i = 0; i < c.venues.size(); ++i) {
    const auto& v = c.venues[i];
    const std::string p = "venues[" + std::to_string(i) + "]";
    if (!ids.insert(v.id).second) throw ConfigError(p + ".id", "duplicate venue id");
    if (v.name.empty()) throw ConfigError(p + ".name", "must not be empty");
    if (!names.insert(v.name).second) throw ConfigError(p + ".name", "duplicate name " + v.name);
    if (v.tick_size <= 0) throw ConfigError(p + ".tick_size", "must be > 0");
    if (v.round_lot.value <= 0) throw ConfigError(p + ".round_lot", "must be > 0");
    if (v.l2_depth == 0) throw ConfigError(p + ".l2_depth", "must be > 0");
  }
  const auto& known = agents::known_strategies();
  for (size_t i = 0; i < c.agents.size(); ++i) {
    const auto& a = c.agents[i];
    const std::string p = "agents[" + std::to_string(i) + "]";
    if (a.name.empty()) throw ConfigError(p + ".name", "must not be empty");
    if (!names.insert(a.name).second) throw ConfigError(p + ".name", "duplicate name " + a.name);
    if (std::find(known.begin(), known.end(), a.strategy) == known.end())
      throw ConfigError(p + ".strategy", "unknown strategy " + a.strategy);
    if (a.processing_rate < 0) throw ConfigError(p + ".processing_rate", "must be >= 0");
    for (const auto& [venue, level] : a.feeds)
      if (!names.count(venue) || venue == "sip" || venue == "signal")
        throw ConfigError(p + ".feeds." + venue, "unknown venue");
    for (const char* key : {"venue", "ping_venue", "target_venue", "away_venue"}) {
      auto it = a.params.find(key);
      if (it == a.params.end()) continue;
      const auto* s = std::get_if<std::string>(&it->second);
      if (!s) throw ConfigError(p + ".params." + key, "expected a venue name");
      if (std::none_of(c.venues.begin(), c.venues.end(), [&](const auto& v) { return v.name == *s; }))
        throw ConfigError(p + ".params." + key, "unknown venue " + *s);
    }
    if (auto it = a.params.find("venues"); it != a.params.end()) {
      const auto* list = std::get_if<std::vector<std::string>>(&it->second);
      if (!list) throw ConfigError(p + ".params.venues", "expected a list of venue names");
      for (const auto& s : *list)
        if (std::none_of(c.venues.begin(), c.venues.end(), [&](const auto& v) { return v.name == s; }))
          throw ConfigError(p + ".params.venues", "unknown venue " + s);
    }
  }
  for (size_t i = 0; i < c.links.size(); ++i) {
    const auto& l = c.links[i];
    const std::string p = "links[" + std::to_string(i) + "]";
    if (!names.count(l.from)) throw ConfigError(p + ".from", "unknown endpoint " + l.from);
    if (!names.count(l.to)) throw ConfigError(p + ".to", "unknown endpoint " + l.to);
  }
  if (c.signal.mode != agents::SignalConfig::Mode::None && c.signal.count > 0 && c.signal.interval.value <= 0 &&
      c.signal.mode == agents::SignalConfig::Mode::Random)
    throw ConfigError("signal.interval_us", "must be > 0 for random jumps");
}

}  // namespace marketsim::scenario
