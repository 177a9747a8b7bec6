#pragma once

#include <string>
#include <vector>

#include "marketsim/scenario/scenario.hpp"

namespace marketsim::oracle {

scenario::RunResult run_json(const std::string& text, const std::vector<std::string>& overrides = {});
std::string bundled(const std::string& name);

ParticipantId participant(const SimTrace& trace, const std::string& agent);
std::vector<const OrderRecord*> orders_of(const SimTrace& trace, const std::string& agent);
std::vector<const TradeRecord*> trades_with_maker(const SimTrace& trace, const std::string& agent);
std::vector<const BookEventRecord*> book_events(const SimTrace& trace, engine::ChangeKind kind);

}  // namespace marketsim::oracle
