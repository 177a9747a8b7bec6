#include "marketsim/errors.hpp"

namespace marketsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateOrderId: return "DuplicateOrderId";
    case ErrorCode::UnknownInstrument: return "UnknownInstrument";
    case ErrorCode::UnknownOrder: return "UnknownOrder";
    case ErrorCode::InvalidModification: return "InvalidModification";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::SchedulingInPast: return "SchedulingInPast";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::OrderTypeNotPermitted: return "OrderTypeNotPermitted";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace marketsim
