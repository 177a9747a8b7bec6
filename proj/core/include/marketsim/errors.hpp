#pragma once

#include <stdexcept>
#include <string>

namespace marketsim {

enum class ErrorCode {
  DuplicateOrderId,
  UnknownInstrument,
  UnknownOrder,
  InvalidModification,
  InvalidOrder,
  SchedulingInPast,
  UnknownEndpoint,
  OrderTypeNotPermitted,
  Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Scenario parse/validation failure; `path` names the offending field
/// (e.g. `links[2].dst`).
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(ErrorCode::Config, path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace marketsim
