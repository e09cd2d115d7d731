#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace placebeb {

enum class ErrorCode {
  InvalidArgument,
  UnstableQueue,
  Unassigned,
  InvalidSOC,
  RangeTooShort,
  InvalidBlock,
  InfeasibleDemand,
  Infeasible,
  Uncovered,
  TooLarge,
  InvalidBounds,
  InvalidK,
  UndefinedCut,
  TimeLimit,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; `code()` lets callers (and the CLI
// exit-status mapping) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::string> details = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  // Offending item ids, e.g. every uncovered demand point.
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace placebeb
