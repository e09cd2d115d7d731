#include "placebeb/error.hpp"

namespace placebeb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnstableQueue: return "UnstableQueue";
    case ErrorCode::Unassigned: return "Unassigned";
    case ErrorCode::InvalidSOC: return "InvalidSOC";
    case ErrorCode::RangeTooShort: return "RangeTooShort";
    case ErrorCode::InvalidBlock: return "InvalidBlock";
    case ErrorCode::InfeasibleDemand: return "InfeasibleDemand";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Uncovered: return "Uncovered";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::UndefinedCut: return "UndefinedCut";
    case ErrorCode::TimeLimit: return "TimeLimit";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace placebeb
