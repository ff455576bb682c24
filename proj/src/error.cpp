#include "ietskew/error.hpp"

namespace ietskew {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::NotBijective: return "NotBijective";
    case ErrorCode::ReduciblePermutation: return "ReduciblePermutation";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::FloatModeUnsupported: return "FloatModeUnsupported";
    case ErrorCode::DegenerateLengths: return "DegenerateLengths";
    case ErrorCode::KappaCapExceeded: return "KappaCapExceeded";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::NotFoundWithinBudget: return "NotFoundWithinBudget";
    case ErrorCode::PreconditionU: return "PreconditionU";
    case ErrorCode::ZetaTooLarge: return "ZetaTooLarge";
    case ErrorCode::ValueBoundExceeded: return "ValueBoundExceeded";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NoReturnsWithinBudget: return "NoReturnsWithinBudget";
    case ErrorCode::SpectralGapViolated: return "SpectralGapViolated";
    case ErrorCode::PreconditionD: return "PreconditionD";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace ietskew
