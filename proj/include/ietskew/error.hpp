#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ietskew {

// Machine-readable failure codes. The CLI prints these names and maps them to
// exit status 2.
enum class ErrorCode {
    NonPositiveLength,
    NotBijective,
    ReduciblePermutation,
    OutOfDomain,
    FloatModeUnsupported,
    DegenerateLengths,
    KappaCapExceeded,
    BrokenChain,
    HorizonExceeded,
    NotFoundWithinBudget,
    PreconditionU,
    ZetaTooLarge,
    ValueBoundExceeded,
    RejectionBudgetExceeded,
    CapExceeded,
    NonConvergence,
    NoReturnsWithinBudget,
    SpectralGapViolated,
    PreconditionD,
    BinMismatch,
    BadConfig,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ietskew
