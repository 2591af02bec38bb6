#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oplens {

enum class ErrorCode {
    InvalidMatrix,
    NotHermitian,
    NotPSD,
    InternalInconsistency,
    BadAngle,
    BadPartition,
    NotCoprime,
    SquareNotNormal,
    IllConditioned,
    DimensionMismatch,
    PreconditionViolated,
    BadDomain,
    UnknownTheorem,
    BadParams,
    BadSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it onto an exit status.
class OperatorError : public std::runtime_error {
public:
    OperatorError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace oplens
