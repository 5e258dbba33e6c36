#pragma once

#include <stdexcept>
#include <string>

namespace lauricella {

// Values double as CLI exit codes.
enum class ErrorCode {
    usage = 2,
    math_domain = 3,
    precision_shortfall = 4,
    internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string kind, const std::string& detail)
        : std::runtime_error(kind + (detail.empty() ? "" : ": " + detail)), code_(code), kind_(std::move(kind)) {}

    ErrorCode code() const { return code_; }
    // Short machine-readable tag, e.g. "ill-conditioned solve".
    const std::string& kind() const { return kind_; }

private:
    ErrorCode code_;
    std::string kind_;
};

inline const char* code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::usage: return "usage";
        case ErrorCode::math_domain: return "math-domain";
        case ErrorCode::precision_shortfall: return "precision-shortfall";
        case ErrorCode::internal: return "internal";
    }
    return "internal";
}

}  // namespace lauricella
