#ifndef ERGM_ERROR_HPP
#define ERGM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergm {

// Closed vocabulary of failure reasons. The CLI prints the token as the
// leading word of its error line.
enum class ErrorCode {
    parse_error,
    invalid_argument,
    io_error,
    mle_nonexistent,
    mple_separation,
    ess_degenerate,
    cap_exceeded,
    non_ignorable_design,
    singular_information,
    non_convergence,
    divergence,
};

constexpr std::string_view to_token(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return "parse-error";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::mle_nonexistent: return "mle-nonexistent";
        case ErrorCode::mple_separation: return "mple-separation";
        case ErrorCode::ess_degenerate: return "ess-degenerate";
        case ErrorCode::cap_exceeded: return "cap-exceeded";
        case ErrorCode::non_ignorable_design: return "non-ignorable-design";
        case ErrorCode::singular_information: return "singular-information";
        case ErrorCode::non_convergence: return "non-convergence";
        case ErrorCode::divergence: return "divergence";
    }
    return "unknown";
}

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view token() const noexcept { return to_token(code_); }

   private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::invalid_argument) {
    if (!cond) throw Error(code, what);
}

}  // namespace ergm

#endif  // ERGM_ERROR_HPP
