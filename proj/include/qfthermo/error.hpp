#pragma once

#include <stdexcept>
#include <string>

namespace qft {

enum class ErrorCode {
    domain = 1,
    markov_violation,
    degenerate_lift,
    cap_exceeded,
    unparseable,
    unknown_label,
    non_convergent,
    bracket_failure,
    empty_census,
    branch_collision,
    config,
    validation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace qft
