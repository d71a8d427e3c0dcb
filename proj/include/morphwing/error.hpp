#pragma once

#include <stdexcept>
#include <string>

namespace morphwing {

enum class ErrorKind {
    InvalidInput,
    NoConvergence,
    NonPhysical,
    OutOfRange,
    BranchAmbiguity,
    TooFewTriggers,
    RankDeficient,
    NoThrustZero,
    NoTrim,
    InvalidCutoff,
    TooFewMarkers,
    TooFewTrials,
    Io,
};

const char* to_string(ErrorKind kind);

// Every module reports failures through this type; the CLI maps it to an
// error JSON and exit status 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace morphwing
