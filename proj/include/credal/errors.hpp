#pragma once

#include <stdexcept>
#include <string>

namespace credal {

// Malformed input: bad documents, invalid distributions, contract violations.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured size guard tripped (max_extensive, max_candidates, max_oracle).
// `count` is a human-readable rendering of the offending size, e.g. "3^27".
class ResourceLimitError : public std::runtime_error {
public:
    ResourceLimitError(const std::string& what, std::string count)
        : std::runtime_error(what + " (count " + count + ")"), count_(std::move(count)) {}

    const std::string& count() const noexcept { return count_; }

private:
    std::string count_;
};

// Every candidate assigns zero mass to the evidence.
class ZeroEvidenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The simplex routine hit its iteration cap or lost numerical footing.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace credal
