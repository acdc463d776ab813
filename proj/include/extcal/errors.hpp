#pragma once

#include <stdexcept>
#include <string>

namespace extcal {

// Raised when an engine is handed inputs outside its stated domain
// (CFL violation, non-timelike tangent, degenerate sheet element, ...).
// The CLI maps this to exit code 3.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a run detects that its own numbers went bad (constraint drift,
// first-integral drift past the abort threshold). CLI exit code 4.
struct NumericalAbort : std::runtime_error {
    explicit NumericalAbort(const std::string& what) : std::runtime_error(what) {}
};

// Raised by scenario loading on malformed input. CLI exit code 2.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace extcal
