#pragma once

#include <stdexcept>
#include <string>

namespace sinailab {

/// Bad command line or precondition at the user boundary.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Estimated run time exceeds the configured budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sinailab
