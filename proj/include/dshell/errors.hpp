#pragma once

#include <stdexcept>

namespace dshell {

/// Argument outside a function's supported domain.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A series or connection formula lost too many digits to be trusted.
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative search failed to bracket or converge.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dshell
