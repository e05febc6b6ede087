#ifndef FBMC_ERRORS_HPP
#define FBMC_ERRORS_HPP

#include <stdexcept>

namespace fbmc {

/// Numerical failures: rank-deficient solves, design acceptance misses.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fbmc

#endif
