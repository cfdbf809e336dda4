#pragma once

#include <stdexcept>
#include <string>

namespace pbica {

// Invalid arguments or malformed inputs (non-finite data, bad sizes, ...).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Data that is structurally valid but numerically degenerate
// (rank-deficient covariance, constant projection, zero range, ...).
struct degenerate_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A frequency outside the sinc-debias safe band |u|h <= c.
struct frequency_out_of_band_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-point iteration failure; carries the iteration index in the message.
struct iteration_failure_error : std::runtime_error {
    iteration_failure_error(const std::string& what, int iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration(iteration) {}
    int iteration;
};

}  // namespace pbica
