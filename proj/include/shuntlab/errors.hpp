#pragma once

#include <stdexcept>

namespace shuntlab {

/// A numerical procedure failed to produce a result (no crossover in the
/// scanned band, Newton divergence, singular system, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shuntlab
