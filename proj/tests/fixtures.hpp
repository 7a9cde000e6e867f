#pragma once

#include "shuntlab/model.hpp"

#include <cmath>

namespace fixture {

// Clamped-free beam used for the experimental validation.
inline shuntlab::PiezoModel beam() { return shuntlab::PiezoModel::from_frequencies_hz(31.08, 31.29, 245e-9); }

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace fixture
