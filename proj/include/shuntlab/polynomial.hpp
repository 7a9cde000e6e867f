// Real-coefficient polynomials stored in ascending powers of the variable.
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace shuntlab {

using Complex = std::complex<double>;
using Coeffs = std::vector<double>;

namespace poly {

/// Drops high-order coefficients that are exactly zero.
Coeffs trimmed(Coeffs c);

double eval(std::span<const double> c, double x);
Complex eval(std::span<const double> c, Complex x);

Coeffs derivative(std::span<const double> c);
Coeffs add(std::span<const double> a, std::span<const double> b);
Coeffs multiply(std::span<const double> a, std::span<const double> b);
Coeffs scale(std::span<const double> c, double factor);

/// Coefficients of p(-x).
Coeffs reflect(std::span<const double> c);

/// Coefficients of p(alpha * x).
Coeffs scale_argument(std::span<const double> c, double alpha);

/// Roots from the eigenvalues of the balanced companion matrix, each polished
/// by a couple of Newton steps on the original polynomial. Zero low-order
/// coefficients contribute exact zero roots. Throws std::invalid_argument for
/// the zero polynomial.
std::vector<Complex> roots(std::span<const double> c);

}  // namespace poly
}  // namespace shuntlab
