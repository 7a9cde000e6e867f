#pragma once

#include "shuntlab/polynomial.hpp"

#include <string>

namespace shuntlab {

/// Real rational transfer function num(s)/den(s), coefficients ascending in s.
///
/// High-order zero coefficients are trimmed on construction, so `den().back()`
/// is always the (nonzero) leading coefficient. Low-order zeros are kept: the
/// open-loop function of a series RL shunt has a pole at s = 0.
class RationalTF {
public:
    RationalTF(Coeffs num, Coeffs den);

    static RationalTF constant(double gain) { return RationalTF({gain}, {1.0}); }

    const Coeffs& num() const { return num_; }
    const Coeffs& den() const { return den_; }

    /// Polynomial degrees; the zero numerator reports -1.
    int num_degree() const { return static_cast<int>(num_.size()) - 1; }
    int den_degree() const { return static_cast<int>(den_.size()) - 1; }
    bool proper() const { return num_degree() <= den_degree(); }

    Complex operator()(Complex s) const;
    Complex at_frequency(double omega) const { return (*this)(Complex{0.0, omega}); }

    /// d/ds of num/den.
    Complex derivative(Complex s) const;

    /// G(s) -> G(alpha * s), rescaled so the leading denominator coefficient is 1.
    RationalTF scaled_argument(double alpha) const;

    /// Same function with the leading denominator coefficient set to 1.
    RationalTF monic() const;

    RationalTF operator*(double k) const;

    std::string to_string() const;

private:
    Coeffs num_;
    Coeffs den_;
};

}  // namespace shuntlab
