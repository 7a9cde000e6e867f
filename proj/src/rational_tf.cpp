#include "shuntlab/rational_tf.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace shuntlab {

namespace {

bool all_finite(const Coeffs& c) {
    for (double v : c)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string format_coeffs(const Coeffs& c) {
    std::string out = "[";
    char buf[32];
    for (std::size_t k = 0; k < c.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.6g", c[k]);
        if (k) out += ", ";
        out += buf;
    }
    return out + "]";
}

}  // namespace

RationalTF::RationalTF(Coeffs num, Coeffs den)
    : num_(poly::trimmed(std::move(num))), den_(poly::trimmed(std::move(den))) {
    if (den_.empty()) throw std::invalid_argument("RationalTF: denominator is identically zero");
    if (!all_finite(num_) || !all_finite(den_))
        throw std::invalid_argument("RationalTF: non-finite coefficient");
}

Complex RationalTF::operator()(Complex s) const {
    return poly::eval(num_, s) / poly::eval(den_, s);
}

Complex RationalTF::derivative(Complex s) const {
    const Complex n = poly::eval(num_, s);
    const Complex d = poly::eval(den_, s);
    const Complex dn = poly::eval(poly::derivative(num_), s);
    const Complex dd = poly::eval(poly::derivative(den_), s);
    return (dn * d - n * dd) / (d * d);
}

RationalTF RationalTF::scaled_argument(double alpha) const {
    return RationalTF(poly::scale_argument(num_, alpha), poly::scale_argument(den_, alpha)).monic();
}

RationalTF RationalTF::monic() const {
    const double lead = den_.back();
    return RationalTF(poly::scale(num_, 1.0 / lead), poly::scale(den_, 1.0 / lead));
}

RationalTF RationalTF::operator*(double k) const {
    return RationalTF(poly::scale(num_, k), den_);
}

std::string RationalTF::to_string() const {
    return "num " + format_coeffs(num_) + " / den " + format_coeffs(den_);
}

}  // namespace shuntlab
