#include "shuntlab/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shuntlab::poly {

Coeffs trimmed(Coeffs c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

double eval(std::span<const double> c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex eval(std::span<const double> c, Complex x) {
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Coeffs derivative(std::span<const double> c) {
    if (c.size() <= 1) return {};
    Coeffs d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

Coeffs add(std::span<const double> a, std::span<const double> b) {
    Coeffs out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) out[k] += b[k];
    return out;
}

Coeffs multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    Coeffs out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Coeffs scale(std::span<const double> c, double factor) {
    Coeffs out(c.begin(), c.end());
    for (auto& v : out) v *= factor;
    return out;
}

Coeffs reflect(std::span<const double> c) {
    Coeffs out(c.begin(), c.end());
    for (std::size_t k = 1; k < out.size(); k += 2) out[k] = -out[k];
    return out;
}

Coeffs scale_argument(std::span<const double> c, double alpha) {
    Coeffs out(c.begin(), c.end());
    double p = 1.0;
    for (auto& v : out) {
        v *= p;
        p *= alpha;
    }
    return out;
}

namespace {

// Parlett-Reinsch balancing with radix-2 scaling (the LAPACK gebal idea
// without permutations). Eigenvalues are unchanged.
void balance(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

Complex newton_polish(std::span<const double> c, std::span<const double> dc, Complex z) {
    for (int it = 0; it < 3; ++it) {
        const Complex fz = eval(c, z);
        const Complex dfz = eval(dc, z);
        if (dfz == Complex{0.0, 0.0}) break;
        const Complex next = z - fz / dfz;
        if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
        if (std::abs(eval(c, next)) >= std::abs(fz)) break;
        z = next;
    }
    return z;
}

}  // namespace

std::vector<Complex> roots(std::span<const double> c_in) {
    Coeffs c = trimmed(Coeffs(c_in.begin(), c_in.end()));
    if (c.empty()) throw std::invalid_argument("roots: zero polynomial has no finite root set");

    std::vector<Complex> out;
    std::size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
    out.assign(zeros, Complex{0.0, 0.0});
    const Coeffs reduced(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());

    const auto n = static_cast<Eigen::Index>(reduced.size()) - 1;
    if (n <= 0) return out;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    const double lead = reduced.back();
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -reduced[static_cast<std::size_t>(i)] / lead;
    balance(companion);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("roots: eigenvalue iteration failed");

    const Coeffs dc = derivative(reduced);
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex z = newton_polish(reduced, dc, solver.eigenvalues()(i));
        out.push_back(z);
    }
    return out;
}

}  // namespace shuntlab::poly
