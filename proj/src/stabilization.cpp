#include "shuntlab/stabilization.hpp"

#include "shuntlab/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace shuntlab {

ModificationSystem build_modification_system(const RationalTF& admittance, std::span<const Complex> poles,
                                             double tau) {
    if (!(tau >= 0.0)) throw std::domain_error("build_modification_system: tau must be nonnegative");
    const Coeffs& b = admittance.num();
    const Coeffs& a = admittance.den();
    if (b.empty()) throw std::invalid_argument("build_modification_system: zero admittance");

    ModificationSystem sys;
    sys.num_b = b.size();
    sys.num_a = a.size();
    const auto rows = static_cast<Eigen::Index>(poles.size());
    const auto cols = static_cast<Eigen::Index>(b.size() + a.size());
    sys.p_complex.resize(rows, cols);
    sys.d_complex.resize(rows);

    for (Eigen::Index k = 0; k < rows; ++k) {
        const Complex p = poles[static_cast<std::size_t>(k)];
        const Complex nb = poly::eval(b, p);
        const Complex na = poly::eval(a, p);
        const double scale = std::max(1.0, std::abs(p));
        if (std::abs(nb) < 1e-300 || std::abs(na) < 1e-14 * std::abs(a.back()) * std::pow(scale, a.size() - 1.0))
            throw NumericalError("build_modification_system: admittance numerator or denominator vanishes at a pole");
        const Complex z = zoh_response(tau, p);
        Complex pm = 1.0;
        for (std::size_t m = 0; m < b.size(); ++m) {
            sys.p_complex(k, static_cast<Eigen::Index>(m)) = z * b[m] * pm / nb;
            pm *= p;
        }
        Complex pn = 1.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            sys.p_complex(k, static_cast<Eigen::Index>(b.size() + n)) = -a[n] * pn / na;
            pn *= p;
        }
        sys.d_complex(k) = 1.0 - z;
    }

    sys.p_real.resize(2 * rows, cols);
    sys.p_real.topRows(rows) = sys.p_complex.real();
    sys.p_real.bottomRows(rows) = sys.p_complex.imag();
    sys.d_real.resize(2 * rows);
    sys.d_real.head(rows) = sys.d_complex.real();
    sys.d_real.tail(rows) = sys.d_complex.imag();
    return sys;
}

namespace {

template <typename Matrix>
Matrix drop_column(const Matrix& m, Eigen::Index col) {
    Matrix out(m.rows(), m.cols() - 1);
    out.leftCols(col) = m.leftCols(col);
    out.rightCols(m.cols() - col - 1) = m.rightCols(m.cols() - col - 1);
    return out;
}

template <typename Matrix, typename Vector>
Vector scaled_min_norm(const Matrix& p, const Vector& d, bool& rank_deficient) {
    Eigen::VectorXd norms = p.colwise().norm().transpose();
    for (auto& v : norms)
        if (v == 0.0) v = 1.0;
    const Matrix scaled = p * norms.cwiseInverse().asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(scaled);
    rank_deficient = cod.rank() < scaled.cols();
    Vector y = cod.solve(d);
    return norms.cwiseInverse().asDiagonal() * y;
}

}  // namespace

ModificationFactors solve_modification(const ModificationSystem& system, PinnedFactor pinned) {
    const std::size_t total = system.num_b + system.num_a;
    const std::size_t col = pinned.column(system.num_b);
    if ((pinned.side == PinnedFactor::Side::Numerator && pinned.index >= system.num_b) ||
        (pinned.side == PinnedFactor::Side::Denominator && pinned.index >= system.num_a))
        throw std::invalid_argument("solve_modification: pinned factor " + pinned.name() + " out of range");

    const Eigen::MatrixXd reduced = drop_column(system.p_real, static_cast<Eigen::Index>(col));
    ModificationFactors out;
    out.pinned = pinned;
    const Eigen::VectorXd y = scaled_min_norm(reduced, system.d_real, out.rank_deficient);
    out.residual_norm = (reduced * y - system.d_real).norm();

    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    for (std::size_t i = 0, j = 0; i < total; ++i)
        if (i != col) full(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(j++));
    out.delta_b.assign(full.data(), full.data() + system.num_b);
    out.delta_a.assign(full.data() + system.num_b, full.data() + total);
    for (std::size_t i = 0; i < total; ++i)
        if (full(static_cast<Eigen::Index>(i)) <= -1.0) out.sign_flips.push_back(i);
    return out;
}

Eigen::VectorXcd solve_modification_complex(const ModificationSystem& system, PinnedFactor pinned) {
    const std::size_t col = pinned.column(system.num_b);
    const Eigen::MatrixXcd reduced = drop_column(system.p_complex, static_cast<Eigen::Index>(col));
    bool deficient = false;
    const Eigen::VectorXcd y = scaled_min_norm(reduced, system.d_complex, deficient);
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(system.num_b + system.num_a));
    for (Eigen::Index i = 0, j = 0; i < full.size(); ++i)
        if (static_cast<std::size_t>(i) != col) full(i) = y(j++);
    return full;
}

RationalTF apply_modification(const RationalTF& admittance, const ModificationFactors& factors) {
    if (factors.delta_b.size() != admittance.num().size() || factors.delta_a.size() != admittance.den().size())
        throw std::invalid_argument("apply_modification: factor count does not match the admittance order");
    Coeffs b = admittance.num();
    Coeffs a = admittance.den();
    for (std::size_t m = 0; m < b.size(); ++m) b[m] *= 1.0 + factors.delta_b[m];
    for (std::size_t n = 0; n < a.size(); ++n) a[n] *= 1.0 + factors.delta_a[n];
    if (a.back() == 0.0)
        throw NumericalError("apply_modification: modified leading denominator coefficient is zero");
    return RationalTF(std::move(b), std::move(a));
}

ModificationFactors extract_factors(const RationalTF& original, const RationalTF& modified) {
    auto ratio = [](const Coeffs& o, const Coeffs& m) {
        std::vector<double> out(o.size(), 0.0);
        for (std::size_t i = 0; i < o.size(); ++i) {
            const double mi = i < m.size() ? m[i] : 0.0;
            out[i] = o[i] == 0.0 ? 0.0 : mi / o[i] - 1.0;
        }
        return out;
    };
    ModificationFactors f;
    f.delta_b = ratio(original.num(), modified.num());
    f.delta_a = ratio(original.den(), modified.den());
    return f;
}

Stabilized stabilize(const PiezoModel& model, const RationalTF& admittance, double tau, PinnedFactor pinned) {
    Stabilized out{admittance, {}, closed_loop_poles(model, admittance)};
    const auto sys = build_modification_system(admittance, out.target_poles, tau);
    out.factors = solve_modification(sys, pinned);
    out.admittance = apply_modification(admittance, out.factors);
    return out;
}

PlacementCheck verify_pole_placement(const PiezoModel& model, const RationalTF& modified_admittance, double tau,
                                     std::span<const Complex> target_poles) {
    const DelayedCharacteristic ch(model, modified_admittance);
    const double w = ch.omega_ref();
    const DelayModel delay = DelayModel::zoh(tau * w);
    PlacementCheck out;
    for (Complex target : target_poles) {
        const Complex s = target / w;
        out.residuals.push_back(ch.relative_residual(s, delay));
        auto root = ch.solve(s, delay);
        out.converged.push_back(root.has_value());
        const Complex p = root ? *root * w : target;
        out.delayed_poles.push_back(p);
        out.displacements.push_back(std::abs(p - target) / std::abs(target));
        if (root && !(p.real() < 0.0)) out.all_stable = false;
    }
    return out;
}

}  // namespace shuntlab
