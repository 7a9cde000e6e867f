#include "shuntlab/freq_analysis.hpp"

#include "shuntlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shuntlab {

namespace {

constexpr double kSeriesThreshold = 1e-3;
constexpr Complex kJ{0.0, 1.0};

double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace

Complex zoh_shape(Complex x) {
    if (std::abs(x) < kSeriesThreshold) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0;
    return (1.0 - std::exp(-x)) / x;
}

Complex zoh_shape_derivative(Complex x) {
    if (std::abs(x) < kSeriesThreshold) return -0.5 + x / 3.0 - x * x / 8.0 + x * x * x / 30.0;
    const Complex e = std::exp(-x);
    return (x * e - (1.0 - e)) / (x * x);
}

Complex zoh_response(double tau, Complex s) {
    if (tau < 0.0) throw std::domain_error("zoh_response: tau must be nonnegative");
    if (tau == 0.0) return 1.0;
    return zoh_shape(tau * s);
}

DelayModel::DelayModel(Kind kind, double tau) : kind_(kind), tau_(tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::domain_error("DelayModel: tau must be finite and nonnegative");
}

Complex DelayModel::multiplier(Complex s) const {
    switch (kind_) {
        case Kind::None: return 1.0;
        case Kind::PureDelay: return std::exp(-s * tau_ / 2.0);
        case Kind::Zoh: return zoh_response(tau_, s);
    }
    return 1.0;
}

Complex DelayModel::multiplier_ds(Complex s) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::PureDelay: return -tau_ / 2.0 * std::exp(-s * tau_ / 2.0);
        case Kind::Zoh: return tau_ * zoh_shape_derivative(tau_ * s);
    }
    return 0.0;
}

Complex DelayModel::multiplier_dtau(Complex s) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::PureDelay: return -s / 2.0 * std::exp(-s * tau_ / 2.0);
        case Kind::Zoh: return s * zoh_shape_derivative(tau_ * s);
    }
    return 0.0;
}

std::string DelayModel::name() const {
    switch (kind_) {
        case Kind::None: return "none";
        case Kind::PureDelay: return "pure";
        case Kind::Zoh: return "zoh";
    }
    return "none";
}

RationalTF open_loop_tf(const PiezoModel& model, const RationalTF& admittance) {
    const double wsc2 = model.omega_sc() * model.omega_sc();
    const double woc2 = model.omega_oc() * model.omega_oc();
    const double cp = model.cp_eps();
    Coeffs num = poly::multiply(Coeffs{wsc2 / cp, 0.0, 1.0 / cp}, admittance.num());
    Coeffs den = poly::multiply(Coeffs{0.0, woc2, 0.0, 1.0}, admittance.den());
    return RationalTF(std::move(num), std::move(den));
}

RationalTF open_loop_tf(const PiezoModel& model, const ShuntParams& shunt) {
    return open_loop_tf(model, shunt_admittance(shunt));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw std::domain_error("logspace: bounds must be positive");
    auto out = linspace(std::log(lo), std::log(hi), n);
    for (auto& v : out) v = std::exp(v);
    if (!out.empty()) {
        out.front() = lo;
        out.back() = hi;
    }
    return out;
}

std::vector<double> default_resonant_grid() { return linspace(0.9, 1.15, 2000); }

namespace {

// Continuous phase of a rational function along the positive imaginary axis,
// summed over its roots. Roots on the axis are passed on their right, so an
// axis zero adds a +180 degree step and an axis pole a -180 degree step.
class FactoredPhase {
public:
    explicit FactoredPhase(const RationalTF& h) {
        if (h.num().empty()) return;
        zeros_ = poly::roots(h.num());
        poles_ = poly::roots(h.den());
        gain_deg_ = h.num().back() / h.den().back() < 0.0 ? 180.0 : 0.0;
    }

    double operator()(double w) const {
        double p = gain_deg_;
        for (Complex z : zeros_) p += factor(w, z);
        for (Complex z : poles_) p -= factor(w, z);
        return p;
    }

    bool axis_root_between(double a, double b) const {
        for (const auto* set : {&zeros_, &poles_})
            for (Complex z : *set)
                if (on_axis(z) && z.imag() >= a && z.imag() <= b) return true;
        return false;
    }

private:
    static bool on_axis(Complex z) { return std::abs(z.real()) <= 1e-10 * std::abs(z); }

    // arg(j w - z), continuous in w.
    static double factor(double w, Complex z) {
        if (on_axis(z)) return w > z.imag() ? 90.0 : (w < z.imag() ? -90.0 : 0.0);
        const double a = rad2deg(std::atan((w - z.imag()) / std::abs(z.real())));
        return z.real() < 0.0 ? a : 180.0 - a;
    }

    std::vector<Complex> zeros_;
    std::vector<Complex> poles_;
    double gain_deg_ = 0.0;
};

// Bisection in log frequency on g(w), assuming a sign change on [a, b].
template <typename F>
double bisect_log(F&& g, double a, double b, double rel_tol) {
    double la = std::log(a);
    double lb = std::log(b);
    double ga = g(a);
    while (lb - la > rel_tol) {
        const double lm = 0.5 * (la + lb);
        const double gm = g(std::exp(lm));
        if ((gm < 0.0) == (ga < 0.0)) {
            la = lm;
            ga = gm;
        } else {
            lb = lm;
        }
    }
    return std::exp(0.5 * (la + lb));
}

}  // namespace

std::vector<double> unwrapped_phase_deg(const RationalTF& open_loop, const std::vector<double>& omega) {
    const FactoredPhase phase(open_loop);
    std::vector<double> out(omega.size());
    std::transform(omega.begin(), omega.end(), out.begin(), phase);
    return out;
}

MarginReport stability_margins(const RationalTF& open_loop, double omega_ref, const MarginOptions& opts) {
    if (!open_loop.proper()) throw std::invalid_argument("stability_margins: open-loop function must be proper");
    const auto grid = logspace(opts.band_low * omega_ref, opts.band_high * omega_ref, opts.points);
    const FactoredPhase phase(open_loop);
    auto log_mag = [&](double w) { return std::log(std::abs(open_loop.at_frequency(w))); };

    MarginReport rep;
    double prev = log_mag(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = log_mag(grid[i]);
        if ((prev < 0.0) != (cur < 0.0)) {
            const double w = bisect_log(log_mag, grid[i - 1], grid[i], opts.rel_tol);
            rep.gain_crossovers.push_back(w);
            rep.crossover_phase_deg.push_back(phase(w));
        }
        prev = cur;
    }
    if (rep.gain_crossovers.empty())
        throw NumericalError("stability_margins: no gain crossover in the scanned band; widen the band");
    rep.phase_margin_deg = 180.0 + rep.crossover_phase_deg.back();

    // Phase crossovers: the continuous phase passing an odd multiple of 180
    // degrees. Steps at imaginary-axis roots are not crossings.
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double p0 = phase(grid[i - 1]);
        const double p1 = phase(grid[i]);
        const double k0 = std::floor((p0 + 180.0) / 360.0);
        const double k1 = std::floor((p1 + 180.0) / 360.0);
        if (k0 == k1 || phase.axis_root_between(grid[i - 1], grid[i])) continue;
        const double target = 360.0 * std::max(k0, k1) - 180.0;
        const double w = bisect_log([&](double x) { return phase(x) - target; }, grid[i - 1], grid[i], opts.rel_tol);
        const double gm = -20.0 * std::log10(std::abs(open_loop.at_frequency(w)));
        if (rep.gain_margin_infinite || gm < rep.gain_margin_db) {
            rep.gain_margin_infinite = false;
            rep.gain_margin_db = gm;
            rep.phase_crossover = w;
        }
    }
    return rep;
}

Complex delayed_admittance(const RationalTF& admittance, double tau, double omega) {
    if (tau < 0.0) throw std::domain_error("delayed_admittance: tau must be nonnegative");
    return admittance.at_frequency(omega) * std::exp(Complex{0.0, -omega * tau / 2.0});
}

double passivity_loss_delay(const PiezoModel& model) {
    return 2.0 / model.omega_oc() * std::atan(std::sqrt(1.5) * model.kc());
}

Complex closed_loop_compliance(const PiezoModel& model, const RationalTF& admittance, const DelayModel& delay,
                               double omega) {
    const Complex s = kJ * omega;
    const double wsc2 = model.omega_sc() * model.omega_sc();
    const double woc2 = model.omega_oc() * model.omega_oc();
    const double cp = model.cp_eps();
    const Complex y_eff = admittance(s) * delay.multiplier(s);
    return wsc2 / (s * s + woc2 - (woc2 - wsc2) / cp * y_eff / (s + y_eff / cp));
}

FrfCurve closed_loop_frf(const PiezoModel& model, const RationalTF& admittance, const DelayModel& delay,
                         const std::vector<double>& omega_norm) {
    FrfCurve curve;
    curve.omega_ref = model.omega_sc();
    curve.stiffness_ref = model.k_sc();
    curve.omega = omega_norm;
    curve.value.reserve(omega_norm.size());
    std::size_t beyond_nyquist = 0;
    for (std::size_t i = 0; i < omega_norm.size(); ++i) {
        if (i > 0 && !(omega_norm[i] > omega_norm[i - 1]))
            throw std::invalid_argument("closed_loop_frf: frequency grid must be strictly ascending");
        const double w = omega_norm[i] * model.omega_sc();
        if (delay.kind() == DelayModel::Kind::Zoh && delay.tau() > 0.0 && w * delay.tau() >= std::numbers::pi)
            ++beyond_nyquist;
        curve.value.push_back(closed_loop_compliance(model, admittance, delay, w));
    }
    if (beyond_nyquist > 0)
        curve.warnings.push_back(std::to_string(beyond_nyquist) +
                                 " grid points at or beyond the Nyquist frequency pi/tau; ZOH model is a "
                                 "fundamental-harmonic approximation there");
    return curve;
}

std::vector<Peak> find_peaks(const std::vector<double>& omega, const std::vector<double>& mag) {
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < mag.size(); ++i) {
        if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
        const double h0 = omega[i] - omega[i - 1];
        const double h1 = omega[i + 1] - omega[i];
        const double c = mag[i];
        const double a = ((mag[i - 1] - c) / h0 + (mag[i + 1] - c) / h1) / (h0 + h1);
        const double b = (mag[i + 1] - c) / h1 - a * h1;
        if (a < 0.0) {
            peaks.push_back({omega[i] - b / (2.0 * a), c - b * b / (4.0 * a)});
        } else {
            peaks.push_back({omega[i], c});
        }
    }
    return peaks;
}

std::vector<Peak> find_peaks(const FrfCurve& curve) {
    std::vector<double> mag(curve.value.size());
    std::transform(curve.value.begin(), curve.value.end(), mag.begin(), [](Complex v) { return std::abs(v); });
    return find_peaks(curve.omega, mag);
}

}  // namespace shuntlab
