#include "shuntlab/delay_stability.hpp"

#include "shuntlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace shuntlab {

namespace {

constexpr Complex kJ{0.0, 1.0};

void sort_by_imag(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });
}

double max_real(const std::vector<Complex>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (auto p : v) m = std::max(m, p.real());
    return m;
}

}  // namespace

DelayedCharacteristic::DelayedCharacteristic(const PiezoModel& model, const RationalTF& admittance)
    : omega_ref_(model.omega_sc()),
      open_loop_(open_loop_tf(model, admittance).scaled_argument(model.omega_sc())),
      dnum_(poly::derivative(open_loop_.num())),
      dden_(poly::derivative(open_loop_.den())) {}

Complex DelayedCharacteristic::value(Complex s, const DelayModel& delay) const {
    return poly::eval(open_loop_.den(), s) + poly::eval(open_loop_.num(), s) * delay.multiplier(s);
}

Complex DelayedCharacteristic::ds(Complex s, const DelayModel& delay) const {
    return poly::eval(dden_, s) + poly::eval(dnum_, s) * delay.multiplier(s) +
           poly::eval(open_loop_.num(), s) * delay.multiplier_ds(s);
}

Complex DelayedCharacteristic::dtau(Complex s, const DelayModel& delay) const {
    return poly::eval(open_loop_.num(), s) * delay.multiplier_dtau(s);
}

double DelayedCharacteristic::relative_residual(Complex s, const DelayModel& delay) const {
    return std::abs(1.0 + open_loop_(s) * delay.multiplier(s));
}

std::optional<Complex> DelayedCharacteristic::solve(Complex seed, const DelayModel& delay,
                                                    const NewtonOptions& opts) const {
    Complex s = seed;
    Complex g = value(s, delay);
    for (int it = 0; it < opts.max_iter; ++it) {
        if (std::abs(g) < opts.tol) return s;
        const Complex dg = ds(s, delay);
        if (dg == Complex{0.0, 0.0}) return std::nullopt;
        const Complex step = g / dg;
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 12; ++k) {
            const Complex trial = s - lambda * step;
            const Complex gt = value(trial, delay);
            if (std::isfinite(gt.real()) && std::isfinite(gt.imag()) && std::abs(gt) < std::abs(g)) {
                s = trial;
                g = gt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) {
            // Stalled at rounding level: accept if the Newton step is negligible.
            if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(s))) return s;
            return std::nullopt;
        }
        if (std::abs(lambda * step) <= 1e-15 * std::max(1.0, std::abs(s)) && std::abs(g) < 1e3 * opts.tol) return s;
    }
    if (std::abs(g) < opts.tol) return s;
    return std::nullopt;
}

std::vector<Complex> DelayedCharacteristic::nominal_roots() const {
    auto r = poly::roots(poly::add(open_loop_.den(), open_loop_.num()));
    sort_by_imag(r);
    return r;
}

std::vector<Complex> closed_loop_poles(const PiezoModel& model, const RationalTF& admittance) {
    DelayedCharacteristic ch(model, admittance);
    auto r = ch.nominal_roots();
    for (auto& p : r) p *= ch.omega_ref();
    return r;
}

std::vector<Complex> nominal_poles(const PiezoModel& model, const ShuntParams& shunt) {
    return closed_loop_poles(model, shunt_admittance(shunt));
}

namespace {

// Advances every branch from tau0 to tau1 (normalized). Returns false when a
// branch fails to converge or would land near another branch.
bool advance(const DelayedCharacteristic& ch, DelayModel::Kind kind, const std::vector<Complex>& from, double tau0,
             double tau1, const NewtonOptions& nopts, std::vector<Complex>& to, std::size_t& failed_branch) {
    const std::size_t n = from.size();
    to.assign(n, Complex{});
    const DelayModel d0 = kind == DelayModel::Kind::Zoh ? DelayModel::zoh(tau0) : DelayModel::pure_delay(tau0);
    const DelayModel d1 = kind == DelayModel::Kind::Zoh ? DelayModel::zoh(tau1) : DelayModel::pure_delay(tau1);
    for (std::size_t b = 0; b < n; ++b) {
        double spacing = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < n; ++o)
            if (o != b) spacing = std::min(spacing, std::abs(from[b] - from[o]));

        const Complex gs = ch.ds(from[b], d0);
        const Complex slope = gs == Complex{0.0, 0.0} ? Complex{0.0, 0.0} : -ch.dtau(from[b], d0) / gs;
        const Complex predicted = from[b] + slope * (tau1 - tau0);
        auto sol = ch.solve(predicted, d1, nopts);
        if (!sol || std::abs(*sol - from[b]) > 0.3 * spacing) {
            failed_branch = b;
            return false;
        }
        to[b] = *sol;
    }
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t o = b + 1; o < n; ++o)
            if (std::abs(to[b] - to[o]) < 1e-9 * std::max(1.0, std::abs(to[b]))) {
                failed_branch = o;
                return false;
            }
    return true;
}

}  // namespace

RootLocus root_locus(const PiezoModel& model, const RationalTF& admittance, DelayModel::Kind variant, double tau_max,
                     double dtau, const RootLocusOptions& opts) {
    if (variant == DelayModel::Kind::None) throw std::invalid_argument("root_locus: delay variant must be zoh or pure");
    if (!(dtau > 0.0)) throw std::invalid_argument("root_locus: dtau must be positive");
    if (!(tau_max >= 0.0)) throw std::invalid_argument("root_locus: tau_max must be nonnegative");

    const DelayedCharacteristic ch(model, admittance);
    const double w = ch.omega_ref();
    const double t_end = tau_max * w;
    const double h_out = dtau * w;

    RootLocus out;
    std::vector<Complex> poles = ch.nominal_roots();
    auto record = [&](double t_norm, const std::vector<Complex>& p) {
        out.taus.push_back(t_norm / w);
        std::vector<Complex> phys(p);
        for (auto& z : phys) z *= w;
        out.poles.push_back(std::move(phys));
    };
    record(0.0, poles);

    double t = 0.0;
    double h = h_out;
    std::size_t out_index = 1;
    std::vector<Complex> next;
    const double t_eps = 1e-12 * std::max(1.0, t_end);

    while (t < t_end - t_eps) {
        const double t_out = std::min(static_cast<double>(out_index) * h_out, t_end);
        double step = std::min(h, t_out - t);
        int halvings = 0;
        std::size_t failed = 0;
        while (!advance(ch, variant, poles, t, t + step, opts.newton, next, failed)) {
            if (++halvings > opts.max_halvings)
                throw NumericalError("root_locus: branch " + std::to_string(failed) + " lost at tau = " +
                                     std::to_string((t + step) / w) + " s");
            step *= 0.5;
        }

        const double sigma_old = max_real(poles);
        const double sigma_new = max_real(next);
        if (!out.crossing && sigma_old < 0.0 && sigma_new >= 0.0) {
            // Regula falsi (Illinois) on the largest real part.
            double ta = t, tb = t + step, fa = sigma_old, fb = sigma_new;
            std::vector<Complex> at_root = next;
            for (int it = 0; it < 100 && tb - ta > 1e-15 * tb; ++it) {
                const double tm = tb - fb * (tb - ta) / (fb - fa);
                std::vector<Complex> trial;
                std::size_t fb_idx = 0;
                if (!advance(ch, variant, poles, t, tm, opts.newton, trial, fb_idx)) break;
                const double fm = max_real(trial);
                at_root = trial;
                if (std::abs(fm) < 1e-14) {
                    ta = tb = tm;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    ta = tm;
                    fa = fm;
                    fb *= 0.5;
                } else {
                    tb = tm;
                    fb = fm;
                    fa *= 0.5;
                }
            }
            const auto it = std::max_element(at_root.begin(), at_root.end(),
                                              [](Complex a, Complex b) { return a.real() < b.real(); });
            out.crossing = LocusCrossing{0.5 * (ta + tb) / w, std::abs(it->imag()) * w};
        }

        t += step;
        poles = next;
        h = std::min(h_out, step * 2.0);
        if (t >= t_out - t_eps) {
            record(t_out, poles);
            ++out_index;
            t = t_out;
        }
    }
    return out;
}

RootLocus root_locus(const PiezoModel& model, const ShuntParams& shunt, DelayModel::Kind variant, double tau_max,
                     double dtau, const RootLocusOptions& opts) {
    return root_locus(model, shunt_admittance(shunt), variant, tau_max, dtau, opts);
}

const char* to_string(CriticalDelayMethod method) {
    switch (method) {
        case CriticalDelayMethod::ZohNumeric: return "zoh_numeric";
        case CriticalDelayMethod::PureDelayNumeric: return "pure_delay_numeric";
        case CriticalDelayMethod::Series: return "series";
    }
    return "series";
}

namespace {

struct Candidate {
    double omega;
    double tau;
    int k;
};

// Pure-delay crossings in normalized units.
std::vector<Candidate> pure_delay_candidates(const RationalTF& h) {
    const Coeffs& n = h.num();
    const Coeffs& d = h.den();
    // N(s)N(-s) - D(s)D(-s) is even in s; with s^2 = -W it is a polynomial in W = w^2.
    const Coeffs q = poly::add(poly::multiply(n, poly::reflect(n)), poly::scale(poly::multiply(d, poly::reflect(d)), -1.0));
    Coeffs in_w;
    for (std::size_t k = 0; 2 * k < q.size(); ++k) in_w.push_back((k % 2 == 0 ? 1.0 : -1.0) * q[2 * k]);
    in_w = poly::trimmed(in_w);

    std::vector<Candidate> out;
    if (in_w.empty()) return out;
    for (Complex r : poly::roots(in_w)) {
        if (!(r.real() > 0.0) || std::abs(r.imag()) > 1e-8 * std::abs(r)) continue;
        const double w = std::sqrt(r.real());
        const double base = std::arg(-h.at_frequency(w));
        for (int k = 0; k <= 4; ++k) {
            const double tau = 2.0 / w * (base + 2.0 * k * std::numbers::pi);
            if (tau > 0.0) {
                out.push_back({w, tau, k});
                break;
            }
        }
    }
    return out;
}

// Newton on D(jw) + N(jw) Z(tau jw) = 0 for the real unknowns (w, tau).
std::optional<Candidate> refine_zoh(const DelayedCharacteristic& ch, Candidate c) {
    double w = c.omega;
    double tau = c.tau;
    for (int it = 0; it < 60; ++it) {
        const Complex s = kJ * w;
        const DelayModel d = DelayModel::zoh(tau);
        const Complex f = ch.value(s, d);
        if (std::abs(f) < 1e-14) break;
        const Complex fw = kJ * ch.ds(s, d);
        const Complex ft = ch.dtau(s, d);
        Eigen::Matrix2d jac;
        jac << fw.real(), ft.real(), fw.imag(), ft.imag();
        const Eigen::Vector2d rhs(-f.real(), -f.imag());
        const Eigen::Vector2d step = jac.partialPivLu().solve(rhs);
        if (!step.allFinite()) return std::nullopt;
        w += step(0);
        tau += step(1);
        if (std::abs(step(0)) < 1e-15 * std::abs(w) && std::abs(step(1)) < 1e-15 * std::abs(tau)) break;
    }
    const Complex f = ch.value(kJ * w, DelayModel::zoh(tau));
    if (!(w > 0.0) || !(tau > 0.0) || !(std::abs(f) < 1e-10)) return std::nullopt;
    return Candidate{w, tau, c.k};
}

}  // namespace

CriticalDelayResult critical_delay_numeric(const PiezoModel& model, const RationalTF& admittance,
                                           DelayModel::Kind variant) {
    if (variant == DelayModel::Kind::None)
        throw std::invalid_argument("critical_delay_numeric: delay variant must be zoh or pure");
    CriticalDelayResult res;
    res.method = variant == DelayModel::Kind::Zoh ? CriticalDelayMethod::ZohNumeric
                                                  : CriticalDelayMethod::PureDelayNumeric;
    if (model.kc() == 0.0) {
        // Uncoupled structure: the tuned shunt is already marginal at tau = 0.
        res.omega_c = model.omega_sc();
        res.tau_c = 0.0;
        return res;
    }

    const DelayedCharacteristic ch(model, admittance);
    std::vector<Candidate> cands = pure_delay_candidates(ch.open_loop());
    if (variant == DelayModel::Kind::Zoh) {
        std::vector<Candidate> refined;
        for (const auto& c : cands)
            if (auto r = refine_zoh(ch, c)) refined.push_back(*r);
        cands = std::move(refined);
    }
    if (cands.empty()) {
        res.finite = false;
        res.tau_c = std::numeric_limits<double>::infinity();
        return res;
    }
    const auto best = std::min_element(cands.begin(), cands.end(),
                                       [](const Candidate& a, const Candidate& b) { return a.tau < b.tau; });
    res.omega_c = best->omega * ch.omega_ref();
    res.tau_c = best->tau / ch.omega_ref();
    res.branch_k = best->k;
    return res;
}

CriticalDelayResult critical_delay_numeric(const PiezoModel& model, const ShuntParams& shunt,
                                           DelayModel::Kind variant) {
    return critical_delay_numeric(model, shunt_admittance(shunt), variant);
}

CriticalDelayResult critical_delay_series(double kc, double omega_sc) {
    if (!(kc >= 0.0)) throw std::domain_error("critical_delay_series: kc must be nonnegative");
    if (!(omega_sc > 0.0)) throw std::domain_error("critical_delay_series: omega_sc must be positive");
    const double k2 = kc * kc;
    const double k3 = k2 * kc;
    CriticalDelayResult res;
    res.method = CriticalDelayMethod::Series;
    res.omega_c = omega_sc * (1.0 + kc + 5.0 / 8.0 * k2 + 73.0 / 128.0 * k3);
    res.tau_c = (std::sqrt(6.0) * (kc - k2) + 19.0 / 32.0 * std::sqrt(1.5) * k3) / omega_sc;
    return res;
}

double max_sampling_period(double kc, double omega_sc, bool modified) {
    if (!(kc >= 0.0)) throw std::domain_error("max_sampling_period: kc must be nonnegative");
    if (!(omega_sc > 0.0)) throw std::domain_error("max_sampling_period: omega_sc must be positive");
    const double nyquist_cap = 2.0 * std::numbers::pi / 30.0;
    if (modified) return nyquist_cap / omega_sc;
    const double tenth =
        std::sqrt(6.0) / 10.0 * (kc - kc * kc) + 19.0 / 320.0 * std::sqrt(1.5) * kc * kc * kc;
    return std::min(nyquist_cap, tenth) / omega_sc;
}

}  // namespace shuntlab
