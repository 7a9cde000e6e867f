#include "shuntlab/simulate.hpp"

#include "shuntlab/errors.hpp"
#include "shuntlab/freq_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shuntlab {

DiscreteTF::DiscreteTF(Coeffs num_z, Coeffs den_z, double tau)
    : num_z_(std::move(num_z)), den_z_(std::move(den_z)), tau_(tau) {
    if (den_z_.empty() || den_z_.front() == 0.0) throw std::invalid_argument("DiscreteTF: leading denominator is zero");
    if (num_z_.size() > den_z_.size()) throw std::invalid_argument("DiscreteTF: improper transfer function");
    // Align both polynomials on z^order.
    num_z_.insert(num_z_.begin(), den_z_.size() - num_z_.size(), 0.0);
    const double lead = den_z_.front();
    for (auto& c : num_z_) c /= lead;
    for (auto& c : den_z_) c /= lead;
    reset();
}

void DiscreteTF::reset() {
    u_hist_.assign(order(), 0.0);
    y_hist_.assign(order(), 0.0);
}

double DiscreteTF::step(double input) {
    double y = num_z_[0] * input;
    for (std::size_t i = 1; i < den_z_.size(); ++i) y += num_z_[i] * u_hist_[i - 1] - den_z_[i] * y_hist_[i - 1];
    if (!u_hist_.empty()) {
        std::rotate(u_hist_.rbegin(), u_hist_.rbegin() + 1, u_hist_.rend());
        std::rotate(y_hist_.rbegin(), y_hist_.rbegin() + 1, y_hist_.rend());
        u_hist_[0] = input;
        y_hist_[0] = y;
    }
    return y;
}

Complex DiscreteTF::operator()(Complex z) const {
    Complex n = 0.0, d = 0.0;
    for (std::size_t i = 0; i < den_z_.size(); ++i) {
        n = n * z + num_z_[i];
        d = d * z + den_z_[i];
    }
    return n / d;
}

DiscreteTF tustin_discretize(const RationalTF& admittance, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tustin_discretize: tau must be positive");
    if (!admittance.proper()) throw std::invalid_argument("tustin_discretize: admittance must be proper");
    const std::size_t order = static_cast<std::size_t>(admittance.den_degree());
    const double c = 2.0 / tau;

    // sum_k coef_k c^k (z - 1)^k (z + 1)^(order - k), ascending in z.
    auto map = [&](const Coeffs& coeffs) {
        Coeffs out(order + 1, 0.0);
        double ck = 1.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            Coeffs term{coeffs[k] * ck};
            for (std::size_t i = 0; i < k; ++i) term = poly::multiply(term, Coeffs{-1.0, 1.0});
            for (std::size_t i = k; i < order; ++i) term = poly::multiply(term, Coeffs{1.0, 1.0});
            out = poly::add(out, term);
            ck *= c;
        }
        return Coeffs(out.rbegin(), out.rend());
    };
    Coeffs num = admittance.num().empty() ? Coeffs(order + 1, 0.0) : map(admittance.num());
    Coeffs den = map(admittance.den());
    if (std::abs(den.front()) <= 1e-14 * std::abs(poly::eval(admittance.den(), c)) || den.front() == 0.0)
        throw NumericalError("tustin_discretize: mapped leading denominator coefficient vanishes");
    return DiscreteTF(std::move(num), std::move(den), tau);
}

void SweepConfig::validate() const {
    if (!(f_start > 0.0) || !(f_end > f_start)) throw std::invalid_argument("SweepConfig: need 0 < f_start < f_end");
    if (!(duration > 0.0)) throw std::invalid_argument("SweepConfig: duration must be positive");
    if (!(amplitude >= 0.0)) throw std::invalid_argument("SweepConfig: amplitude must be nonnegative");
}

double SweepConfig::frequency_at(double t) const {
    const double u = std::clamp(t / duration, 0.0, 1.0);
    if (law == Law::Linear) return f_start + (f_end - f_start) * u;
    return f_start * std::pow(f_end / f_start, u);
}

double SweepConfig::phase_at(double t) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (law == Law::Linear) return two_pi * (f_start * t + 0.5 * (f_end - f_start) / duration * t * t);
    const double ratio = std::log(f_end / f_start);
    return two_pi * f_start * duration / ratio * std::expm1(ratio * t / duration);
}

double SweepConfig::force_at(double t) const {
    if (t > duration) return 0.0;
    return amplitude * std::sin(phase_at(t));
}

SweepConfig default_sweep(const PiezoModel& model) {
    const double f_sc = model.omega_sc() / (2.0 * std::numbers::pi);
    SweepConfig s;
    s.f_start = 0.9 * f_sc;
    s.f_end = 1.15 * f_sc;
    s.duration = 600.0 / f_sc;
    s.amplitude = 1.0;
    return s;
}

namespace {

struct State {
    double x, v, q;
};

}  // namespace

SimResult simulate_swept_sine(const PiezoModel& model, DiscreteTF ctrl, double tau, const SweepConfig& sweep,
                              const SimOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("simulate_swept_sine: tau must be positive");
    if (std::abs(ctrl.tau() - tau) > 1e-9 * tau)
        throw std::invalid_argument("simulate_swept_sine: controller sampling period differs from tau");
    if (opts.substeps < 10) throw std::invalid_argument("simulate_swept_sine: substeps must be at least 10");
    sweep.validate();
    ctrl.reset();

    const double m = model.effective_mass();
    const double k_oc = model.k_oc();
    const double theta = model.effective_theta_p();
    const double cp = model.cp_eps();
    const double w_sc = model.omega_sc();
    const double period_ref = 2.0 * std::numbers::pi / w_sc;

    SimResult res;
    res.omega_ref = w_sc;
    res.stiffness_ref = model.k_sc();
    res.sweep_end = sweep.duration;

    const double h = tau / opts.substeps;
    const double kc = model.kc();
    const double tail_periods = opts.tail_periods >= 0.0 ? opts.tail_periods : std::max(200.0, kc > 0.0 ? 20.0 / kc : 0.0);
    const double t_total = sweep.duration + tail_periods * period_ref;
    const auto n_samples = static_cast<long long>(std::ceil(t_total / tau));
    const double f_max = std::max(sweep.f_end, model.omega_oc() / (2.0 * std::numbers::pi));
    const long long record_every = std::max<long long>(1, static_cast<long long>(1.0 / (f_max * 64.0 * h)));

    const double floor_ref = std::max(sweep.amplitude / res.stiffness_ref,
                                      std::abs(opts.x0) + std::abs(opts.v0) / w_sc + std::abs(opts.q0) * theta / k_oc);
    const auto lag = static_cast<long long>(opts.reference_lag_periods);
    std::vector<double> period_max;
    double lagged_ref = 0.0;
    long long lag_consumed = 0;

    State st{opts.x0, opts.v0, opts.q0};
    auto deriv = [&](const State& s, double t, double current) {
        const double f = sweep.force_at(t);
        return State{s.v, (f - k_oc * s.x + theta * s.q) / m, current};
    };

    const auto expected = static_cast<std::size_t>(n_samples * opts.substeps / record_every + 2);
    res.t.reserve(expected);
    res.x.reserve(expected);
    res.v_piezo.reserve(expected);
    res.i_inject.reserve(expected);
    auto push = [&](double t, double v_s, double i_s) {
        res.t.push_back(t);
        res.x.push_back(st.x);
        res.v_piezo.push_back(v_s);
        res.i_inject.push_back(i_s);
    };

    long long counter = 0;
    bool stop = false;
    double t_last = 0.0;
    for (long long n = 0; n < n_samples && !stop; ++n) {
        const double t_n = static_cast<double>(n) * tau;
        const double v_sample = theta * st.x - st.q / cp;
        const double current = ctrl.step(v_sample);
        if (n == 0) push(0.0, v_sample, current);

        for (int j = 0; j < opts.substeps; ++j) {
            const double t = t_n + j * h;
            const State k1 = deriv(st, t, current);
            const State s2{st.x + 0.5 * h * k1.x, st.v + 0.5 * h * k1.v, st.q + 0.5 * h * k1.q};
            const State k2 = deriv(s2, t + 0.5 * h, current);
            const State s3{st.x + 0.5 * h * k2.x, st.v + 0.5 * h * k2.v, st.q + 0.5 * h * k2.q};
            const State k3 = deriv(s3, t + 0.5 * h, current);
            const State s4{st.x + h * k3.x, st.v + h * k3.v, st.q + h * k3.q};
            const State k4 = deriv(s4, t + h, current);
            st.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
            st.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
            st.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);

            const double t_next = t + h;
            t_last = t_next;
            if (!std::isfinite(st.x) || !std::isfinite(st.v) || !std::isfinite(st.q)) {
                res.diverged = true;
                stop = true;
                break;
            }

            const auto p = static_cast<long long>(t_next / period_ref);
            if (static_cast<long long>(period_max.size()) <= p) period_max.resize(static_cast<std::size_t>(p) + 1, 0.0);
            period_max[static_cast<std::size_t>(p)] = std::max(period_max[static_cast<std::size_t>(p)], std::abs(st.x));
            while (lag_consumed <= p - lag) lagged_ref = std::max(lagged_ref, period_max[static_cast<std::size_t>(lag_consumed++)]);
            const double ref = std::max(lagged_ref, floor_ref);
            if (ref > 0.0 && std::abs(st.x) > opts.divergence_factor * ref) {
                res.diverged = true;
                push(t_next, v_sample, current);
                stop = true;
                break;
            }

            if (++counter % record_every == 0) push(t_next, v_sample, current);
        }
    }

    res.final_state = {t_last, st.x, st.v, st.q};
    res.stable = !res.diverged;
    if (!res.diverged && tail_periods > 0.0) {
        const double q2 = sweep.duration + 0.5 * tail_periods * period_ref;
        const double q3 = sweep.duration + 0.75 * tail_periods * period_ref;
        double e3 = 0.0, e4 = 0.0;
        std::size_t n3 = 0, n4 = 0;
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            if (res.t[i] <= q2) continue;
            if (res.t[i] <= q3) {
                e3 += res.x[i] * res.x[i];
                ++n3;
            } else {
                e4 += res.x[i] * res.x[i];
                ++n4;
            }
        }
        if (n3 > 0 && n4 > 0 && e3 > 0.0) {
            res.tail_growth_ratio = std::sqrt((e4 / n4) / (e3 / n3));
            if (res.tail_growth_ratio > 1.0) res.stable = false;
        }
    }

    try {
        res.envelope = extract_envelope(res, sweep);
    } catch (const std::invalid_argument&) {
        res.envelope.clear();
    }
    return res;
}

std::vector<EnvelopePoint> extract_envelope(const SimResult& sim, const SweepConfig& sweep) {
    const double to_norm = 2.0 * std::numbers::pi / sim.omega_ref;
    std::vector<EnvelopePoint> env;

    std::size_t end = 0;
    while (end < sim.t.size() && sim.t[end] <= sweep.duration) ++end;

    double max_abs = 0.0;
    for (std::size_t i = 0; i < end; ++i) max_abs = std::max(max_abs, std::abs(sim.x[i]));
    if (sweep.amplitude == 0.0 || max_abs == 0.0) {
        // No forcing, no motion: a flat zero envelope across the sweep band.
        for (double f : linspace(sweep.f_start, sweep.f_end, 64)) env.push_back({f * to_norm, 0.0});
        return env;
    }

    std::vector<double> mag(end);
    for (std::size_t i = 0; i < end; ++i) mag[i] = std::abs(sim.x[i]);
    for (const Peak& p : find_peaks(std::vector<double>(sim.t.begin(), sim.t.begin() + static_cast<std::ptrdiff_t>(end)), mag)) {
        env.push_back({sweep.frequency_at(p.omega) * to_norm, p.amplitude * sim.stiffness_ref / sweep.amplitude});
    }
    if (env.size() < 3) throw std::invalid_argument("extract_envelope: fewer than 3 maxima; sweep too short");
    return env;
}

}  // namespace shuntlab
