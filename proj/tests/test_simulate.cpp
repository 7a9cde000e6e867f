#include "fixtures.hpp"

#include "shuntlab/delay_stability.hpp"
#include "shuntlab/errors.hpp"
#include "shuntlab/simulate.hpp"
#include "shuntlab/stabilization.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace shuntlab;
using fixture::rel;

namespace {

constexpr double pi = std::numbers::pi;

struct Loop {
    PiezoModel model;
    RationalTF admittance;
    double tau_c;
};

Loop loop(double kc) {
    const auto m = PiezoModel::normalized(kc);
    const auto y = shunt_admittance(tune_series_rl(m));
    return {m, y, critical_delay_numeric(m, y, DelayModel::Kind::Zoh).tau_c};
}

SimResult run(const PiezoModel& m, const RationalTF& y, double tau, const SweepConfig& sweep, SimOptions opts = {}) {
    return simulate_swept_sine(m, tustin_discretize(y, tau), tau, sweep, opts);
}

double envelope_max(const std::vector<EnvelopePoint>& env, double lo, double hi) {
    double best = 0.0;
    for (const auto& p : env)
        if (p.omega_norm >= lo && p.omega_norm <= hi) best = std::max(best, p.amplitude);
    return best;
}

}  // namespace

TEST_CASE("tustin discretization") {
    const auto c = tustin_discretize(RationalTF::constant(2.5), 0.1);
    CHECK(c.order() == 0);
    DiscreteTF cc = c;
    for (double u : {1.0, -3.0, 0.25}) CHECK(cc.step(u) == doctest::Approx(2.5 * u).epsilon(1e-15));

    const RationalTF rl({1.0}, {2961.0, 105.7});
    for (double tau : {1e-4, 1e-3, 0.1}) {
        const auto d = tustin_discretize(rl, tau);
        CHECK(d.den_z()[0] == 1.0);
        CHECK(d.order() == 1);
        CHECK(std::abs(d(1.0) - 1.0 / 2961.0) < 1e-12 / 2961.0);
    }

    std::mt19937 gen(11);
    const auto beam = fixture::beam();
    const auto y_beam = shunt_admittance(tune_series_rl(beam));
    const RationalTF second({0.3, 1.0}, {2.0, 0.4, 1.0});
    for (const RationalTF& y : {rl, y_beam, second}) {
        const double tau = 1e-3;
        const auto d = tustin_discretize(y, tau);
        std::uniform_real_distribution<double> u(0.0, pi / tau);
        for (int i = 0; i < 20; ++i) {
            const double w = u(gen);
            const Complex lhs = d(std::exp(Complex(0.0, w * tau)));
            const Complex rhs = y(Complex(0.0, 2.0 / tau * std::tan(w * tau / 2.0)));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
        }
    }

    CHECK_THROWS_AS(tustin_discretize(rl, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tustin_discretize(RationalTF({0.0, 1.0}, {1.0}), 0.1), std::invalid_argument);
    // A pole at s = 2/tau maps onto a zero leading coefficient.
    CHECK_THROWS_AS(tustin_discretize(RationalTF({1.0}, {-20.0, 1.0}), 0.1), NumericalError);
}

TEST_CASE("controller recurrence") {
    auto unity = tustin_discretize(RationalTF::constant(1.0), 0.01);
    for (double u : {0.5, 0.5, -1.0, 2.0, 2.0}) CHECK(unity.step(u) == u);

    const RationalTF rl({1.0}, {3.0, 0.5});
    auto zero = tustin_discretize(rl, 0.05);
    for (int k = 0; k < 10; ++k) CHECK(zero.step(0.0) == 0.0);

    // Inverse z-transform of g (1 + z^-1)/(1 - a z^-1).
    for (double tau : {0.01, 0.05, 0.4}) {
        const double l = 0.5, r = 3.0;
        const double g = tau / (2.0 * l + r * tau);
        const double a = (2.0 * l - r * tau) / (2.0 * l + r * tau);
        auto ctrl = tustin_discretize(rl, tau);
        CHECK(ctrl.step(1.0) == doctest::Approx(g).epsilon(1e-14));
        for (int k = 1; k < 30; ++k) {
            const double expect = g * (std::pow(a, k) + std::pow(a, k - 1));
            CHECK(std::abs(ctrl.step(0.0) - expect) < 1e-14 * g);
        }
        ctrl.reset();
        CHECK(ctrl.step(0.0) == 0.0);
    }
}

TEST_CASE("sweep configuration") {
    SweepConfig s{1.0, 2.0, 10.0, 1.0, SweepConfig::Law::Linear};
    CHECK_NOTHROW(s.validate());
    CHECK(s.frequency_at(5.0) == doctest::Approx(1.5));
    CHECK(s.force_at(10.5) == 0.0);
    const double h = 1e-6;
    CHECK((s.phase_at(3.0 + h) - s.phase_at(3.0 - h)) / (2.0 * h) == doctest::Approx(2.0 * pi * s.frequency_at(3.0)).epsilon(1e-7));
    s.law = SweepConfig::Law::Logarithmic;
    CHECK(s.frequency_at(5.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK((s.phase_at(3.0 + h) - s.phase_at(3.0 - h)) / (2.0 * h) == doctest::Approx(2.0 * pi * s.frequency_at(3.0)).epsilon(1e-7));

    CHECK_THROWS_AS((SweepConfig{2.0, 1.0, 1.0, 1.0, SweepConfig::Law::Linear}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SweepConfig{1.0, 2.0, 0.0, 1.0, SweepConfig::Law::Linear}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SweepConfig{0.0, 2.0, 1.0, 1.0, SweepConfig::Law::Linear}.validate()), std::invalid_argument);

    const auto d = default_sweep(PiezoModel::normalized(0.1));
    CHECK(d.f_start * 2.0 * pi == doctest::Approx(0.9));
    CHECK(d.f_end * 2.0 * pi == doctest::Approx(1.15));
    CHECK(d.duration == doctest::Approx(600.0 * 2.0 * pi));
}

TEST_CASE("simulation arguments") {
    const auto [m, y, tc] = loop(0.1);
    const auto sweep = default_sweep(m);
    CHECK_THROWS_AS(simulate_swept_sine(m, tustin_discretize(y, 0.1), 0.2, sweep), std::invalid_argument);
    SimOptions few;
    few.substeps = 4;
    CHECK_THROWS_AS(run(m, y, 0.1, sweep, few), std::invalid_argument);
}

TEST_CASE("stability verdicts around the critical delay") {
    const auto [m, y, tc] = loop(0.1);
    const auto sweep = default_sweep(m);

    const auto low = run(m, y, 0.01 * tc, sweep);
    const auto mid = run(m, y, 0.8 * tc, sweep);
    const auto high = run(m, y, 1.01 * tc, sweep);
    CHECK(low.stable);
    CHECK(mid.stable);
    CHECK_FALSE(high.stable);

    CHECK(low.t.size() == low.x.size());
    CHECK(low.t.size() == low.v_piezo.size());
    CHECK(low.t.size() == low.i_inject.size());
    for (const auto& p : low.envelope) {
        CHECK(p.omega_norm >= 0.9 - 1e-12);
        CHECK(p.omega_norm <= 1.15 + 1e-12);
    }
    // The delay mostly amplifies the upper resonance.
    CHECK(envelope_max(mid.envelope, 1.0, 1.15) > 1.5 * envelope_max(low.envelope, 1.0, 1.15));
}

TEST_CASE("stabilized admittance in simulation") {
    const auto m = PiezoModel::normalized(0.01);
    const auto y = shunt_admittance(tune_series_rl(m));
    const auto sweep = default_sweep(m);
    const auto at_half = stabilize(m, y, 0.5);
    const auto at_one = stabilize(m, y, 1.0);
    CHECK(run(m, at_half.admittance, 0.5, sweep).stable);
    CHECK_FALSE(run(m, at_one.admittance, 1.0, sweep).stable);
}

TEST_CASE("envelope of a steady sine") {
    const auto [m, y, tc] = loop(0.1);
    const double tau = 0.05;
    for (double wn : {0.95, 1.0, 1.08}) {
        const double f = wn / (2.0 * pi);
        const SweepConfig sine{f, f * (1.0 + 1e-12), 400.0 / f, 2.0, SweepConfig::Law::Linear};
        const auto sim = run(m, y, tau, sine);
        const double expect = std::abs(closed_loop_compliance(m, y, DelayModel::zoh(tau), wn));
        const auto& env = sim.envelope;
        REQUIRE(env.size() > 100);
        for (std::size_t i = env.size() * 3 / 4; i < env.size(); ++i) CHECK(rel(env[i].amplitude, expect) < 0.02);
    }
}

namespace {

// Envelope points past the start-up transient of a sweep launched from rest.
std::vector<EnvelopePoint> settled(const SimResult& sim, const SweepConfig& sweep) {
    const double w_skip = sweep.frequency_at(10.0 / sweep.f_start) * 2.0 * pi / sim.omega_ref;
    std::vector<EnvelopePoint> out;
    for (const auto& p : sim.envelope)
        if (p.omega_norm > w_skip) out.push_back(p);
    return out;
}

}  // namespace

TEST_CASE("envelope tracks the delayed response") {
    const auto [m, y, tc] = loop(0.1);
    const auto sweep = default_sweep(m);
    for (double tau : {0.01 * tc, 0.1 * tc}) {
        const auto sim = run(m, y, tau, sweep);
        REQUIRE(sim.stable);
        const double peak = envelope_max(sim.envelope, 0.9, 1.15);
        double worst = 0.0;
        for (const auto& p : settled(sim, sweep)) {
            const double ref = std::abs(closed_loop_compliance(m, y, DelayModel::zoh(tau), p.omega_norm));
            worst = std::max(worst, std::abs(p.amplitude - ref) / peak);
        }
        CHECK(worst < 0.05);
    }
}

TEST_CASE("envelope tracks the nominal response at small delays") {
    const auto [m, y, tc] = loop(0.1);
    const auto sweep = default_sweep(m);
    const auto sim = run(m, y, 0.1 * tc, sweep);
    REQUIRE(sim.stable);
    double worst = 0.0;
    for (const auto& p : settled(sim, sweep)) {
        const double ref = std::abs(closed_loop_compliance(m, y, DelayModel::none(), p.omega_norm));
        worst = std::max(worst, std::abs(p.amplitude - ref) / ref);
    }
    CHECK(worst < 0.05);
}

TEST_CASE("zero forcing") {
    const auto [m, y, tc] = loop(0.1);
    auto sweep = default_sweep(m);
    sweep.amplitude = 0.0;
    sweep.duration /= 10.0;
    const auto sim = run(m, y, 0.1, sweep);
    REQUIRE(!sim.envelope.empty());
    for (const auto& p : sim.envelope) CHECK(p.amplitude == 0.0);
    for (double x : sim.x) CHECK(x == 0.0);
}

TEST_CASE("too few maxima") {
    const auto [m, y, tc] = loop(0.1);
    SweepConfig brief{0.15, 0.16, 3.0, 1.0, SweepConfig::Law::Linear};
    SimOptions opts;
    opts.tail_periods = 0.0;
    const auto sim = run(m, y, 0.01, brief, opts);
    CHECK(sim.envelope.empty());
    CHECK_THROWS_AS(extract_envelope(sim, brief), std::invalid_argument);
}

TEST_CASE("free response decays") {
    const auto [m, y, tc] = loop(0.1);
    auto sweep = default_sweep(m);
    sweep.amplitude = 0.0;
    sweep.duration = 2.0 * pi * 150.0;
    SimOptions opts;
    opts.x0 = 1.0;
    opts.tail_periods = 0.0;
    const auto sim = run(m, y, 0.01 * tc, sweep, opts);
    REQUIRE(sim.stable);

    // The two modes beat; the peak amplitude is taken once per beat cycle.
    const auto poles = closed_loop_poles(m, y);
    const double beat = 2.0 * pi / (poles[3].imag() - poles[2].imag());
    std::vector<double> cycle_peak;
    for (std::size_t i = 0; i < sim.t.size(); ++i) {
        const auto k = static_cast<std::size_t>(sim.t[i] / beat);
        if (k >= cycle_peak.size()) cycle_peak.resize(k + 1, 0.0);
        cycle_peak[k] = std::max(cycle_peak[k], std::abs(sim.x[i]));
    }
    cycle_peak.pop_back();
    REQUIRE(cycle_peak.size() >= 8);
    for (std::size_t k = 1; k < cycle_peak.size(); ++k) CHECK(cycle_peak[k] < cycle_peak[k - 1]);
}

TEST_CASE("sweep rate convergence") {
    const auto [m, y, tc] = loop(0.1);
    const double tau = 0.1 * tc;
    const auto base = default_sweep(m);
    auto slow = base;
    slow.duration *= 2.0;
    const auto a = run(m, y, tau, base);
    const auto b = run(m, y, tau, slow);
    for (auto [lo, hi] : {std::pair{0.9, 1.0}, std::pair{1.0, 1.15}}) {
        const double pa = envelope_max(a.envelope, lo, hi);
        const double pb = envelope_max(b.envelope, lo, hi);
        CHECK(rel(pa, pb) < 0.01);
    }
}

TEST_CASE("substep convergence") {
    const auto [m, y, tc] = loop(0.1);
    const auto sweep = default_sweep(m);
    SimOptions fine;
    fine.substeps = 64;
    const auto a = run(m, y, 0.5 * tc, sweep);
    const auto b = run(m, y, 0.5 * tc, sweep, fine);
    const auto norm = [](const PlantState& s) { return std::sqrt(s.x * s.x + s.v * s.v + s.q * s.q); };
    const PlantState d{0.0, a.final_state.x - b.final_state.x, a.final_state.v - b.final_state.v,
                       a.final_state.q - b.final_state.q};
    CHECK(a.final_state.t == doctest::Approx(b.final_state.t).epsilon(1e-12));
    CHECK(norm(d) < 1e-6 * norm(b.final_state));
}

TEST_CASE("simulated stability boundary") {
    for (double kc : {0.01, 0.1}) {
        const auto [m, y, tc] = loop(kc);
        const auto sweep = default_sweep(m);
        double lo = 0.8 * tc, hi = 1.2 * tc;
        REQUIRE(run(m, y, lo, sweep).stable);
        REQUIRE_FALSE(run(m, y, hi, sweep).stable);
        for (int i = 0; i < 6; ++i) {
            const double mid = 0.5 * (lo + hi);
            (run(m, y, mid, sweep).stable ? lo : hi) = mid;
        }
        CHECK(rel(0.5 * (lo + hi), tc) < 0.05);
    }
}
