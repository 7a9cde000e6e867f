#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace shuntlab;
using fixture::rel;

namespace {

struct TuningLd {
    long double r, inductance, resistance;
};

// Equal-peak formulas evaluated in extended precision.
TuningLd tuning_ld(long double kc, long double w_oc, long double cp) {
    const long double k2 = kc * kc;
    const long double r = (std::sqrt(64.0L - 16.0L * k2 - 26.0L * k2 * k2) - k2) / 8.0L;
    const long double den = 3.0L * k2 - 4.0L * r + 8.0L;
    const long double inductance = (4.0L * k2 + 4.0L) / den / (w_oc * w_oc * cp);
    const long double inner = 27.0L * k2 * k2 + k2 * (80.0L - 48.0L * r) - 64.0L * (r - 1.0L);
    const long double resistance =
        2.0L * std::sqrt(2.0L * (k2 + 1.0L) * inner) / ((5.0L * k2 + 8.0L) * std::sqrt(den)) / (w_oc * cp);
    return {r, inductance, resistance};
}

}  // namespace

TEST_CASE("eemcf") {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    CHECK(rel(eemcf(two_pi * 31.08, two_pi * 31.29), 0.116) < 0.005);
    CHECK(eemcf(3.0, 3.0) == 0.0);
    CHECK(rel(eemcf(1.0, std::sqrt(1.01)), 0.1) < 1e-12);
    CHECK_THROWS_AS(eemcf(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eemcf(0.0, 1.0), std::domain_error);
}

TEST_CASE("model construction") {
    const auto m = PiezoModel::from_coupling(5.0, 0.2, 1e-6);
    CHECK(rel(m.kc() * m.kc(), (m.omega_oc() * m.omega_oc() - 25.0) / 25.0) < 1e-14);
    CHECK_THROWS_AS(PiezoModel::from_modal(1.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(PiezoModel::from_modal(1.0, 2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(PiezoModel::from_coupling(1.0, -0.1, 1.0), std::domain_error);

    const double mass = 0.05, k_oc = 2.1e3, theta = 3.0e4, cp = 1.1e-7;
    const auto p = PiezoModel::from_physical(mass, k_oc, theta, cp);
    CHECK(rel(p.omega_sc() * p.omega_sc(), (k_oc - theta * theta * cp) / mass) < 1e-12);
    CHECK(rel(p.k_oc(), k_oc) < 1e-12);
    CHECK(rel(p.effective_theta_p(), theta) < 1e-15);
    CHECK_THROWS_AS(PiezoModel::from_physical(mass, 1.0, theta, cp), std::domain_error);

    // Without a mass, the implied coupling coefficient reproduces k_sc = k_oc - theta^2 C_p.
    const auto modal = PiezoModel::from_modal(p.omega_sc(), p.omega_oc(), cp);
    const double th = modal.effective_theta_p();
    CHECK(rel(modal.k_oc() - th * th * cp, modal.k_sc()) < 1e-12);
}

TEST_CASE("EEMCF round trip") {
    for (double kc : {0.05, 0.116, 0.3, 1.0})
        for (double w : {1.0, 195.3, 1e4}) CHECK(rel(PiezoModel::from_coupling(w, kc, 1.0).kc(), kc) < 1e-12);
    // Below that, storing omega_oc rounds away about eps / K_c^2 of the coupling.
    for (double kc : {1e-4, 1e-3, 0.01})
        for (double w : {1.0, 195.3, 1e4})
            CHECK(rel(PiezoModel::from_coupling(w, kc, 1.0).kc(), kc) < 4.0 * 2.3e-16 / (kc * kc));
}

TEST_CASE("optimal tuning of the beam") {
    const auto beam = fixture::beam();
    CHECK(std::abs(beam.kc() - 0.116) < 0.001);
    const auto s = tune_series_rl(beam);
    CHECK(rel(s.inductance, 105.7) < 0.005);
    CHECK(rel(s.resistance, 2961.0) < 0.01);
    CHECK(rel(s.inductance * s.delta * s.delta * beam.omega_oc() * beam.omega_oc() * beam.cp_eps(), 1.0) < 1e-10);
}

TEST_CASE("optimal tuning matches an extended-precision evaluation") {
    for (double kc : {0.001, 0.05, 0.1, 0.3, 1.0}) {
        const auto m = PiezoModel::from_coupling(3.7, kc, 2e-6);
        const auto s = tune_series_rl(m);
        const auto ref = tuning_ld(kc, 3.7L * std::sqrt(1.0L + (long double)kc * kc), 2e-6L);
        CHECK(rel(s.inductance, static_cast<double>(ref.inductance)) < 1e-12);
        CHECK(rel(s.resistance, static_cast<double>(ref.resistance)) < 1e-10);
    }
}

TEST_CASE("tuning limits") {
    const auto zero = PiezoModel::from_coupling(2.0, 0.0, 0.5);
    const auto s = tune_series_rl(zero);
    CHECK(rel(s.inductance, 1.0 / (zero.omega_oc() * zero.omega_oc() * 0.5)) < 1e-15);
    CHECK(s.resistance == doctest::Approx(0.0));
    CHECK(s.zeta == doctest::Approx(0.0));
    CHECK(s.delta == doctest::Approx(1.0));

    CHECK(max_tunable_kc() == doctest::Approx(1.13628).epsilon(1e-5));
    CHECK_NOTHROW(tune_series_rl(PiezoModel::normalized(0.99 * max_tunable_kc())));
    try {
        tune_series_rl(PiezoModel::normalized(1.2));
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("1.136") != std::string::npos);
    }
}

TEST_CASE("linearized tuning") {
    const auto beam = fixture::beam();
    const auto lin = tune_series_rl_linearized(beam);
    CHECK(rel(lin.resistance, 1.2247 * 0.116 / (2.0 * std::numbers::pi * 31.29 * 245e-9)) < 0.01);
    CHECK(rel(lin.resistance, tune_series_rl(beam).resistance) < 0.01);
    CHECK(tune_series_rl_linearized(PiezoModel::normalized(0.0)).resistance == 0.0);
    const auto n = PiezoModel::normalized(0.1);
    CHECK(rel(tune_series_rl_linearized(n).inductance, 1.0 / (n.omega_oc() * n.omega_oc())) < 1e-15);
}

TEST_CASE("full and linearized tunings agree to first order") {
    for (int i = 0; i < 50; ++i) {
        const double kc = 0.001 * std::pow(200.0, i / 49.0);
        const auto m = PiezoModel::normalized(kc);
        const auto full = tune_series_rl(m);
        const auto lin = tune_series_rl_linearized(m);
        CHECK(rel(lin.inductance, full.inductance) < 5.0 * kc);
        CHECK(rel(lin.resistance, full.resistance) < 5.0 * kc);
    }
}

TEST_CASE("tuning scales with frequency and capacitance") {
    const auto base = PiezoModel::from_coupling(1.3, 0.08, 0.7);
    const auto s0 = tune_series_rl(base);
    for (double alpha : {0.5, 3.0, 200.0})
        for (double beta : {1e-7, 0.25, 4.0}) {
            const auto s = tune_series_rl(base.rescaled(alpha, beta));
            CHECK(rel(s.inductance, s0.inductance / (alpha * alpha * beta)) < 1e-12);
            CHECK(rel(s.resistance, s0.resistance / (alpha * beta)) < 1e-12);
        }
}

TEST_CASE("shunt admittance") {
    const auto y = shunt_admittance({105.7, 2961.0, 0.0, 0.0});
    CHECK(y.num() == Coeffs{1.0});
    CHECK(y.den() == Coeffs{2961.0, 105.7});
    CHECK(std::abs(y(0.0) - 1.0 / 2961.0) < 1e-18);

    const auto pure = shunt_admittance({1.0, 0.0, 0.0, 0.0});
    CHECK(pure.den() == Coeffs{0.0, 1.0});
    CHECK(std::abs(pure(Complex(0.0, 2.0)) - Complex(0.0, -0.5)) < 1e-15);
    CHECK_THROWS_AS(shunt_admittance({0.0, 1.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("dynamic capacitance") {
    const auto beam = fixture::beam();
    const auto c = dynamic_capacitance(beam);
    CHECK(rel(std::abs(c.at_frequency(1e6 * beam.omega_oc())), beam.cp_eps()) < 1e-9);
    CHECK(std::abs(c.at_frequency(beam.omega_oc())) < 1e-12 * beam.cp_eps());
    const double kc = beam.kc();
    CHECK(rel(c(0.0).real(), 245e-9 * (1.0 + kc * kc)) < 1e-12);
}

TEST_CASE("normalized units") {
    const auto beam = fixture::beam();
    const auto s = tune_series_rl(beam);
    const auto ns = normalized_shunt(beam, s);
    const auto ref = tune_series_rl(beam.to_normalized());
    CHECK(rel(ns.inductance, ref.inductance) < 1e-12);
    CHECK(rel(ns.resistance, ref.resistance) < 1e-12);

    const auto y = shunt_admittance(s);
    const auto yn = normalized_admittance(beam, y);
    const Complex sn(0.02, 1.03);
    const Complex expect = y(sn * beam.omega_sc()) / (beam.cp_eps() * beam.omega_sc());
    CHECK(std::abs(yn(sn) - expect) < 1e-12 * std::abs(expect));
}
