#include "shuntlab/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shuntlab {

double eemcf(double omega_sc, double omega_oc) {
    if (!(omega_sc > 0.0) || !(omega_oc >= omega_sc) || !std::isfinite(omega_oc))
        throw std::domain_error("eemcf: requires 0 < omega_sc <= omega_oc");
    return std::sqrt((omega_oc - omega_sc) * (omega_oc + omega_sc)) / omega_sc;
}

PiezoModel::PiezoModel(double omega_sc, double omega_oc, double cp_eps, std::optional<double> mass,
                       std::optional<double> theta_p)
    : omega_sc_(omega_sc), omega_oc_(omega_oc), cp_eps_(cp_eps), mass_(mass), theta_p_(theta_p) {
    if (!(omega_sc_ > 0.0) || !std::isfinite(omega_sc_))
        throw std::domain_error("PiezoModel: omega_sc must be positive");
    if (!(omega_oc_ >= omega_sc_) || !std::isfinite(omega_oc_))
        throw std::domain_error("PiezoModel: omega_oc must not be below omega_sc");
    if (!(cp_eps_ > 0.0) || !std::isfinite(cp_eps_))
        throw std::domain_error("PiezoModel: capacitance must be positive");
    if (mass_ && !(*mass_ > 0.0)) throw std::domain_error("PiezoModel: mass must be positive");
}

PiezoModel PiezoModel::from_modal(double omega_sc, double omega_oc, double cp_eps) {
    return PiezoModel(omega_sc, omega_oc, cp_eps, std::nullopt, std::nullopt);
}

PiezoModel PiezoModel::from_coupling(double omega_sc, double kc, double cp_eps) {
    if (!(kc >= 0.0)) throw std::domain_error("PiezoModel: coupling factor must be nonnegative");
    return from_modal(omega_sc, omega_sc * std::sqrt(1.0 + kc * kc), cp_eps);
}

PiezoModel PiezoModel::from_frequencies_hz(double f_sc, double f_oc, double cp_eps) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return from_modal(two_pi * f_sc, two_pi * f_oc, cp_eps);
}

PiezoModel PiezoModel::from_physical(double mass, double k_oc, double theta_p, double cp_eps) {
    if (!(mass > 0.0) || !(k_oc > 0.0) || !(cp_eps > 0.0))
        throw std::domain_error("PiezoModel: mass, stiffness and capacitance must be positive");
    const double k_sc = k_oc - theta_p * theta_p * cp_eps;
    if (!(k_sc > 0.0)) throw std::domain_error("PiezoModel: short-circuit stiffness must be positive");
    return PiezoModel(std::sqrt(k_sc / mass), std::sqrt(k_oc / mass), cp_eps, mass, theta_p);
}

PiezoModel PiezoModel::normalized(double kc) {
    if (!(kc >= 0.0)) throw std::domain_error("PiezoModel: coupling factor must be nonnegative");
    return PiezoModel(1.0, std::sqrt(1.0 + kc * kc), 1.0, 1.0, kc);
}

double PiezoModel::effective_mass() const {
    return mass_ ? *mass_ : 1.0 / (omega_sc_ * omega_sc_);
}

double PiezoModel::effective_theta_p() const {
    if (theta_p_) return *theta_p_;
    const double m = effective_mass();
    return std::sqrt((omega_oc_ * omega_oc_ - omega_sc_ * omega_sc_) * m / cp_eps_);
}

PiezoModel PiezoModel::rescaled(double alpha, double beta) const {
    return from_modal(alpha * omega_sc_, alpha * omega_oc_, beta * cp_eps_);
}

ShuntParams make_shunt(const PiezoModel& model, double inductance, double resistance) {
    if (!(inductance > 0.0)) throw std::domain_error("shunt: inductance must be positive");
    if (!(resistance >= 0.0)) throw std::domain_error("shunt: resistance must be nonnegative");
    const double w = model.omega_oc();
    const double cp = model.cp_eps();
    const double delta = 1.0 / (w * std::sqrt(inductance * cp));
    const double zeta = resistance * delta * w * cp / 2.0;
    return {inductance, resistance, delta, zeta};
}

double max_tunable_kc() {
    // Positive root of 64 - 16 x - 26 x^2 with x = K_c^2.
    const double x = (-16.0 + std::sqrt(16.0 * 16.0 + 4.0 * 26.0 * 64.0)) / 52.0;
    return std::sqrt(x);
}

ShuntParams tune_series_rl(const PiezoModel& model) {
    const double k2 = model.kc() * model.kc();
    const double radicand = 64.0 - 16.0 * k2 - 26.0 * k2 * k2;
    if (radicand < 0.0)
        throw std::domain_error("tune_series_rl: coupling factor " + std::to_string(model.kc()) +
                                " exceeds the tunable bound " + std::to_string(max_tunable_kc()));
    const double r = (std::sqrt(radicand) - k2) / 8.0;
    const double den = 3.0 * k2 - 4.0 * r + 8.0;
    const double r_rad = 27.0 * k2 * k2 + k2 * (80.0 - 48.0 * r) - 64.0 * (r - 1.0);
    if (!(den > 0.0) || r_rad < 0.0)
        throw std::domain_error("tune_series_rl: optimal tuning undefined for this coupling factor");

    const double w = model.omega_oc();
    const double cp = model.cp_eps();
    ShuntParams out;
    out.inductance = (4.0 * k2 + 4.0) / den / (w * w * cp);
    out.resistance = 2.0 * std::sqrt(2.0 * (k2 + 1.0) * r_rad) / ((5.0 * k2 + 8.0) * std::sqrt(den)) / (w * cp);
    out.delta = std::sqrt(den / (4.0 * k2 + 4.0));
    out.zeta = out.resistance * out.delta * w * cp / 2.0;
    return out;
}

ShuntParams tune_series_rl_linearized(const PiezoModel& model) {
    const double w = model.omega_oc();
    const double cp = model.cp_eps();
    const double kc = model.kc();
    ShuntParams out;
    out.inductance = 1.0 / (cp * w * w);
    out.resistance = std::sqrt(1.5) * kc / (w * cp);
    out.delta = 1.0;
    out.zeta = std::sqrt(1.5) * kc / 2.0;
    return out;
}

RationalTF shunt_admittance(const ShuntParams& shunt) {
    if (!(shunt.inductance > 0.0)) throw std::domain_error("shunt_admittance: inductance must be positive");
    return RationalTF({1.0}, {shunt.resistance, shunt.inductance});
}

RationalTF dynamic_capacitance(const PiezoModel& model) {
    const double cp = model.cp_eps();
    const double woc = model.omega_oc();
    const double wsc = model.omega_sc();
    return RationalTF({cp * woc * woc, 0.0, cp}, {wsc * wsc, 0.0, 1.0});
}

ShuntParams normalized_shunt(const PiezoModel& model, const ShuntParams& shunt) {
    const double cp = model.cp_eps();
    const double w = model.omega_sc();
    return make_shunt(model.to_normalized(), shunt.inductance * cp * w * w, shunt.resistance * cp * w);
}

RationalTF normalized_admittance(const PiezoModel& model, const RationalTF& admittance) {
    const double w = model.omega_sc();
    const double cp = model.cp_eps();
    return RationalTF(poly::scale(poly::scale_argument(admittance.num(), w), 1.0 / (cp * w)),
                      poly::scale_argument(admittance.den(), w))
        .monic();
}

}  // namespace shuntlab
