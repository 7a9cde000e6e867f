// Electromechanical plant, coupling factor and series-RL shunt tuning.
#pragma once

#include "shuntlab/rational_tf.hpp"

#include <optional>

namespace shuntlab {

/// Effective electromechanical coupling factor from the short- and
/// open-circuit resonance frequencies. Throws std::domain_error unless
/// 0 < omega_sc <= omega_oc.
double eemcf(double omega_sc, double omega_oc);

/// Single-mode piezoelectric structure.
///
/// The modal triple (omega_sc, omega_oc, cp_eps) is canonical. Mass and
/// coupling coefficient are optional; when absent, quantities that need a mass
/// (time simulation, physical stiffnesses) assume k_sc = 1 N/m.
class PiezoModel {
public:
    static PiezoModel from_modal(double omega_sc, double omega_oc, double cp_eps);
    static PiezoModel from_coupling(double omega_sc, double kc, double cp_eps);
    static PiezoModel from_frequencies_hz(double f_sc, double f_oc, double cp_eps);
    static PiezoModel from_physical(double mass, double k_oc, double theta_p, double cp_eps);

    /// omega_sc = 1 rad/s, C_p = 1 F, m = 1 kg (so k_sc = 1 N/m).
    static PiezoModel normalized(double kc);

    double omega_sc() const { return omega_sc_; }
    double omega_oc() const { return omega_oc_; }
    double cp_eps() const { return cp_eps_; }
    double kc() const { return eemcf(omega_sc_, omega_oc_); }

    const std::optional<double>& mass() const { return mass_; }
    const std::optional<double>& theta_p() const { return theta_p_; }
    bool has_physical() const { return mass_.has_value(); }

    /// Mass used by the time-domain model: the stored one, else 1/omega_sc^2.
    double effective_mass() const;
    double effective_theta_p() const;
    double k_sc() const { return effective_mass() * omega_sc_ * omega_sc_; }
    double k_oc() const { return effective_mass() * omega_oc_ * omega_oc_; }

    /// Frequencies scaled by alpha, capacitance by beta; physical data dropped.
    PiezoModel rescaled(double alpha, double beta) const;

    /// Same coupling factor in normalized units.
    PiezoModel to_normalized() const { return normalized(kc()); }

private:
    PiezoModel(double omega_sc, double omega_oc, double cp_eps, std::optional<double> mass,
               std::optional<double> theta_p);

    double omega_sc_;
    double omega_oc_;
    double cp_eps_;
    std::optional<double> mass_;
    std::optional<double> theta_p_;
};

/// Series RL shunt. delta and zeta are the electrical frequency and damping
/// ratios relative to omega_oc: L = 1/(delta^2 omega_oc^2 C_p),
/// R = 2 zeta/(delta omega_oc C_p).
struct ShuntParams {
    double inductance = 0.0;
    double resistance = 0.0;
    double delta = 0.0;
    double zeta = 0.0;
};

/// Wraps explicit component values, deriving delta and zeta from the model.
ShuntParams make_shunt(const PiezoModel& model, double inductance, double resistance);

/// Largest coupling factor for which the equal-peak formulas stay real.
double max_tunable_kc();

/// Equal-peak optimal series RL tuning. Throws std::domain_error when the
/// coupling exceeds max_tunable_kc().
ShuntParams tune_series_rl(const PiezoModel& model);

/// First-order-in-K_c tuning: L = 1/(C_p omega_oc^2), R = sqrt(3/2) K_c/(omega_oc C_p).
ShuntParams tune_series_rl_linearized(const PiezoModel& model);

/// Y_s(s) = 1/(L s + R).
RationalTF shunt_admittance(const ShuntParams& shunt);

/// Dynamic capacitance returned as -q/V = C_p (s^2 + omega_oc^2)/(s^2 + omega_sc^2).
/// The charge-to-voltage ratio itself is the negative of this function.
RationalTF dynamic_capacitance(const PiezoModel& model);

/// Shunt in normalized units (omega_sc = 1, C_p = 1).
ShuntParams normalized_shunt(const PiezoModel& model, const ShuntParams& shunt);

/// Admittance in normalized units: Y(omega_sc s) / (C_p omega_sc).
RationalTF normalized_admittance(const PiezoModel& model, const RationalTF& admittance);

}  // namespace shuntlab
