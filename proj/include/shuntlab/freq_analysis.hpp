// Frequency-domain analysis of the shunted structure: open-loop function,
// margins, delay multipliers and the closed-loop compliance.
#pragma once

#include "shuntlab/model.hpp"

#include <string>
#include <vector>

namespace shuntlab {

/// Equivalent continuous model of a zero-order hold, (1 - e^{-tau s})/(tau s).
/// The removable singularity at s = 0 evaluates to 1, as does tau = 0.
Complex zoh_response(double tau, Complex s);

/// Z(x) = (1 - e^{-x})/x and its derivative, series-expanded near x = 0.
Complex zoh_shape(Complex x);
Complex zoh_shape_derivative(Complex x);

/// Loop delay representation. `None` behaves like either variant at tau = 0.
class DelayModel {
public:
    enum class Kind { None, PureDelay, Zoh };

    static DelayModel none() { return DelayModel(Kind::None, 0.0); }
    /// Pure delay of tau/2, the low-frequency equivalent of a ZOH with period tau.
    static DelayModel pure_delay(double tau) { return DelayModel(Kind::PureDelay, tau); }
    static DelayModel zoh(double tau) { return DelayModel(Kind::Zoh, tau); }

    Kind kind() const { return kind_; }
    double tau() const { return tau_; }

    /// Factor applied to the admittance at Laplace variable s.
    Complex multiplier(Complex s) const;
    Complex multiplier_ds(Complex s) const;
    Complex multiplier_dtau(Complex s) const;

    std::string name() const;

private:
    DelayModel(Kind kind, double tau);

    Kind kind_;
    double tau_;
};

/// H(s) = (1/C_p) (s^2 + omega_sc^2)/(s^2 + omega_oc^2) * Y(s)/s.
RationalTF open_loop_tf(const PiezoModel& model, const RationalTF& admittance);
RationalTF open_loop_tf(const PiezoModel& model, const ShuntParams& shunt);

struct MarginOptions {
    double band_low = 0.01;   // multiples of omega_ref
    double band_high = 100.0;
    std::size_t points = 10000;
    double rel_tol = 1e-10;
};

struct MarginReport {
    std::vector<double> gain_crossovers;  // rad/s, ascending
    std::vector<double> crossover_phase_deg;
    double phase_margin_deg = 0.0;        // at the highest crossover
    bool gain_margin_infinite = true;
    double gain_margin_db = 0.0;          // meaningful only when finite
    double phase_crossover = 0.0;         // rad/s, when finite
};

/// Gain crossovers |H(j omega)| = 1 found by log-grid bracketing and
/// bisection in log frequency. Phases come from unwrapped_phase_deg. Throws
/// NumericalError when no crossover lies in the band.
MarginReport stability_margins(const RationalTF& open_loop, double omega_ref, const MarginOptions& opts = {});

/// Continuous open-loop phase in degrees, summed over the roots of H. Zeros and
/// poles on the imaginary axis are passed on their right, giving +180 and -180
/// degree steps.
std::vector<double> unwrapped_phase_deg(const RationalTF& open_loop, const std::vector<double>& omega);

/// Y(j omega) e^{-j omega tau / 2}.
Complex delayed_admittance(const RationalTF& admittance, double tau, double omega);

/// Delay at which the linearly tuned shunt admittance loses passivity at omega_oc.
double passivity_loss_delay(const PiezoModel& model);

struct FrfCurve {
    std::vector<double> omega;   // omega / omega_sc, ascending
    std::vector<Complex> value;  // x k_sc / f
    double omega_ref = 1.0;      // omega_sc used for the frequency axis, rad/s
    double stiffness_ref = 1.0;  // k_sc used for the amplitude axis, N/m
    std::vector<std::string> warnings;
};

/// Normalized compliance x k_sc / f at physical frequency omega, from
/// eliminating q and V between m x'' + k_oc x - theta_p q = f,
/// V = theta_p x - q / C_p and s q = Y_eff V:
///   x k_sc / f = omega_sc^2 / (s^2 + omega_oc^2 - ((omega_oc^2 - omega_sc^2)/C_p) Y_eff/(s + Y_eff/C_p))
/// with Y_eff = Y(s) * delay multiplier.
Complex closed_loop_compliance(const PiezoModel& model, const RationalTF& admittance, const DelayModel& delay,
                               double omega);

/// Closed-loop FRF over a grid of omega/omega_sc values. With a ZOH delay,
/// grid points at or beyond pi/tau are kept and flagged in `warnings`.
FrfCurve closed_loop_frf(const PiezoModel& model, const RationalTF& admittance, const DelayModel& delay,
                         const std::vector<double>& omega_norm);

struct Peak {
    double omega;      // same units as the curve grid
    double amplitude;
};

/// Local maxima of |value|, refined by a parabola through the three grid
/// points around each discrete maximum.
std::vector<Peak> find_peaks(const std::vector<double>& omega, const std::vector<double>& magnitude);
std::vector<Peak> find_peaks(const FrfCurve& curve);

std::vector<double> linspace(double lo, double hi, std::size_t n);
/// Geometric grid; the end points are returned exactly.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// 2000 points over [0.9, 1.15] omega_sc.
std::vector<double> default_resonant_grid();

}  // namespace shuntlab
