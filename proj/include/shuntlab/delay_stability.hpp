// Poles of the delayed closed loop 1 + H(s) M(s; tau) = 0, where M is the
// pure-delay or ZOH multiplier, and the delays at which they reach the
// imaginary axis.
#pragma once

#include "shuntlab/freq_analysis.hpp"

#include <optional>
#include <vector>

namespace shuntlab {

struct NewtonOptions {
    double tol = 1e-12;   // on |D(s) + N(s) M(s)| in normalized units
    int max_iter = 40;
};

/// Characteristic function of the delayed loop in normalized units
/// (s / omega_sc, tau * omega_sc), written pole-free as D(s) + N(s) M(s; tau)
/// with H = N/D.
class DelayedCharacteristic {
public:
    DelayedCharacteristic(const PiezoModel& model, const RationalTF& admittance);

    double omega_ref() const { return omega_ref_; }
    const RationalTF& open_loop() const { return open_loop_; }

    Complex value(Complex s, const DelayModel& delay) const;
    Complex ds(Complex s, const DelayModel& delay) const;
    Complex dtau(Complex s, const DelayModel& delay) const;

    /// |1 + H(s) M(s)|, the dimensionless residual.
    double relative_residual(Complex s, const DelayModel& delay) const;

    /// Damped Newton from `seed`; nullopt when it does not converge.
    std::optional<Complex> solve(Complex seed, const DelayModel& delay, const NewtonOptions& opts = {}) const;

    /// Roots of D + N (the delay-free closed loop), sorted by imaginary part.
    std::vector<Complex> nominal_roots() const;

private:
    double omega_ref_;
    RationalTF open_loop_;
    Coeffs dnum_;
    Coeffs dden_;
};

/// Roots of 1 + H(s) = 0 in rad/s, sorted by imaginary part.
std::vector<Complex> closed_loop_poles(const PiezoModel& model, const RationalTF& admittance);
std::vector<Complex> nominal_poles(const PiezoModel& model, const ShuntParams& shunt);

struct RootLocusOptions {
    NewtonOptions newton{};
    int max_halvings = 8;
};

struct LocusCrossing {
    double tau;    // s
    double omega;  // rad/s, positive imaginary part of the crossing pole
};

struct RootLocus {
    std::vector<double> taus;                 // s, ascending, taus[0] = 0
    std::vector<std::vector<Complex>> poles;  // rad/s, one entry per tau, fixed branch order
    std::optional<LocusCrossing> crossing;    // first sign change of the largest real part
};

/// Continues the delay-free poles in tau by tangent prediction and damped
/// Newton correction, halving the step when Newton fails or a branch would
/// jump onto a neighbour. Output is sampled every `dtau` up to `tau_max`.
/// Only the branches seeded at tau = 0 are tracked. Throws NumericalError
/// naming the branch and tau when a branch is lost.
RootLocus root_locus(const PiezoModel& model, const RationalTF& admittance, DelayModel::Kind variant, double tau_max,
                     double dtau, const RootLocusOptions& opts = {});
RootLocus root_locus(const PiezoModel& model, const ShuntParams& shunt, DelayModel::Kind variant, double tau_max,
                     double dtau, const RootLocusOptions& opts = {});

enum class CriticalDelayMethod { ZohNumeric, PureDelayNumeric, Series };

struct CriticalDelayResult {
    double omega_c = 0.0;  // rad/s
    double tau_c = 0.0;    // s
    int branch_k = 0;
    CriticalDelayMethod method = CriticalDelayMethod::Series;
    bool finite = true;    // false: no imaginary-axis crossing exists
};

const char* to_string(CriticalDelayMethod method);

/// Smallest delay with an imaginary-axis root. The pure-delay route solves
/// |N(j w)|^2 = |D(j w)|^2 as a polynomial in w^2 and takes, per real positive
/// root, the smallest positive tau = (2/w)(arg(-H(j w)) + 2 k pi), k = 0..4.
/// The ZOH route refines every pure-delay candidate with Newton on the exact
/// ZOH equation in the unknowns (w, tau).
CriticalDelayResult critical_delay_numeric(const PiezoModel& model, const RationalTF& admittance,
                                           DelayModel::Kind variant);
CriticalDelayResult critical_delay_numeric(const PiezoModel& model, const ShuntParams& shunt,
                                           DelayModel::Kind variant);

/// Third-order series in K_c for the optimally tuned series RL shunt.
CriticalDelayResult critical_delay_series(double kc, double omega_sc);

/// Sampling-period bound: one tenth of the series critical delay capped by the
/// 30-samples-per-period rule, or the cap alone for a modified admittance.
double max_sampling_period(double kc, double omega_sc, bool modified);

}  // namespace shuntlab
