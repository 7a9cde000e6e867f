// Sampled-data time simulation: continuous plant, sampler, Tustin-discretized
// admittance and zero-order-hold current injection.
#pragma once

#include "shuntlab/model.hpp"

#include <vector>

namespace shuntlab {

/// Discrete transfer function in descending powers of z, normalized so that
/// den_z[0] == 1, with the input/output history of its difference equation.
class DiscreteTF {
public:
    DiscreteTF(Coeffs num_z, Coeffs den_z, double tau);

    const Coeffs& num_z() const { return num_z_; }
    const Coeffs& den_z() const { return den_z_; }
    double tau() const { return tau_; }
    std::size_t order() const { return den_z_.size() - 1; }

    /// One recurrence update: y[k] = sum b_i u[k-i] - sum_{i>=1} a_i y[k-i].
    double step(double input);
    void reset();

    Complex operator()(Complex z) const;

private:
    Coeffs num_z_;
    Coeffs den_z_;
    double tau_;
    std::vector<double> u_hist_;  // u[k-1], u[k-2], ...
    std::vector<double> y_hist_;
};

/// Bilinear substitution s = (2/tau)(z - 1)/(z + 1). Throws
/// std::invalid_argument for an improper Y or tau <= 0, and NumericalError
/// when the mapped leading denominator coefficient vanishes.
DiscreteTF tustin_discretize(const RationalTF& admittance, double tau);

struct SweepConfig {
    enum class Law { Linear, Logarithmic };

    double f_start = 0.0;   // Hz
    double f_end = 0.0;     // Hz
    double duration = 0.0;  // s
    double amplitude = 1.0; // N
    Law law = Law::Linear;

    void validate() const;
    double frequency_at(double t) const;
    double phase_at(double t) const;
    double force_at(double t) const;
};

/// Linear sweep over [0.9, 1.15] omega_sc / (2 pi) lasting 600 periods of
/// omega_sc, unit amplitude.
SweepConfig default_sweep(const PiezoModel& model);

struct SimOptions {
    int substeps = 32;                // RK4 sub-intervals per sampling period
    double divergence_factor = 1e3;   // |x| beyond this multiple of the reference flags divergence
    double reference_lag_periods = 20.0;
    double tail_periods = -1.0;       // free response after the sweep, periods of omega_sc; < 0 picks max(200, 20 / K_c)
    double x0 = 0.0;                  // initial displacement, m
    double v0 = 0.0;                  // initial velocity, m/s
    double q0 = 0.0;                  // initial charge, C
};

struct EnvelopePoint {
    double omega_norm;  // instantaneous sweep frequency / omega_sc
    double amplitude;   // |x| k_sc / force amplitude
};

struct PlantState {
    double t = 0.0;
    double x = 0.0;  // m
    double v = 0.0;  // m/s
    double q = 0.0;  // C
};

struct SimResult {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> v_piezo;   // last sampled voltage
    std::vector<double> i_inject;  // held current
    std::vector<EnvelopePoint> envelope;
    bool stable = true;
    bool diverged = false;         // divergence threshold hit or non-finite state; arrays truncated there
    PlantState final_state;        // last integrated state, recorded or not
    double tail_growth_ratio = 0.0;  // RMS of the last tail quarter over the preceding quarter
    double sweep_end = 0.0;        // s
    double omega_ref = 1.0;        // omega_sc, rad/s
    double stiffness_ref = 1.0;    // k_sc, N/m
};

/// Integrates m x'' + k_oc x - theta_p q = f(t), q' = i (held), sampling
/// V = theta_p x - q / C_p every tau and updating the controller with zero
/// latency. After the sweep the forcing stops and a free tail is simulated;
/// `stable` is false when the response diverges or the tail RMS grows.
/// The envelope is filled by extract_envelope when the run is not truncated
/// early enough to leave fewer than 3 maxima.
SimResult simulate_swept_sine(const PiezoModel& model, DiscreteTF ctrl, double tau, const SweepConfig& sweep,
                              const SimOptions& opts = {});

/// Local maxima of |x| during the sweep mapped to the instantaneous sweep
/// frequency, amplitude normalized by force amplitude and k_sc. Throws
/// std::invalid_argument with fewer than 3 maxima.
std::vector<EnvelopePoint> extract_envelope(const SimResult& sim, const SweepConfig& sweep);

}  // namespace shuntlab
