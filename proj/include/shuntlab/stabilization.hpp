// Admittance modification anticipating the sampling delay: coefficient
// factors chosen so the ZOH-delayed loop keeps the delay-free poles.
#pragma once

#include "shuntlab/delay_stability.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace shuntlab {

/// Linear conditions on the factors (delta_b0..delta_bM, delta_a0..delta_aN).
///
/// Row k of the complex system reads
///   Z_k sum_m b_m delta_bm p_k^m / sum_m b_m p_k^m - sum_n a_n delta_an p_k^n / sum_n a_n p_k^n = 1 - Z_k
/// with Z_k the ZOH multiplier at pole p_k. The real system stacks the real
/// parts of all rows above their imaginary parts.
struct ModificationSystem {
    Eigen::MatrixXcd p_complex;
    Eigen::VectorXcd d_complex;
    Eigen::MatrixXd p_real;  // 2K x (M + N + 2)
    Eigen::VectorXd d_real;
    std::size_t num_b = 0;   // M + 1
    std::size_t num_a = 0;   // N + 1
};

/// Column index into the stacked factor vector; numerator columns come first.
struct PinnedFactor {
    enum class Side { Numerator, Denominator };
    Side side = Side::Numerator;
    std::size_t index = 0;

    std::size_t column(std::size_t num_b) const { return side == Side::Numerator ? index : num_b + index; }
    std::string name() const { return (side == Side::Numerator ? "b" : "a") + std::to_string(index); }
};

ModificationSystem build_modification_system(const RationalTF& admittance, std::span<const Complex> poles, double tau);

struct ModificationFactors {
    std::vector<double> delta_b;
    std::vector<double> delta_a;
    PinnedFactor pinned;
    double residual_norm = 0.0;
    bool rank_deficient = false;
    /// Flattened indices of factors <= -1 on nonzero coefficients (the
    /// coefficient vanishes or changes sign).
    std::vector<std::size_t> sign_flips;
};

/// Minimum-norm least-squares solution with the pinned column removed
/// (pinned factor fixed at 0). Columns are scaled to unit norm before the
/// complete orthogonal decomposition.
ModificationFactors solve_modification(const ModificationSystem& system, PinnedFactor pinned = {});

/// Same unknowns solved on the complex rows directly; the imaginary part of
/// the result measures how far the complex route is from real factors.
Eigen::VectorXcd solve_modification_complex(const ModificationSystem& system, PinnedFactor pinned = {});

/// Coefficientwise b_m (1 + delta_bm), a_n (1 + delta_an).
RationalTF apply_modification(const RationalTF& admittance, const ModificationFactors& factors);

/// Factors mapping `original` onto `modified` (coefficientwise ratio - 1;
/// zero original coefficients give 0).
ModificationFactors extract_factors(const RationalTF& original, const RationalTF& modified);

/// Convenience: nominal poles of (model, admittance), system, solve, apply.
struct Stabilized {
    RationalTF admittance;
    ModificationFactors factors;
    std::vector<Complex> target_poles;
};
Stabilized stabilize(const PiezoModel& model, const RationalTF& admittance, double tau, PinnedFactor pinned = {});

struct PlacementCheck {
    std::vector<double> residuals;            // |1 + H_mod(p) Z(p)| at each target
    std::vector<Complex> delayed_poles;       // Newton roots seeded at the targets
    std::vector<double> displacements;        // |delayed - target| / |target|
    std::vector<bool> converged;
    bool all_stable = true;                   // every converged root has Re < 0
};

/// Evaluates the ZOH-delayed characteristic function of (model, modified
/// admittance) at the targets and re-solves the delayed poles from them.
PlacementCheck verify_pole_placement(const PiezoModel& model, const RationalTF& modified_admittance, double tau,
                                     std::span<const Complex> target_poles);

}  // namespace shuntlab
