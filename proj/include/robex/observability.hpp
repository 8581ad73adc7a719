#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robex/boundary.hpp"
#include "robex/sensing.hpp"
#include "robex/spectral.hpp"

namespace robex {

/// The observation setup: which sensors watch the system, over which horizon,
/// and which boundary region the initial-state trace should be recovered on.
struct ObservabilityProblem {
    BasisPtr basis;
    std::vector<SensorSpec> sensors;
    RegionPtr region;
    double horizon = 1.0;
    int time_steps = 200;

    /// Throws std::invalid_argument on empty sensors, non-positive horizon or
    /// steps, or region/basis domain mismatch.
    void validate() const;
};

/// Gramian diagnostics plus the observability verdict. `gramian` carries the
/// closed-form time integrals; `restricted_map` is the matrix of mode traces
/// at the region nodes. The verdict asks whether every direction of the
/// region trace is recoverable from output data: the smallest eigenvalue of
/// the trace-side normal operator (restricted_map * pinv(gramian) *
/// restricted_map^T, restricted to the range of restricted_map) must exceed
/// the threshold.
struct GramianReport {
    Eigen::MatrixXd gramian;
    Eigen::MatrixXd restricted_map;
    Eigen::VectorXd gramian_eigenvalues;               // non-increasing
    Eigen::VectorXd recoverability_singular_values;    // non-increasing
    bool observable = false;
    double threshold = 0.0;

    double sigma_min() const {
        return recoverability_singular_values.size() == 0
                   ? 0.0
                   : recoverability_singular_values[recoverability_singular_values.size() - 1];
    }
};

/// The observation map K: initial state -> sampled output trajectory.
/// Identical to measure_trajectory; exposed under the operator name so the
/// adjoint pair can be tested side by side.
OutputTrajectory forward_K(const ObservabilityProblem& problem, const StateField& z);

/// Discrete adjoint of forward_K with respect to the trajectory inner product
/// (time trapezoid) and the plain coefficient inner product: coefficient k of
/// the result is sum_j tau_j exp(lambda_k t_j) (C^T y_j)_k.
StateField adjoint_Kstar(const ObservabilityProblem& problem, const OutputTrajectory& y);

/// Gramian K*K with closed-form time integrals: entry (a, b) is
/// (C^T C)_{ab} * (exp((lambda_a + lambda_b) T) - 1) / (lambda_a + lambda_b).
Eigen::MatrixXd analytic_gramian(const ObservabilityProblem& problem);

/// Gramian of the sampled operator pair: the same sensor outer products with
/// the time integral replaced by the trapezoid sum over the problem's grid.
/// This is exactly K* composed with K on the sampling grid, which is what
/// least-squares reconstruction from sampled data must use: with the analytic
/// integrals instead, the normal equations would be inconsistent with the
/// sampled right-hand side by the quadrature error.
Eigen::MatrixXd discrete_gramian(const ObservabilityProblem& problem);

/// Full report; threshold applies to the recoverability eigenvalues.
GramianReport boundary_gramian(const ObservabilityProblem& problem, double threshold = 1e-8);

/// Verdict-only convenience wrapper around boundary_gramian.
bool is_gamma_observable(const ObservabilityProblem& problem, double threshold = 1e-8);

/// The region-trace map composed with the orthogonal projection onto the
/// Gramian's range: its singular values measure how much of the trace space
/// the sensors reach, and they can only grow when sensors are added.
Eigen::MatrixXd recoverable_trace_map(const GramianReport& report);

/// Spectrum verdict for the gain-corrected generator diag(lambda) - H C.
struct DetectabilityReport {
    bool detectable = false;
    double spectral_abscissa = 0.0;  // largest eigenvalue real part
    double decay_rate = 0.0;         // -abscissa; positive iff detectable
};

/// Detectability of the truncated error dynamics: all eigenvalues of
/// diag(lambda) - gain_columns * C must have strictly negative real part.
/// gain_columns maps output channels into coefficient space (one column per
/// sensor).
DetectabilityReport is_gamma_detectable(const SpectralBasis& basis,
                                        const std::vector<SensorSpec>& sensors,
                                        const Eigen::MatrixXd& gain_columns,
                                        const BoundaryRegion& region);

}  // namespace robex
