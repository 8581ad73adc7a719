#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "robex/boundary.hpp"
#include "robex/observability.hpp"
#include "robex/sensing.hpp"
#include "robex/spectral.hpp"

namespace robex {

/// Initial-state reconstruction setup: the observation configuration, the
/// measured data, a ridge parameter, and the nested regions the observation
/// error is compared across.
struct ReconstructionProblem {
    ObservabilityProblem observability;
    OutputTrajectory measured;
    double regularization = 1e-10;  // epsilon in the normal equations
    std::vector<RegionPtr> regions; // nested: regions[i] inside regions[i+1]

    /// Throws std::invalid_argument on grid mismatch, negative epsilon, or a
    /// region list that is not nested in order.
    void validate() const;
};

/// Ridge least squares over the coefficient space:
///   minimize ||K z0 - y||^2 + epsilon ||z0||^2,
/// solved through the normal equations (G + epsilon I) z0 = K* y with the
/// grid-consistent Gramian (discrete_gramian), so exact sampled data is
/// reproduced up to conditioning. Throws std::runtime_error when epsilon = 0
/// and the Gramian is numerically singular, advising a positive epsilon or
/// fewer modes.
StateField reconstruct_initial_state(const ReconstructionProblem& problem);

/// Squared region-restricted trace norm of the reconstruction gap:
/// sum_i w_i (gap trace at node i)^2.
double observation_error(const StateField& z0_true, const StateField& z0_rec,
                         const BoundaryRegion& region);

/// Whole-domain counterpart: squared coefficient norm weighted by
/// (1 + |lambda_k|), the smoothness-weighted state norm.
double observation_error_domain(const StateField& z0_true, const StateField& z0_rec);

struct RegionError {
    int index = 0;    // position in the problem's nest
    double value = 0.0;
};

/// Reconstruction plus its error diagnostics: output-space misfit, the error
/// on every region of the nest, and the error on the problem's own region
/// (the minimized quantity).
struct ErrorReport {
    StateField reconstructed;
    double residual = 0.0;         // || K z~ - y || in the trajectory norm
    std::vector<RegionError> per_region_errors;
    double minimizer_value = 0.0;  // error on observability.region
    double domain_error = 0.0;     // whole-domain error of the same gap
};

ErrorReport evaluate_reconstruction(const ReconstructionProblem& problem,
                                    const StateField& z0_true);

/// Which recoverable-state family a subspace describes: recoverable in the
/// domain norm, or recoverable up to the region trace.
enum class ObservableLabel { GammaE, OmegaE };

struct ObservableSet {
    ObservableLabel label = ObservableLabel::OmegaE;
    RegionPtr region;  // null for the domain-level set
    std::vector<SensorSpec> sensors;
    Eigen::MatrixXd subspace;  // orthonormal columns in coefficient space
    double threshold = 0.0;
};

/// OmegaE: span of Gramian eigenvectors with eigenvalue above the threshold
/// (directions the output determines in the domain norm). GammaE: the same
/// span plus the Gramian-kernel directions whose region trace vanishes (their
/// trace is determined trivially). By construction the OmegaE subspace is
/// contained in the GammaE one.
ObservableSet build_observable_set(const ObservabilityProblem& problem, ObservableLabel label,
                                   double threshold);

struct MonotonicityTrial {
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<double> region_errors;  // nest order
    double domain_error = 0.0;
    double residual = 0.0;
    bool chain_ok = false;       // errors non-decreasing along the nest
    bool comparison_ok = false;  // every region error <= domain error
};

struct MonotonicityReport {
    std::vector<MonotonicityTrial> trials;
    int chain_failures = 0;
    int comparison_failures = 0;
    double slack = 0.0;
};

/// Seeded trials: draw z0, measure through the problem's sensors, reconstruct
/// once, evaluate the error on every region of the nest and on the whole
/// domain; check the nesting chain (absolute slack 1e-12) and the
/// region-vs-domain comparison per trial.
MonotonicityReport monotonicity_experiment(const ReconstructionProblem& problem, int trials,
                                           std::uint64_t seed);

struct SweepEntry {
    Point location{0.0, 0.0};
    double error = 0.0;     // region error of the reconstruction for this sensor
    double residual = 0.0;  // output misfit
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::vector<double> adjacent_differences;  // |error[i+1] - error[i]|
};

/// Error as a function of a single pointwise sensor's location: for each
/// candidate location, re-measure the given true state through a sensor
/// there, reconstruct, and evaluate the region error. Differences between
/// adjacent entries probe the continuity of the location-to-error map.
SweepReport sensor_sweep(const ReconstructionProblem& problem, const StateField& z0_true,
                         const std::vector<Point>& locations);

}  // namespace robex
