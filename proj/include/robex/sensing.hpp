#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robex/boundary.hpp"
#include "robex/spectral.hpp"

namespace robex {

/// The four supported output functionals: evaluation at an interior or
/// boundary point, and uniform averaging over an interior box or an edge
/// segment. Each sensor contributes one output channel.
enum class SensorKind { InteriorPointwise, InteriorZone, BoundaryPointwise, BoundaryZone };

enum class WeightProfile { Uniform };

struct SensorSpec {
    SensorKind kind = SensorKind::InteriorPointwise;

    Point location{0.0, 0.0};  // pointwise kinds

    Point zone_lo{0.0, 0.0};   // InteriorZone box corners
    Point zone_hi{0.0, 0.0};

    Edge edge = Edge::Left;    // BoundaryZone segment
    double edge_lo = 0.0;
    double edge_hi = 0.0;

    WeightProfile profile = WeightProfile::Uniform;

    /// Throws std::invalid_argument when the geometry does not fit the domain
    /// (location outside the closure, boundary point off the boundary, zone of
    /// zero measure; edge segments need a 2-D domain).
    void validate(const DomainSpec& domain) const;
};

/// One row of the output map in coefficient space: entry k is the sensor
/// applied to eigenfunction k. Pointwise rows evaluate; zone rows use the
/// closed-form average of the cosine modes over the support.
Eigen::VectorXd sensor_row(const SensorSpec& sensor, const SpectralBasis& basis);

/// Stacked rows, one per sensor (q x mode_count).
Eigen::MatrixXd sensor_matrix(const std::vector<SensorSpec>& sensors, const SpectralBasis& basis);

/// Sampled outputs y(t_j) on the uniform grid t_j = j * horizon / steps,
/// j = 0..steps; one column per sensor.
struct OutputTrajectory {
    double horizon = 0.0;
    Eigen::MatrixXd samples;  // (steps + 1) x q

    int sensor_count() const { return static_cast<int>(samples.cols()); }
    int steps() const { return static_cast<int>(samples.rows()) - 1; }
    double dt() const { return horizon / steps(); }
    double time(int j) const { return horizon * j / steps(); }
};

/// y(t_j) = C S(t_j) z0, sampled exactly per mode (no time-stepping error).
OutputTrajectory measure_trajectory(const StateField& z0, const std::vector<SensorSpec>& sensors,
                                    double horizon, int steps);

/// Outputs sampled from an already-computed coefficient trajectory
/// (states row j = coefficients at t_j).
OutputTrajectory sample_outputs(const Eigen::MatrixXd& states, double horizon,
                                const std::vector<SensorSpec>& sensors, const SpectralBasis& basis);

/// Horizontal concatenation; the trajectories must share the time grid.
OutputTrajectory stack_sensors(const std::vector<OutputTrajectory>& trajectories);

/// Trapezoid weights of the time grid (dt/2 at the ends, dt inside).
std::vector<double> time_weights(const OutputTrajectory& trajectory);

/// Inner product of the sampled-output space: time-trapezoid of the R^q dot
/// product. This is the pairing the adjoint of the observation map is exact
/// against.
double trajectory_inner(const OutputTrajectory& a, const OutputTrajectory& b);
double trajectory_norm(const OutputTrajectory& a);

}  // namespace robex
