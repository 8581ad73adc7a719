#include "robex/sensing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "robex/kernels.hpp"

namespace robex {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGeomTol = 1e-9;

bool on_segment(double x, double lo, double hi) { return x >= lo - kGeomTol && x <= hi + kGeomTol; }

/// Average of the normalized axis mode over [a, b]:
/// (1/(b-a)) int_a^b c_n cos(n pi x / L) dx, closed form.
double axis_average(double length, int n, double a, double b) {
    if (n == 0) return std::sqrt(1.0 / length);
    const double c = std::sqrt(2.0 / length);
    const double k = static_cast<double>(n) * kPi / length;
    return c * (std::sin(k * b) - std::sin(k * a)) / (k * (b - a));
}

double axis_value(double length, int n, double x) {
    const double c = n == 0 ? std::sqrt(1.0 / length) : std::sqrt(2.0 / length);
    return c * (n == 0 ? 1.0 : std::cos(static_cast<double>(n) * kPi * x / length));
}

}  // namespace

void SensorSpec::validate(const DomainSpec& domain) const {
    domain.validate();
    const bool two_d = domain.kind == DomainKind::Rectangle;
    switch (kind) {
        case SensorKind::InteriorPointwise: {
            if (!on_segment(location[0], 0.0, domain.lengths[0]) ||
                (two_d && !on_segment(location[1], 0.0, domain.lengths[1]))) {
                throw std::invalid_argument("sensor.location: outside the domain closure");
            }
            return;
        }
        case SensorKind::BoundaryPointwise: {
            if (!two_d) {
                const bool at_end = std::abs(location[0]) <= kGeomTol ||
                                    std::abs(location[0] - domain.lengths[0]) <= kGeomTol;
                if (!at_end) {
                    throw std::invalid_argument("sensor.location: not a boundary point");
                }
                return;
            }
            if (!on_segment(location[0], 0.0, domain.lengths[0]) ||
                !on_segment(location[1], 0.0, domain.lengths[1])) {
                throw std::invalid_argument("sensor.location: outside the domain closure");
            }
            const bool on_edge = std::abs(location[0]) <= kGeomTol ||
                                 std::abs(location[0] - domain.lengths[0]) <= kGeomTol ||
                                 std::abs(location[1]) <= kGeomTol ||
                                 std::abs(location[1] - domain.lengths[1]) <= kGeomTol;
            if (!on_edge) throw std::invalid_argument("sensor.location: not a boundary point");
            return;
        }
        case SensorKind::InteriorZone: {
            for (int axis = 0; axis < (two_d ? 2 : 1); ++axis) {
                if (!(zone_lo[axis] < zone_hi[axis])) {
                    throw std::invalid_argument("sensor.zone: support must have positive measure");
                }
                if (!on_segment(zone_lo[axis], 0.0, domain.lengths[axis]) ||
                    !on_segment(zone_hi[axis], 0.0, domain.lengths[axis])) {
                    throw std::invalid_argument("sensor.zone: support outside the domain");
                }
            }
            return;
        }
        case SensorKind::BoundaryZone: {
            if (!two_d) {
                throw std::invalid_argument(
                    "sensor.edge: boundary zones need a 2-D domain (interval boundaries are "
                    "points, which have zero measure)");
            }
            const double len =
                (edge == Edge::Left || edge == Edge::Right) ? domain.lengths[1] : domain.lengths[0];
            if (!(edge_lo < edge_hi)) {
                throw std::invalid_argument("sensor.edge: support must have positive measure");
            }
            if (!on_segment(edge_lo, 0.0, len) || !on_segment(edge_hi, 0.0, len)) {
                throw std::invalid_argument("sensor.edge: support outside the edge");
            }
            return;
        }
    }
    throw std::invalid_argument("sensor.kind: unknown kind");
}

Eigen::VectorXd sensor_row(const SensorSpec& sensor, const SpectralBasis& basis) {
    sensor.validate(basis.domain);
    const DomainSpec& domain = basis.domain;
    const bool two_d = domain.kind == DomainKind::Rectangle;
    Eigen::VectorXd row(basis.mode_count());

    for (int k = 0; k < basis.mode_count(); ++k) {
        const auto& idx = basis.mode_indices[static_cast<std::size_t>(k)];
        double value = 0.0;
        switch (sensor.kind) {
            case SensorKind::InteriorPointwise:
            case SensorKind::BoundaryPointwise:
                value = basis.eigenfunction(k, sensor.location);
                break;
            case SensorKind::InteriorZone:
                value = axis_average(domain.lengths[0], idx[0], sensor.zone_lo[0],
                                     sensor.zone_hi[0]);
                if (two_d) {
                    value *= axis_average(domain.lengths[1], idx[1], sensor.zone_lo[1],
                                          sensor.zone_hi[1]);
                }
                break;
            case SensorKind::BoundaryZone: {
                switch (sensor.edge) {
                    case Edge::Left:
                        value = axis_value(domain.lengths[0], idx[0], 0.0) *
                                axis_average(domain.lengths[1], idx[1], sensor.edge_lo,
                                             sensor.edge_hi);
                        break;
                    case Edge::Right:
                        value = axis_value(domain.lengths[0], idx[0], domain.lengths[0]) *
                                axis_average(domain.lengths[1], idx[1], sensor.edge_lo,
                                             sensor.edge_hi);
                        break;
                    case Edge::Bottom:
                        value = axis_average(domain.lengths[0], idx[0], sensor.edge_lo,
                                             sensor.edge_hi) *
                                axis_value(domain.lengths[1], idx[1], 0.0);
                        break;
                    case Edge::Top:
                        value = axis_average(domain.lengths[0], idx[0], sensor.edge_lo,
                                             sensor.edge_hi) *
                                axis_value(domain.lengths[1], idx[1], domain.lengths[1]);
                        break;
                }
                break;
            }
        }
        row[k] = value;
    }
    return row;
}

Eigen::MatrixXd sensor_matrix(const std::vector<SensorSpec>& sensors, const SpectralBasis& basis) {
    if (sensors.empty()) throw std::invalid_argument("sensors: list must not be empty");
    Eigen::MatrixXd C(static_cast<Eigen::Index>(sensors.size()), basis.mode_count());
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        C.row(static_cast<Eigen::Index>(i)) = sensor_row(sensors[i], basis).transpose();
    }
    return C;
}

OutputTrajectory measure_trajectory(const StateField& z0, const std::vector<SensorSpec>& sensors,
                                    double horizon, int steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon: must be positive");
    if (steps < 1) throw std::invalid_argument("time steps: must be at least 1");
    const SpectralBasis& basis = *z0.basis;
    const Eigen::MatrixXd C = sensor_matrix(sensors, basis);

    const std::size_t q = sensors.size();
    const std::size_t n = z0.coefficients.size();
    // Row-major copy of C for the kernel mat-vec in the sampling loop.
    std::vector<double> rows(q * n);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            rows[i * n + k] = C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }

    OutputTrajectory out;
    out.horizon = horizon;
    out.samples.resize(steps + 1, static_cast<Eigen::Index>(q));
    std::vector<double> decayed(n);
    std::vector<double> y(q);
    for (int j = 0; j <= steps; ++j) {
        const double t = horizon * j / steps;
        for (std::size_t k = 0; k < n; ++k) {
            decayed[k] = z0.coefficients[k] * std::exp(basis.eigenvalues[k] * t);
        }
        kernels::matvec(rows.data(), q, n, decayed.data(), y.data());
        for (std::size_t i = 0; i < q; ++i) {
            out.samples(j, static_cast<Eigen::Index>(i)) = y[i];
        }
    }
    return out;
}

OutputTrajectory sample_outputs(const Eigen::MatrixXd& states, double horizon,
                                const std::vector<SensorSpec>& sensors,
                                const SpectralBasis& basis) {
    if (states.rows() < 2) throw std::invalid_argument("trajectory: needs at least two samples");
    if (states.cols() != basis.mode_count()) {
        throw std::invalid_argument("trajectory: column count does not match basis");
    }
    const Eigen::MatrixXd C = sensor_matrix(sensors, basis);
    OutputTrajectory out;
    out.horizon = horizon;
    out.samples = states * C.transpose();
    return out;
}

OutputTrajectory stack_sensors(const std::vector<OutputTrajectory>& trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("stack: list must not be empty");
    const OutputTrajectory& first = trajectories.front();
    Eigen::Index q = 0;
    for (const OutputTrajectory& t : trajectories) {
        if (t.samples.rows() != first.samples.rows() ||
            std::abs(t.horizon - first.horizon) > 1e-12 * std::max(1.0, first.horizon)) {
            throw std::invalid_argument("stack: trajectories use different time grids");
        }
        q += t.samples.cols();
    }
    OutputTrajectory out;
    out.horizon = first.horizon;
    out.samples.resize(first.samples.rows(), q);
    Eigen::Index col = 0;
    for (const OutputTrajectory& t : trajectories) {
        out.samples.middleCols(col, t.samples.cols()) = t.samples;
        col += t.samples.cols();
    }
    return out;
}

std::vector<double> time_weights(const OutputTrajectory& trajectory) {
    const int m = trajectory.steps();
    if (m < 1) throw std::invalid_argument("trajectory: needs at least two samples");
    const double dt = trajectory.dt();
    std::vector<double> w(static_cast<std::size_t>(m) + 1, dt);
    w.front() = dt / 2;
    w.back() = dt / 2;
    return w;
}

double trajectory_inner(const OutputTrajectory& a, const OutputTrajectory& b) {
    if (a.samples.rows() != b.samples.rows() || a.samples.cols() != b.samples.cols() ||
        std::abs(a.horizon - b.horizon) > 1e-12 * std::max(1.0, a.horizon)) {
        throw std::invalid_argument("trajectory inner product: mismatched grids");
    }
    const std::vector<double> w = time_weights(a);
    double acc = 0.0;
    // Columns are contiguous, so reduce channel by channel.
    for (Eigen::Index i = 0; i < a.samples.cols(); ++i) {
        acc += kernels::weighted_dot(w.data(), a.samples.col(i).data(), b.samples.col(i).data(),
                                     w.size());
    }
    return acc;
}

double trajectory_norm(const OutputTrajectory& a) { return std::sqrt(trajectory_inner(a, a)); }

}  // namespace robex
