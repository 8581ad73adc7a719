#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "robex/sensing.hpp"
#include "robex/spectral.hpp"

namespace {

robex::DomainSpec unit_interval(int grid = 64) {
    robex::DomainSpec d;
    d.kind = robex::DomainKind::Interval;
    d.lengths = {1.0};
    d.grid_resolution = grid;
    return d;
}

robex::DomainSpec unit_square(int grid = 64) {
    robex::DomainSpec d;
    d.kind = robex::DomainKind::Rectangle;
    d.lengths = {1.0, 1.0};
    d.grid_resolution = grid;
    return d;
}

robex::SensorSpec point_sensor(double x, double y = 0.0) {
    robex::SensorSpec s;
    s.kind = robex::SensorKind::InteriorPointwise;
    s.location = {x, y};
    return s;
}

}  // namespace

TEST_CASE("pointwise rows evaluate the eigenfunctions") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 6);
    const robex::SensorSpec s = point_sensor(0.37);
    const Eigen::VectorXd row = robex::sensor_row(s, *basis);
    REQUIRE(row.size() == 6);
    for (int k = 0; k < 6; ++k) {
        CHECK(row[k] == doctest::Approx(basis->eigenfunction(k, {0.37, 0.0})).epsilon(1e-14));
    }
}

TEST_CASE("zone averages use the closed-form cosine integrals") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 6);

    robex::SensorSpec zone;
    zone.kind = robex::SensorKind::InteriorZone;
    zone.zone_lo = {0.2, 0.0};
    zone.zone_hi = {0.7, 0.0};
    const Eigen::VectorXd row = robex::sensor_row(zone, *basis);

    // Oracle: average the mode over the zone with a fine midpoint rule.
    const int fine = 200000;
    for (int k = 0; k < 6; ++k) {
        double acc = 0.0;
        for (int i = 0; i < fine; ++i) {
            const double x = 0.2 + (0.7 - 0.2) * (i + 0.5) / fine;
            acc += basis->eigenfunction(k, {x, 0.0});
        }
        CHECK(row[k] == doctest::Approx(acc / fine).epsilon(1e-9));
    }

    // Averaging over the whole domain annihilates every oscillating mode.
    robex::SensorSpec whole;
    whole.kind = robex::SensorKind::InteriorZone;
    whole.zone_lo = {0.0, 0.0};
    whole.zone_hi = {1.0, 0.0};
    const Eigen::VectorXd wrow = robex::sensor_row(whole, *basis);
    CHECK(wrow[0] == doctest::Approx(1.0).epsilon(1e-13));  // constant mode, c_0 = 1
    for (int k = 1; k < 6; ++k) CHECK(std::abs(wrow[k]) < 1e-12);
}

TEST_CASE("boundary sensors live on the boundary") {
    const robex::DomainSpec square = unit_square();
    const robex::BasisPtr basis = robex::build_basis(square, 4);

    robex::SensorSpec corner;
    corner.kind = robex::SensorKind::BoundaryPointwise;
    corner.location = {0.0, 0.4};
    CHECK_NOTHROW(corner.validate(square));
    const Eigen::VectorXd row = robex::sensor_row(corner, *basis);
    for (int k = 0; k < basis->mode_count(); ++k)
        CHECK(row[k] == doctest::Approx(basis->eigenfunction(k, {0.0, 0.4})).epsilon(1e-14));

    robex::SensorSpec inside = corner;
    inside.location = {0.2, 0.4};
    CHECK_THROWS_AS(inside.validate(square), std::invalid_argument);

    robex::SensorSpec segment;
    segment.kind = robex::SensorKind::BoundaryZone;
    segment.edge = robex::Edge::Bottom;
    segment.edge_lo = 0.1;
    segment.edge_hi = 0.6;
    CHECK_NOTHROW(segment.validate(square));
    CHECK_THROWS_AS(segment.validate(unit_interval()), std::invalid_argument);

    robex::SensorSpec empty = segment;
    empty.edge_hi = segment.edge_lo;
    CHECK_THROWS_AS(empty.validate(square), std::invalid_argument);

    robex::SensorSpec outside = point_sensor(1.5, 0.5);
    CHECK_THROWS_AS(outside.validate(square), std::invalid_argument);
}

TEST_CASE("trajectories sample the analytic outputs") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 3);
    robex::StateField z0 = robex::zero_state(basis);
    z0.coefficients = {0.5, -1.0, 0.25};

    const std::vector<robex::SensorSpec> sensors{point_sensor(0.3)};
    const robex::OutputTrajectory y = robex::measure_trajectory(z0, sensors, 0.5, 10);

    REQUIRE(y.samples.rows() == 11);
    REQUIRE(y.samples.cols() == 1);
    CHECK(y.steps() == 10);
    CHECK(y.dt() == doctest::Approx(0.05));

    const Eigen::VectorXd row = robex::sensor_row(sensors[0], *basis);
    for (int j = 0; j <= 10; ++j) {
        double expected = 0.0;
        for (int k = 0; k < 3; ++k) {
            expected +=
                row[k] * std::exp(basis->eigenvalues[k] * y.time(j)) * z0.coefficients[k];
        }
        CHECK(y.samples(j, 0) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("measurement is linear in the state") {
    const robex::BasisPtr basis = robex::build_basis(unit_square(), 4);
    const std::vector<robex::SensorSpec> sensors{point_sensor(0.31, 0.73),
                                                 point_sensor(0.71, 0.23)};
    const robex::StateField a = robex::random_state(basis, 1);
    const robex::StateField b = robex::random_state(basis, 2);
    robex::StateField mix = robex::zero_state(basis);
    for (int k = 0; k < basis->mode_count(); ++k)
        mix.coefficients[k] = 2.0 * a.coefficients[k] - 0.5 * b.coefficients[k];

    const robex::OutputTrajectory ya = robex::measure_trajectory(a, sensors, 1.0, 20);
    const robex::OutputTrajectory yb = robex::measure_trajectory(b, sensors, 1.0, 20);
    const robex::OutputTrajectory ym = robex::measure_trajectory(mix, sensors, 1.0, 20);
    const Eigen::MatrixXd expected = 2.0 * ya.samples - 0.5 * yb.samples;
    CHECK((ym.samples - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampling a stored trajectory matches direct measurement") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 5);
    const robex::StateField z0 = robex::random_state(basis, 8);
    const std::vector<robex::SensorSpec> sensors{point_sensor(0.61)};

    const int steps = 16;
    Eigen::MatrixXd states(steps + 1, basis->mode_count());
    for (int j = 0; j <= steps; ++j) {
        const robex::StateField zt = robex::semigroup_apply(z0, 0.8 * j / steps);
        for (int k = 0; k < basis->mode_count(); ++k) states(j, k) = zt.coefficients[k];
    }

    const robex::OutputTrajectory direct = robex::measure_trajectory(z0, sensors, 0.8, steps);
    const robex::OutputTrajectory sampled = robex::sample_outputs(states, 0.8, sensors, *basis);
    CHECK((direct.samples - sampled.samples).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stacking concatenates channels") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 4);
    const robex::StateField z0 = robex::random_state(basis, 3);
    const std::vector<robex::SensorSpec> both{point_sensor(0.3), point_sensor(0.9)};

    const robex::OutputTrajectory joint = robex::measure_trajectory(z0, both, 1.0, 8);
    const robex::OutputTrajectory first = robex::measure_trajectory(z0, {both[0]}, 1.0, 8);
    const robex::OutputTrajectory second = robex::measure_trajectory(z0, {both[1]}, 1.0, 8);
    const robex::OutputTrajectory stacked = robex::stack_sensors({first, second});

    CHECK(stacked.sensor_count() == 2);
    CHECK((stacked.samples - joint.samples).cwiseAbs().maxCoeff() == 0.0);

    robex::OutputTrajectory other = second;
    other.horizon = 2.0;
    CHECK_THROWS_AS(robex::stack_sensors({first, other}), std::invalid_argument);
}

TEST_CASE("trajectory inner product is the time trapezoid") {
    const robex::BasisPtr basis = robex::build_basis(unit_interval(), 4);
    const robex::StateField z0 = robex::random_state(basis, 4);
    const std::vector<robex::SensorSpec> sensors{point_sensor(0.3), point_sensor(0.8)};
    const robex::OutputTrajectory y = robex::measure_trajectory(z0, sensors, 0.6, 12);

    const std::vector<double> w = robex::time_weights(y);
    REQUIRE(w.size() == 13);
    double wsum = 0.0;
    for (double v : w) wsum += v;
    CHECK(wsum == doctest::Approx(0.6).epsilon(1e-14));

    double direct = 0.0;
    for (int j = 0; j <= 12; ++j) direct += w[j] * y.samples.row(j).squaredNorm();
    CHECK(robex::trajectory_inner(y, y) == doctest::Approx(direct).epsilon(1e-13));
    CHECK(robex::trajectory_norm(y) == doctest::Approx(std::sqrt(direct)).epsilon(1e-13));
}
