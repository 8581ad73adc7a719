#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "robex/observability.hpp"

namespace {

robex::DomainSpec unit_interval(int grid = 64) {
    robex::DomainSpec d;
    d.kind = robex::DomainKind::Interval;
    d.lengths = {1.0};
    d.grid_resolution = grid;
    return d;
}

robex::SensorSpec point_sensor(double x, double y = 0.0) {
    robex::SensorSpec s;
    s.kind = robex::SensorKind::InteriorPointwise;
    s.location = {x, y};
    return s;
}

robex::ObservabilityProblem interval_problem(double sensor_at, int modes, double horizon = 1.0,
                                             int steps = 200) {
    robex::ObservabilityProblem p;
    p.basis = robex::build_basis(unit_interval(), modes);
    p.sensors = {point_sensor(sensor_at)};
    p.region = robex::make_boundary_region(p.basis->domain, {{robex::Edge::Left, 0, 0}});
    p.horizon = horizon;
    p.time_steps = steps;
    return p;
}

}  // namespace

TEST_CASE("problem validation") {
    robex::ObservabilityProblem p = interval_problem(0.3, 4);
    CHECK_NOTHROW(p.validate());

    robex::ObservabilityProblem bad = p;
    bad.sensors.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.horizon = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.time_steps = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.basis = nullptr;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    robex::DomainSpec other = unit_interval();
    other.lengths = {2.0};
    bad.region = robex::full_boundary(other);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("closed-form Gramian matches a fine quadrature of the same integral") {
    const robex::ObservabilityProblem p = interval_problem(0.7, 4, 0.8, 100);
    const Eigen::MatrixXd analytic = robex::analytic_gramian(p);

    robex::ObservabilityProblem fine = p;
    fine.time_steps = 200000;
    const Eigen::MatrixXd quad = robex::discrete_gramian(fine);

    CHECK((analytic - quad).cwiseAbs().maxCoeff() < 1e-6 * analytic.norm());
    CHECK((analytic - analytic.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    // Diagonal against the hand formula, zero mode first.
    const Eigen::VectorXd row = robex::sensor_row(p.sensors[0], *p.basis);
    CHECK(analytic(0, 0) == doctest::Approx(row[0] * row[0] * 0.8).epsilon(1e-13));
    for (int k = 1; k < 4; ++k) {
        const double lam = p.basis->eigenvalues[k];
        const double expected =
            row[k] * row[k] * (std::exp(2.0 * lam * 0.8) - 1.0) / (2.0 * lam);
        CHECK(analytic(k, k) == doctest::Approx(expected).epsilon(1e-13));
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(analytic);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("adjoint pairing of the observation map") {
    const robex::ObservabilityProblem p = interval_problem(1.0 / std::sqrt(2.0), 6);
    for (unsigned seed = 0; seed < 20; ++seed) {
        const robex::StateField z = robex::random_state(p.basis, 900 + seed);
        const robex::StateField zy = robex::random_state(p.basis, 950 + seed);
        const robex::OutputTrajectory y = robex::forward_K(p, zy);

        const double lhs = robex::trajectory_inner(robex::forward_K(p, z), y);
        const robex::StateField back = robex::adjoint_Kstar(p, y);
        double rhs = 0.0;
        for (int k = 0; k < p.basis->mode_count(); ++k)
            rhs += z.coefficients[k] * back.coefficients[k];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("sampled Gramian factors through the operator pair") {
    const robex::ObservabilityProblem p = interval_problem(0.43, 5, 0.9, 150);
    const Eigen::MatrixXd gram = robex::discrete_gramian(p);
    const int n = p.basis->mode_count();

    for (int k = 0; k < n; ++k) {
        robex::StateField ek = robex::zero_state(p.basis);
        ek.coefficients[k] = 1.0;
        const robex::StateField col = robex::adjoint_Kstar(p, robex::forward_K(p, ek));
        for (int i = 0; i < n; ++i) {
            CHECK(col.coefficients[i] == doctest::Approx(gram(i, k)).epsilon(1e-10));
        }
    }
}

TEST_CASE("an irrational sensor location sees every mode") {
    const robex::ObservabilityProblem p = interval_problem(1.0 / std::sqrt(2.0), 8);
    const robex::GramianReport report = robex::boundary_gramian(p);
    CHECK(report.observable);
    CHECK(report.sigma_min() > 1e-8);
    CHECK(robex::is_gamma_observable(p));
}

TEST_CASE("the midpoint sensor is blind to the odd modes") {
    robex::ObservabilityProblem p = interval_problem(0.5, 8);
    p.region = robex::full_boundary(p.basis->domain);

    const robex::GramianReport report = robex::boundary_gramian(p);
    CHECK(!report.observable);

    // cos(k pi x) vanishes at x = 1/2 for odd k, so the Gramian kernel is
    // spanned by the odd modes: 4 of the 8 eigenvalues collapse.
    int tiny = 0;
    for (Eigen::Index i = 0; i < report.gramian_eigenvalues.size(); ++i) {
        if (report.gramian_eigenvalues[i] < 1e-12 * report.gramian_eigenvalues[0]) ++tiny;
    }
    CHECK(tiny == 4);

    // A kernel state produces no output at all.
    robex::StateField hidden = robex::zero_state(p.basis);
    hidden.coefficients[1] = 1.0;  // cos(pi x), odd
    CHECK(robex::trajectory_norm(robex::forward_K(p, hidden)) < 1e-10);
}

TEST_CASE("adding a sensor cannot shrink the recoverable trace directions") {
    robex::ObservabilityProblem one = interval_problem(0.3111, 6);
    one.region = robex::full_boundary(one.basis->domain);
    robex::ObservabilityProblem two = one;
    two.sensors.push_back(point_sensor(0.7321));

    const Eigen::MatrixXd map_one = robex::recoverable_trace_map(robex::boundary_gramian(one));
    const Eigen::MatrixXd map_two = robex::recoverable_trace_map(robex::boundary_gramian(two));

    const Eigen::VectorXd sv_one = map_one.jacobiSvd().singularValues();
    const Eigen::VectorXd sv_two = map_two.jacobiSvd().singularValues();
    REQUIRE(sv_one.size() == sv_two.size());
    for (Eigen::Index i = 0; i < sv_one.size(); ++i) {
        CHECK(sv_two[i] >= sv_one[i] - 1e-10);
    }
}

TEST_CASE("observability on a larger region implies it on a nested one") {
    robex::ObservabilityProblem small = interval_problem(1.0 / std::sqrt(2.0), 8);
    robex::ObservabilityProblem large = small;
    large.region = robex::full_boundary(small.basis->domain);

    const bool on_large = robex::is_gamma_observable(large);
    const bool on_small = robex::is_gamma_observable(small);
    CHECK(on_large);
    CHECK(on_small);  // the nested region asks for strictly less
}

TEST_CASE("detectability of the corrected generator") {
    const robex::ObservabilityProblem p = interval_problem(1.0 / std::sqrt(2.0), 4);
    const int n = p.basis->mode_count();

    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, 1);
    const robex::DetectabilityReport none =
        robex::is_gamma_detectable(*p.basis, p.sensors, zero, *p.region);
    CHECK(!none.detectable);
    // Without correction the constant mode sits at zero and never decays.
    CHECK(none.spectral_abscissa == doctest::Approx(0.0).epsilon(1e-12));

    const Eigen::MatrixXd row = robex::sensor_matrix(p.sensors, *p.basis);
    const Eigen::MatrixXd kappa_ct = 5.0 * row.transpose();
    const robex::DetectabilityReport scaled =
        robex::is_gamma_detectable(*p.basis, p.sensors, kappa_ct, *p.region);
    CHECK(scaled.detectable);
    CHECK(scaled.spectral_abscissa < 0.0);
    CHECK(scaled.decay_rate == doctest::Approx(-scaled.spectral_abscissa));
}
