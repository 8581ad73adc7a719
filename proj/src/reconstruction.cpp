#include "robex/reconstruction.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "robex/kernels.hpp"

namespace robex {
namespace {

constexpr double kNestSlack = 1e-12;

Eigen::VectorXd to_vector(const StateField& state) {
    return Eigen::Map<const Eigen::VectorXd>(state.coefficients.data(),
                                             static_cast<Eigen::Index>(state.coefficients.size()));
}

double output_misfit(const ObservabilityProblem& obs, const StateField& candidate,
                     const OutputTrajectory& measured) {
    OutputTrajectory diff = forward_K(obs, candidate);
    diff.samples -= measured.samples;
    return trajectory_norm(diff);
}

}  // namespace

void ReconstructionProblem::validate() const {
    observability.validate();
    if (!(regularization >= 0.0)) {
        throw std::invalid_argument("reconstruction.regularization: must be non-negative");
    }
    if (measured.steps() != observability.time_steps ||
        std::abs(measured.horizon - observability.horizon) >
            1e-12 * std::max(1.0, observability.horizon)) {
        throw std::invalid_argument("reconstruction.measured: time grid differs from the problem");
    }
    if (measured.sensor_count() != static_cast<int>(observability.sensors.size())) {
        throw std::invalid_argument("reconstruction.measured: channel count differs from sensors");
    }
    for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
        if (!regions[i] || !regions[i + 1] || !subset_of(*regions[i], *regions[i + 1])) {
            throw std::invalid_argument("reconstruction.regions: entry " + std::to_string(i) +
                                        " is not contained in entry " + std::to_string(i + 1));
        }
    }
}

StateField reconstruct_initial_state(const ReconstructionProblem& problem) {
    problem.validate();
    const Eigen::MatrixXd G = discrete_gramian(problem.observability);
    const StateField rhs_state = adjoint_Kstar(problem.observability, problem.measured);
    const Eigen::VectorXd rhs = to_vector(rhs_state);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("reconstruction: Gramian eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (problem.regularization == 0.0 && ev.minCoeff() <= 1e-14 * emax) {
        throw std::runtime_error(
            "reconstruction: normal equations are numerically singular without regularization; "
            "set epsilon > 0 or reduce the mode count");
    }

    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        // With a ridge, clamp the tiny negative rounding of kernel eigenvalues.
        const double sigma = problem.regularization == 0.0 ? ev[i] : std::max(ev[i], 0.0);
        inv[i] = 1.0 / (sigma + problem.regularization);
    }
    const Eigen::VectorXd c =
        es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().transpose() * rhs));
    return StateField{problem.observability.basis,
                      std::vector<double>(c.data(), c.data() + c.size())};
}

double observation_error(const StateField& z0_true, const StateField& z0_rec,
                         const BoundaryRegion& region) {
    if (z0_true.basis.get() != z0_rec.basis.get()) {
        throw std::invalid_argument("observation error: states use different bases");
    }
    const std::size_t n = z0_true.coefficients.size();
    std::vector<double> gap(n);
    for (std::size_t k = 0; k < n; ++k) {
        gap[k] = z0_true.coefficients[k] - z0_rec.coefficients[k];
    }
    const StateField gap_state{z0_true.basis, std::move(gap)};
    const std::vector<double> values = evaluate(gap_state, region.node_positions());
    const std::vector<double> w = region.node_weights();
    return kernels::weighted_sumsq(w.data(), values.data(), w.size());
}

double observation_error_domain(const StateField& z0_true, const StateField& z0_rec) {
    if (z0_true.basis.get() != z0_rec.basis.get()) {
        throw std::invalid_argument("observation error: states use different bases");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < z0_true.coefficients.size(); ++k) {
        const double d = z0_true.coefficients[k] - z0_rec.coefficients[k];
        acc += (1.0 + std::abs(z0_true.basis->eigenvalues[k])) * d * d;
    }
    return acc;
}

ErrorReport evaluate_reconstruction(const ReconstructionProblem& problem,
                                    const StateField& z0_true) {
    problem.validate();
    ErrorReport report{reconstruct_initial_state(problem), 0.0, {}, 0.0, 0.0};
    report.residual = output_misfit(problem.observability, report.reconstructed, problem.measured);
    for (std::size_t i = 0; i < problem.regions.size(); ++i) {
        report.per_region_errors.push_back(
            {static_cast<int>(i),
             observation_error(z0_true, report.reconstructed, *problem.regions[i])});
    }
    report.minimizer_value =
        observation_error(z0_true, report.reconstructed, *problem.observability.region);
    report.domain_error = observation_error_domain(z0_true, report.reconstructed);
    return report;
}

ObservableSet build_observable_set(const ObservabilityProblem& problem, ObservableLabel label,
                                   double threshold) {
    problem.validate();
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold: must be positive");

    const Eigen::MatrixXd G = analytic_gramian(problem);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("observable set: Gramian eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = es.eigenvalues();

    std::vector<Eigen::Index> strong, weak;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        (ev[i] > threshold ? strong : weak).push_back(i);
    }
    Eigen::MatrixXd recovered(ev.size(), static_cast<Eigen::Index>(strong.size()));
    for (std::size_t j = 0; j < strong.size(); ++j) {
        recovered.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(strong[j]);
    }

    ObservableSet set;
    set.label = label;
    set.sensors = problem.sensors;
    set.threshold = threshold;
    if (label == ObservableLabel::OmegaE) {
        set.subspace = std::move(recovered);
        return set;
    }

    set.region = problem.region;
    if (weak.empty()) {
        set.subspace = std::move(recovered);
        return set;
    }

    // Kernel directions whose region trace vanishes: invisible to output, yet
    // their trace (zero) is determined, so they belong to the region-level
    // recoverable family.
    Eigen::MatrixXd kern(ev.size(), static_cast<Eigen::Index>(weak.size()));
    for (std::size_t j = 0; j < weak.size(); ++j) {
        kern.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(weak[j]);
    }
    const Eigen::MatrixXd traces = trace_matrix(*problem.basis, *problem.region) * kern;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(traces, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    Eigen::Index rank = 0;
    while (rank < svd.singularValues().size() &&
           svd.singularValues()[rank] > 1e-10 * std::max(1.0, smax)) {
        ++rank;
    }
    const Eigen::MatrixXd null_dirs = svd.matrixV().rightCols(svd.matrixV().cols() - rank);

    set.subspace.resize(ev.size(), recovered.cols() + null_dirs.cols());
    set.subspace.leftCols(recovered.cols()) = recovered;
    set.subspace.rightCols(null_dirs.cols()) = kern * null_dirs;
    return set;
}

MonotonicityReport monotonicity_experiment(const ReconstructionProblem& problem, int trials,
                                           std::uint64_t seed) {
    problem.validate();
    if (trials < 1) throw std::invalid_argument("trials: must be at least 1");
    if (problem.regions.empty()) {
        throw std::invalid_argument("reconstruction.regions: nest must not be empty");
    }

    MonotonicityReport report;
    report.slack = kNestSlack;
    for (int trial = 0; trial < trials; ++trial) {
        MonotonicityTrial row;
        row.trial = trial;
        row.seed = mix_seed(seed, static_cast<std::uint64_t>(trial));

        const StateField z0 = random_state(problem.observability.basis, row.seed);
        ReconstructionProblem instance = problem;
        instance.measured = forward_K(problem.observability, z0);

        const StateField rec = reconstruct_initial_state(instance);
        row.residual = output_misfit(instance.observability, rec, instance.measured);
        for (const RegionPtr& region : problem.regions) {
            row.region_errors.push_back(observation_error(z0, rec, *region));
        }
        row.domain_error = observation_error_domain(z0, rec);

        row.chain_ok = true;
        for (std::size_t i = 0; i + 1 < row.region_errors.size(); ++i) {
            if (row.region_errors[i] > row.region_errors[i + 1] + kNestSlack) {
                row.chain_ok = false;
            }
        }
        row.comparison_ok = true;
        for (double er : row.region_errors) {
            if (er > row.domain_error + kNestSlack) row.comparison_ok = false;
        }

        if (!row.chain_ok) ++report.chain_failures;
        if (!row.comparison_ok) ++report.comparison_failures;
        report.trials.push_back(std::move(row));
    }
    return report;
}

SweepReport sensor_sweep(const ReconstructionProblem& problem, const StateField& z0_true,
                         const std::vector<Point>& locations) {
    problem.validate();
    if (z0_true.basis.get() != problem.observability.basis.get()) {
        throw std::invalid_argument("sweep: true state uses a different basis");
    }

    SweepReport report;
    for (const Point& location : locations) {
        SensorSpec sensor;
        sensor.kind = SensorKind::InteriorPointwise;
        sensor.location = location;

        ReconstructionProblem instance = problem;
        instance.observability.sensors = {sensor};
        instance.measured = forward_K(instance.observability, z0_true);

        const StateField rec = reconstruct_initial_state(instance);
        SweepEntry entry;
        entry.location = location;
        entry.error = observation_error(z0_true, rec, *problem.observability.region);
        entry.residual = output_misfit(instance.observability, rec, instance.measured);
        report.entries.push_back(entry);
    }
    for (std::size_t i = 0; i + 1 < report.entries.size(); ++i) {
        report.adjacent_differences.push_back(
            std::abs(report.entries[i + 1].error - report.entries[i].error));
    }
    return report;
}

}  // namespace robex
