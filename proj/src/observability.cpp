#include "robex/observability.hpp"

#include <cmath>
#include <stdexcept>

#include "robex/kernels.hpp"

namespace robex {
namespace {

constexpr double kRankTol = 1e-12;

bool same_domain(const DomainSpec& a, const DomainSpec& b) {
    return a.kind == b.kind && a.lengths == b.lengths && a.diffusivity == b.diffusivity &&
           a.grid_resolution == b.grid_resolution;
}

/// exp(lambda_k t_j) on the problem's grid, (steps + 1) x modes. All sampled
/// operators (forward map, adjoint, discrete Gramian) share these factors so
/// they stay mutually consistent to rounding.
Eigen::MatrixXd decay_table(const ObservabilityProblem& problem) {
    const auto& eig = problem.basis->eigenvalues;
    Eigen::MatrixXd E(problem.time_steps + 1, problem.basis->mode_count());
    for (int j = 0; j <= problem.time_steps; ++j) {
        const double t = problem.horizon * j / problem.time_steps;
        for (int k = 0; k < problem.basis->mode_count(); ++k) {
            E(j, k) = std::exp(eig[static_cast<std::size_t>(k)] * t);
        }
    }
    return E;
}

Eigen::VectorXd trapezoid_weights(double horizon, int steps) {
    const double dt = horizon / steps;
    Eigen::VectorXd tau = Eigen::VectorXd::Constant(steps + 1, dt);
    tau[0] = dt / 2;
    tau[steps] = dt / 2;
    return tau;
}

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via its
/// eigendecomposition, cutting eigenvalues below kRankTol * max.
Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("gramian: eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = kRankTol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void ObservabilityProblem::validate() const {
    if (!basis) throw std::invalid_argument("observability.basis: must not be null");
    if (sensors.empty()) throw std::invalid_argument("observability.sensors: must not be empty");
    if (!(horizon > 0.0)) throw std::invalid_argument("observability.horizon: must be positive");
    if (time_steps < 1) throw std::invalid_argument("observability.time_steps: must be >= 1");
    if (!region) throw std::invalid_argument("observability.region: must not be null");
    if (!same_domain(region->domain, basis->domain)) {
        throw std::invalid_argument("observability.region: domain differs from the basis domain");
    }
    for (const SensorSpec& s : sensors) s.validate(basis->domain);
}

OutputTrajectory forward_K(const ObservabilityProblem& problem, const StateField& z) {
    problem.validate();
    if (z.basis.get() != problem.basis.get()) {
        throw std::invalid_argument("observation map: state uses a different basis");
    }
    return measure_trajectory(z, problem.sensors, problem.horizon, problem.time_steps);
}

StateField adjoint_Kstar(const ObservabilityProblem& problem, const OutputTrajectory& y) {
    problem.validate();
    if (y.steps() != problem.time_steps ||
        std::abs(y.horizon - problem.horizon) > 1e-12 * std::max(1.0, problem.horizon)) {
        throw std::invalid_argument("observation adjoint: trajectory grid mismatch");
    }
    const Eigen::MatrixXd C = sensor_matrix(problem.sensors, *problem.basis);
    if (y.sensor_count() != C.rows()) {
        throw std::invalid_argument("observation adjoint: channel count mismatch");
    }
    const Eigen::MatrixXd E = decay_table(problem);
    const Eigen::MatrixXd Z = y.samples * C;  // row j holds C^T y_j
    const std::vector<double> tau = time_weights(y);

    std::vector<double> coeffs(static_cast<std::size_t>(problem.basis->mode_count()));
    for (Eigen::Index k = 0; k < E.cols(); ++k) {
        coeffs[static_cast<std::size_t>(k)] =
            kernels::weighted_dot(tau.data(), E.col(k).data(), Z.col(k).data(), tau.size());
    }
    return StateField{problem.basis, std::move(coeffs)};
}

Eigen::MatrixXd analytic_gramian(const ObservabilityProblem& problem) {
    problem.validate();
    const Eigen::MatrixXd C = sensor_matrix(problem.sensors, *problem.basis);
    const Eigen::MatrixXd S = C.transpose() * C;
    const auto& eig = problem.basis->eigenvalues;
    const double T = problem.horizon;

    Eigen::MatrixXd G(S.rows(), S.cols());
    for (Eigen::Index a = 0; a < G.rows(); ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double mu = eig[static_cast<std::size_t>(a)] + eig[static_cast<std::size_t>(b)];
            const double integral = mu == 0.0 ? T : std::expm1(mu * T) / mu;
            G(a, b) = S(a, b) * integral;
            G(b, a) = G(a, b);
        }
    }
    return G;
}

Eigen::MatrixXd discrete_gramian(const ObservabilityProblem& problem) {
    problem.validate();
    const Eigen::MatrixXd C = sensor_matrix(problem.sensors, *problem.basis);
    const Eigen::MatrixXd S = C.transpose() * C;
    const Eigen::MatrixXd E = decay_table(problem);
    const Eigen::VectorXd tau = trapezoid_weights(problem.horizon, problem.time_steps);
    const Eigen::MatrixXd W = E.transpose() * tau.asDiagonal() * E;
    return S.cwiseProduct(W);
}

GramianReport boundary_gramian(const ObservabilityProblem& problem, double threshold) {
    problem.validate();
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold: must be positive");

    GramianReport report;
    report.threshold = threshold;
    report.gramian = analytic_gramian(problem);
    report.restricted_map = trace_matrix(*problem.basis, *problem.region);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.gramian);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("gramian: eigendecomposition failed");
    }
    report.gramian_eigenvalues = es.eigenvalues().reverse();

    // Range of the trace map: directions in the region's value space that any
    // coefficient vector can reach.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(report.restricted_map, Eigen::ComputeThinU);
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    Eigen::Index rank = 0;
    while (rank < svd.singularValues().size() &&
           svd.singularValues()[rank] > kRankTol * smax) {
        ++rank;
    }
    const Eigen::MatrixXd Ur = svd.matrixU().leftCols(rank);

    const Eigen::MatrixXd normal_op = report.restricted_map * symmetric_pinv(report.gramian) *
                                      report.restricted_map.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(Ur.transpose() * normal_op * Ur);
    if (rs.info() != Eigen::Success) {
        throw std::runtime_error("gramian: recoverability eigendecomposition failed");
    }
    report.recoverability_singular_values = rs.eigenvalues().reverse();
    report.observable = rank > 0 && report.sigma_min() > threshold;
    return report;
}

bool is_gamma_observable(const ObservabilityProblem& problem, double threshold) {
    return boundary_gramian(problem, threshold).observable;
}

Eigen::MatrixXd recoverable_trace_map(const GramianReport& report) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.gramian);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("gramian: eigendecomposition failed");
    }
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = kRankTol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXd projector = Eigen::MatrixXd::Zero(ev.size(), ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) {
            projector += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
        }
    }
    return report.restricted_map * projector;
}

DetectabilityReport is_gamma_detectable(const SpectralBasis& basis,
                                        const std::vector<SensorSpec>& sensors,
                                        const Eigen::MatrixXd& gain_columns,
                                        const BoundaryRegion& region) {
    if (!same_domain(region.domain, basis.domain)) {
        throw std::invalid_argument("detectability: region domain differs from the basis domain");
    }
    const Eigen::MatrixXd C = sensor_matrix(sensors, basis);
    if (gain_columns.rows() != basis.mode_count() || gain_columns.cols() != C.rows()) {
        throw std::invalid_argument("detectability: gain dimensions do not match basis/sensors");
    }
    Eigen::MatrixXd M = -gain_columns * C;
    for (int k = 0; k < basis.mode_count(); ++k) {
        M(k, k) += basis.eigenvalues[static_cast<std::size_t>(k)];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("detectability: eigenvalue computation failed");
    }
    DetectabilityReport report;
    report.spectral_abscissa = es.eigenvalues().real().maxCoeff();
    report.decay_rate = -report.spectral_abscissa;
    report.detectable = report.spectral_abscissa < 0.0;
    return report;
}

}  // namespace robex
