#include "fd_reference.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fd {
namespace {

// Row contributions of the 1-D mirrored-ghost Neumann Laplacian, scaled by the
// diffusivity: row 0 is (2u[1] - 2u[0])/h^2, interior rows are the usual
// three-point stencil, row m-1 mirrors row 0.
void axis_stencil(int m, double h, double a, int row,
                  std::vector<std::pair<int, double>>& out) {
    const double s = a / (h * h);
    out.clear();
    if (row == 0) {
        out.emplace_back(0, -2.0 * s);
        out.emplace_back(1, 2.0 * s);
    } else if (row == m - 1) {
        out.emplace_back(m - 2, 2.0 * s);
        out.emplace_back(m - 1, -2.0 * s);
    } else {
        out.emplace_back(row - 1, s);
        out.emplace_back(row, -2.0 * s);
        out.emplace_back(row + 1, s);
    }
}

Eigen::SparseMatrix<double> laplacian(const robex::DomainSpec& domain) {
    const int m = domain.grid_resolution;
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<std::pair<int, double>> stencil;
    if (domain.kind == robex::DomainKind::Interval) {
        const double h = domain.lengths[0] / (m - 1);
        for (int i = 0; i < m; ++i) {
            axis_stencil(m, h, domain.diffusivity, i, stencil);
            for (const auto& [col, val] : stencil) trips.emplace_back(i, col, val);
        }
        Eigen::SparseMatrix<double> lap(m, m);
        lap.setFromTriplets(trips.begin(), trips.end());
        return lap;
    }
    // Grid index p = j*m + i (x fastest), matching domain_grid ordering.
    const double hx = domain.lengths[0] / (m - 1);
    const double hy = domain.lengths[1] / (m - 1);
    const int n = m * m;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const int p = j * m + i;
            axis_stencil(m, hx, domain.diffusivity, i, stencil);
            for (const auto& [col, val] : stencil) trips.emplace_back(p, j * m + col, val);
            axis_stencil(m, hy, domain.diffusivity, j, stencil);
            for (const auto& [col, val] : stencil) trips.emplace_back(p, col * m + i, val);
        }
    }
    Eigen::SparseMatrix<double> lap(n, n);
    lap.setFromTriplets(trips.begin(), trips.end());
    return lap;
}

}  // namespace

Eigen::VectorXd crank_nicolson(const robex::DomainSpec& domain,
                               const Eigen::VectorXd& grid_values, double horizon,
                               int steps) {
    if (steps < 1) throw std::invalid_argument("crank_nicolson: steps must be positive");
    const Eigen::SparseMatrix<double> lap = laplacian(domain);
    if (grid_values.size() != lap.rows())
        throw std::invalid_argument("crank_nicolson: grid value count mismatch");
    const double dt = horizon / steps;

    Eigen::SparseMatrix<double> eye(lap.rows(), lap.cols());
    eye.setIdentity();
    const Eigen::SparseMatrix<double> lhs = eye - (dt / 2.0) * lap;
    const Eigen::SparseMatrix<double> rhs = eye + (dt / 2.0) * lap;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(lhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("crank_nicolson: factorization failed");

    Eigen::VectorXd u = grid_values;
    for (int k = 0; k < steps; ++k) {
        u = solver.solve(rhs * u);
    }
    return u;
}

EigenPairs interval_eigenpairs(const robex::DomainSpec& domain) {
    if (domain.kind != robex::DomainKind::Interval)
        throw std::invalid_argument("interval_eigenpairs: interval domains only");
    const int m = domain.grid_resolution;
    const Eigen::MatrixXd lap = Eigen::MatrixXd(laplacian(domain));

    // The mirrored-ghost matrix is non-symmetric in its first and last rows but
    // similar to a symmetric one via D = diag(sqrt(1/2), 1, ..., 1, sqrt(1/2)).
    Eigen::VectorXd d = Eigen::VectorXd::Ones(m);
    d[0] = d[m - 1] = std::sqrt(0.5);
    const Eigen::MatrixXd sym = d.asDiagonal() * lap * d.asDiagonal().inverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        (sym + sym.transpose()) / 2.0);

    EigenPairs out;
    out.values = eig.eigenvalues().reverse();
    out.vectors.resize(m, m);
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXd v = d.asDiagonal().inverse() * eig.eigenvectors().col(m - 1 - k);
        out.vectors.col(k) = v / v.norm();
    }
    return out;
}

double interval_discrete_eigenvalue(const robex::DomainSpec& domain, int k) {
    const int m = domain.grid_resolution;
    const double h = domain.lengths[0] / (m - 1);
    const double s = std::sin(k * M_PI / (2.0 * (m - 1)));
    return -4.0 * domain.diffusivity / (h * h) * s * s;
}

}  // namespace fd
