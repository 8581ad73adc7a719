#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "robex/domain.hpp"

namespace robex {

/// Truncated eigenbasis of the diffusion operator A = diffusivity * Laplacian
/// with Neumann boundary conditions. Eigenpairs are analytic cosine modes:
/// on an interval of length L, lambda_n = -diffusivity * (n pi / L)^2 with
/// eigenfunction c_n cos(n pi x / L); on a rectangle, tensor products of the
/// per-axis modes. Modes are sorted by non-increasing eigenvalue, so index 0
/// is always the constant mode with lambda = 0. The eigenfunctions are
/// orthonormal in L2, which makes the coefficient dot product the L2(Omega)
/// inner product; the H1 norm weights coefficient k by sqrt(1 + |lambda_k|).
struct SpectralBasis {
    DomainSpec domain;
    int modes_per_axis = 0;
    std::vector<double> eigenvalues;                 // non-increasing, eigenvalues[0] == 0
    std::vector<std::array<int, 2>> mode_indices;    // (n, 0) in 1-D, (m, n) in 2-D
    std::vector<double> normalization;               // L2 normalization constant per mode

    int mode_count() const { return static_cast<int>(eigenvalues.size()); }

    double eigenfunction(int k, const Point& p) const;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// Builds the truncated basis; modes_per_axis modes per spatial axis
/// (so modes_per_axis in 1-D and modes_per_axis^2 in 2-D).
BasisPtr build_basis(const DomainSpec& domain, int modes_per_axis);

/// A field over the domain expressed by its coefficients in a SpectralBasis.
struct StateField {
    BasisPtr basis;
    std::vector<double> coefficients;
};

StateField make_state(BasisPtr basis, std::vector<double> coefficients);
StateField zero_state(BasisPtr basis);

/// Seeded random field: standard normal coefficients scaled by
/// 1 / (1 + |lambda_k|), which mimics H1-regular initial data.
StateField random_state(BasisPtr basis, std::uint64_t seed);

/// Deterministic per-trial seed derivation (splitmix-style mixing), shared by
/// experiments and the CLI so that trial k of run (seed) is reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Rows are evaluation points, columns are modes.
Eigen::MatrixXd evaluation_matrix(const SpectralBasis& basis, const std::vector<Point>& points);

/// Pointwise values of the spectral expansion.
std::vector<double> evaluate(const StateField& state, const std::vector<Point>& points);

/// L2(Omega) projection of sampled values on domain_grid(basis.domain).
StateField project(BasisPtr basis, const std::vector<double>& grid_values);

double l2_norm(const StateField& state);
double l2_inner(const StateField& a, const StateField& b);
double h1_norm(const StateField& state);

/// Applies the diffusion semigroup: coefficient k scaled by exp(lambda_k t).
StateField semigroup_apply(const StateField& state, double t);

/// Piecewise-constant control samples on a uniform grid: u(t) = values.row(j)
/// for t in [j dt, (j+1) dt). values has one column per input channel.
struct ControlSamples {
    double dt = 0.0;
    Eigen::MatrixXd values;

    double covered_time() const { return dt * static_cast<double>(values.rows()); }
};

/// Mild solution z(t) = S(t) z0 + int_0^t S(t-s) B u(s) ds. The Duhamel term
/// integrates exp(lambda (t-s)) exactly against the piecewise-constant
/// control, so there is no time-stepping error on this path. input_columns
/// holds one StateField per control channel (the columns of B).
StateField mild_solution(const StateField& z0, const std::vector<StateField>& input_columns,
                         const ControlSamples& control, double t);

}  // namespace robex
