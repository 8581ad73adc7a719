#include "robex/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "robex/kernels.hpp"

namespace robex {
namespace {

constexpr double kPi = 3.14159265358979323846;

double axis_eigenvalue(double diffusivity, double length, int n) {
    if (n == 0) return 0.0;
    const double w = static_cast<double>(n) * kPi / length;
    return -diffusivity * w * w;
}

double axis_normalization(double length, int n) {
    return n == 0 ? std::sqrt(1.0 / length) : std::sqrt(2.0 / length);
}

double axis_mode(double length, int n, double x) {
    return axis_normalization(length, n) *
           (n == 0 ? 1.0 : std::cos(static_cast<double>(n) * kPi * x / length));
}

}  // namespace

double SpectralBasis::eigenfunction(int k, const Point& p) const {
    const auto& idx = mode_indices[static_cast<std::size_t>(k)];
    double value = axis_mode(domain.lengths[0], idx[0], p[0]);
    if (domain.kind == DomainKind::Rectangle) {
        value *= axis_mode(domain.lengths[1], idx[1], p[1]);
    }
    return value;
}

BasisPtr build_basis(const DomainSpec& domain, int modes_per_axis) {
    domain.validate();
    if (modes_per_axis < 1) {
        throw std::invalid_argument("modes_per_axis: must be at least 1");
    }

    auto basis = std::make_shared<SpectralBasis>();
    basis->domain = domain;
    basis->modes_per_axis = modes_per_axis;

    std::vector<double> eigs;
    std::vector<std::array<int, 2>> indices;
    if (domain.kind == DomainKind::Interval) {
        eigs.reserve(static_cast<std::size_t>(modes_per_axis));
        for (int n = 0; n < modes_per_axis; ++n) {
            eigs.push_back(axis_eigenvalue(domain.diffusivity, domain.lengths[0], n));
            indices.push_back({n, 0});
        }
    } else {
        eigs.reserve(static_cast<std::size_t>(modes_per_axis) * modes_per_axis);
        for (int m = 0; m < modes_per_axis; ++m) {
            for (int n = 0; n < modes_per_axis; ++n) {
                eigs.push_back(axis_eigenvalue(domain.diffusivity, domain.lengths[0], m) +
                               axis_eigenvalue(domain.diffusivity, domain.lengths[1], n));
                indices.push_back({m, n});
            }
        }
    }

    // Stable sort by descending eigenvalue keeps the (0,0) constant mode first
    // and gives a deterministic order for degenerate eigenvalues.
    std::vector<std::size_t> order(eigs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eigs[a] > eigs[b]; });

    basis->eigenvalues.reserve(eigs.size());
    basis->mode_indices.reserve(eigs.size());
    basis->normalization.reserve(eigs.size());
    for (std::size_t pos : order) {
        basis->eigenvalues.push_back(eigs[pos]);
        basis->mode_indices.push_back(indices[pos]);
        double c = axis_normalization(domain.lengths[0], indices[pos][0]);
        if (domain.kind == DomainKind::Rectangle) {
            c *= axis_normalization(domain.lengths[1], indices[pos][1]);
        }
        basis->normalization.push_back(c);
    }
    return basis;
}

StateField make_state(BasisPtr basis, std::vector<double> coefficients) {
    if (!basis) throw std::invalid_argument("state: basis must not be null");
    if (static_cast<int>(coefficients.size()) != basis->mode_count()) {
        throw std::invalid_argument("state: coefficient count does not match basis mode count");
    }
    return StateField{std::move(basis), std::move(coefficients)};
}

StateField zero_state(BasisPtr basis) {
    if (!basis) throw std::invalid_argument("state: basis must not be null");
    const std::size_t n = static_cast<std::size_t>(basis->mode_count());
    return StateField{std::move(basis), std::vector<double>(n, 0.0)};
}

StateField random_state(BasisPtr basis, std::uint64_t seed) {
    if (!basis) throw std::invalid_argument("state: basis must not be null");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> coeffs(static_cast<std::size_t>(basis->mode_count()));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        coeffs[k] = normal(rng) / (1.0 + std::abs(basis->eigenvalues[k]));
    }
    return StateField{std::move(basis), std::move(coeffs)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Eigen::MatrixXd evaluation_matrix(const SpectralBasis& basis, const std::vector<Point>& points) {
    Eigen::MatrixXd E(static_cast<Eigen::Index>(points.size()), basis.mode_count());
    for (Eigen::Index i = 0; i < E.rows(); ++i) {
        for (int k = 0; k < basis.mode_count(); ++k) {
            E(i, k) = basis.eigenfunction(k, points[static_cast<std::size_t>(i)]);
        }
    }
    return E;
}

std::vector<double> evaluate(const StateField& state, const std::vector<Point>& points) {
    const SpectralBasis& basis = *state.basis;
    const std::size_t rows = points.size();
    const std::size_t cols = static_cast<std::size_t>(basis.mode_count());
    std::vector<double> table(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            table[i * cols + k] = basis.eigenfunction(static_cast<int>(k), points[i]);
        }
    }
    std::vector<double> out(rows, 0.0);
    kernels::matvec(table.data(), rows, cols, state.coefficients.data(), out.data());
    return out;
}

StateField project(BasisPtr basis, const std::vector<double>& grid_values) {
    if (!basis) throw std::invalid_argument("state: basis must not be null");
    const QuadratureGrid grid = domain_grid(basis->domain);
    if (grid_values.size() != grid.points.size()) {
        throw std::invalid_argument("project: grid value count does not match domain grid");
    }
    std::vector<double> coeffs(static_cast<std::size_t>(basis->mode_count()));
    std::vector<double> column(grid.points.size());
    for (int k = 0; k < basis->mode_count(); ++k) {
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            column[i] = basis->eigenfunction(k, grid.points[i]);
        }
        coeffs[static_cast<std::size_t>(k)] = kernels::weighted_dot(
            grid.weights.data(), column.data(), grid_values.data(), grid.points.size());
    }
    return StateField{std::move(basis), std::move(coeffs)};
}

double l2_inner(const StateField& a, const StateField& b) {
    if (a.basis.get() != b.basis.get()) {
        throw std::invalid_argument("inner product: states use different bases");
    }
    return kernels::dot(a.coefficients.data(), b.coefficients.data(), a.coefficients.size());
}

double l2_norm(const StateField& state) { return std::sqrt(l2_inner(state, state)); }

double h1_norm(const StateField& state) {
    double acc = 0.0;
    for (std::size_t k = 0; k < state.coefficients.size(); ++k) {
        acc += (1.0 + std::abs(state.basis->eigenvalues[k])) * state.coefficients[k] *
               state.coefficients[k];
    }
    return std::sqrt(acc);
}

StateField semigroup_apply(const StateField& state, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup: time must be non-negative");
    const std::size_t n = state.coefficients.size();
    std::vector<double> decay(n);
    for (std::size_t k = 0; k < n; ++k) {
        decay[k] = std::exp(state.basis->eigenvalues[k] * t);
    }
    std::vector<double> out(n);
    kernels::hadamard(decay.data(), state.coefficients.data(), out.data(), n);
    return StateField{state.basis, std::move(out)};
}

StateField mild_solution(const StateField& z0, const std::vector<StateField>& input_columns,
                         const ControlSamples& control, double t) {
    if (t < 0.0) throw std::invalid_argument("mild solution: time must be non-negative");
    StateField out = semigroup_apply(z0, t);
    if (input_columns.empty() || t == 0.0) return out;

    if (control.dt <= 0.0) {
        throw std::invalid_argument("mild solution: control.dt must be positive");
    }
    if (static_cast<Eigen::Index>(input_columns.size()) != control.values.cols()) {
        throw std::invalid_argument("mild solution: control channel count does not match inputs");
    }
    if (control.covered_time() < t - 1e-12 * std::max(1.0, t)) {
        throw std::invalid_argument("mild solution: control samples do not cover requested time");
    }
    for (const auto& col : input_columns) {
        if (col.basis.get() != z0.basis.get()) {
            throw std::invalid_argument("mild solution: input columns use a different basis");
        }
    }

    const auto& eig = z0.basis->eigenvalues;
    const std::size_t n = out.coefficients.size();
    const auto segments = static_cast<Eigen::Index>(std::ceil(t / control.dt - 1e-12));

    // Per mode k, per segment [a, b) with constant control value u:
    //   int_a^b exp(lambda (t - s)) ds
    // has the closed form (exp(lambda (t - a)) - exp(lambda (t - b))) / lambda,
    // which degenerates to (b - a) for the lambda = 0 mode.
    std::vector<double> weight(n);
    for (Eigen::Index j = 0; j < segments; ++j) {
        const double a = static_cast<double>(j) * control.dt;
        const double b = std::min(a + control.dt, t);
        for (std::size_t k = 0; k < n; ++k) {
            const double lam = eig[k];
            weight[k] = lam == 0.0
                            ? b - a
                            : (std::exp(lam * (t - a)) - std::exp(lam * (t - b))) / lam;
        }
        for (std::size_t c = 0; c < input_columns.size(); ++c) {
            const double u = control.values(j, static_cast<Eigen::Index>(c));
            if (u == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                out.coefficients[k] += u * weight[k] * input_columns[c].coefficients[k];
            }
        }
    }
    return out;
}

}  // namespace robex
