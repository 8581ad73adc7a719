#pragma once

#include <array>
#include <vector>

namespace robex {

enum class DomainKind { Interval, Rectangle };

/// Spatial domain: an interval (0, L) or an axis-aligned rectangle
/// (0, Lx) x (0, Ly), with homogeneous Neumann boundary conditions encoded
/// in the eigenbasis built on top of it.
struct DomainSpec {
    DomainKind kind = DomainKind::Interval;
    std::vector<double> lengths{1.0};  // one entry per axis
    double diffusivity = 1.0;          // coefficient of the Laplacian
    int grid_resolution = 64;          // evaluation/quadrature points per axis

    int dimension() const { return kind == DomainKind::Interval ? 1 : 2; }

    /// Throws std::invalid_argument on degenerate specs.
    void validate() const;
};

using Point = std::array<double, 2>;  // y component unused for 1-D domains

/// Tensor-trapezoid quadrature over the closed domain.
struct QuadratureGrid {
    std::vector<Point> points;
    std::vector<double> weights;
};

QuadratureGrid domain_grid(const DomainSpec& domain);

/// Grid points strictly inside the open domain (no quadrature weights).
std::vector<Point> interior_grid_points(const DomainSpec& domain);

}  // namespace robex
