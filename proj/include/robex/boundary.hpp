#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

#include "robex/domain.hpp"
#include "robex/spectral.hpp"

namespace robex {

/// Boundary components. An interval only has Left (x = 0) and Right (x = L).
/// Rectangle edges are parameterized by arclength: Left/Right by y, Bottom/Top
/// by x, each starting at the lower corner.
enum class Edge { Left = 0, Right = 1, Bottom = 2, Top = 3 };

const char* edge_name(Edge edge);

/// A closed sub-interval [lo, hi] of one edge, in the edge parameter. On an
/// interval domain the piece is the single endpoint and lo/hi are ignored.
struct BoundaryPiece {
    Edge edge = Edge::Left;
    double lo = 0.0;
    double hi = 0.0;
};

/// A quadrature node on the boundary. Nodes live on the per-edge uniform grid
/// with grid_resolution cells; grid_index is the position on that grid, so
/// (edge, grid_index) identifies a node exactly and region inclusion can be
/// decided without floating-point comparisons. Corner points shared by two
/// edges appear once per edge, each carrying that edge's trapezoid weight.
struct BoundaryNode {
    Edge edge = Edge::Left;
    int grid_index = 0;
    Point position{0.0, 0.0};
    double weight = 0.0;
};

/// A sub-region of the boundary together with its quadrature rule. Pieces are
/// snapped to the edge grid; weights form the composite trapezoid rule per
/// piece (endpoint weight h/2, interior weight h). Interval endpoints carry
/// weight 1, i.e. the counting measure on the two-point boundary.
struct BoundaryRegion {
    DomainSpec domain;
    std::vector<BoundaryPiece> pieces;  // snapped, sorted by (edge, lo)
    std::vector<BoundaryNode> nodes;    // sorted by (edge, grid_index)

    int node_count() const { return static_cast<int>(nodes.size()); }
    double measure() const;

    std::vector<Point> node_positions() const;
    std::vector<double> node_weights() const;
};

using RegionPtr = std::shared_ptr<const BoundaryRegion>;

/// Builds a region from pieces. Pieces on the same edge must be disjoint after
/// snapping (they may not even share an endpoint node); a piece that snaps to
/// an empty interval is an error.
RegionPtr make_boundary_region(const DomainSpec& domain, std::vector<BoundaryPiece> pieces);

/// The whole boundary: both endpoints of an interval, all four rectangle edges.
RegionPtr full_boundary(const DomainSpec& domain);

/// Interior collar around a boundary region: the interior grid points within
/// distance `radius` of the region. The region lies in the closure of the
/// collar whenever radius exceeds the grid spacing.
struct InflatedRegion {
    std::vector<Point> points;
    double radius = 0.0;
    bool covers_domain = false;  // every interior grid point ended up inside
};

InflatedRegion inflate_region(const BoundaryRegion& region, double radius);

/// True when every node of `inner` is a node of `outer`. Regions built from
/// nested snapped pieces compare true; the node weights of the inner region
/// are then bounded by the outer ones at shared nodes.
bool subset_of(const BoundaryRegion& inner, const BoundaryRegion& outer);

/// A function on a region's nodes, one value per node in node order.
struct BoundaryField {
    RegionPtr region;
    std::vector<double> values;
};

BoundaryField zero_boundary_field(RegionPtr region);

/// Quadrature inner product sum_i w_i a_i b_i; the fields must live on regions
/// with identical node sets.
double boundary_inner(const BoundaryField& a, const BoundaryField& b);
double boundary_norm(const BoundaryField& a);

/// Rows are region nodes, columns are basis modes: T[i][k] = phi_k(node_i).
Eigen::MatrixXd trace_matrix(const SpectralBasis& basis, const BoundaryRegion& region);

/// Dirichlet trace of the spectral expansion on the region's nodes.
BoundaryField trace_to_boundary(const StateField& state, RegionPtr region);

/// Restriction of a boundary field to a sub-region (node selection). The
/// target must satisfy subset_of(*target, *field.region).
BoundaryField restrict_trace(const BoundaryField& field, RegionPtr target);

/// Adjoint of restriction with respect to the two quadrature inner products:
/// matched nodes get value (w_inner / w_outer) * g, all others zero.
BoundaryField adjoint_restrict(const BoundaryField& field, RegionPtr outer);

/// Adjoint of the trace with respect to the region quadrature inner product
/// and the L2(Omega) coefficient inner product: coefficients = T^T W g.
StateField adjoint_trace(const BoundaryField& field, BasisPtr basis);

/// Raised when a boundary field cannot be matched by any spectral expansion
/// within tolerance.
class ExtensionError : public std::runtime_error {
   public:
    ExtensionError(const std::string& message, double residual)
        : std::runtime_error(message), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

/// Right inverse of the trace: among all expansions whose trace matches the
/// field on the region's nodes, returns the one with minimal weighted
/// coefficient norm sum_k (1 + |lambda_k|) c_k^2 (a smoothness proxy, so the
/// extension does not dump energy into high modes). Throws ExtensionError if
/// the weighted relative trace residual exceeds `tolerance`.
StateField extend_from_boundary(const BoundaryField& field, BasisPtr basis,
                                double tolerance = 1e-8);

}  // namespace robex
