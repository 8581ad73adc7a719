#include "robex/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "robex/kernels.hpp"

namespace robex {
namespace {

struct SnappedPiece {
    Edge edge;
    int lo;
    int hi;
};

double edge_length(const DomainSpec& domain, Edge edge) {
    return (edge == Edge::Left || edge == Edge::Right) ? domain.lengths[1] : domain.lengths[0];
}

Point edge_point(const DomainSpec& domain, Edge edge, double t) {
    switch (edge) {
        case Edge::Left: return {0.0, t};
        case Edge::Right: return {domain.lengths[0], t};
        case Edge::Bottom: return {t, 0.0};
        case Edge::Top: return {t, domain.lengths[1]};
    }
    return {0.0, 0.0};
}

bool node_less(const BoundaryNode& a, const BoundaryNode& b) {
    if (a.edge != b.edge) return static_cast<int>(a.edge) < static_cast<int>(b.edge);
    return a.grid_index < b.grid_index;
}

bool same_node(const BoundaryNode& a, const BoundaryNode& b) {
    return a.edge == b.edge && a.grid_index == b.grid_index;
}

bool same_nodes(const BoundaryRegion& a, const BoundaryRegion& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        if (!same_node(a.nodes[i], b.nodes[i])) return false;
    }
    return true;
}

RegionPtr build_from_snapped(const DomainSpec& domain, std::vector<SnappedPiece> snapped) {
    std::sort(snapped.begin(), snapped.end(), [](const SnappedPiece& a, const SnappedPiece& b) {
        if (a.edge != b.edge) return static_cast<int>(a.edge) < static_cast<int>(b.edge);
        return a.lo < b.lo;
    });
    for (std::size_t i = 1; i < snapped.size(); ++i) {
        if (snapped[i].edge == snapped[i - 1].edge && snapped[i].lo <= snapped[i - 1].hi) {
            throw std::invalid_argument(
                std::string("boundary region: pieces on edge ") + edge_name(snapped[i].edge) +
                " overlap after snapping to the edge grid");
        }
    }

    auto region = std::make_shared<BoundaryRegion>();
    region->domain = domain;
    for (const SnappedPiece& p : snapped) {
        const double h = edge_length(domain, p.edge) / (domain.grid_resolution - 1);
        region->pieces.push_back({p.edge, p.lo * h, p.hi * h});
        for (int i = p.lo; i <= p.hi; ++i) {
            BoundaryNode node;
            node.edge = p.edge;
            node.grid_index = i;
            node.position = edge_point(domain, p.edge, i * h);
            node.weight = (i == p.lo || i == p.hi) ? h / 2 : h;
            region->nodes.push_back(node);
        }
    }
    return region;
}

RegionPtr build_interval_region(const DomainSpec& domain, const std::vector<BoundaryPiece>& pieces) {
    bool seen[2] = {false, false};
    auto region = std::make_shared<BoundaryRegion>();
    region->domain = domain;
    for (const BoundaryPiece& p : pieces) {
        if (p.edge != Edge::Left && p.edge != Edge::Right) {
            throw std::invalid_argument(
                "boundary region: interval boundaries only have Left and Right endpoints");
        }
        bool& flag = seen[p.edge == Edge::Left ? 0 : 1];
        if (flag) {
            throw std::invalid_argument(std::string("boundary region: endpoint ") +
                                        edge_name(p.edge) + " listed twice");
        }
        flag = true;
    }
    // Endpoint evaluations are weighted by the counting measure.
    for (Edge edge : {Edge::Left, Edge::Right}) {
        if (!seen[edge == Edge::Left ? 0 : 1]) continue;
        region->pieces.push_back({edge, 0.0, 0.0});
        BoundaryNode node;
        node.edge = edge;
        node.grid_index = 0;
        node.position = edge == Edge::Left ? Point{0.0, 0.0} : Point{domain.lengths[0], 0.0};
        node.weight = 1.0;
        region->nodes.push_back(node);
    }
    return region;
}

std::vector<double> row_major_trace_table(const SpectralBasis& basis,
                                          const BoundaryRegion& region) {
    const std::size_t rows = region.nodes.size();
    const std::size_t cols = static_cast<std::size_t>(basis.mode_count());
    std::vector<double> table(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            table[i * cols + k] = basis.eigenfunction(static_cast<int>(k), region.nodes[i].position);
        }
    }
    return table;
}

}  // namespace

const char* edge_name(Edge edge) {
    switch (edge) {
        case Edge::Left: return "left";
        case Edge::Right: return "right";
        case Edge::Bottom: return "bottom";
        case Edge::Top: return "top";
    }
    return "?";
}

double BoundaryRegion::measure() const {
    double total = 0.0;
    for (const BoundaryNode& node : nodes) total += node.weight;
    return total;
}

std::vector<Point> BoundaryRegion::node_positions() const {
    std::vector<Point> pts;
    pts.reserve(nodes.size());
    for (const BoundaryNode& node : nodes) pts.push_back(node.position);
    return pts;
}

std::vector<double> BoundaryRegion::node_weights() const {
    std::vector<double> w;
    w.reserve(nodes.size());
    for (const BoundaryNode& node : nodes) w.push_back(node.weight);
    return w;
}

RegionPtr make_boundary_region(const DomainSpec& domain, std::vector<BoundaryPiece> pieces) {
    domain.validate();
    if (pieces.empty()) {
        throw std::invalid_argument("boundary region: needs at least one piece");
    }
    if (domain.kind == DomainKind::Interval) {
        return build_interval_region(domain, pieces);
    }

    std::vector<SnappedPiece> snapped;
    snapped.reserve(pieces.size());
    for (const BoundaryPiece& p : pieces) {
        const double len = edge_length(domain, p.edge);
        if (!(p.lo >= -1e-9 && p.hi <= len + 1e-9 && p.lo < p.hi)) {
            throw std::invalid_argument(std::string("boundary region: piece on edge ") +
                                        edge_name(p.edge) + " must satisfy 0 <= lo < hi <= " +
                                        std::to_string(len));
        }
        const double h = len / (domain.grid_resolution - 1);
        const int lo = std::clamp(static_cast<int>(std::lround(p.lo / h)), 0,
                                  domain.grid_resolution - 1);
        const int hi = std::clamp(static_cast<int>(std::lround(p.hi / h)), 0,
                                  domain.grid_resolution - 1);
        if (hi <= lo) {
            throw std::invalid_argument(std::string("boundary region: piece on edge ") +
                                        edge_name(p.edge) +
                                        " snaps to an empty interval on the edge grid");
        }
        snapped.push_back({p.edge, lo, hi});
    }
    return build_from_snapped(domain, std::move(snapped));
}

RegionPtr full_boundary(const DomainSpec& domain) {
    domain.validate();
    if (domain.kind == DomainKind::Interval) {
        return make_boundary_region(domain, {{Edge::Left, 0.0, 0.0}, {Edge::Right, 0.0, 0.0}});
    }
    return make_boundary_region(domain, {{Edge::Left, 0.0, domain.lengths[1]},
                                         {Edge::Right, 0.0, domain.lengths[1]},
                                         {Edge::Bottom, 0.0, domain.lengths[0]},
                                         {Edge::Top, 0.0, domain.lengths[0]}});
}

InflatedRegion inflate_region(const BoundaryRegion& region, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("boundary region: inflation radius must be positive");
    }
    const auto distance_to_piece = [&](const Point& p, const BoundaryPiece& piece) {
        if (region.domain.kind == DomainKind::Interval) {
            const double x = piece.edge == Edge::Left ? 0.0 : region.domain.lengths[0];
            return std::abs(p[0] - x);
        }
        const Point a = edge_point(region.domain, piece.edge, piece.lo);
        const Point b = edge_point(region.domain, piece.edge, piece.hi);
        // Pieces are axis-aligned segments, so the projection is a clamp.
        const double cx = std::clamp(p[0], std::min(a[0], b[0]), std::max(a[0], b[0]));
        const double cy = std::clamp(p[1], std::min(a[1], b[1]), std::max(a[1], b[1]));
        return std::hypot(p[0] - cx, p[1] - cy);
    };

    InflatedRegion out;
    out.radius = radius;
    const std::vector<Point> interior = interior_grid_points(region.domain);
    for (const Point& p : interior) {
        double dist = std::numeric_limits<double>::infinity();
        for (const BoundaryPiece& piece : region.pieces) {
            dist = std::min(dist, distance_to_piece(p, piece));
        }
        if (dist <= radius + 1e-12) out.points.push_back(p);
    }
    out.covers_domain = out.points.size() == interior.size();
    return out;
}

bool subset_of(const BoundaryRegion& inner, const BoundaryRegion& outer) {
    // Both node lists are sorted by (edge, grid_index); one merge pass suffices.
    std::size_t j = 0;
    for (const BoundaryNode& node : inner.nodes) {
        while (j < outer.nodes.size() && node_less(outer.nodes[j], node)) ++j;
        if (j == outer.nodes.size() || !same_node(outer.nodes[j], node)) return false;
    }
    return true;
}

BoundaryField zero_boundary_field(RegionPtr region) {
    if (!region) throw std::invalid_argument("boundary field: region must not be null");
    const std::size_t n = region->nodes.size();
    return BoundaryField{std::move(region), std::vector<double>(n, 0.0)};
}

double boundary_inner(const BoundaryField& a, const BoundaryField& b) {
    if (!a.region || !b.region || !same_nodes(*a.region, *b.region)) {
        throw std::invalid_argument("boundary inner product: fields live on different regions");
    }
    const std::vector<double> w = a.region->node_weights();
    return kernels::weighted_dot(w.data(), a.values.data(), b.values.data(), w.size());
}

double boundary_norm(const BoundaryField& a) { return std::sqrt(boundary_inner(a, a)); }

Eigen::MatrixXd trace_matrix(const SpectralBasis& basis, const BoundaryRegion& region) {
    return evaluation_matrix(basis, region.node_positions());
}

BoundaryField trace_to_boundary(const StateField& state, RegionPtr region) {
    if (!region) throw std::invalid_argument("trace: region must not be null");
    BoundaryField field;
    field.values = evaluate(state, region->node_positions());
    field.region = std::move(region);
    return field;
}

BoundaryField restrict_trace(const BoundaryField& field, RegionPtr target) {
    if (!target) throw std::invalid_argument("restriction: region must not be null");
    BoundaryField out = zero_boundary_field(target);
    std::size_t j = 0;
    for (std::size_t i = 0; i < target->nodes.size(); ++i) {
        while (j < field.region->nodes.size() && node_less(field.region->nodes[j], target->nodes[i]))
            ++j;
        if (j == field.region->nodes.size() || !same_node(field.region->nodes[j], target->nodes[i])) {
            throw std::invalid_argument("restriction: target is not a sub-region of the field");
        }
        out.values[i] = field.values[j];
    }
    return out;
}

BoundaryField adjoint_restrict(const BoundaryField& field, RegionPtr outer) {
    if (!outer) throw std::invalid_argument("restriction adjoint: region must not be null");
    BoundaryField out = zero_boundary_field(outer);
    std::size_t j = 0;
    for (std::size_t i = 0; i < field.region->nodes.size(); ++i) {
        const BoundaryNode& node = field.region->nodes[i];
        while (j < outer->nodes.size() && node_less(outer->nodes[j], node)) ++j;
        if (j == outer->nodes.size() || !same_node(outer->nodes[j], node)) {
            throw std::invalid_argument("restriction adjoint: field region is not a sub-region");
        }
        // Weight ratio makes <restrict(f), g>_inner == <f, adjoint(g)>_outer exact.
        out.values[j] = node.weight / outer->nodes[j].weight * field.values[i];
    }
    return out;
}

StateField adjoint_trace(const BoundaryField& field, BasisPtr basis) {
    if (!basis) throw std::invalid_argument("trace adjoint: basis must not be null");
    const std::size_t rows = field.region->nodes.size();
    const std::size_t cols = static_cast<std::size_t>(basis->mode_count());
    const std::vector<double> table = row_major_trace_table(*basis, *field.region);
    std::vector<double> weighted(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        weighted[i] = field.region->nodes[i].weight * field.values[i];
    }
    std::vector<double> coeffs(cols, 0.0);
    kernels::matvec_transpose(table.data(), rows, cols, weighted.data(), coeffs.data());
    return StateField{std::move(basis), std::move(coeffs)};
}

StateField extend_from_boundary(const BoundaryField& field, BasisPtr basis, double tolerance) {
    if (!basis) throw std::invalid_argument("extension: basis must not be null");
    const Eigen::Index rows = static_cast<Eigen::Index>(field.region->nodes.size());
    const Eigen::Index cols = basis->mode_count();

    Eigen::MatrixXd T = trace_matrix(*basis, *field.region);
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(field.values.data(), rows);

    // Minimize sum_k (1 + |lambda_k|) c_k^2 subject to T c = h. Substituting
    // c = D^{-1} d with D_k = sqrt(1 + |lambda_k|) turns this into a plain
    // minimum-norm least-squares problem for d.
    Eigen::VectorXd inv_d(cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        inv_d[k] = 1.0 / std::sqrt(1.0 + std::abs(basis->eigenvalues[static_cast<std::size_t>(k)]));
    }
    Eigen::MatrixXd M = T * inv_d.asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    Eigen::VectorXd c = inv_d.asDiagonal() * svd.solve(h).eval();

    const std::vector<double> w = field.region->node_weights();
    Eigen::VectorXd r = T * c - h;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        num += w[static_cast<std::size_t>(i)] * r[i] * r[i];
        den += w[static_cast<std::size_t>(i)] * h[i] * h[i];
    }
    const double residual = std::sqrt(num) / std::max(1.0, std::sqrt(den));
    if (residual > tolerance) {
        throw ExtensionError(
            "extension: boundary field is not resolvable in this basis (relative trace residual " +
                std::to_string(residual) + ")",
            residual);
    }
    return StateField{std::move(basis),
                      std::vector<double>(c.data(), c.data() + static_cast<std::size_t>(cols))};
}

}  // namespace robex
