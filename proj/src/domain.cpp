#include "robex/domain.hpp"

#include <stdexcept>
#include <string>

namespace robex {

void DomainSpec::validate() const {
    const std::size_t want = kind == DomainKind::Interval ? 1 : 2;
    if (lengths.size() != want)
        throw std::invalid_argument("domain.lengths: expected " + std::to_string(want) +
                                    " entries, got " + std::to_string(lengths.size()));
    for (double len : lengths)
        if (!(len > 0.0)) throw std::invalid_argument("domain.lengths: must be strictly positive");
    if (!(diffusivity > 0.0))
        throw std::invalid_argument("domain.diffusivity: must be strictly positive");
    if (grid_resolution < 4)
        throw std::invalid_argument("domain.grid_resolution: must be at least 4");
}

QuadratureGrid domain_grid(const DomainSpec& domain) {
    domain.validate();
    const int m = domain.grid_resolution;
    QuadratureGrid grid;
    if (domain.kind == DomainKind::Interval) {
        const double h = domain.lengths[0] / (m - 1);
        grid.points.reserve(m);
        grid.weights.reserve(m);
        for (int i = 0; i < m; ++i) {
            grid.points.push_back({i * h, 0.0});
            grid.weights.push_back((i == 0 || i == m - 1) ? h / 2 : h);
        }
    } else {
        const double hx = domain.lengths[0] / (m - 1);
        const double hy = domain.lengths[1] / (m - 1);
        grid.points.reserve(static_cast<std::size_t>(m) * m);
        grid.weights.reserve(static_cast<std::size_t>(m) * m);
        for (int j = 0; j < m; ++j) {
            const double wy = (j == 0 || j == m - 1) ? hy / 2 : hy;
            for (int i = 0; i < m; ++i) {
                const double wx = (i == 0 || i == m - 1) ? hx / 2 : hx;
                grid.points.push_back({i * hx, j * hy});
                grid.weights.push_back(wx * wy);
            }
        }
    }
    return grid;
}

std::vector<Point> interior_grid_points(const DomainSpec& domain) {
    domain.validate();
    const int m = domain.grid_resolution;
    std::vector<Point> pts;
    if (domain.kind == DomainKind::Interval) {
        const double h = domain.lengths[0] / (m - 1);
        for (int i = 1; i + 1 < m; ++i) pts.push_back({i * h, 0.0});
    } else {
        const double hx = domain.lengths[0] / (m - 1);
        const double hy = domain.lengths[1] / (m - 1);
        for (int j = 1; j + 1 < m; ++j)
            for (int i = 1; i + 1 < m; ++i) pts.push_back({i * hx, j * hy});
    }
    return pts;
}

}  // namespace robex
