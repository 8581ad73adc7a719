#pragma once

#include <Eigen/Dense>

#include "robex/domain.hpp"

// Independent finite-difference reference for the heat equation with
// insulated (zero-flux) walls.  Second-order mirrored-ghost Laplacian on the
// same tensor grid as robex::domain_grid, Crank-Nicolson in time.  Nothing in
// here touches the spectral code paths it is used to check.
namespace fd {

// Marches `grid_values` (samples on domain_grid(domain).points, x fastest)
// over [0, horizon] in `steps` uniform steps; returns the final grid values.
Eigen::VectorXd crank_nicolson(const robex::DomainSpec& domain,
                               const Eigen::VectorXd& grid_values, double horizon,
                               int steps);

struct EigenPairs {
    Eigen::VectorXd values;   // sorted non-increasing
    Eigen::MatrixXd vectors;  // matching columns, unit Euclidean norm
};

// Full spectrum of the discrete interval operator.
EigenPairs interval_eigenpairs(const robex::DomainSpec& domain);

// Closed form for the same discrete spectrum: -4a/h^2 sin^2(k pi / (2(m-1))).
double interval_discrete_eigenvalue(const robex::DomainSpec& domain, int k);

}  // namespace fd
