#pragma once

#include "dcrm/boundary.hpp"
#include "dcrm/grid.hpp"
#include "dcrm/quadrature.hpp"

namespace dcrm {

/// Solves the 5-point system laplace_h(U) = f at interior nodes with U = g on
/// the boundary, by sparse Cholesky on the negated (positive definite) operator.
ScalarField2D fd_solve(const ScalarField2D& f, const BoundarySpec& spec, const GridSpec& grid);

/// Exact minimizer of the discrete energy
///   E(U) = sum_jk W_jk (|grad_h U|^2 / 2 + U f)
/// over the free nodes, with Dirichlet nodes fixed to g and gradients taken by
/// central differences on the ghost-padded field.
ScalarField2D discrete_energy_minimizer(const ScalarField2D& f, const BoundarySpec& spec,
                                        const GridSpec& grid, const QuadratureRule& rule,
                                        DirichletGhost ghost = DirichletGhost::kLinearExtrapolation);

}  // namespace dcrm
