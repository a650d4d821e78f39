#include "dcrm/fd_reference.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "dcrm/errors.hpp"
#include "dcrm/stencil.hpp"

namespace dcrm {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void check_inputs(const ScalarField2D& f, const BoundarySpec& spec, const GridSpec& grid) {
  if (f.rows() != grid.points() || f.cols() != grid.points())
    throw ShapeError("source field does not match grid");
  if (!f.all_finite()) throw ConfigError("source field contains non-finite values");
  if (!spec.is_all_dirichlet()) throw ConfigError("solver requires Dirichlet data on every edge");
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b) {
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) throw Error("sparse factorization failed");
  Eigen::VectorXd x = solver.solve(b);
  if (solver.info() != Eigen::Success || !x.allFinite()) throw Error("sparse solve failed");
  return x;
}

}  // namespace

ScalarField2D fd_solve(const ScalarField2D& f, const BoundarySpec& spec, const GridSpec& grid) {
  check_inputs(f, spec, grid);
  const std::size_t n = grid.points();
  ScalarField2D u(n, n);
  enforce_dirichlet(u, spec, grid);
  if (n == 2) return u;
  const std::size_t m = n - 2;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const auto index = [m](std::size_t r, std::size_t c) {
    return static_cast<int>((r - 1) * m + (c - 1));
  };

  // (4u - sum of neighbours)/h^2 = -f, boundary neighbours moved to the rhs.
  std::vector<Triplet> triplets;
  triplets.reserve(5 * m * m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m * m));
  for (std::size_t r = 1; r + 1 < n; ++r) {
    for (std::size_t c = 1; c + 1 < n; ++c) {
      const int row = index(r, c);
      triplets.emplace_back(row, row, 4.0 * inv_h2);
      double b = -f(r, c);
      const std::size_t nr[4] = {r - 1, r + 1, r, r};
      const std::size_t nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        const bool interior = nr[k] > 0 && nr[k] + 1 < n && nc[k] > 0 && nc[k] + 1 < n;
        if (interior)
          triplets.emplace_back(row, index(nr[k], nc[k]), -inv_h2);
        else
          b += u(nr[k], nc[k]) * inv_h2;
      }
      rhs[row] = b;
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(m * m), static_cast<Eigen::Index>(m * m));
  a.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd x = solve_spd(a, rhs);
  for (std::size_t r = 1; r + 1 < n; ++r)
    for (std::size_t c = 1; c + 1 < n; ++c) u(r, c) = x[index(r, c)];
  return u;
}

ScalarField2D discrete_energy_minimizer(const ScalarField2D& f, const BoundarySpec& spec,
                                        const GridSpec& grid, const QuadratureRule& rule,
                                        DirichletGhost ghost) {
  check_inputs(f, spec, grid);
  const std::size_t n = grid.points();
  if (rule.weights_2d.rows() != n) throw ShapeError("quadrature rule does not match grid");
  const std::size_t p = n + 2;
  const PaddingMap pad(spec, grid, ghost);
  const auto fixed = dirichlet_node_mask(spec, grid);

  // Free-node numbering.
  std::vector<int> free_index(n * n, -1);
  int free_count = 0;
  for (std::size_t k = 0; k < n * n; ++k)
    if (!fixed[k]) free_index[k] = free_count++;

  ScalarField2D u(n, n);
  enforce_dirichlet(u, spec, grid);
  if (free_count == 0) return u;

  // Each gradient component at node k is an affine function of the free
  // values: row k of D z + c.
  const StencilKernel kernels[2] = {grad_x_kernel(grid), grad_y_kernel(grid)};
  const auto& entries = pad.entries();
  SparseMatrix hessian(free_count, free_count);
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(free_count);

  for (const StencilKernel& kernel : kernels) {
    std::vector<Triplet> d_triplets;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n * n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < n; ++col) {
        const int row = static_cast<int>(r * n + col);
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const double w = kernel.coefficient(a, b);
            if (w == 0.0) continue;
            const auto& e = entries[(r + static_cast<std::size_t>(a)) * p + col + static_cast<std::size_t>(b)];
            c[row] += w * e.constant;
            if (e.src0 >= 0) d_triplets.emplace_back(row, free_index[e.src0], w * e.coef0);
            if (e.src1 >= 0) d_triplets.emplace_back(row, free_index[e.src1], w * e.coef1);
          }
        }
      }
    }
    SparseMatrix d(static_cast<Eigen::Index>(n * n), free_count);
    d.setFromTriplets(d_triplets.begin(), d_triplets.end());
    Eigen::VectorXd weights(static_cast<Eigen::Index>(n * n));
    for (std::size_t k = 0; k < n * n; ++k) weights[static_cast<Eigen::Index>(k)] = rule.weights_2d.values()[k];
    const SparseMatrix wd = weights.asDiagonal() * d;
    hessian += SparseMatrix(d.transpose() * wd);
    linear += wd.transpose() * c;
  }
  for (std::size_t k = 0; k < n * n; ++k)
    if (free_index[k] >= 0) linear[free_index[k]] += rule.weights_2d.values()[k] * f.values()[k];

  const Eigen::VectorXd z = solve_spd(hessian, -linear);
  for (std::size_t k = 0; k < n * n; ++k)
    if (free_index[k] >= 0) u.values()[k] = z[free_index[k]];
  return u;
}

}  // namespace dcrm
