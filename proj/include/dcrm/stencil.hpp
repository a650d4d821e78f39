#pragma once

#include <array>

#include "dcrm/grid.hpp"

namespace dcrm {

/// Fixed 3x3 finite-difference filter. `weights[a][b]` multiplies the padded
/// value at row offset a-1 (y) and column offset b-1 (x); the integer pattern
/// is kept apart from the grid-dependent `scale`.
struct StencilKernel {
  std::array<std::array<double, 3>, 3> weights{};
  double scale = 1.0;

  double coefficient(int a, int b) const { return scale * weights[a][b]; }
};

/// 5-point Laplacian [[0,1,0],[1,-4,1],[0,1,0]] / h^2.
StencilKernel laplacian_kernel(const GridSpec& grid);
/// Central difference in x: [[0,0,0],[-1,0,1],[0,0,0]] / (2h).
StencilKernel grad_x_kernel(const GridSpec& grid);
/// Central difference in y: [[0,-1,0],[0,0,0],[0,1,0]] / (2h).
StencilKernel grad_y_kernel(const GridSpec& grid);
StencilKernel identity_kernel();

/// Valid correlation (no kernel flip, stride 1): a (R+2)x(C+2) padded field
/// maps to an RxC field, out(i,j) = scale * sum_ab w[a][b] * padded(i+a, j+b).
ScalarField2D apply_stencil(const StencilKernel& kernel, const ScalarField2D& padded);

/// Transpose of apply_stencil: scatters an RxC cotangent onto a (R+2)x(C+2)
/// field so that <apply(k,u), w> == <u, adjoint(k,w)>.
ScalarField2D stencil_adjoint(const StencilKernel& kernel, const ScalarField2D& cotangent);

}  // namespace dcrm
