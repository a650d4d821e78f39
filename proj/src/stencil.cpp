#include "dcrm/stencil.hpp"

#include "dcrm/errors.hpp"

namespace dcrm {

StencilKernel laplacian_kernel(const GridSpec& grid) {
  const double h = grid.spacing();
  return {{{{0, 1, 0}, {1, -4, 1}, {0, 1, 0}}}, 1.0 / (h * h)};
}

StencilKernel grad_x_kernel(const GridSpec& grid) {
  return {{{{0, 0, 0}, {-1, 0, 1}, {0, 0, 0}}}, 1.0 / (2.0 * grid.spacing())};
}

StencilKernel grad_y_kernel(const GridSpec& grid) {
  return {{{{0, -1, 0}, {0, 0, 0}, {0, 1, 0}}}, 1.0 / (2.0 * grid.spacing())};
}

StencilKernel identity_kernel() { return {{{{0, 0, 0}, {0, 1, 0}, {0, 0, 0}}}, 1.0}; }

ScalarField2D apply_stencil(const StencilKernel& kernel, const ScalarField2D& padded) {
  if (padded.rows() < 3 || padded.cols() < 3)
    throw ShapeError("apply_stencil: padded field must be at least 3x3");
  const std::size_t rows = padded.rows() - 2;
  const std::size_t cols = padded.cols() - 2;
  ScalarField2D out(rows, cols);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double w = kernel.weights[a][b];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) += w * padded(i + a, j + b);
    }
  }
  for (double& v : out.values()) v *= kernel.scale;
  return out;
}

ScalarField2D stencil_adjoint(const StencilKernel& kernel, const ScalarField2D& cotangent) {
  if (cotangent.rows() == 0 || cotangent.cols() == 0)
    throw ShapeError("stencil_adjoint: empty cotangent");
  const std::size_t rows = cotangent.rows();
  const std::size_t cols = cotangent.cols();
  ScalarField2D out(rows + 2, cols + 2);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double w = kernel.scale * kernel.weights[a][b];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i + a, j + b) += w * cotangent(i, j);
    }
  }
  return out;
}

}  // namespace dcrm
