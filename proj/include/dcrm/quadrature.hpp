#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dcrm/grid.hpp"

namespace dcrm {

enum class QuadratureKind { kSimpson, kTrapezoid };

QuadratureKind parse_quadrature(std::string_view name);
std::string_view to_string(QuadratureKind kind);

/// Composite Simpson weights on n equispaced points of [0,1]:
/// (1/(3(n-1))) * [1,4,2,4,...,2,4,1]. Requires odd n >= 3.
std::vector<double> simpson_weights_1d(std::size_t n);
/// Tensor-product Simpson weights with prefactor 1/(9(dof-1)^2).
ScalarField2D simpson_weights_2d(std::size_t dof);

std::vector<double> trapezoid_weights_1d(std::size_t n);
ScalarField2D trapezoid_weights_2d(std::size_t dof);

/// Domain weights W and edge weights w for a square grid on the unit square.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::kSimpson;
  ScalarField2D weights_2d;
  std::vector<double> weights_1d;

  static QuadratureRule make(QuadratureKind kind, const GridSpec& grid);
};

/// sum_jk W_jk * field_jk
double integrate_2d(const QuadratureRule& rule, const ScalarField2D& field);
double integrate_2d(const QuadratureRule& rule, std::span<const double> field);
/// sum_j w_j * edge_values_j along one edge.
double integrate_boundary(const QuadratureRule& rule, std::span<const double> edge_values);

}  // namespace dcrm
