#include "dcrm/quadrature.hpp"

#include <string>

#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

// Integer Simpson pattern 1,4,2,4,...,2,4,1.
std::vector<int> simpson_pattern(std::size_t n) {
  if (n < 3 || n % 2 == 0)
    throw ConfigError("Simpson requires odd point count (got " + std::to_string(n) + ")");
  std::vector<int> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (i == 0 || i == n - 1) ? 1 : (i % 2 == 1 ? 4 : 2);
  return p;
}

std::vector<int> trapezoid_pattern(std::size_t n) {
  if (n < 2) throw ConfigError("trapezoid rule needs at least 2 points");
  std::vector<int> p(n, 2);
  p.front() = p.back() = 1;
  return p;
}

ScalarField2D outer(const std::vector<int>& p, double denominator) {
  const std::size_t n = p.size();
  ScalarField2D w(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) w(r, c) = static_cast<double>(p[r] * p[c]) / denominator;
  return w;
}

}  // namespace

QuadratureKind parse_quadrature(std::string_view name) {
  if (name == "simpson") return QuadratureKind::kSimpson;
  if (name == "trapezoid") return QuadratureKind::kTrapezoid;
  throw ConfigError("unknown quadrature '" + std::string(name) + "'");
}

std::string_view to_string(QuadratureKind kind) {
  return kind == QuadratureKind::kSimpson ? "simpson" : "trapezoid";
}

std::vector<double> simpson_weights_1d(std::size_t n) {
  const auto p = simpson_pattern(n);
  const double denom = 3.0 * static_cast<double>(n - 1);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = p[i] / denom;
  return w;
}

ScalarField2D simpson_weights_2d(std::size_t dof) {
  const double m = static_cast<double>(dof - 1);
  return outer(simpson_pattern(dof), 9.0 * m * m);
}

std::vector<double> trapezoid_weights_1d(std::size_t n) {
  const auto p = trapezoid_pattern(n);
  const double denom = 2.0 * static_cast<double>(n - 1);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = p[i] / denom;
  return w;
}

ScalarField2D trapezoid_weights_2d(std::size_t dof) {
  const double m = static_cast<double>(dof - 1);
  return outer(trapezoid_pattern(dof), 4.0 * m * m);
}

QuadratureRule QuadratureRule::make(QuadratureKind kind, const GridSpec& grid) {
  const std::size_t n = grid.points();
  if (kind == QuadratureKind::kSimpson)
    return {kind, simpson_weights_2d(n), simpson_weights_1d(n)};
  return {kind, trapezoid_weights_2d(n), trapezoid_weights_1d(n)};
}

double integrate_2d(const QuadratureRule& rule, std::span<const double> field) {
  const auto w = rule.weights_2d.values();
  if (field.size() != w.size()) throw ShapeError("integrate_2d: field does not match rule");
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * field[k];
  return sum;
}

double integrate_2d(const QuadratureRule& rule, const ScalarField2D& field) {
  if (field.rows() != rule.weights_2d.rows() || field.cols() != rule.weights_2d.cols())
    throw ShapeError("integrate_2d: field does not match rule");
  return integrate_2d(rule, field.values());
}

double integrate_boundary(const QuadratureRule& rule, std::span<const double> edge_values) {
  if (edge_values.size() != rule.weights_1d.size())
    throw ShapeError("integrate_boundary: edge does not match rule");
  double sum = 0.0;
  for (std::size_t k = 0; k < edge_values.size(); ++k) sum += rule.weights_1d[k] * edge_values[k];
  return sum;
}

}  // namespace dcrm
