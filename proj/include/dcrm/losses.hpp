#pragma once

#include <string_view>
#include <vector>

#include "dcrm/boundary.hpp"
#include "dcrm/grid.hpp"
#include "dcrm/quadrature.hpp"

namespace dcrm {

enum class Method { kCnn, kCpinn, kDcrm };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Scalar loss, its per-sample terms, and the gradient of the scalar with
/// respect to every entry of the prediction.
struct LossValue {
  double value = 0.0;
  std::vector<double> per_sample;
  FieldBatch gradient;
};

/// Boundary data of one sample, prepared once and reused every step.
class SampleBoundary {
 public:
  SampleBoundary(BoundarySpec spec, const GridSpec& grid,
                 DirichletGhost ghost = DirichletGhost::kLinearExtrapolation);

  const BoundarySpec& spec() const noexcept { return spec_; }
  /// Ghost padding that reads Dirichlet nodes from the field.
  const PaddingMap& padding() const noexcept { return padding_; }
  const std::vector<std::uint8_t>& fixed() const noexcept { return fixed_; }

  /// Overwrites the Dirichlet nodes of one field with g.
  void enforce(std::span<double> u) const;
  /// Adjoint of enforce: zeroes the entries of Dirichlet nodes.
  void enforce_adjoint(std::span<double> grad) const;

 private:
  BoundarySpec spec_;
  PaddingMap padding_;
  std::vector<std::uint8_t> fixed_;
  std::vector<double> fixed_values_;
};

/// One SampleBoundary per sample, read from the mask channel of the inputs.
std::vector<SampleBoundary> boundaries_from_masks(const FieldBatch& inputs, DirichletGhost ghost);

void enforce_boundaries(FieldBatch& pred, const std::vector<SampleBoundary>& bcs);

/// (1/(DOF^2 N)) * sum (pred - truth)^2.
LossValue supervised_loss(const FieldBatch& pred, const FieldBatch& truth);

/// laplace_h(pred) - F at interior nodes, zero on the boundary ring.
FieldBatch cpinn_residual(const FieldBatch& pred, const FieldBatch& source,
                          const std::vector<SampleBoundary>& bcs);
/// (1/(DOF^2 N)) * sum residual^2.
LossValue cpinn_loss(const FieldBatch& pred, const FieldBatch& source,
                     const std::vector<SampleBoundary>& bcs);

struct EnergyOptions {
  QuadratureKind quadrature = QuadratureKind::kTrapezoid;
  /// +1 for laplace(u) = f, -1 for -laplace(u) = f.
  double source_sign = 1.0;
};

/// Per sample E = sum_jk W (|grad_h U|^2/2 + sign*U*F) - sum_j w U g_N, with
/// central-difference gradients on the ghost-padded field; the loss is the
/// mean over samples. Throws ConfigError for Simpson on an even grid.
LossValue dcrm_energy(const FieldBatch& pred, const FieldBatch& source,
                      const std::vector<SampleBoundary>& bcs, const EnergyOptions& options);

/// sum (pred - truth)^2 over all samples and nodes.
double e_abs(const FieldBatch& pred, const FieldBatch& truth);
/// e_abs / sum truth^2. Throws ConfigError for an all-zero truth.
double e_abs_normalized(const FieldBatch& pred, const FieldBatch& truth);
/// Normalized error of each sample separately.
std::vector<double> e_abs_normalized_per_sample(const FieldBatch& pred, const FieldBatch& truth);

}  // namespace dcrm
