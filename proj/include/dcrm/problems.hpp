#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcrm/boundary.hpp"
#include "dcrm/grid.hpp"

namespace dcrm {

/// Source family f = alpha*pi^2*(x^2+y^2)*sin(pi*(x+beta)*(y+gamma)).
struct SourceParams {
  double alpha = 1.0;  // [1, 10]
  double beta = 0.0;   // [0, pi/2]
  double gamma = 0.0;  // [0, pi/2]
};

/// Amplitude of the boundary trace g(z) = eta*cos(z).
struct BoundaryParams {
  double eta = 0.0;  // [-1, 1]
};

struct CaseParams {
  SourceParams source;
  BoundaryParams boundary;
};

/// All cases use the sign convention laplace(u) = f.
struct CaseDefinition {
  CaseId case_id = CaseId::kCase1;
  std::function<double(const CaseParams&, double x, double y)> source_fn;
  std::function<BoundarySpec(const CaseParams&)> boundary_spec_fn;
  std::size_t train_count = 1;
  std::size_t test_count = 1;
  std::size_t batch_size = 1;

  /// `count` parameter sets drawn by Latin hypercube sampling over the case's
  /// parameter box (Case 1 has a single fixed problem).
  std::vector<CaseParams> sample_params(std::size_t count, std::uint64_t seed) const;
};

CaseDefinition case_definition(CaseId id);
CaseId parse_case(const std::string& name);

double source_case1(double x, double y);
double source_case23(const SourceParams& p, double x, double y);

/// g = 1 except g = cos(2*pi*y) on the right edge x = 1 (Cases 1 and 2).
BoundarySpec boundary_case12();
/// g = eta*cos(2*pi*s/4), s the arclength along the boundary counterclockwise
/// from the corner (0,0).
BoundarySpec boundary_case3(const BoundaryParams& p);

using ParamBox = std::vector<std::pair<double, double>>;

/// Latin hypercube sample: in every dimension each of the n equal strata of
/// the box holds exactly one point. Deterministic for a given seed.
std::vector<std::vector<double>> lhs_sample(const ParamBox& box, std::size_t n, std::uint64_t seed);

/// Samples `count` problems of `def` on `grid`: channel 0 holds F, channel 1
/// the boundary mask. Labels come from the finite-difference solver when
/// requested. Normalization statistics are computed from the inputs unless
/// `stats` is given (test splits reuse the training statistics).
Dataset assemble_dataset(const CaseDefinition& def, const GridSpec& grid, std::size_t count,
                         std::uint64_t seed, bool with_labels,
                         const std::optional<NormStats>& stats = std::nullopt);

/// Labels for an existing input batch, one finite-difference solve per sample.
FieldBatch solve_labels(const FieldBatch& inputs);

}  // namespace dcrm
