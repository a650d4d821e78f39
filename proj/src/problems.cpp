#include "dcrm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dcrm/errors.hpp"
#include "dcrm/fd_reference.hpp"
#include "dcrm/parallel.hpp"
#include "dcrm/random.hpp"

namespace dcrm {

namespace {

constexpr double kPi = std::numbers::pi;

const ParamBox& source_box() {
  static const ParamBox box = {{1.0, 10.0}, {0.0, kPi / 2}, {0.0, kPi / 2}};
  return box;
}

}  // namespace

double source_case23(const SourceParams& p, double x, double y) {
  return p.alpha * kPi * kPi * (x * x + y * y) * std::sin(kPi * (x + p.beta) * (y + p.gamma));
}

double source_case1(double x, double y) {
  return 20.0 * kPi * kPi * (x * x + y * y) * std::sin(kPi * (x + kPi / 4) * (y + kPi / 4));
}

BoundarySpec boundary_case12() {
  const BoundaryFn one = [](double, double) { return 1.0; };
  const BoundaryFn right = [](double, double y) { return std::cos(2.0 * kPi * y); };
  return BoundarySpec::dirichlet(one, right, one, one);
}

BoundarySpec boundary_case3(const BoundaryParams& p) {
  const double eta = p.eta;
  // Arclength s in [0, 4): bottom x, right 1+y, top 2+(1-x), left 3+(1-y).
  const auto trace = [eta](double s) { return eta * std::cos(2.0 * kPi * s / 4.0); };
  const auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
  return BoundarySpec::dirichlet(
      [=](double x, double) { return trace(clamp01(x)); },
      [=](double, double y) { return trace(1.0 + clamp01(y)); },
      [=](double x, double) { return trace(2.0 + (1.0 - clamp01(x))); },
      [=](double, double y) { return trace(3.0 + (1.0 - clamp01(y))); });
}

std::vector<std::vector<double>> lhs_sample(const ParamBox& box, std::size_t n, std::uint64_t seed) {
  if (box.empty()) throw ConfigError("lhs_sample: empty box");
  if (n == 0) throw ConfigError("lhs_sample: sample count must be positive");
  for (const auto& [lo, hi] : box)
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
      throw ConfigError("lhs_sample: invalid bounds");
  Rng rng(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(box.size()));
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < box.size(); ++d) {
    for (std::size_t i = 0; i < n; ++i) strata[i] = i;
    rng.shuffle(strata.begin(), strata.end());
    const auto [lo, hi] = box[d];
    const double width = (hi - lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = lo + width * (static_cast<double>(strata[i]) + rng.uniform01());
      // Rounding can push the top of a stratum onto its upper edge.
      const double upper = lo + width * static_cast<double>(strata[i] + 1);
      if (v >= upper) v = std::nextafter(upper, lo);
      out[i][d] = v;
    }
  }
  return out;
}

std::vector<CaseParams> CaseDefinition::sample_params(std::size_t count, std::uint64_t seed) const {
  std::vector<CaseParams> params(count);
  if (case_id == CaseId::kCase1) return params;
  ParamBox box = source_box();
  if (case_id == CaseId::kCase3) box.emplace_back(-1.0, 1.0);
  const auto raw = lhs_sample(box, count, seed);
  for (std::size_t i = 0; i < count; ++i) {
    params[i].source = {raw[i][0], raw[i][1], raw[i][2]};
    if (case_id == CaseId::kCase3) params[i].boundary.eta = raw[i][3];
  }
  return params;
}

CaseDefinition case_definition(CaseId id) {
  CaseDefinition def;
  def.case_id = id;
  switch (id) {
    case CaseId::kCase1:
      def.source_fn = [](const CaseParams&, double x, double y) { return source_case1(x, y); };
      def.boundary_spec_fn = [](const CaseParams&) { return boundary_case12(); };
      def.train_count = 1;
      def.test_count = 1;
      def.batch_size = 1;
      break;
    case CaseId::kCase2:
      def.source_fn = [](const CaseParams& p, double x, double y) {
        return source_case23(p.source, x, y);
      };
      def.boundary_spec_fn = [](const CaseParams&) { return boundary_case12(); };
      def.train_count = 100;
      def.test_count = 1000;
      def.batch_size = 2;
      break;
    case CaseId::kCase3:
      def.source_fn = [](const CaseParams& p, double x, double y) {
        return source_case23(p.source, x, y);
      };
      def.boundary_spec_fn = [](const CaseParams& p) { return boundary_case3(p.boundary); };
      def.train_count = 250;
      def.test_count = 1000;
      def.batch_size = 2;
      break;
    default:
      throw ConfigError("unknown case id " + std::to_string(static_cast<unsigned>(id)));
  }
  return def;
}

CaseId parse_case(const std::string& name) {
  if (name == "1" || name == "case1" || name == "Case1") return CaseId::kCase1;
  if (name == "2" || name == "case2" || name == "Case2") return CaseId::kCase2;
  if (name == "3" || name == "case3" || name == "Case3") return CaseId::kCase3;
  throw ConfigError("unknown case '" + name + "' (expected 1, 2 or 3)");
}

FieldBatch solve_labels(const FieldBatch& inputs) {
  const GridSpec grid(inputs.side());
  FieldBatch labels(inputs.n(), 1, inputs.side());
  parallel_for(inputs.n(), [&](std::size_t i) {
    const ScalarField2D mask = inputs.field(i, kMaskChannel);
    const BoundarySpec spec = dirichlet_from_mask(mask, grid);
    labels.set_field(i, 0, fd_solve(inputs.field(i, kSourceChannel), spec, grid));
  });
  return labels;
}

Dataset assemble_dataset(const CaseDefinition& def, const GridSpec& grid, std::size_t count,
                         std::uint64_t seed, bool with_labels,
                         const std::optional<NormStats>& stats) {
  if (count == 0) throw ConfigError("dataset needs at least one sample");
  const auto params = def.sample_params(count, seed);
  Dataset ds;
  ds.case_id = def.case_id;
  ds.seed = seed;
  ds.inputs = FieldBatch(count, 2, grid.points());
  FieldBatch labels;
  if (with_labels) labels = FieldBatch(count, 1, grid.points());
  parallel_for(count, [&](std::size_t i) {
    const CaseParams& p = params[i];
    ds.inputs.set_field(i, kSourceChannel, ScalarField2D::sample(grid, [&](double x, double y) {
      return def.source_fn(p, x, y);
    }));
    const BoundarySpec spec = def.boundary_spec_fn(p);
    ds.inputs.set_field(i, kMaskChannel, build_mask_channel(spec, grid).values);
    if (with_labels)
      labels.set_field(i, 0, fd_solve(ds.inputs.field(i, kSourceChannel), spec, grid));
  });
  if (with_labels) ds.outputs = std::move(labels);
  ds.norm_stats = stats ? *stats : compute_stats(ds.inputs);
  ds.validate();
  return ds;
}

}  // namespace dcrm
