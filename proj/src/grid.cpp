#include "dcrm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcrm/errors.hpp"

namespace dcrm {

GridSpec::GridSpec(std::size_t points_per_side) : points_(points_per_side) {
  if (points_per_side < 3)
    throw ConfigError("grid needs at least 3 points per side, got " +
                      std::to_string(points_per_side));
  spacing_ = 1.0 / static_cast<double>(points_per_side - 1);
}

ScalarField2D::ScalarField2D(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

ScalarField2D::ScalarField2D(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw ShapeError("field payload does not match extents");
}

bool ScalarField2D::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

FieldBatch::FieldBatch(std::size_t n, std::size_t channels, std::size_t side, double fill)
    : n_(n), channels_(channels), side_(side), values_(n * channels * side * side, fill) {}

std::span<double> FieldBatch::plane(std::size_t i, std::size_t c) {
  return std::span<double>(values_).subspan((i * channels_ + c) * plane_size(), plane_size());
}

std::span<const double> FieldBatch::plane(std::size_t i, std::size_t c) const {
  return std::span<const double>(values_).subspan((i * channels_ + c) * plane_size(),
                                                  plane_size());
}

ScalarField2D FieldBatch::field(std::size_t i, std::size_t c) const {
  auto p = plane(i, c);
  return ScalarField2D(side_, side_, std::vector<double>(p.begin(), p.end()));
}

void FieldBatch::set_field(std::size_t i, std::size_t c, const ScalarField2D& f) {
  if (f.rows() != side_ || f.cols() != side_) throw ShapeError("field does not match batch side");
  std::copy(f.values().begin(), f.values().end(), plane(i, c).begin());
}

FieldBatch FieldBatch::gather(std::span<const std::size_t> indices) const {
  FieldBatch out(indices.size(), channels_, side_);
  const std::size_t stride = channels_ * plane_size();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n_) throw ShapeError("gather index out of range");
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(indices[k] * stride), stride,
                out.values_.begin() + static_cast<std::ptrdiff_t>(k * stride));
  }
  return out;
}

bool FieldBatch::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

NormStats compute_stats(const FieldBatch& batch) {
  NormStats stats(batch.channels());
  const double count = static_cast<double>(batch.n() * batch.plane_size());
  for (std::size_t c = 0; c < batch.channels(); ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.n(); ++i)
      for (double v : batch.plane(i, c)) sum += v;
    const double mean = sum / count;
    double sq = 0.0;
    for (std::size_t i = 0; i < batch.n(); ++i)
      for (double v : batch.plane(i, c)) sq += (v - mean) * (v - mean);
    stats[c] = {mean, std::sqrt(sq / count)};
  }
  return stats;
}

namespace {

void check_stats(const FieldBatch& batch, const NormStats& stats) {
  if (stats.size() != batch.channels())
    throw ShapeError("normalization statistics do not match channel count");
  for (const auto& s : stats)
    if (!(s.std > 0.0) || !std::isfinite(s.std)) throw ConfigError("degenerate channel");
}

}  // namespace

FieldBatch normalize(const FieldBatch& batch, const NormStats& stats) {
  check_stats(batch, stats);
  FieldBatch out = batch;
  for (std::size_t i = 0; i < batch.n(); ++i)
    for (std::size_t c = 0; c < batch.channels(); ++c)
      for (double& v : out.plane(i, c)) v = (v - stats[c].mean) / stats[c].std;
  return out;
}

FieldBatch denormalize(const FieldBatch& batch, const NormStats& stats) {
  check_stats(batch, stats);
  FieldBatch out = batch;
  for (std::size_t i = 0; i < batch.n(); ++i)
    for (std::size_t c = 0; c < batch.channels(); ++c)
      for (double& v : out.plane(i, c)) v = v * stats[c].std + stats[c].mean;
  return out;
}

void Dataset::validate() const {
  if (inputs.channels() != 2) throw ConfigError("dataset inputs need 2 channels");
  if (inputs.side() < 3) throw ConfigError("dataset grid too small");
  if (outputs) {
    if (outputs->n() != inputs.n() || outputs->channels() != 1 ||
        outputs->side() != inputs.side())
      throw ConfigError("dataset outputs do not match inputs");
  }
  if (norm_stats.size() != inputs.channels())
    throw ConfigError("dataset normalization statistics missing");
  for (const auto& s : norm_stats)
    if (!(s.std > 0.0)) throw ConfigError("degenerate channel");
  if (!inputs.all_finite() || (outputs && !outputs->all_finite()))
    throw ConfigError("dataset contains non-finite values");
}

}  // namespace dcrm
