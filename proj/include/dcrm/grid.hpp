#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dcrm {

/// Uniform node grid on the unit square with both endpoints included,
/// so the spacing is 1/(points-1).
class GridSpec {
 public:
  explicit GridSpec(std::size_t points_per_side);

  std::size_t points() const noexcept { return points_; }
  double spacing() const noexcept { return spacing_; }
  /// Coordinate of node `index` along either axis.
  double coord(std::ptrdiff_t index) const noexcept {
    return static_cast<double>(index) / static_cast<double>(points_ - 1);
  }

  bool operator==(const GridSpec& other) const noexcept { return points_ == other.points_; }

 private:
  std::size_t points_;
  double spacing_;
};

/// Dense row-major 2D array. Row index runs along y, column index along x.
class ScalarField2D {
 public:
  ScalarField2D() = default;
  ScalarField2D(std::size_t rows, std::size_t cols, double fill = 0.0);
  ScalarField2D(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Samples `fn(x, y)` at every node of `grid`.
  template <class Fn>
  static ScalarField2D sample(const GridSpec& grid, Fn&& fn) {
    const std::size_t n = grid.points();
    ScalarField2D out(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) = fn(grid.coord(static_cast<std::ptrdiff_t>(c)),
                       grid.coord(static_cast<std::ptrdiff_t>(r)));
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Rank-4 block [n, channels, side, side] of square fields.
class FieldBatch {
 public:
  FieldBatch() = default;
  FieldBatch(std::size_t n, std::size_t channels, std::size_t side, double fill = 0.0);

  std::size_t n() const noexcept { return n_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t side() const noexcept { return side_; }
  std::size_t plane_size() const noexcept { return side_ * side_; }

  double& at(std::size_t i, std::size_t c, std::size_t r, std::size_t col) {
    return values_[((i * channels_ + c) * side_ + r) * side_ + col];
  }
  double at(std::size_t i, std::size_t c, std::size_t r, std::size_t col) const {
    return values_[((i * channels_ + c) * side_ + r) * side_ + col];
  }

  std::span<double> plane(std::size_t i, std::size_t c);
  std::span<const double> plane(std::size_t i, std::size_t c) const;

  ScalarField2D field(std::size_t i, std::size_t c) const;
  void set_field(std::size_t i, std::size_t c, const ScalarField2D& f);

  /// Copies the listed samples into a new batch, in the given order.
  FieldBatch gather(std::span<const std::size_t> indices) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const FieldBatch& other) const noexcept {
    return n_ == other.n_ && channels_ == other.channels_ && side_ == other.side_;
  }
  bool all_finite() const noexcept;

 private:
  std::size_t n_ = 0;
  std::size_t channels_ = 0;
  std::size_t side_ = 0;
  std::vector<double> values_;
};

struct ChannelStats {
  double mean = 0.0;
  double std = 1.0;
};

using NormStats = std::vector<ChannelStats>;

/// Per-channel mean and population standard deviation over samples and nodes.
NormStats compute_stats(const FieldBatch& batch);

/// Standardizes each channel as (v - mean)/std. Throws ConfigError on a
/// zero standard deviation ("degenerate channel").
FieldBatch normalize(const FieldBatch& batch, const NormStats& stats);
FieldBatch denormalize(const FieldBatch& batch, const NormStats& stats);

enum class CaseId : std::uint32_t { kCase1 = 1, kCase2 = 2, kCase3 = 3 };

/// Input channels of a dataset: source term and boundary mask.
inline constexpr std::size_t kSourceChannel = 0;
inline constexpr std::size_t kMaskChannel = 1;

struct Dataset {
  FieldBatch inputs;                  // [N, 2, DOF, DOF]: F and G
  std::optional<FieldBatch> outputs;  // [N, 1, DOF, DOF]: U, labeled data only
  NormStats norm_stats;               // computed on the training split
  std::uint64_t seed = 0;
  CaseId case_id = CaseId::kCase1;

  GridSpec grid() const { return GridSpec(inputs.side()); }
  std::size_t size() const noexcept { return inputs.n(); }
  /// Throws ConfigError when the invariants of the container do not hold.
  void validate() const;
};

}  // namespace dcrm
