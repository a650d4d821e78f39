#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dcrm/grid.hpp"

namespace dcrm {

enum class Edge : std::size_t { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };
enum class BoundaryKind { kDirichlet, kNeumann, kPeriodic };

/// Boundary data as a function of position (x, y). Edge functions are called
/// with the tangential coordinate clamped to [0,1]; for ghost nodes the normal
/// coordinate lies one spacing outside the square.
using BoundaryFn = std::function<double(double x, double y)>;

struct EdgeCondition {
  BoundaryKind kind = BoundaryKind::kDirichlet;
  BoundaryFn value;  // g_D or g_N; unused for periodic edges
};

class BoundarySpec {
 public:
  /// Edges in order bottom (y=0), right (x=1), top (y=1), left (x=0).
  explicit BoundarySpec(std::array<EdgeCondition, 4> edges);

  static BoundarySpec all_dirichlet(BoundaryFn g);
  static BoundarySpec dirichlet(BoundaryFn bottom, BoundaryFn right, BoundaryFn top,
                                BoundaryFn left);
  static BoundarySpec all_periodic();

  const EdgeCondition& edge(Edge e) const { return edges_[static_cast<std::size_t>(e)]; }
  bool is_all_dirichlet() const;
  bool has_kind(BoundaryKind kind) const;

 private:
  std::array<EdgeCondition, 4> edges_;
};

/// Masking images: boundary data on border pixels, zero inside, plus the
/// type image (1 on Dirichlet pixels, 2 on Neumann pixels, 0 inside).
struct BoundaryMaskImage {
  ScalarField2D values;
  ScalarField2D types;
};

BoundaryMaskImage build_mask_channel(const BoundarySpec& spec, const GridSpec& grid);

/// Dirichlet spec that reads g from the border pixels of a mask image; any
/// query point is clamped into the square and snapped to the nearest border node.
BoundarySpec dirichlet_from_mask(const ScalarField2D& mask, const GridSpec& grid);

/// Nodes whose value is fixed by a Dirichlet condition. A corner shared by a
/// Dirichlet and a non-Dirichlet edge is Dirichlet.
std::vector<std::uint8_t> dirichlet_node_mask(const BoundarySpec& spec, const GridSpec& grid);

/// Overwrites every Dirichlet boundary node of `u` with g.
void enforce_dirichlet(ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid);
void enforce_dirichlet(std::span<double> u, const BoundarySpec& spec, const GridSpec& grid);

/// Ghost values for Dirichlet edges.
enum class DirichletGhost {
  kBoundaryValue,       // g at the ghost position (the whole ring is g for constant g)
  kLinearExtrapolation  // 2 g - u_inner: line through the boundary node and its inner neighbour
};

/// Affine map u (n x n) -> padded (n+2 x n+2): every padded cell is
/// constant + coef0*u[src0] + coef1*u[src1]. With `fold_dirichlet` the
/// Dirichlet boundary nodes of u are replaced by g (hard enforcement) and never
/// appear as sources; without it they are read from u, which gives the same
/// result on an enforced field.
class PaddingMap {
 public:
  struct Entry {
    std::int32_t src0 = -1;
    double coef0 = 0.0;
    std::int32_t src1 = -1;
    double coef1 = 0.0;
    double constant = 0.0;
  };

  PaddingMap(const BoundarySpec& spec, const GridSpec& grid,
             DirichletGhost ghost = DirichletGhost::kBoundaryValue, bool fold_dirichlet = true);

  std::size_t side() const noexcept { return n_; }
  std::size_t padded_side() const noexcept { return n_ + 2; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  void apply(std::span<const double> u, std::span<double> padded) const;
  /// Accumulates the transpose of the linear part into `u_cot`.
  void adjoint(std::span<const double> padded_cot, std::span<double> u_cot) const;

  ScalarField2D apply(const ScalarField2D& u) const;
  ScalarField2D adjoint(const ScalarField2D& padded_cot) const;

 private:
  std::size_t n_;
  std::vector<Entry> entries_;
};

/// All edges Dirichlet; throws ConfigError otherwise.
ScalarField2D pad_dirichlet(const ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid,
                            DirichletGhost ghost = DirichletGhost::kBoundaryValue);
/// Central-difference flux ghosts on Neumann edges: ghost = inner + 2h g_N.
/// Other edges follow their own kind.
ScalarField2D pad_neumann(const ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid);
/// Wraps opposite rows/columns; corners wrap diagonally.
ScalarField2D pad_periodic(const ScalarField2D& u);

}  // namespace dcrm
