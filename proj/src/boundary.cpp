#include "dcrm/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

bool is_kind(const BoundarySpec& spec, Edge e, BoundaryKind k) { return spec.edge(e).kind == k; }

struct NodeRule {
  bool dirichlet = false;
  Edge edge = Edge::kBottom;  // edge whose function supplies g
};

// Which condition owns boundary node (r, c). Horizontal edges own their
// shared corners unless only the vertical edge is Dirichlet.
NodeRule node_rule(const BoundarySpec& spec, std::size_t n, std::size_t r, std::size_t c) {
  std::optional<Edge> horizontal;
  std::optional<Edge> vertical;
  if (r == 0) horizontal = Edge::kBottom;
  if (r == n - 1) horizontal = Edge::kTop;
  if (c == 0) vertical = Edge::kLeft;
  if (c == n - 1) vertical = Edge::kRight;
  NodeRule rule;
  if (horizontal && is_kind(spec, *horizontal, BoundaryKind::kDirichlet)) {
    rule.dirichlet = true;
    rule.edge = *horizontal;
  } else if (vertical && is_kind(spec, *vertical, BoundaryKind::kDirichlet)) {
    rule.dirichlet = true;
    rule.edge = *vertical;
  }
  return rule;
}

double eval_edge(const BoundarySpec& spec, Edge e, double x, double y) {
  const auto& fn = spec.edge(e).value;
  if (!fn) throw ConfigError("boundary edge has no value function");
  return fn(x, y);
}

double node_g(const BoundarySpec& spec, const GridSpec& grid, const NodeRule& rule, std::size_t r,
              std::size_t c) {
  return eval_edge(spec, rule.edge, grid.coord(static_cast<std::ptrdiff_t>(c)),
                   grid.coord(static_cast<std::ptrdiff_t>(r)));
}

void check_square(std::size_t rows, std::size_t cols, const GridSpec& grid) {
  if (rows != grid.points() || cols != grid.points())
    throw ShapeError("field is " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", grid expects " + std::to_string(grid.points()) + "x" +
                     std::to_string(grid.points()));
}

}  // namespace

BoundarySpec::BoundarySpec(std::array<EdgeCondition, 4> edges) : edges_(std::move(edges)) {
  const auto periodic = [&](Edge e) { return edge(e).kind == BoundaryKind::kPeriodic; };
  if (periodic(Edge::kBottom) != periodic(Edge::kTop) ||
      periodic(Edge::kLeft) != periodic(Edge::kRight))
    throw ConfigError("periodic edges must come in opposing pairs");
  for (const auto& ec : edges_)
    if (ec.kind != BoundaryKind::kPeriodic && !ec.value)
      throw ConfigError("Dirichlet and Neumann edges need a value function");
}

BoundarySpec BoundarySpec::all_dirichlet(BoundaryFn g) { return dirichlet(g, g, g, g); }

BoundarySpec BoundarySpec::dirichlet(BoundaryFn bottom, BoundaryFn right, BoundaryFn top,
                                     BoundaryFn left) {
  return BoundarySpec({EdgeCondition{BoundaryKind::kDirichlet, std::move(bottom)},
                       EdgeCondition{BoundaryKind::kDirichlet, std::move(right)},
                       EdgeCondition{BoundaryKind::kDirichlet, std::move(top)},
                       EdgeCondition{BoundaryKind::kDirichlet, std::move(left)}});
}

BoundarySpec BoundarySpec::all_periodic() {
  return BoundarySpec({EdgeCondition{BoundaryKind::kPeriodic, {}},
                       EdgeCondition{BoundaryKind::kPeriodic, {}},
                       EdgeCondition{BoundaryKind::kPeriodic, {}},
                       EdgeCondition{BoundaryKind::kPeriodic, {}}});
}

bool BoundarySpec::is_all_dirichlet() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const EdgeCondition& e) { return e.kind == BoundaryKind::kDirichlet; });
}

bool BoundarySpec::has_kind(BoundaryKind kind) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [kind](const EdgeCondition& e) { return e.kind == kind; });
}

BoundaryMaskImage build_mask_channel(const BoundarySpec& spec, const GridSpec& grid) {
  const std::size_t n = grid.points();
  BoundaryMaskImage out{ScalarField2D(n, n), ScalarField2D(n, n)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (r != 0 && r != n - 1 && c != 0 && c != n - 1) continue;
      const NodeRule rule = node_rule(spec, n, r, c);
      if (rule.dirichlet) {
        out.values(r, c) = node_g(spec, grid, rule, r, c);
        out.types(r, c) = 1.0;
        continue;
      }
      // Neumann data, if any edge through this node carries it.
      std::optional<Edge> e;
      if (r == 0 && is_kind(spec, Edge::kBottom, BoundaryKind::kNeumann)) e = Edge::kBottom;
      else if (r == n - 1 && is_kind(spec, Edge::kTop, BoundaryKind::kNeumann)) e = Edge::kTop;
      else if (c == 0 && is_kind(spec, Edge::kLeft, BoundaryKind::kNeumann)) e = Edge::kLeft;
      else if (c == n - 1 && is_kind(spec, Edge::kRight, BoundaryKind::kNeumann)) e = Edge::kRight;
      if (e) {
        out.values(r, c) = eval_edge(spec, *e, grid.coord(static_cast<std::ptrdiff_t>(c)),
                                     grid.coord(static_cast<std::ptrdiff_t>(r)));
        out.types(r, c) = 2.0;
      }
    }
  }
  return out;
}

BoundarySpec dirichlet_from_mask(const ScalarField2D& mask, const GridSpec& grid) {
  check_square(mask.rows(), mask.cols(), grid);
  const std::size_t n = grid.points();
  auto g = [mask, n](double x, double y) {
    const auto snap = [n](double t) {
      const double s = std::clamp(t, 0.0, 1.0) * static_cast<double>(n - 1);
      return static_cast<std::size_t>(std::lround(s));
    };
    return mask(snap(y), snap(x));
  };
  return BoundarySpec::all_dirichlet(g);
}

std::vector<std::uint8_t> dirichlet_node_mask(const BoundarySpec& spec, const GridSpec& grid) {
  const std::size_t n = grid.points();
  std::vector<std::uint8_t> fixed(n * n, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r == 0 || r == n - 1 || c == 0 || c == n - 1)
        fixed[r * n + c] = node_rule(spec, n, r, c).dirichlet ? 1 : 0;
  return fixed;
}

void enforce_dirichlet(std::span<double> u, const BoundarySpec& spec, const GridSpec& grid) {
  const std::size_t n = grid.points();
  if (u.size() != n * n) throw ShapeError("enforce_dirichlet: field size does not match grid");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (r != 0 && r != n - 1 && c != 0 && c != n - 1) continue;
      const NodeRule rule = node_rule(spec, n, r, c);
      if (rule.dirichlet) u[r * n + c] = node_g(spec, grid, rule, r, c);
    }
  }
}

void enforce_dirichlet(ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid) {
  check_square(u.rows(), u.cols(), grid);
  enforce_dirichlet(u.values(), spec, grid);
}

PaddingMap::PaddingMap(const BoundarySpec& spec, const GridSpec& grid, DirichletGhost ghost,
                       bool fold_dirichlet)
    : n_(grid.points()) {
  const std::size_t n = n_;
  const std::size_t m = n + 2;
  const double h = grid.spacing();
  entries_.assign(m * m, Entry{});

  std::vector<double> fixed_value(n * n, 0.0);
  const auto fixed = dirichlet_node_mask(spec, grid);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (fixed[r * n + c]) fixed_value[r * n + c] = node_g(spec, grid, node_rule(spec, n, r, c), r, c);

  // Single-source entry for node (r, c), folding fixed nodes into the constant.
  const auto node_entry = [&](std::size_t r, std::size_t c, double coef) {
    Entry e;
    const std::size_t k = r * n + c;
    if (fold_dirichlet && fixed[k]) {
      e.constant = coef * fixed_value[k];
    } else {
      e.src0 = static_cast<std::int32_t>(k);
      e.coef0 = coef;
    }
    return e;
  };
  const auto at = [&](std::size_t pr, std::size_t pc) -> Entry& { return entries_[pr * m + pc]; };
  // 2*u_b - u_inner, the line through a Dirichlet node and its inner neighbour.
  const auto extrapolate = [&](std::size_t br, std::size_t bc, std::size_t ir, std::size_t ic) {
    Entry out = node_entry(ir, ic, -1.0);
    const Entry b = node_entry(br, bc, 2.0);
    out.constant += b.constant;
    if (b.src0 >= 0) {
      out.src1 = b.src0;
      out.coef1 = b.coef0;
    }
    return out;
  };

  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) at(r + 1, c + 1) = node_entry(r, c, 1.0);

  // Ghost for one edge node: boundary node b, its inner neighbour, ghost position.
  const auto edge_ghost = [&](Edge e, std::size_t br, std::size_t bc, std::size_t ir,
                              std::size_t ic, double gx, double gy) {
    const EdgeCondition& cond = spec.edge(e);
    switch (cond.kind) {
      case BoundaryKind::kDirichlet: {
        if (ghost == DirichletGhost::kBoundaryValue) {
          Entry out;
          out.constant = cond.value(gx, gy);
          return out;
        }
        return extrapolate(br, bc, ir, ic);
      }
      case BoundaryKind::kNeumann: {
        Entry out = node_entry(ir, ic, 1.0);
        out.constant += 2.0 * h *
                        cond.value(grid.coord(static_cast<std::ptrdiff_t>(bc)),
                                   grid.coord(static_cast<std::ptrdiff_t>(br)));
        return out;
      }
      case BoundaryKind::kPeriodic:
        break;
    }
    return Entry{};
  };

  const bool x_periodic = is_kind(spec, Edge::kLeft, BoundaryKind::kPeriodic);
  const bool y_periodic = is_kind(spec, Edge::kBottom, BoundaryKind::kPeriodic);

  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.coord(static_cast<std::ptrdiff_t>(j));
    if (y_periodic) {
      at(0, j + 1) = node_entry(n - 1, j, 1.0);
      at(n + 1, j + 1) = node_entry(0, j, 1.0);
    } else {
      at(0, j + 1) = edge_ghost(Edge::kBottom, 0, j, 1, j, x, -h);
      at(n + 1, j + 1) = edge_ghost(Edge::kTop, n - 1, j, n - 2, j, x, 1.0 + h);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double y = grid.coord(static_cast<std::ptrdiff_t>(i));
    if (x_periodic) {
      at(i + 1, 0) = node_entry(i, n - 1, 1.0);
      at(i + 1, n + 1) = node_entry(i, 0, 1.0);
    } else {
      at(i + 1, 0) = edge_ghost(Edge::kLeft, i, 0, i, 1, -h, y);
      at(i + 1, n + 1) = edge_ghost(Edge::kRight, i, n - 1, i, n - 2, 1.0 + h, y);
    }
  }

  // Corners: (padded row, padded col, horizontal edge, vertical edge, corner node).
  struct Corner {
    std::size_t pr, pc;
    Edge horizontal, vertical;
    std::size_t r, c;
  };
  const Corner corners[] = {
      {0, 0, Edge::kBottom, Edge::kLeft, 0, 0},
      {0, n + 1, Edge::kBottom, Edge::kRight, 0, n - 1},
      {n + 1, 0, Edge::kTop, Edge::kLeft, n - 1, 0},
      {n + 1, n + 1, Edge::kTop, Edge::kRight, n - 1, n - 1},
  };
  for (const Corner& k : corners) {
    const bool hd = is_kind(spec, k.horizontal, BoundaryKind::kDirichlet);
    const bool vd = is_kind(spec, k.vertical, BoundaryKind::kDirichlet);
    Entry& out = at(k.pr, k.pc);
    if (hd || vd) {
      const NodeRule rule = node_rule(spec, n, k.r, k.c);
      out = Entry{};
      if (ghost == DirichletGhost::kBoundaryValue) {
        out.constant = node_g(spec, grid, rule, k.r, k.c);
      } else {
        // Extrapolate diagonally through the corner node.
        const std::size_t ir = k.r == 0 ? 1 : n - 2;
        const std::size_t ic = k.c == 0 ? 1 : n - 2;
        out = extrapolate(k.r, k.c, ir, ic);
      }
    } else if (x_periodic) {
      out = at(k.pr, k.pc == 0 ? n : 1);
    } else if (y_periodic) {
      out = at(k.pr == 0 ? n : 1, k.pc);
    } else {
      // Both adjacent edges Neumann: mean of the two neighbouring ghosts.
      const Entry& a = at(k.pr, k.pc == 0 ? 1 : n);
      const Entry& b = at(k.pr == 0 ? 1 : n, k.pc);
      out = Entry{};
      out.constant = 0.5 * (a.constant + b.constant);
      const auto add = [&out](std::int32_t src, double coef) {
        if (src < 0) return;
        if (out.src0 == src) {
          out.coef0 += coef;
        } else if (out.src0 < 0) {
          out.src0 = src;
          out.coef0 = coef;
        } else if (out.src1 == src) {
          out.coef1 += coef;
        } else {
          out.src1 = src;
          out.coef1 = coef;
        }
      };
      add(a.src0, 0.5 * a.coef0);
      add(a.src1, 0.5 * a.coef1);
      add(b.src0, 0.5 * b.coef0);
      add(b.src1, 0.5 * b.coef1);
    }
  }
}

void PaddingMap::apply(std::span<const double> u, std::span<double> padded) const {
  if (u.size() != n_ * n_ || padded.size() != entries_.size())
    throw ShapeError("PaddingMap::apply: size mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Entry& e = entries_[k];
    double v = e.constant;
    if (e.src0 >= 0) v += e.coef0 * u[static_cast<std::size_t>(e.src0)];
    if (e.src1 >= 0) v += e.coef1 * u[static_cast<std::size_t>(e.src1)];
    padded[k] = v;
  }
}

void PaddingMap::adjoint(std::span<const double> padded_cot, std::span<double> u_cot) const {
  if (u_cot.size() != n_ * n_ || padded_cot.size() != entries_.size())
    throw ShapeError("PaddingMap::adjoint: size mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Entry& e = entries_[k];
    if (e.src0 >= 0) u_cot[static_cast<std::size_t>(e.src0)] += e.coef0 * padded_cot[k];
    if (e.src1 >= 0) u_cot[static_cast<std::size_t>(e.src1)] += e.coef1 * padded_cot[k];
  }
}

ScalarField2D PaddingMap::apply(const ScalarField2D& u) const {
  if (u.rows() != n_ || u.cols() != n_) throw ShapeError("PaddingMap::apply: field shape");
  ScalarField2D out(n_ + 2, n_ + 2);
  apply(u.values(), out.values());
  return out;
}

ScalarField2D PaddingMap::adjoint(const ScalarField2D& padded_cot) const {
  if (padded_cot.rows() != n_ + 2 || padded_cot.cols() != n_ + 2)
    throw ShapeError("PaddingMap::adjoint: field shape");
  ScalarField2D out(n_, n_);
  adjoint(padded_cot.values(), out.values());
  return out;
}

ScalarField2D pad_dirichlet(const ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid,
                            DirichletGhost ghost) {
  if (!spec.is_all_dirichlet()) throw ConfigError("pad_dirichlet: non-Dirichlet edge present");
  check_square(u.rows(), u.cols(), grid);
  return PaddingMap(spec, grid, ghost).apply(u);
}

ScalarField2D pad_neumann(const ScalarField2D& u, const BoundarySpec& spec, const GridSpec& grid) {
  check_square(u.rows(), u.cols(), grid);
  return PaddingMap(spec, grid).apply(u);
}

ScalarField2D pad_periodic(const ScalarField2D& u) {
  if (u.rows() != u.cols()) throw ShapeError("pad_periodic: field must be square");
  const GridSpec grid(u.rows());
  return PaddingMap(BoundarySpec::all_periodic(), grid).apply(u);
}

}  // namespace dcrm
