#include "dcrm/losses.hpp"

#include <string>

#include "dcrm/errors.hpp"
#include "dcrm/stencil.hpp"

namespace dcrm {

namespace {

void check_same(const FieldBatch& a, const FieldBatch& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": batch shapes differ");
}

void check_prediction(const FieldBatch& pred, const FieldBatch& source,
                      const std::vector<SampleBoundary>& bcs, const char* what) {
  if (pred.channels() != 1) throw ShapeError(std::string(what) + ": prediction needs one channel");
  if (source.n() != pred.n() || source.side() != pred.side())
    throw ShapeError(std::string(what) + ": source batch does not match prediction");
  if (bcs.size() != pred.n())
    throw ShapeError(std::string(what) + ": one boundary description per sample required");
}

std::span<const double> plane(const FieldBatch& b, std::size_t i, std::size_t c) {
  return b.plane(i, c);
}

// Valid correlation of a kernel with a padded (n+2)^2 buffer into an n^2 buffer.
void correlate(const StencilKernel& k, std::span<const double> padded, std::size_t n,
               std::span<double> out) {
  const std::size_t m = n + 2;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) acc += k.weights[a][b] * padded[(r + a) * m + c + b];
      out[r * n + c] = k.scale * acc;
    }
}

void correlate_adjoint(const StencilKernel& k, std::span<const double> cot, std::size_t n,
                       std::span<double> padded_cot) {
  const std::size_t m = n + 2;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double g = k.scale * cot[r * n + c];
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) padded_cot[(r + a) * m + c + b] += k.weights[a][b] * g;
    }
}

// w_j * g_N at the free nodes of Neumann edges, zero elsewhere.
std::vector<double> neumann_load(const BoundarySpec& spec, const std::vector<std::uint8_t>& fixed,
                                 const QuadratureRule& rule, const GridSpec& grid) {
  const std::size_t n = grid.points();
  std::vector<double> load(n * n, 0.0);
  if (!spec.has_kind(BoundaryKind::kNeumann)) return load;
  const Edge edges[] = {Edge::kBottom, Edge::kRight, Edge::kTop, Edge::kLeft};
  for (Edge e : edges) {
    const EdgeCondition& cond = spec.edge(e);
    if (cond.kind != BoundaryKind::kNeumann) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const bool horizontal = e == Edge::kBottom || e == Edge::kTop;
      const std::size_t r = horizontal ? (e == Edge::kBottom ? 0 : n - 1) : j;
      const std::size_t c = horizontal ? j : (e == Edge::kLeft ? 0 : n - 1);
      if (fixed[r * n + c]) continue;
      load[r * n + c] += rule.weights_1d[j] * cond.value(grid.coord(static_cast<std::ptrdiff_t>(c)),
                                                         grid.coord(static_cast<std::ptrdiff_t>(r)));
    }
  }
  return load;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "cnn") return Method::kCnn;
  if (name == "cpinn") return Method::kCpinn;
  if (name == "dcrm") return Method::kDcrm;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected cnn, cpinn or dcrm)");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kCnn: return "cnn";
    case Method::kCpinn: return "cpinn";
    case Method::kDcrm: return "dcrm";
  }
  return "unknown";
}

SampleBoundary::SampleBoundary(BoundarySpec spec, const GridSpec& grid, DirichletGhost ghost)
    : spec_(std::move(spec)),
      padding_(spec_, grid, ghost, false),
      fixed_(dirichlet_node_mask(spec_, grid)) {
  const std::size_t n = grid.points();
  fixed_values_.assign(n * n, 0.0);
  enforce_dirichlet(std::span<double>(fixed_values_), spec_, grid);
}

void SampleBoundary::enforce(std::span<double> u) const {
  if (u.size() != fixed_.size()) throw ShapeError("enforce: field size does not match boundary");
  for (std::size_t k = 0; k < fixed_.size(); ++k)
    if (fixed_[k]) u[k] = fixed_values_[k];
}

void SampleBoundary::enforce_adjoint(std::span<double> grad) const {
  if (grad.size() != fixed_.size()) throw ShapeError("enforce: field size does not match boundary");
  for (std::size_t k = 0; k < fixed_.size(); ++k)
    if (fixed_[k]) grad[k] = 0.0;
}

std::vector<SampleBoundary> boundaries_from_masks(const FieldBatch& inputs, DirichletGhost ghost) {
  if (inputs.channels() <= kMaskChannel) throw ShapeError("inputs have no mask channel");
  const GridSpec grid(inputs.side());
  std::vector<SampleBoundary> out;
  out.reserve(inputs.n());
  for (std::size_t i = 0; i < inputs.n(); ++i)
    out.emplace_back(dirichlet_from_mask(inputs.field(i, kMaskChannel), grid), grid, ghost);
  return out;
}

void enforce_boundaries(FieldBatch& pred, const std::vector<SampleBoundary>& bcs) {
  if (bcs.size() != pred.n()) throw ShapeError("one boundary description per sample required");
  for (std::size_t i = 0; i < pred.n(); ++i)
    for (std::size_t c = 0; c < pred.channels(); ++c) bcs[i].enforce(pred.plane(i, c));
}

LossValue supervised_loss(const FieldBatch& pred, const FieldBatch& truth) {
  check_same(pred, truth, "supervised_loss");
  const std::size_t per = pred.channels() * pred.plane_size();
  const double norm = 1.0 / static_cast<double>(pred.plane_size() * pred.n());
  LossValue out;
  out.gradient = FieldBatch(pred.n(), pred.channels(), pred.side());
  const auto p = pred.values();
  const auto t = truth.values();
  auto g = out.gradient.values();
  for (std::size_t i = 0; i < pred.n(); ++i) {
    double s = 0.0;
    for (std::size_t k = i * per; k < (i + 1) * per; ++k) {
      const double d = p[k] - t[k];
      s += d * d;
      g[k] = 2.0 * d * norm;
    }
    out.per_sample.push_back(s / static_cast<double>(pred.plane_size()));
    out.value += s;
  }
  out.value *= norm;
  return out;
}

FieldBatch cpinn_residual(const FieldBatch& pred, const FieldBatch& source,
                          const std::vector<SampleBoundary>& bcs) {
  check_prediction(pred, source, bcs, "cpinn_residual");
  const std::size_t n = pred.side();
  const GridSpec grid(n);
  const StencilKernel lap = laplacian_kernel(grid);
  FieldBatch res(pred.n(), 1, n);
  std::vector<double> padded((n + 2) * (n + 2));
  std::vector<double> lu(n * n);
  for (std::size_t i = 0; i < pred.n(); ++i) {
    bcs[i].padding().apply(plane(pred, i, 0), padded);
    correlate(lap, padded, n, lu);
    const auto f = plane(source, i, kSourceChannel);
    auto r = res.plane(i, 0);
    for (std::size_t row = 1; row + 1 < n; ++row)
      for (std::size_t c = 1; c + 1 < n; ++c) r[row * n + c] = lu[row * n + c] - f[row * n + c];
  }
  return res;
}

LossValue cpinn_loss(const FieldBatch& pred, const FieldBatch& source,
                     const std::vector<SampleBoundary>& bcs) {
  const FieldBatch res = cpinn_residual(pred, source, bcs);
  const std::size_t n = pred.side();
  const GridSpec grid(n);
  const StencilKernel lap = laplacian_kernel(grid);
  const double norm = 1.0 / static_cast<double>(n * n * pred.n());
  LossValue out;
  out.gradient = FieldBatch(pred.n(), 1, n);
  std::vector<double> dres(n * n);
  std::vector<double> dpadded((n + 2) * (n + 2));
  for (std::size_t i = 0; i < pred.n(); ++i) {
    const auto r = res.plane(i, 0);
    double s = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
      s += r[k] * r[k];
      dres[k] = 2.0 * r[k] * norm;
    }
    out.per_sample.push_back(s / static_cast<double>(n * n));
    out.value += s;
    std::fill(dpadded.begin(), dpadded.end(), 0.0);
    correlate_adjoint(lap, dres, n, dpadded);
    bcs[i].padding().adjoint(dpadded, out.gradient.plane(i, 0));
  }
  out.value *= norm;
  return out;
}

LossValue dcrm_energy(const FieldBatch& pred, const FieldBatch& source,
                      const std::vector<SampleBoundary>& bcs, const EnergyOptions& options) {
  check_prediction(pred, source, bcs, "dcrm_energy");
  const std::size_t n = pred.side();
  const GridSpec grid(n);
  const QuadratureRule rule = QuadratureRule::make(options.quadrature, grid);
  const auto w = rule.weights_2d.values();
  const StencilKernel kx = grad_x_kernel(grid);
  const StencilKernel ky = grad_y_kernel(grid);
  const double inv_n = 1.0 / static_cast<double>(pred.n());

  LossValue out;
  out.gradient = FieldBatch(pred.n(), 1, n);
  std::vector<double> padded((n + 2) * (n + 2));
  std::vector<double> dpadded((n + 2) * (n + 2));
  std::vector<double> gx(n * n);
  std::vector<double> gy(n * n);
  for (std::size_t i = 0; i < pred.n(); ++i) {
    const auto u = plane(pred, i, 0);
    const auto f = plane(source, i, kSourceChannel);
    const auto load = neumann_load(bcs[i].spec(), bcs[i].fixed(), rule, grid);
    bcs[i].padding().apply(u, padded);
    correlate(kx, padded, n, gx);
    correlate(ky, padded, n, gy);
    auto g = out.gradient.plane(i, 0);
    double e = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
      e += w[k] * (0.5 * (gx[k] * gx[k] + gy[k] * gy[k]) + options.source_sign * u[k] * f[k]) -
           u[k] * load[k];
      g[k] = (w[k] * options.source_sign * f[k] - load[k]) * inv_n;
      gx[k] *= w[k] * inv_n;
      gy[k] *= w[k] * inv_n;
    }
    std::fill(dpadded.begin(), dpadded.end(), 0.0);
    correlate_adjoint(kx, gx, n, dpadded);
    correlate_adjoint(ky, gy, n, dpadded);
    bcs[i].padding().adjoint(dpadded, g);
    out.per_sample.push_back(e);
    out.value += e;
  }
  out.value *= inv_n;
  return out;
}

double e_abs(const FieldBatch& pred, const FieldBatch& truth) {
  check_same(pred, truth, "e_abs");
  double s = 0.0;
  const auto p = pred.values();
  const auto t = truth.values();
  for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - t[k]) * (p[k] - t[k]);
  return s;
}

double e_abs_normalized(const FieldBatch& pred, const FieldBatch& truth) {
  const double err = e_abs(pred, truth);
  double norm = 0.0;
  for (double v : truth.values()) norm += v * v;
  if (!(norm > 0.0)) throw ConfigError("normalized error undefined for an all-zero truth");
  return err / norm;
}

std::vector<double> e_abs_normalized_per_sample(const FieldBatch& pred, const FieldBatch& truth) {
  check_same(pred, truth, "e_abs");
  const std::size_t per = pred.channels() * pred.plane_size();
  const auto p = pred.values();
  const auto t = truth.values();
  std::vector<double> out;
  for (std::size_t i = 0; i < pred.n(); ++i) {
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t k = i * per; k < (i + 1) * per; ++k) {
      err += (p[k] - t[k]) * (p[k] - t[k]);
      norm += t[k] * t[k];
    }
    if (!(norm > 0.0)) throw ConfigError("normalized error undefined for an all-zero truth");
    out.push_back(err / norm);
  }
  return out;
}

}  // namespace dcrm
