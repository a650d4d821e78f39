#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dcrm/boundary.hpp"
#include "dcrm/errors.hpp"
#include "dcrm/problems.hpp"
#include "dcrm/stencil.hpp"
#include "helpers.hpp"

using namespace dcrm;
using testing_support::dot;
using testing_support::random_field;

namespace {

BoundarySpec neumann_sides() {
  return BoundarySpec({EdgeCondition{BoundaryKind::kDirichlet, [](double x, double) { return x * x; }},
                       EdgeCondition{BoundaryKind::kNeumann, [](double, double y) { return 1.0 + y; }},
                       EdgeCondition{BoundaryKind::kDirichlet, [](double, double) { return -0.5; }},
                       EdgeCondition{BoundaryKind::kNeumann, [](double, double y) { return std::sin(y); }}});
}

BoundarySpec all_neumann() {
  const BoundaryFn g = [](double x, double y) { return x - 2.0 * y; };
  return BoundarySpec({EdgeCondition{BoundaryKind::kNeumann, g}, EdgeCondition{BoundaryKind::kNeumann, g},
                       EdgeCondition{BoundaryKind::kNeumann, g}, EdgeCondition{BoundaryKind::kNeumann, g}});
}

std::vector<BoundarySpec> sample_specs() {
  return {boundary_case12(), boundary_case3({0.6}), neumann_sides(), all_neumann(),
          BoundarySpec::all_periodic()};
}

}  // namespace

TEST_SUITE("boundary") {
  TEST_CASE("spec invariants") {
    CHECK_THROWS_AS(BoundarySpec({EdgeCondition{BoundaryKind::kPeriodic, {}},
                                  EdgeCondition{BoundaryKind::kDirichlet, [](double, double) { return 0.0; }},
                                  EdgeCondition{BoundaryKind::kDirichlet, [](double, double) { return 0.0; }},
                                  EdgeCondition{BoundaryKind::kDirichlet, [](double, double) { return 0.0; }}}),
                    ConfigError);
    CHECK_THROWS_AS(BoundarySpec::all_dirichlet({}), ConfigError);
    CHECK(boundary_case12().is_all_dirichlet());
    CHECK_FALSE(neumann_sides().is_all_dirichlet());
    CHECK(neumann_sides().has_kind(BoundaryKind::kNeumann));
  }

  TEST_CASE("mask channel carries g on the border and zero inside") {
    const GridSpec g(5);
    const BoundaryMaskImage m = build_mask_channel(boundary_case12(), g);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 5; ++c) {
        const bool border = r == 0 || c == 0 || r == 4 || c == 4;
        if (!border) {
          CHECK(m.values(r, c) == 0.0);
          CHECK(m.types(r, c) == 0.0);
        } else {
          CHECK(m.types(r, c) == 1.0);
        }
      }
    CHECK(m.values(2, 4) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(m.values(0, 2) == 1.0);
    const BoundaryMaskImage z = build_mask_channel(boundary_case3({0.0}), g);
    for (double v : z.values.values()) CHECK(v == 0.0);
    const BoundaryMaskImage t = build_mask_channel(neumann_sides(), g);
    CHECK(t.types(2, 4) == 2.0);
    CHECK(t.types(0, 4) == 1.0);
  }

  TEST_CASE("constant Dirichlet padding fills the ring with g") {
    const GridSpec g(3);
    const double gd = 0.75;
    const ScalarField2D p = pad_dirichlet(random_field(3, 1), BoundarySpec::all_dirichlet([&](double, double) { return gd; }), g);
    REQUIRE(p.rows() == 5);
    std::size_t ring = 0;
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 5; ++c)
        if (r == 0 || c == 0 || r == 4 || c == 4) {
          CHECK(p(r, c) == gd);
          ++ring;
        }
    CHECK(ring == 16);
    for (std::size_t r = 1; r < 4; ++r)
      for (std::size_t c = 1; c < 4; ++c)
        if (r == 1 || c == 1 || r == 3 || c == 3) CHECK(p(r, c) == gd);
  }

  TEST_CASE("Dirichlet padding enforces g exactly and keeps the interior") {
    const std::size_t n = 9;
    const GridSpec g(n);
    const BoundarySpec spec = boundary_case12();
    const ScalarField2D u = random_field(n, 2);
    for (DirichletGhost ghost : {DirichletGhost::kBoundaryValue, DirichletGhost::kLinearExtrapolation}) {
      const ScalarField2D p = pad_dirichlet(u, spec, g, ghost);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = g.coord(static_cast<std::ptrdiff_t>(i));
        CHECK(p(1, i + 1) == 1.0);
        CHECK(p(n, i + 1) == 1.0);
        CHECK(p(i + 1, 1) == 1.0);
        if (i > 0 && i + 1 < n) CHECK(p(i + 1, n) == std::cos(2.0 * std::numbers::pi * t));
      }
      for (std::size_t r = 1; r + 1 < n; ++r)
        for (std::size_t c = 1; c + 1 < n; ++c) CHECK(p(r + 1, c + 1) == u(r, c));
    }
    const ScalarField2D zero = pad_dirichlet(u, BoundarySpec::all_dirichlet([](double, double) { return 0.0; }), g);
    for (std::size_t i = 0; i < n + 2; ++i)
      for (std::size_t k : {std::size_t{0}, std::size_t{1}, n, n + 1}) {
        CHECK(zero(k, i) == 0.0);
        CHECK(zero(i, k) == 0.0);
      }
    CHECK_THROWS_AS(pad_dirichlet(u, neumann_sides(), g), ConfigError);
  }

  TEST_CASE("ghosts at the ghost position and by linear extrapolation") {
    const std::size_t n = 7;
    const GridSpec g(n);
    const double h = g.spacing();
    const BoundaryFn lin = [](double x, double y) { return 0.5 + 2.0 * x - 3.0 * y; };
    const BoundarySpec spec = BoundarySpec::all_dirichlet(lin);
    const ScalarField2D u = ScalarField2D::sample(g, lin);
    const ScalarField2D value = pad_dirichlet(u, spec, g, DirichletGhost::kBoundaryValue);
    CHECK(value(0, 3) == doctest::Approx(lin(2 * h, -h)).epsilon(1e-14));
    CHECK(value(3, n + 1) == doctest::Approx(lin(1.0 + h, 2 * h)).epsilon(1e-14));
    CHECK(value(0, 0) == doctest::Approx(lin(0.0, 0.0)).epsilon(1e-14));
    const ScalarField2D ext = pad_dirichlet(u, spec, g, DirichletGhost::kLinearExtrapolation);
    for (std::size_t r = 0; r < n + 2; ++r)
      for (std::size_t c = 0; c < n + 2; ++c)
        CHECK(ext(r, c) == doctest::Approx(lin(g.coord(static_cast<std::ptrdiff_t>(c) - 1),
                                                g.coord(static_cast<std::ptrdiff_t>(r) - 1)))
                               .epsilon(1e-12));
  }

  TEST_CASE("Neumann ghosts satisfy the central-difference flux") {
    const std::size_t n = 9;
    const GridSpec g(n);
    const double h = g.spacing();
    for (const BoundarySpec& spec : {neumann_sides(), all_neumann()}) {
      const ScalarField2D u = random_field(n, 3);
      const ScalarField2D p = pad_neumann(u, spec, g);
      const auto fixed = dirichlet_node_mask(spec, g);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = g.coord(static_cast<std::ptrdiff_t>(i));
        if (spec.edge(Edge::kRight).kind == BoundaryKind::kNeumann && !fixed[i * n + n - 1])
          CHECK(std::abs((p(i + 1, n + 1) - p(i + 1, n - 1)) / (2 * h) - spec.edge(Edge::kRight).value(1.0, t)) <= 1e-12);
        if (spec.edge(Edge::kLeft).kind == BoundaryKind::kNeumann && !fixed[i * n])
          CHECK(std::abs((p(i + 1, 0) - p(i + 1, 2)) / (2 * h) - spec.edge(Edge::kLeft).value(0.0, t)) <= 1e-12);
        if (spec.edge(Edge::kBottom).kind == BoundaryKind::kNeumann && !fixed[i])
          CHECK(std::abs((p(0, i + 1) - p(2, i + 1)) / (2 * h) - spec.edge(Edge::kBottom).value(t, 0.0)) <= 1e-12);
        if (spec.edge(Edge::kTop).kind == BoundaryKind::kNeumann && !fixed[(n - 1) * n + i])
          CHECK(std::abs((p(n + 1, i + 1) - p(n - 1, i + 1)) / (2 * h) - spec.edge(Edge::kTop).value(t, 1.0)) <= 1e-12);
      }
    }
  }

  TEST_CASE("zero flux mirrors and linear fields extend exactly") {
    const std::size_t n = 7;
    const GridSpec g(n);
    const double h = g.spacing();
    const BoundaryFn zero = [](double, double) { return 0.0; };
    const BoundaryFn one = [](double, double) { return 1.0; };
    const BoundaryFn x_fn = [](double x, double) { return x; };
    const BoundarySpec mirror({EdgeCondition{BoundaryKind::kDirichlet, zero}, EdgeCondition{BoundaryKind::kNeumann, zero},
                               EdgeCondition{BoundaryKind::kDirichlet, zero}, EdgeCondition{BoundaryKind::kDirichlet, zero}});
    const ScalarField2D u = random_field(n, 4);
    const ScalarField2D pm = pad_neumann(u, mirror, g);
    for (std::size_t i = 1; i + 1 < n; ++i) CHECK(pm(i + 1, n + 1) == u(i, n - 2));
    const BoundarySpec flux({EdgeCondition{BoundaryKind::kDirichlet, x_fn}, EdgeCondition{BoundaryKind::kNeumann, one},
                             EdgeCondition{BoundaryKind::kDirichlet, x_fn}, EdgeCondition{BoundaryKind::kDirichlet, x_fn}});
    const ScalarField2D px = pad_neumann(ScalarField2D::sample(g, x_fn), flux, g);
    for (std::size_t i = 1; i + 1 < n; ++i) CHECK(px(i + 1, n + 1) == doctest::Approx(1.0 + h).epsilon(1e-14));
  }

  TEST_CASE("Neumann corners average their neighbouring ghosts") {
    const std::size_t n = 6;
    const GridSpec g(n);
    const ScalarField2D p = pad_neumann(random_field(n, 5), all_neumann(), g);
    const std::size_t e = n + 1;
    CHECK(p(0, 0) == doctest::Approx(0.5 * (p(0, 1) + p(1, 0))).epsilon(1e-14));
    CHECK(p(0, e) == doctest::Approx(0.5 * (p(0, n) + p(1, e))).epsilon(1e-14));
    CHECK(p(e, 0) == doctest::Approx(0.5 * (p(e, 1) + p(n, 0))).epsilon(1e-14));
    CHECK(p(e, e) == doctest::Approx(0.5 * (p(e, n) + p(n, e))).epsilon(1e-14));
  }

  TEST_CASE("mixed corners belong to the Dirichlet edge") {
    const GridSpec g(5);
    const auto fixed = dirichlet_node_mask(neumann_sides(), g);
    CHECK(fixed[0] == 1);
    CHECK(fixed[4] == 1);
    CHECK(fixed[2 * 5 + 4] == 0);
    CHECK(fixed[4 * 5 + 0] == 1);
    ScalarField2D u = random_field(5, 6);
    enforce_dirichlet(u, neumann_sides(), g);
    CHECK(u(0, 4) == 1.0);
    CHECK(u(4, 4) == -0.5);
    CHECK(u(2, 4) != 0.0);
  }

  TEST_CASE("periodic padding of a seven by seven field") {
    const std::size_t n = 7;
    ScalarField2D u(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) u(i, j) = 10.0 * static_cast<double>(i) + static_cast<double>(j);
    const ScalarField2D p = pad_periodic(u);
    REQUIRE(p.rows() == 9);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(p(0, j + 1) == u(6, j));
      CHECK(p(8, j + 1) == u(0, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p(i + 1, 8) == u(i, 0));
      CHECK(p(i + 1, 0) == u(i, 6));
      for (std::size_t j = 0; j < n; ++j) CHECK(p(i + 1, j + 1) == u(i, j));
    }
    CHECK(p(0, 8) == u(6, 0));
    CHECK(p(0, 0) == u(6, 6));
    CHECK(p(8, 0) == u(0, 6));
    CHECK(p(8, 8) == u(0, 0));
    const ScalarField2D c = pad_periodic(ScalarField2D(4, 4, 2.5));
    for (double v : c.values()) CHECK(v == 2.5);
  }

  TEST_CASE("periodic Laplacian of a sine converges at second order") {
    const auto error = [](std::size_t n) {
      ScalarField2D u(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          u(r, c) = std::sin(2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n));
      StencilKernel k = laplacian_kernel(GridSpec(3));
      k.scale = static_cast<double>(n * n);  // spacing 1/n on the periodic lattice
      const ScalarField2D lap = apply_stencil(k, pad_periodic(u));
      double worst = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(lap.values()[i] + 4.0 * std::numbers::pi * std::numbers::pi * u.values()[i]));
      return worst;
    };
    const double ratio = error(16) / error(32);
    CHECK(ratio > 3.9);
    CHECK(ratio < 4.1);
  }

  TEST_CASE("padding maps are affine and their adjoint is the transpose") {
    const std::size_t n = 8;
    const GridSpec g(n);
    for (const BoundarySpec& spec : sample_specs())
      for (DirichletGhost ghost : {DirichletGhost::kBoundaryValue, DirichletGhost::kLinearExtrapolation})
        for (bool fold : {true, false}) {
          const PaddingMap map(spec, g, ghost, fold);
          const ScalarField2D u = random_field(n, 7);
          const ScalarField2D v = random_field(n, 8);
          ScalarField2D uv(n, n);
          for (std::size_t i = 0; i < u.size(); ++i) uv.values()[i] = u.values()[i] + 2.0 * v.values()[i];
          const ScalarField2D p0 = map.apply(ScalarField2D(n, n));
          const ScalarField2D pu = map.apply(u);
          const ScalarField2D pv = map.apply(v);
          const ScalarField2D puv = map.apply(uv);
          for (std::size_t i = 0; i < p0.size(); ++i)
            CHECK(puv.values()[i] - p0.values()[i] ==
                  doctest::Approx(pu.values()[i] - p0.values()[i] + 2.0 * (pv.values()[i] - p0.values()[i])).epsilon(1e-12));
          const ScalarField2D w = random_field(n + 2, 9);
          std::vector<double> lin(p0.size());
          for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = pu.values()[i] - p0.values()[i];
          CHECK(dot(lin, w.values()) == doctest::Approx(dot(u.values(), map.adjoint(w).values())).epsilon(1e-12));
        }
  }

  TEST_CASE("folded and unfolded maps agree on enforced fields") {
    const std::size_t n = 9;
    const GridSpec g(n);
    for (const BoundarySpec& spec : sample_specs()) {
      ScalarField2D u = random_field(n, 10);
      enforce_dirichlet(u, spec, g);
      const ScalarField2D a = PaddingMap(spec, g, DirichletGhost::kLinearExtrapolation, true).apply(u);
      const ScalarField2D b = PaddingMap(spec, g, DirichletGhost::kLinearExtrapolation, false).apply(u);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == doctest::Approx(b.values()[i]).epsilon(1e-14));
    }
  }

  TEST_CASE("a spec read back from the mask reproduces the enforcement") {
    const std::size_t n = 9;
    const GridSpec g(n);
    for (const BoundarySpec& spec : {boundary_case12(), boundary_case3({-0.8})}) {
      const BoundarySpec back = dirichlet_from_mask(build_mask_channel(spec, g).values, g);
      ScalarField2D a = random_field(n, 11);
      ScalarField2D b = a;
      enforce_dirichlet(a, spec, g);
      enforce_dirichlet(b, back, g);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);
    }
  }
}
