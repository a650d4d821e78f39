#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "dcrm/errors.hpp"
#include "dcrm/problems.hpp"
#include "dcrm/stencil.hpp"

using namespace dcrm;

namespace {

constexpr double kPi = std::numbers::pi;

bool stratified(const std::vector<std::vector<double>>& pts, const ParamBox& box) {
  const std::size_t n = pts.size();
  for (std::size_t d = 0; d < box.size(); ++d) {
    std::vector<int> hits(n, 0);
    const double width = (box[d].second - box[d].first) / static_cast<double>(n);
    for (const auto& p : pts) {
      const auto k = static_cast<std::size_t>(std::floor((p[d] - box[d].first) / width));
      if (k >= n) return false;
      ++hits[k];
    }
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("problems") {
  TEST_CASE("Case 1 source") {
    CHECK(source_case1(0.0, 0.0) == 0.0);
    CHECK(source_case1(1.0, 0.0) ==
          doctest::Approx(20.0 * kPi * kPi * std::sin(kPi * (1.0 + kPi / 4) * (kPi / 4))).epsilon(1e-14));
    for (double x : {0.1, 0.37, 0.9})
      for (double y : {0.2, 0.55}) CHECK(source_case1(x, y) == doctest::Approx(source_case1(y, x)).epsilon(1e-14));
  }

  TEST_CASE("Case 2 source family") {
    CHECK(source_case23({1.0, 0.0, 0.0}, 0.0, 0.0) == 0.0);
    CHECK(std::abs(source_case23({7.0, 0.0, 0.0}, 1.0, 1.0)) < 1e-12);
    // pi^2 * 0.5 * sin(pi/4)
    CHECK(source_case23({1.0, 0.0, 0.0}, 0.5, 0.5) == doctest::Approx(3.4894321).epsilon(1e-7));
    CHECK(source_case23({4.0, 0.3, 0.7}, 0.2, 0.6) ==
          doctest::Approx(4.0 * source_case23({1.0, 0.3, 0.7}, 0.2, 0.6)).epsilon(1e-14));
  }

  TEST_CASE("Case 1 and 2 boundary data") {
    const BoundarySpec b = boundary_case12();
    CHECK(b.is_all_dirichlet());
    CHECK(b.edge(Edge::kRight).value(1.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(b.edge(Edge::kTop).value(0.3, 1.0) == 1.0);
  }

  TEST_CASE("Case 3 trace follows the arclength counterclockwise from the origin") {
    const BoundarySpec b = boundary_case3({1.0});
    CHECK(b.edge(Edge::kBottom).value(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(b.edge(Edge::kBottom).value(1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.edge(Edge::kRight).value(1.0, 1.0) == doctest::Approx(-1.0));
    CHECK(b.edge(Edge::kTop).value(1.0, 1.0) == doctest::Approx(-1.0));
    CHECK(std::abs(b.edge(Edge::kLeft).value(0.0, 1.0)) < 1e-12);
    // Continuity at the four corners.
    CHECK(std::abs(b.edge(Edge::kBottom).value(1.0, 0.0) - b.edge(Edge::kRight).value(1.0, 0.0)) <= 1e-12);
    CHECK(std::abs(b.edge(Edge::kRight).value(1.0, 1.0) - b.edge(Edge::kTop).value(1.0, 1.0)) <= 1e-12);
    CHECK(std::abs(b.edge(Edge::kTop).value(0.0, 1.0) - b.edge(Edge::kLeft).value(0.0, 1.0)) <= 1e-12);
    CHECK(std::abs(b.edge(Edge::kLeft).value(0.0, 0.0) - b.edge(Edge::kBottom).value(0.0, 0.0)) <= 1e-12);
    const BoundarySpec z = boundary_case3({0.0});
    CHECK(z.edge(Edge::kLeft).value(0.0, 0.4) == 0.0);
  }

  TEST_CASE("Latin hypercube stratification") {
    const ParamBox unit{{0.0, 1.0}};
    const auto one = lhs_sample(unit, 1, 3);
    CHECK(one[0][0] >= 0.0);
    CHECK(one[0][0] < 1.0);
    auto four = lhs_sample(unit, 4, 5);
    std::sort(four.begin(), four.end());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(four[i][0] >= 0.25 * static_cast<double>(i));
      CHECK(four[i][0] < 0.25 * static_cast<double>(i + 1));
    }
    const ParamBox box{{1.0, 10.0}, {0.0, kPi / 2}, {0.0, kPi / 2}, {-1.0, 1.0}};
    for (std::size_t n : {4u, 100u, 250u}) CHECK(stratified(lhs_sample(box, n, 9), box));
    CHECK(lhs_sample(box, 10, 1) == lhs_sample(box, 10, 1));
    CHECK(lhs_sample(box, 10, 1) != lhs_sample(box, 10, 2));
    CHECK_THROWS_AS(lhs_sample({}, 3, 1), ConfigError);
    CHECK_THROWS_AS(lhs_sample({{1.0, 1.0}}, 3, 1), ConfigError);
  }

  TEST_CASE("case definitions") {
    const CaseDefinition c1 = case_definition(CaseId::kCase1);
    CHECK(c1.train_count == 1);
    const CaseDefinition c2 = case_definition(CaseId::kCase2);
    CHECK(c2.train_count == 100);
    CHECK(c2.test_count == 1000);
    CHECK(c2.batch_size == 2);
    const CaseDefinition c3 = case_definition(CaseId::kCase3);
    CHECK(c3.train_count == 250);
    CHECK(c3.batch_size == 2);
    CHECK(parse_case("3") == CaseId::kCase3);
    CHECK_THROWS_AS(parse_case("4"), ConfigError);
    const auto params = c3.sample_params(50, 8);
    std::set<double> etas;
    for (const CaseParams& p : params) {
      CHECK(p.source.alpha >= 1.0);
      CHECK(p.source.alpha <= 10.0);
      CHECK(std::abs(p.boundary.eta) <= 1.0);
      etas.insert(p.boundary.eta);
    }
    CHECK(etas.size() == 50);
  }

  TEST_CASE("assembled datasets") {
    const GridSpec g(17);
    const Dataset c1 = assemble_dataset(case_definition(CaseId::kCase1), g, 1, 0, true);
    CHECK(c1.size() == 1);
    CHECK(c1.inputs.at(0, 0, 8, 4) == source_case1(g.coord(4), g.coord(8)));
    CHECK(c1.inputs.at(0, 1, 8, 16) == doctest::Approx(std::cos(2.0 * kPi * 0.5)));
    CHECK(c1.inputs.at(0, 1, 8, 8) == 0.0);

    const Dataset c2 = assemble_dataset(case_definition(CaseId::kCase2), g, 6, 3, true);
    REQUIRE(c2.outputs);
    for (std::size_t i = 0; i < c2.size(); ++i) {
      const ScalarField2D u = c2.outputs->field(i, 0);
      const BoundarySpec spec = boundary_case12();
      const ScalarField2D lap = apply_stencil(laplacian_kernel(g), pad_dirichlet(u, spec, g));
      for (std::size_t r = 1; r + 1 < 17; ++r)
        for (std::size_t c = 1; c + 1 < 17; ++c)
          CHECK(lap(r, c) == doctest::Approx(c2.inputs.at(i, 0, r, c)).epsilon(1e-9).scale(1.0));
    }
    const Dataset again = assemble_dataset(case_definition(CaseId::kCase2), g, 6, 3, false);
    CHECK_FALSE(again.outputs);
    for (std::size_t i = 0; i < again.inputs.values().size(); ++i)
      CHECK(again.inputs.values()[i] == c2.inputs.values()[i]);
    const NormStats fixed{{1.0, 2.0}, {0.0, 3.0}};
    const Dataset test = assemble_dataset(case_definition(CaseId::kCase2), g, 2, 4, false, fixed);
    CHECK(test.norm_stats[0].std == 2.0);
    const FieldBatch labels = solve_labels(c2.inputs);
    for (std::size_t i = 0; i < labels.values().size(); ++i)
      CHECK(labels.values()[i] == doctest::Approx(c2.outputs->values()[i]).epsilon(1e-12));
  }
}
