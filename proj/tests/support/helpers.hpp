#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "dcrm/grid.hpp"
#include "dcrm/random.hpp"
#include "dcrm/tape.hpp"

namespace testing_support {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  dcrm::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline dcrm::Tensor random_tensor(dcrm::Shape shape, std::uint64_t seed) {
  return dcrm::Tensor(shape, random_vector(shape.size(), seed));
}

inline dcrm::ScalarField2D random_field(std::size_t n, std::uint64_t seed) {
  return dcrm::ScalarField2D(n, n, random_vector(n * n, seed));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Largest relative deviation between analytic and central-difference
/// gradients of a scalar function of one flat vector. Entries smaller than
/// `floor` are compared on the scale of `floor`, where roundoff dominates.
inline double gradient_mismatch(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, const std::vector<double>& grad,
                                const std::vector<std::size_t>& probes, double eps,
                                double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t k : probes) {
    std::vector<double> xp = x;
    xp[k] = x[k] + eps;
    const double fp = f(xp);
    xp[k] = x[k] - eps;
    const double fm = f(xp);
    const double fd = (fp - fm) / (2.0 * eps);
    const double scale = std::max({std::abs(fd), std::abs(grad[k]), floor});
    if (std::getenv("DCRM_TEST_VERBOSE"))
      std::fprintf(stderr, "probe %zu analytic %.12e fd %.12e\n", k, grad[k], fd);
    worst = std::max(worst, std::abs(fd - grad[k]) / scale);
  }
  return worst;
}

}  // namespace testing_support
