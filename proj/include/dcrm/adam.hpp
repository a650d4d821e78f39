#pragma once

#include <cstdint>
#include <vector>

#include "dcrm/tape.hpp"

namespace dcrm {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list. A parameter without a
/// gradient buffer is treated as having a zero gradient.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Throws DivergenceError before touching anything if a gradient is not finite.
  void step(std::vector<Parameter>& params);

  std::uint64_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace dcrm
