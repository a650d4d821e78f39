#include "dcrm/adam.hpp"

#include <cmath>

#include "dcrm/errors.hpp"

namespace dcrm {

void Adam::step(std::vector<Parameter>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].value.size(), 0.0);
      v_[i].assign(params[i].value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ConfigError("Adam: parameter list changed between steps");
  for (const auto& p : params)
    if (!p.grad.empty() && !p.grad.all_finite())
      throw DivergenceError("divergence: non-finite gradient in " + p.name);

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    if (p.value.size() != m_[i].size()) throw ConfigError("Adam: parameter shape changed");
    const bool has_grad = !p.grad.empty();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = has_grad ? p.grad[k] : 0.0;
      m_[i][k] = b1 * m_[i][k] + (1.0 - b1) * g;
      v_[i][k] = b2 * v_[i][k] + (1.0 - b2) * g * g;
      const double mhat = m_[i][k] / c1;
      const double vhat = v_[i][k] / c2;
      p.value[k] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

}  // namespace dcrm
