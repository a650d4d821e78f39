#pragma once

#include <cstddef>
#include <vector>

#include "dcrm/random.hpp"
#include "dcrm/tape.hpp"

namespace dcrm {

enum class Mode { kTrain, kEval };

/// Same-size correlation: weight [O, C, k, k] with odd k, zero padding k/2,
/// stride 1, bias [1, O, 1, 1]. out[o] = sum_c w[o,c] * x[c] + b[o].
Var conv2d(Tape& tape, Var x, Var weight, Var bias);

/// max(z,0) + slope*min(z,0); the derivative at 0 is taken from the positive side.
Var leaky_relu(Tape& tape, Var x, double slope);
Var relu(Tape& tape, Var x);

/// 2x2 max pooling with stride 2; requires even height and width.
Var maxpool2(Tape& tape, Var x);
/// Nearest-neighbour 2x upsampling.
Var upsample2(Tape& tape, Var x);

/// Running statistics of one batch-norm layer.
struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  explicit BatchNormState(std::size_t channels = 0)
      : running_mean(channels, 0.0), running_var(channels, 1.0) {}
};

/// Per-channel normalization over (n, h, w), then gamma*xhat + beta with
/// gamma, beta of shape [1, C, 1, 1]. Train mode normalizes with the batch
/// statistics and updates the running ones (unbiased variance); eval mode
/// uses the running statistics.
Var batchnorm2d(Tape& tape, Var x, Var gamma, Var beta, BatchNormState& state, Mode mode);

/// Train mode zeroes each element with probability p and scales survivors by
/// 1/(1-p); eval mode is the identity. Throws ConfigError unless 0 <= p < 1.
Var dropout(Tape& tape, Var x, double p, Mode mode, Rng& rng);

/// Stacks b's channels after a's; batch and spatial extents must agree.
Var concat_channels(Tape& tape, Var a, Var b);

/// Embeds x in a zero field of side `target`, top-left corner at (offset, offset).
Var pad_spatial(Tape& tape, Var x, std::size_t target, std::size_t offset);
/// Extracts the size x size window starting at (offset, offset).
Var crop_spatial(Tape& tape, Var x, std::size_t size, std::size_t offset);

/// scale*x + shift elementwise.
Var affine(Tape& tape, Var x, double scale, double shift);

}  // namespace dcrm
