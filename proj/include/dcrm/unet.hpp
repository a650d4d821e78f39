#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcrm/ops.hpp"
#include "dcrm/tape.hpp"

namespace dcrm {

struct NetworkConfig {
  std::size_t input_resolution = 33;  // DOF
  std::size_t in_channels = 2;
  std::size_t out_channels = 1;
  std::size_t depth = 4;           // contracting blocks = expanding blocks
  std::size_t base_channels = 8;   // width of the first convolutional layer
  double leaky_slope = 0.2;
  double dropout_p = 0.5;
  std::size_t dropout_blocks = 3;  // leading contracting blocks that use dropout
  std::size_t kernel_size = 3;

  static NetworkConfig full_scale();  // DOF 128, depth 6, base 32
  static NetworkConfig desk(std::size_t dof);

  /// Smallest multiple of 2^depth that holds the input. Inputs are zero
  /// padded to this size, centred, and the output is cropped back.
  std::size_t padded_resolution() const;
  std::size_t pad_offset() const { return (padded_resolution() - input_resolution) / 2; }
  void validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

/// Input/output extents of one named stage of the forward pass.
struct BlockTrace {
  std::string name;
  Shape input;
  Shape output;
};

/// UNet heteroencoder: input convolution, `depth` contracting blocks
/// (conv-BN-[dropout]-LeakyReLU twice, then 2x2 max pooling), `depth`
/// expanding blocks (2x upsampling, concatenation with the matching
/// contracting block's pre-pool features, conv-BN-ReLU twice) and an
/// output convolution.
class UNet {
 public:
  /// Parameters are drawn uniformly in +-1/sqrt(fan_in) from `seed`;
  /// batch-norm layers start at scale 1, shift 0.
  UNet(const NetworkConfig& config, std::uint64_t seed);

  const NetworkConfig& config() const noexcept { return config_; }
  std::vector<Parameter>& parameters() noexcept { return params_; }
  const std::vector<Parameter>& parameters() const noexcept { return params_; }
  std::vector<BatchNormState>& batchnorm_states() noexcept { return bn_; }
  const std::vector<BatchNormState>& batchnorm_states() const noexcept { return bn_; }
  std::size_t parameter_count() const;

  /// input [N, in_channels, DOF, DOF] -> output [N, out_channels, DOF, DOF].
  Var forward(Tape& tape, Var input, Mode mode, Rng& dropout_rng,
              std::vector<BlockTrace>* trace = nullptr);

  void zero_grad();

 private:
  struct Conv {
    std::size_t weight;
    std::size_t bias;
  };
  struct Norm {
    std::size_t gamma;
    std::size_t beta;
    std::size_t state;
  };
  struct Block {
    Conv conv1;
    Norm bn1;
    Conv conv2;
    Norm bn2;
    bool dropout = false;
  };

  Conv add_conv(const std::string& name, std::size_t c_in, std::size_t c_out, Rng& rng);
  Norm add_norm(const std::string& name, std::size_t channels);
  Var conv(Tape& tape, Var x, const Conv& c);
  Var norm(Tape& tape, Var x, const Norm& n, Mode mode);

  NetworkConfig config_;
  std::vector<Parameter> params_;
  std::vector<BatchNormState> bn_;
  Conv in_conv_{};
  std::vector<Block> down_;
  std::vector<Block> up_;
  Conv out_conv_{};
};

}  // namespace dcrm
