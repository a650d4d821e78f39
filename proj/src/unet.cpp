#include "dcrm/unet.hpp"

#include <cmath>

#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

std::string ordinal(std::size_t k) {
  const char* suffix = "th";
  if (k % 100 < 11 || k % 100 > 13) {
    if (k % 10 == 1) suffix = "st";
    if (k % 10 == 2) suffix = "nd";
    if (k % 10 == 3) suffix = "rd";
  }
  return std::to_string(k) + suffix;
}

}  // namespace

NetworkConfig NetworkConfig::full_scale() {
  NetworkConfig c;
  c.input_resolution = 128;
  c.depth = 6;
  c.base_channels = 32;
  return c;
}

NetworkConfig NetworkConfig::desk(std::size_t dof) {
  NetworkConfig c;
  c.input_resolution = dof;
  return c;
}

std::size_t NetworkConfig::padded_resolution() const {
  const std::size_t unit = std::size_t{1} << depth;
  return (input_resolution + unit - 1) / unit * unit;
}

void NetworkConfig::validate() const {
  if (input_resolution < 3) throw ConfigError("network input resolution must be at least 3");
  if (depth < 1 || depth > 12) throw ConfigError("network depth must lie in [1, 12]");
  if (base_channels < 1) throw ConfigError("network needs at least one base channel");
  if (in_channels < 1 || out_channels < 1) throw ConfigError("network channel counts must be positive");
  if (kernel_size % 2 == 0) throw ConfigError("kernel size must be odd");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ConfigError("dropout probability must lie in [0, 1)");
  if (dropout_blocks > depth) throw ConfigError("more dropout blocks than contracting blocks");
}

UNet::Conv UNet::add_conv(const std::string& name, std::size_t c_in, std::size_t c_out, Rng& rng) {
  const std::size_t k = config_.kernel_size;
  const double bound = 1.0 / std::sqrt(static_cast<double>(c_in * k * k));
  Conv c{params_.size(), params_.size() + 1};
  Parameter w{name + ".weight", Tensor({c_out, c_in, k, k}), {}};
  for (double& v : w.value.values()) v = rng.uniform(-bound, bound);
  Parameter b{name + ".bias", Tensor({1, c_out, 1, 1}), {}};
  for (double& v : b.value.values()) v = rng.uniform(-bound, bound);
  params_.push_back(std::move(w));
  params_.push_back(std::move(b));
  return c;
}

UNet::Norm UNet::add_norm(const std::string& name, std::size_t channels) {
  Norm n{params_.size(), params_.size() + 1, bn_.size()};
  params_.push_back({name + ".gamma", Tensor({1, channels, 1, 1}, 1.0), {}});
  params_.push_back({name + ".beta", Tensor({1, channels, 1, 1}, 0.0), {}});
  bn_.emplace_back(channels);
  return n;
}

UNet::UNet(const NetworkConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const std::size_t base = config_.base_channels;
  in_conv_ = add_conv("in_conv", config_.in_channels, base, rng);
  for (std::size_t k = 0; k < config_.depth; ++k) {
    const std::size_t c_in = base << k;
    const std::string name = "down" + std::to_string(k + 1);
    Block b;
    b.conv1 = add_conv(name + ".conv1", c_in, 2 * c_in, rng);
    b.bn1 = add_norm(name + ".bn1", 2 * c_in);
    b.conv2 = add_conv(name + ".conv2", 2 * c_in, 2 * c_in, rng);
    b.bn2 = add_norm(name + ".bn2", 2 * c_in);
    b.dropout = k < config_.dropout_blocks;
    down_.push_back(b);
  }
  for (std::size_t k = 0; k < config_.depth; ++k) {
    const std::size_t c = base << (config_.depth - k);
    const std::string name = "up" + std::to_string(k + 1);
    Block b;
    b.conv1 = add_conv(name + ".conv1", 2 * c, c / 2, rng);
    b.bn1 = add_norm(name + ".bn1", c / 2);
    b.conv2 = add_conv(name + ".conv2", c / 2, c / 2, rng);
    b.bn2 = add_norm(name + ".bn2", c / 2);
    up_.push_back(b);
  }
  out_conv_ = add_conv("out_conv", base, config_.out_channels, rng);
}

std::size_t UNet::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

void UNet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

Var UNet::conv(Tape& tape, Var x, const Conv& c) {
  return conv2d(tape, x, tape.parameter(params_[c.weight]), tape.parameter(params_[c.bias]));
}

Var UNet::norm(Tape& tape, Var x, const Norm& n, Mode mode) {
  return batchnorm2d(tape, x, tape.parameter(params_[n.gamma]), tape.parameter(params_[n.beta]),
                     bn_[n.state], mode);
}

Var UNet::forward(Tape& tape, Var input, Mode mode, Rng& dropout_rng,
                  std::vector<BlockTrace>* trace) {
  const Shape in_shape = tape.value(input).shape();
  if (in_shape.c != config_.in_channels || in_shape.h != config_.input_resolution ||
      in_shape.w != config_.input_resolution)
    throw ShapeError("network input " + in_shape.str() + " does not match configuration (" +
                     std::to_string(config_.in_channels) + " channels, resolution " +
                     std::to_string(config_.input_resolution) + ")");
  const auto record = [&](const std::string& name, Var from, Var to) {
    if (trace) trace->push_back({name, tape.value(from).shape(), tape.value(to).shape()});
  };

  const std::size_t res = config_.padded_resolution();
  const std::size_t offset = config_.pad_offset();
  const Var padded = pad_spatial(tape, input, res, offset);

  Var x = conv(tape, padded, in_conv_);
  record("1st convolutional layer", padded, x);

  std::vector<Var> skips;
  for (std::size_t k = 0; k < down_.size(); ++k) {
    const Block& b = down_[k];
    const Var block_in = x;
    x = norm(tape, conv(tape, x, b.conv1), b.bn1, mode);
    if (b.dropout) x = dropout(tape, x, config_.dropout_p, mode, dropout_rng);
    x = leaky_relu(tape, x, config_.leaky_slope);
    x = norm(tape, conv(tape, x, b.conv2), b.bn2, mode);
    if (b.dropout) x = dropout(tape, x, config_.dropout_p, mode, dropout_rng);
    x = leaky_relu(tape, x, config_.leaky_slope);
    skips.push_back(x);
    x = maxpool2(tape, x);
    record(ordinal(k + 1) + " contracting block", block_in, x);
  }
  for (std::size_t k = 0; k < up_.size(); ++k) {
    const Block& b = up_[k];
    const Var block_in = x;
    x = concat_channels(tape, upsample2(tape, x), skips[skips.size() - 1 - k]);
    x = relu(tape, norm(tape, conv(tape, x, b.conv1), b.bn1, mode));
    x = relu(tape, norm(tape, conv(tape, x, b.conv2), b.bn2, mode));
    record(ordinal(k + 1) + " expanding block", block_in, x);
  }
  const Var block_in = x;
  x = conv(tape, x, out_conv_);
  record("2nd convolutional layer", block_in, x);
  return crop_spatial(tape, x, config_.input_resolution, offset);
}

}  // namespace dcrm
