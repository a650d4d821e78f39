#include "dcrm/checkpoint.hpp"

#include <algorithm>
#include <iterator>

#include "dcrm/binary_io.hpp"
#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

constexpr std::uint32_t kVersion = 1;
using Kind = FormatError::Kind;

[[noreturn]] void mismatch(const std::string& what) {
  throw FormatError(Kind::kHeaderMismatch, "header mismatch: " + what);
}

}  // namespace

void write_checkpoint(const Model& model, const std::filesystem::path& path) {
  const ModelInfo& info = model.info;
  const NetworkConfig& net = model.net.config();
  binio::Writer w;
  w.put_bytes(kCheckpointMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(info.method));
  w.put(static_cast<std::uint32_t>(info.case_id));
  w.put(info.seed);
  w.put(info.epochs);
  w.put(static_cast<std::uint32_t>(info.quadrature));
  w.put(static_cast<std::uint32_t>(info.ghost));
  w.put(info.source_sign);
  w.put(static_cast<std::uint32_t>(info.input_stats.size()));
  for (const auto& s : info.input_stats) {
    w.put(s.mean);
    w.put(s.std);
  }
  w.put(info.output_stats.mean);
  w.put(info.output_stats.std);

  w.put(static_cast<std::uint32_t>(net.input_resolution));
  w.put(static_cast<std::uint32_t>(net.in_channels));
  w.put(static_cast<std::uint32_t>(net.out_channels));
  w.put(static_cast<std::uint32_t>(net.depth));
  w.put(static_cast<std::uint32_t>(net.base_channels));
  w.put(net.leaky_slope);
  w.put(net.dropout_p);
  w.put(static_cast<std::uint32_t>(net.dropout_blocks));
  w.put(static_cast<std::uint32_t>(net.kernel_size));

  const auto& params = model.net.parameters();
  w.put(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.put(static_cast<std::uint32_t>(p.name.size()));
    w.put_bytes(std::span<const char>(p.name.data(), p.name.size()));
    const Shape s = p.value.shape();
    for (std::size_t e : {s.n, s.c, s.h, s.w}) w.put(static_cast<std::uint32_t>(e));
    w.put_doubles(p.value.values());
  }
  const auto& bn = model.net.batchnorm_states();
  w.put(static_cast<std::uint32_t>(bn.size()));
  for (const auto& b : bn) {
    w.put(static_cast<std::uint32_t>(b.running_mean.size()));
    w.put(b.momentum);
    w.put(b.eps);
    w.put_doubles(b.running_mean);
    w.put_doubles(b.running_var);
  }
  binio::write_file(path.string(), w.bytes());
}

Model read_checkpoint(const std::filesystem::path& path) {
  const auto bytes = binio::read_file(path.string());
  if (bytes.size() < sizeof(kCheckpointMagic) ||
      !std::equal(std::begin(kCheckpointMagic), std::end(kCheckpointMagic), bytes.begin()))
    throw FormatError(Kind::kBadMagic, "bad magic in " + path.string());
  binio::Reader r(bytes);
  r.take(sizeof(kCheckpointMagic), "magic");
  if (r.get<std::uint32_t>("version") != kVersion) mismatch("unsupported checkpoint version");

  ModelInfo info;
  const auto method = r.get<std::uint32_t>("method");
  if (method > 2) mismatch("unknown method");
  info.method = static_cast<Method>(method);
  const auto case_id = r.get<std::uint32_t>("case id");
  if (case_id < 1 || case_id > 3) mismatch("unknown case id");
  info.case_id = static_cast<CaseId>(case_id);
  info.seed = r.get<std::uint64_t>("seed");
  info.epochs = r.get<std::uint64_t>("epochs");
  const auto quad = r.get<std::uint32_t>("quadrature");
  if (quad > 1) mismatch("unknown quadrature");
  info.quadrature = static_cast<QuadratureKind>(quad);
  const auto ghost = r.get<std::uint32_t>("ghost mode");
  if (ghost > 1) mismatch("unknown ghost mode");
  info.ghost = static_cast<DirichletGhost>(ghost);
  info.source_sign = r.get<double>("source sign");
  const auto stats = r.get<std::uint32_t>("input channel count");
  if (stats > 64) mismatch("input channel count");
  info.input_stats.resize(stats);
  for (auto& s : info.input_stats) {
    s.mean = r.get<double>("input mean");
    s.std = r.get<double>("input std");
  }
  info.output_stats.mean = r.get<double>("output mean");
  info.output_stats.std = r.get<double>("output std");

  NetworkConfig net;
  net.input_resolution = r.get<std::uint32_t>("input resolution");
  net.in_channels = r.get<std::uint32_t>("input channels");
  net.out_channels = r.get<std::uint32_t>("output channels");
  net.depth = r.get<std::uint32_t>("depth");
  net.base_channels = r.get<std::uint32_t>("base channels");
  net.leaky_slope = r.get<double>("leaky slope");
  net.dropout_p = r.get<double>("dropout probability");
  net.dropout_blocks = r.get<std::uint32_t>("dropout blocks");
  net.kernel_size = r.get<std::uint32_t>("kernel size");
  try {
    net.validate();
  } catch (const ConfigError& e) {
    mismatch(e.what());
  }
  if (info.input_stats.size() != net.in_channels) mismatch("input statistics do not match channels");

  Model model{info, UNet(net, 0)};
  auto& params = model.net.parameters();
  if (r.get<std::uint32_t>("parameter count") != params.size()) mismatch("parameter count");
  for (auto& p : params) {
    const auto len = r.get<std::uint32_t>("parameter name length");
    const auto raw = r.take(len, "parameter name");
    const std::string name(raw.begin(), raw.end());
    if (name != p.name) mismatch("expected parameter " + p.name + ", found " + name);
    Shape s;
    s.n = r.get<std::uint32_t>("parameter shape");
    s.c = r.get<std::uint32_t>("parameter shape");
    s.h = r.get<std::uint32_t>("parameter shape");
    s.w = r.get<std::uint32_t>("parameter shape");
    if (!(s == p.value.shape())) mismatch("shape of " + p.name);
    r.get_doubles(p.value.values(), "parameter values");
  }
  auto& bn = model.net.batchnorm_states();
  if (r.get<std::uint32_t>("batch-norm count") != bn.size()) mismatch("batch-norm count");
  for (auto& b : bn) {
    if (r.get<std::uint32_t>("batch-norm channels") != b.running_mean.size())
      mismatch("batch-norm channels");
    b.momentum = r.get<double>("batch-norm momentum");
    b.eps = r.get<double>("batch-norm eps");
    r.get_doubles(b.running_mean, "running mean");
    r.get_doubles(b.running_var, "running variance");
  }
  if (r.remaining() != 0) mismatch("trailing bytes after payload");
  return model;
}

}  // namespace dcrm
