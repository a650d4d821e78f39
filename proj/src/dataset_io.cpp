#include "dcrm/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "dcrm/binary_io.hpp"
#include "dcrm/errors.hpp"

namespace dcrm {

namespace binio {

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::kIo, "cannot open " + path);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::kIo, "short write to " + path);
}

}  // namespace binio

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  binio::Writer w;
  w.put_bytes(kDatasetMagic);
  w.put(static_cast<std::uint32_t>(dataset.case_id));
  w.put(static_cast<std::uint64_t>(dataset.seed));
  w.put(static_cast<std::uint32_t>(dataset.inputs.n()));
  w.put(static_cast<std::uint32_t>(dataset.inputs.channels()));
  w.put(static_cast<std::uint32_t>(dataset.inputs.side()));
  w.put(static_cast<std::uint8_t>(dataset.outputs ? 1 : 0));
  for (const auto& s : dataset.norm_stats) {
    w.put(s.mean);
    w.put(s.std);
  }
  w.put_doubles(dataset.inputs.values());
  if (dataset.outputs) w.put_doubles(dataset.outputs->values());
  binio::write_file(path.string(), w.bytes());
}

Dataset read_dataset(const std::filesystem::path& path) {
  using Kind = FormatError::Kind;
  const auto bytes = binio::read_file(path.string());
  binio::Reader r(bytes);

  if (bytes.size() < sizeof(kDatasetMagic) ||
      !std::equal(std::begin(kDatasetMagic), std::end(kDatasetMagic), bytes.begin()))
    throw FormatError(Kind::kBadMagic, "bad magic in " + path.string());
  r.take(sizeof(kDatasetMagic), "magic");

  Dataset d;
  const auto case_raw = r.get<std::uint32_t>("case id");
  d.seed = r.get<std::uint64_t>("seed");
  const auto n = r.get<std::uint32_t>("sample count");
  const auto channels = r.get<std::uint32_t>("channel count");
  const auto dof = r.get<std::uint32_t>("grid size");
  const auto has_outputs = r.get<std::uint8_t>("output flag");

  if (case_raw < 1 || case_raw > 3)
    throw FormatError(Kind::kHeaderMismatch, "header mismatch: unknown case id");
  if (channels != 2) throw FormatError(Kind::kHeaderMismatch, "header mismatch: C_in must be 2");
  if (dof < 3) throw FormatError(Kind::kHeaderMismatch, "header mismatch: DOF below 3");
  if (has_outputs > 1) throw FormatError(Kind::kHeaderMismatch, "header mismatch: output flag");
  d.case_id = static_cast<CaseId>(case_raw);

  d.norm_stats.resize(channels);
  for (auto& s : d.norm_stats) {
    s.mean = r.get<double>("normalization mean");
    s.std = r.get<double>("normalization std");
  }

  d.inputs = FieldBatch(n, channels, dof);
  r.get_doubles(d.inputs.values(), "input payload");
  if (has_outputs) {
    d.outputs = FieldBatch(n, 1, dof);
    r.get_doubles(d.outputs->values(), "output payload");
  }
  if (r.remaining() != 0)
    throw FormatError(Kind::kHeaderMismatch, "header mismatch: trailing bytes after payload");
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw FormatError(Kind::kHeaderMismatch, std::string("header mismatch: ") + e.what());
  }
  return d;
}

}  // namespace dcrm
