#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "dcrm/errors.hpp"

namespace dcrm::binio {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed endianness is not supported");

template <class T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}

/// Append-only little-endian byte sink.
class Writer {
 public:
  template <class T>
  void put(T value) {
    value = to_little(value);
    const auto* p = reinterpret_cast<const unsigned char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::span<const char> raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }
  void put_doubles(std::span<const double> values) {
    for (double v : values) put(v);
  }
  const std::vector<unsigned char>& bytes() const noexcept { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

/// Cursor over a byte buffer; running past the end raises kTruncatedPayload.
class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(value);
  }
  void get_doubles(std::span<double> out, const char* what) {
    need(out.size() * sizeof(double), what);
    for (double& v : out) v = get<double>(what);
  }
  std::span<const unsigned char> take(std::size_t count, const char* what) {
    need(count, what);
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count, const char* what) const {
    if (bytes_.size() - pos_ < count)
      throw FormatError(FormatError::Kind::kTruncatedPayload,
                        std::string("truncated payload while reading ") + what);
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const unsigned char> bytes);

}  // namespace dcrm::binio
