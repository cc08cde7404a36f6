#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apna {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

/// AS identifier; the routable half of an address tuple.
struct Aid {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const Aid&, const Aid&) = default;
};

/// Host identifier, unique within one AS.
struct Hid {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const Hid&, const Hid&) = default;
};

/// Unix timestamp with one second granularity.
using UnixTime = std::uint32_t;

// Big-endian integer packing. Callers guarantee the destination has room.
constexpr void store_u16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 8);
  out[1] = static_cast<std::uint8_t>(v);
}
constexpr void store_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i, v >>= 8) out[i] = static_cast<std::uint8_t>(v);
}
constexpr void store_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i, v >>= 8) out[i] = static_cast<std::uint8_t>(v);
}
constexpr std::uint16_t load_u16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>((in[0] << 8) | in[1]);
}
constexpr std::uint32_t load_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
  return v;
}
constexpr std::uint64_t load_u64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

std::string to_hex(ByteView data);
/// Throws Error{ParseError} on odd length or non-hex characters. Whitespace is ignored.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
ByteArray<N> to_array(ByteView data) {
  ByteArray<N> out{};
  for (std::size_t i = 0; i < N && i < data.size(); ++i) out[i] = data[i];
  return out;
}

/// Appends big-endian fields to a growing buffer.
class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}
  Writer& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  Writer& u16(std::uint16_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& raw(ByteView data) {
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }

 private:
  Bytes& out_;
};

/// Consumes big-endian fields; every short read throws Error{MalformedMessage}.
class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView take(std::size_t n);
  template <std::size_t N>
  ByteArray<N> array() {
    return to_array<N>(take(N));
  }
  ByteView rest() {
    auto r = data_.subspan(pos_);
    pos_ = data_.size();
    return r;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t offset() const { return pos_; }
  /// Throws Error{MalformedMessage} if unread bytes remain.
  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace apna
