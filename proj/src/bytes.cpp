#include "apna/bytes.hpp"

#include <cctype>

#include "apna/error.hpp"

namespace apna {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::AuthenticationFailure: return "AuthenticationFailure";
    case Errc::InvalidPublicKey: return "InvalidPublicKey";
    case Errc::TruncatedHeader: return "TruncatedHeader";
    case Errc::TruncatedFrame: return "TruncatedFrame";
    case Errc::UnknownProtocolType: return "UnknownProtocolType";
    case Errc::MalformedMessage: return "MalformedMessage";
    case Errc::DuplicateHid: return "DuplicateHid";
    case Errc::UnknownHid: return "UnknownHid";
    case Errc::Expired: return "Expired";
    case Errc::BadCertificate: return "BadCertificate";
    case Errc::ExpiredCertificate: return "ExpiredCertificate";
    case Errc::ReplayDetected: return "ReplayDetected";
    case Errc::NameNotFound: return "NameNotFound";
    case Errc::NoSession: return "NoSession";
    case Errc::NoEphId: return "NoEphId";
    case Errc::ScriptError: return "ScriptError";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  Bytes out;
  int high = -1;
  std::size_t pos = 0;
  for (char c : hex) {
    ++pos;
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int v = nibble(c);
    if (v < 0) throw Error(Errc::ParseError, "non-hex character at position " + std::to_string(pos - 1));
    if (high < 0) {
      high = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((high << 4) | v));
      high = -1;
    }
  }
  if (high >= 0) throw Error(Errc::ParseError, "odd number of hex digits");
  return out;
}

Writer& Writer::u16(std::uint16_t v) {
  std::uint8_t b[2];
  store_u16(b, v);
  return raw(b);
}
Writer& Writer::u32(std::uint32_t v) {
  std::uint8_t b[4];
  store_u32(b, v);
  return raw(b);
}
Writer& Writer::u64(std::uint64_t v) {
  std::uint8_t b[8];
  store_u64(b, v);
  return raw(b);
}

ByteView Reader::take(std::size_t n) {
  if (remaining() < n) {
    throw Error(Errc::MalformedMessage, "need " + std::to_string(n) + " bytes at offset " +
                                            std::to_string(pos_) + ", have " +
                                            std::to_string(remaining()));
  }
  auto r = data_.subspan(pos_, n);
  pos_ += n;
  return r;
}
std::uint8_t Reader::u8() { return take(1)[0]; }
std::uint16_t Reader::u16() { return load_u16(take(2).data()); }
std::uint32_t Reader::u32() { return load_u32(take(4).data()); }
std::uint64_t Reader::u64() { return load_u64(take(8).data()); }

void Reader::expect_end() const {
  if (remaining() != 0) {
    throw Error(Errc::MalformedMessage,
                std::to_string(remaining()) + " trailing bytes at offset " + std::to_string(pos_));
  }
}

}  // namespace apna
