#pragma once

// Ephemeral identifiers: 16-byte encrypt-then-MAC tokens that only the issuing
// AS can open.
//
//   offset  size  field
//   0       8     ct   first 8 bytes of AES-CTR(k_enc, iv || 0^96) XOR (hid || exp || 0^64)
//   8       4     iv   per-mint unique value, big-endian
//   12      4     tag  first 4 bytes of CBC-MAC(k_mac, ct || iv || 0^32)
//
// The CBC-MAC input is always exactly one 16-byte block.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>

#include "apna/bytes.hpp"
#include "apna/crypto/primitives.hpp"

namespace apna {

inline constexpr std::size_t kEphIdSize = 16;

/// Master secret of one AS. Never placed in any wire message.
struct AsSecretKey {
  crypto::Key16 bytes{};
};

struct AsSubkeys {
  crypto::Key16 enc{};
  crypto::Key16 mac{};
};

/// Subkeys are AES_{k_a}(label) for the zero-padded ASCII labels "ephid-enc" and
/// "ephid-mac"; distinct labels under a permutation give distinct keys.
AsSubkeys derive_as_subkeys(const AsSecretKey& master);

struct EphId {
  ByteArray<8> ct{};
  ByteArray<4> iv{};
  ByteArray<4> tag{};

  ByteArray<kEphIdSize> bytes() const;
  static EphId from_bytes(ByteView data);  // requires exactly 16 bytes

  friend auto operator<=>(const EphId&, const EphId&) = default;
};

struct EphIdContents {
  Hid hid;
  UnixTime exp_time = 0;
  friend bool operator==(const EphIdContents&, const EphIdContents&) = default;
};

/// Holds expanded AES schedules for both subkeys. Not thread-safe; use one per thread.
class EphIdCodec {
 public:
  explicit EphIdCodec(const AsSubkeys& subkeys);

  EphId mint(Hid hid, UnixTime exp_time, std::uint32_t iv) const;
  /// Throws Error{AuthenticationFailure} when the tag does not verify.
  EphIdContents open(const EphId& ephid) const;
  std::optional<EphIdContents> try_open(const EphId& ephid) const noexcept;

 private:
  ByteArray<4> tag_for(const ByteArray<8>& ct, const ByteArray<4>& iv) const;

  crypto::Aes128 enc_;
  crypto::Aes128 mac_;
};

EphId mint_ephid(const AsSubkeys& subkeys, Hid hid, UnixTime exp_time, std::uint32_t iv);
EphIdContents open_ephid(const AsSubkeys& subkeys, const EphId& ephid);

struct EphIdHash {
  std::size_t operator()(const EphId& e) const noexcept;
};

}  // namespace apna
