#pragma once

// Key establishment: host<->AS keys from long-term X25519 pairs, per-session
// keys from ephemeral pairs only, payload AEAD and the per-packet MAC.

#include "apna/bytes.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/primitives.hpp"

namespace apna {

/// Long-lived X25519 pair of a host or an AS. Cannot produce session keys.
struct LongTermKeyPair {
  crypto::X25519KeyPair pair;
  static LongTermKeyPair generate(crypto::RandomSource& rng) { return {crypto::X25519KeyPair::generate(rng)}; }
};

/// Key pair bound to one EphID; the private half never leaves its host.
/// Generated as an Ed25519 seed: the birationally equivalent X25519 pair does key
/// agreement, the Ed25519 form signs shutoff requests. public_key() is the X25519 u.
class EphemeralKeyPair {
 public:
  static EphemeralKeyPair from_seed(const ByteArray<32>& seed);
  static EphemeralKeyPair generate(crypto::RandomSource& rng) { return from_seed(rng.bytes<32>()); }

  const crypto::PublicKey& public_key() const { return exchange_.public_key; }
  const crypto::X25519KeyPair& exchange_pair() const { return exchange_; }
  const ByteArray<32>& seed() const { return signer_.seed(); }
  crypto::Signature sign(ByteView message) const { return signer_.sign(message); }

 private:
  EphemeralKeyPair(crypto::SigningKey signer, crypto::X25519KeyPair exchange)
      : signer_(std::move(signer)), exchange_(exchange) {}

  crypto::SigningKey signer_;
  crypto::X25519KeyPair exchange_;
};

/// Verifies a signature made by EphemeralKeyPair::sign given only its X25519 public key.
/// The Montgomery form drops the Edwards sign bit, so both candidates are tried.
bool verify_ephemeral_signature(const crypto::PublicKey& x25519_public, ByteView message,
                                const crypto::Signature& signature);

/// k_HA: ctrl encrypts EphID requests/replies, pkt authenticates every data-plane packet.
struct HostAsKeys {
  crypto::Key16 ctrl{};
  crypto::Key16 pkt{};
  friend bool operator==(const HostAsKeys&, const HostAsKeys&) = default;
};

struct SessionKey {
  crypto::Key32 bytes{};
  friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

/// Same result on both sides: host(own=host, peer=AS kex pub) and AS(own=AS kex, peer=host pub).
HostAsKeys derive_host_as_keys(const LongTermKeyPair& own, const crypto::PublicKey& peer_public);

/// X25519 then HKDF-SHA256 salted with the two EphIDs in ascending byte order,
/// so the argument order of local/peer does not matter.
SessionKey dh_session_key(const EphemeralKeyPair& own, const crypto::PublicKey& peer_public, const EphId& local,
                          const EphId& peer);

Bytes seal_payload(const SessionKey& key, const crypto::AeadNonce& nonce, ByteView associated_data,
                   ByteView plaintext);
/// Throws Error{AuthenticationFailure}.
Bytes open_payload(const SessionKey& key, const crypto::AeadNonce& nonce, ByteView associated_data,
                   ByteView sealed);

inline constexpr std::size_t kPacketMacSize = 8;
using PacketMac = ByteArray<kPacketMacSize>;

/// AES-CMAC truncated to 8 bytes over header (MAC field already zeroed) || payload.
PacketMac packet_mac(const crypto::Key16& k_pkt, ByteView header_with_zeroed_mac, ByteView payload);
bool verify_packet_mac(const crypto::Key16& k_pkt, ByteView header_with_zeroed_mac, ByteView payload,
                       const PacketMac& mac);

}  // namespace apna
