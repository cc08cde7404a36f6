#include "apna/crypto/keys.hpp"

#include <cstring>
#include <string_view>

namespace apna {

namespace {
ByteView label(std::string_view s) { return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}; }
}  // namespace

HostAsKeys derive_host_as_keys(const LongTermKeyPair& own, const crypto::PublicKey& peer_public) {
  const auto shared = crypto::x25519(own.pair.private_key, peer_public);
  HostAsKeys keys;
  keys.ctrl = to_array<16>(crypto::hkdf_sha256(shared, {}, label("host-ctrl"), 16));
  keys.pkt = to_array<16>(crypto::hkdf_sha256(shared, {}, label("host-pkt"), 16));
  return keys;
}

EphemeralKeyPair EphemeralKeyPair::from_seed(const ByteArray<32>& seed) {
  auto signer = crypto::SigningKey::from_seed(seed);
  auto exchange = crypto::X25519KeyPair::from_private(crypto::x25519_private_from_ed25519_seed(seed));
  return EphemeralKeyPair(std::move(signer), exchange);
}

bool verify_ephemeral_signature(const crypto::PublicKey& x25519_public, ByteView message,
                                const crypto::Signature& signature) {
  for (bool sign_bit : {false, true}) {
    auto edwards = crypto::edwards_from_montgomery(x25519_public, sign_bit);
    if (edwards && crypto::ed25519_verify(*edwards, message, signature)) return true;
  }
  return false;
}

SessionKey dh_session_key(const EphemeralKeyPair& own, const crypto::PublicKey& peer_public, const EphId& local,
                          const EphId& peer) {
  const auto shared = crypto::x25519(own.exchange_pair().private_key, peer_public);
  const auto a = local.bytes();
  const auto b = peer.bytes();
  ByteArray<2 * kEphIdSize> salt;
  const bool local_first = a <= b;
  std::memcpy(salt.data(), (local_first ? a : b).data(), kEphIdSize);
  std::memcpy(salt.data() + kEphIdSize, (local_first ? b : a).data(), kEphIdSize);
  SessionKey key;
  key.bytes = to_array<32>(crypto::hkdf_sha256(shared, salt, label("session"), 32));
  return key;
}

Bytes seal_payload(const SessionKey& key, const crypto::AeadNonce& nonce, ByteView associated_data,
                   ByteView plaintext) {
  return crypto::aead_seal(key.bytes, nonce, associated_data, plaintext);
}

Bytes open_payload(const SessionKey& key, const crypto::AeadNonce& nonce, ByteView associated_data,
                   ByteView sealed) {
  return crypto::aead_open(key.bytes, nonce, associated_data, sealed);
}

PacketMac packet_mac(const crypto::Key16& k_pkt, ByteView header_with_zeroed_mac, ByteView payload) {
  crypto::Cmac cmac(k_pkt);
  const auto full = cmac.update(header_with_zeroed_mac).update(payload).finish();
  return to_array<kPacketMacSize>(full);
}

bool verify_packet_mac(const crypto::Key16& k_pkt, ByteView header_with_zeroed_mac, ByteView payload,
                       const PacketMac& mac) {
  return crypto::constant_time_equal(packet_mac(k_pkt, header_with_zeroed_mac, payload), mac);
}

}  // namespace apna
