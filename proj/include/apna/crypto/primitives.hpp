#pragma once

// Thin RAII wrappers around the OpenSSL primitives the protocol is built from:
// AES-128 single-block encryption, AES-CMAC, AES-GCM, X25519, Ed25519, HKDF-SHA256.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>

#include "apna/bytes.hpp"

struct evp_cipher_ctx_st;
struct evp_pkey_st;

namespace apna::crypto {

using Key16 = ByteArray<16>;
using Key32 = ByteArray<32>;
using Block = ByteArray<16>;
using PublicKey = ByteArray<32>;
using PrivateKey = ByteArray<32>;
using Signature = ByteArray<64>;
using AeadNonce = ByteArray<12>;

inline constexpr std::size_t kAeadTagSize = 16;

/// Source of key material and identifiers.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint32_t next_u32() {
    ByteArray<4> b;
    fill(b);
    return load_u32(b.data());
  }
  template <std::size_t N>
  ByteArray<N> bytes() {
    ByteArray<N> out;
    fill(out);
    return out;
  }
};

/// Reproducible stream for simulations and tests. Not suitable for production keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

/// OpenSSL's CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

struct CipherCtxDeleter {
  void operator()(evp_cipher_ctx_st* ctx) const noexcept;
};
using CipherCtxPtr = std::unique_ptr<evp_cipher_ctx_st, CipherCtxDeleter>;

/// AES-128 forward direction with a cached key schedule.
/// One instance must not be used from two threads at once.
class Aes128 {
 public:
  explicit Aes128(const Key16& key);
  Block encrypt_block(const Block& in) const;

 private:
  CipherCtxPtr ctx_;
};

/// AES-128-CMAC (RFC 4493) over a message fed in pieces.
class Cmac {
 public:
  explicit Cmac(const Key16& key);

  Cmac& update(ByteView data);
  /// Finalizes and resets, so the instance can authenticate the next message.
  Block finish();
  void reset();

 private:
  void absorb_blocks(const std::uint8_t* data, std::size_t len);

  CipherCtxPtr cbc_;
  Block k1_{};
  Block k2_{};
  Block buffer_{};
  std::size_t buffered_ = 0;
};

struct X25519KeyPair {
  PublicKey public_key{};
  PrivateKey private_key{};

  static X25519KeyPair from_private(const PrivateKey& priv);
  static X25519KeyPair generate(RandomSource& rng);
};

/// Raw X25519. Throws Error{InvalidPublicKey} for low-order peer points (all-zero output).
ByteArray<32> x25519(const PrivateKey& own, const PublicKey& peer);

/// Ed25519 private key in expanded (seed || public) form.
class SigningKey {
 public:
  static SigningKey from_seed(const ByteArray<32>& seed);
  static SigningKey generate(RandomSource& rng);

  const PublicKey& public_key() const { return public_key_; }
  const ByteArray<32>& seed() const { return seed_; }
  Signature sign(ByteView message) const;

 private:
  ByteArray<64> expanded_{};
  ByteArray<32> seed_{};
  PublicKey public_key_{};
};

bool ed25519_verify(const PublicKey& public_key, ByteView message, const Signature& signature);

/// X25519 scalar of an Ed25519 seed: clamped low half of SHA-512(seed).
PrivateKey x25519_private_from_ed25519_seed(const ByteArray<32>& seed);
/// Birational map u = (1 + y) / (1 - y) from an encoded Edwards point to its Montgomery u.
PublicKey montgomery_from_edwards(const PublicKey& edwards);
/// Inverse map y = (u - 1) / (u + 1), encoded with the given sign bit. Empty for u = -1.
std::optional<PublicKey> edwards_from_montgomery(const PublicKey& montgomery, bool sign_bit);

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length);

/// AES-GCM; 16-byte keys select AES-128, 32-byte keys AES-256. Output is ciphertext || tag.
Bytes aead_seal(ByteView key, const AeadNonce& nonce, ByteView associated_data, ByteView plaintext);
/// Throws Error{AuthenticationFailure} on any mismatch.
Bytes aead_open(ByteView key, const AeadNonce& nonce, ByteView associated_data, ByteView sealed);

bool constant_time_equal(ByteView a, ByteView b);

}  // namespace apna::crypto
