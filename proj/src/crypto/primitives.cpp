#include "apna/crypto/primitives.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/params.h>
#include <openssl/rand.h>
#include <openssl/sha.h>
#include <sodium.h>

#include <algorithm>
#include <cstring>

#include "apna/error.hpp"

namespace apna::crypto {

namespace {

[[noreturn]] void fail(const char* what) { throw std::runtime_error(std::string("crypto: ") + what); }

void ensure_sodium() {
  static const int ready = sodium_init();
  if (ready < 0) fail("libsodium init");
}

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const noexcept { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const noexcept { EVP_PKEY_CTX_free(p); }
};
struct KdfCtxDeleter {
  void operator()(EVP_KDF_CTX* p) const noexcept { EVP_KDF_CTX_free(p); }
};

CipherCtxPtr new_cipher_ctx(const EVP_CIPHER* cipher, const std::uint8_t* key) {
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key, nullptr) != 1) fail("cipher init");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  return ctx;
}

Block dbl(const Block& in) {
  Block out{};
  std::uint8_t carry = 0;
  for (int i = 15; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>((in[i] << 1) | carry);
    carry = in[i] >> 7;
  }
  if (in[0] & 0x80) out[15] ^= 0x87;
  return out;
}

}  // namespace

void CipherCtxDeleter::operator()(evp_cipher_ctx_st* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, word >>= 8) out[i++] = static_cast<std::uint8_t>(word);
  }
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) fail("RAND_bytes");
}

Aes128::Aes128(const Key16& key) : ctx_(new_cipher_ctx(EVP_aes_128_ecb(), key.data())) {}

Block Aes128::encrypt_block(const Block& in) const {
  Block out{};
  int len = 0;
  if (EVP_EncryptUpdate(ctx_.get(), out.data(), &len, in.data(), 16) != 1 || len != 16) fail("aes block");
  return out;
}

Cmac::Cmac(const Key16& key) : cbc_(new_cipher_ctx(EVP_aes_128_cbc(), key.data())) {
  Block zero{};
  Block l = Aes128(key).encrypt_block(zero);
  k1_ = dbl(l);
  k2_ = dbl(k1_);
  reset();
}

void Cmac::reset() {
  static const Block kZeroIv{};
  if (EVP_EncryptInit_ex(cbc_.get(), nullptr, nullptr, nullptr, kZeroIv.data()) != 1) fail("cmac reset");
  buffered_ = 0;
}

void Cmac::absorb_blocks(const std::uint8_t* data, std::size_t len) {
  // CBC state lives in the cipher context; only the chaining value matters.
  std::uint8_t scratch[512];
  while (len > 0) {
    std::size_t chunk = std::min(len, sizeof(scratch));
    int out = 0;
    if (EVP_EncryptUpdate(cbc_.get(), scratch, &out, data, static_cast<int>(chunk)) != 1) fail("cmac update");
    data += chunk;
    len -= chunk;
  }
}

Cmac& Cmac::update(ByteView data) {
  const std::uint8_t* p = data.data();
  std::size_t n = data.size();
  if (n == 0) return *this;
  // Top up a partial buffer first. A full buffer is only flushed once more input
  // arrives, because the final block needs the K1/K2 treatment.
  if (buffered_ > 0 && buffered_ < 16) {
    std::size_t take = std::min(n, 16 - buffered_);
    std::memcpy(buffer_.data() + buffered_, p, take);
    buffered_ += take;
    p += take;
    n -= take;
    if (n == 0) return *this;
  }
  if (buffered_ == 16) {
    absorb_blocks(buffer_.data(), 16);
    buffered_ = 0;
  }
  // Keep at least one byte (and at most one full block) back for finish().
  std::size_t direct = n > 16 ? ((n - 1) / 16) * 16 : 0;
  if (direct > 0) absorb_blocks(p, direct);
  p += direct;
  n -= direct;
  std::memcpy(buffer_.data(), p, n);
  buffered_ = n;
  return *this;
}

Block Cmac::finish() {
  Block last{};
  if (buffered_ == 16) {
    for (int i = 0; i < 16; ++i) last[i] = buffer_[i] ^ k1_[i];
  } else {
    std::memcpy(last.data(), buffer_.data(), buffered_);
    last[buffered_] = 0x80;
    for (int i = 0; i < 16; ++i) last[i] ^= k2_[i];
  }
  Block tag{};
  int out = 0;
  if (EVP_EncryptUpdate(cbc_.get(), tag.data(), &out, last.data(), 16) != 1 || out != 16) fail("cmac final");
  reset();
  return tag;
}

X25519KeyPair X25519KeyPair::from_private(const PrivateKey& priv) {
  std::unique_ptr<EVP_PKEY, PkeyDeleter> key(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, priv.data(), priv.size()));
  if (!key) fail("x25519 key");
  X25519KeyPair pair;
  pair.private_key = priv;
  std::size_t len = pair.public_key.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len) != 1 || len != 32) {
    fail("x25519 public");
  }
  return pair;
}

X25519KeyPair X25519KeyPair::generate(RandomSource& rng) { return from_private(rng.bytes<32>()); }

ByteArray<32> x25519(const PrivateKey& own, const PublicKey& peer) {
  std::unique_ptr<EVP_PKEY, PkeyDeleter> priv(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, own.data(), own.size()));
  std::unique_ptr<EVP_PKEY, PkeyDeleter> pub(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer.data(), peer.size()));
  if (!priv || !pub) throw Error(Errc::InvalidPublicKey, "cannot load key");
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(EVP_PKEY_CTX_new(priv.get(), nullptr));
  ByteArray<32> shared{};
  std::size_t len = shared.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 || EVP_PKEY_derive_set_peer(ctx.get(), pub.get()) != 1 ||
      EVP_PKEY_derive(ctx.get(), shared.data(), &len) != 1 || len != 32) {
    throw Error(Errc::InvalidPublicKey, "key agreement rejected peer point");
  }
  static const ByteArray<32> kZero{};
  if (constant_time_equal(shared, kZero)) throw Error(Errc::InvalidPublicKey, "low-order peer point");
  return shared;
}

SigningKey SigningKey::from_seed(const ByteArray<32>& seed) {
  ensure_sodium();
  SigningKey key;
  key.seed_ = seed;
  if (crypto_sign_seed_keypair(key.public_key_.data(), key.expanded_.data(), seed.data()) != 0) fail("ed25519 key");
  return key;
}

SigningKey SigningKey::generate(RandomSource& rng) { return from_seed(rng.bytes<32>()); }

Signature SigningKey::sign(ByteView message) const {
  Signature sig{};
  if (crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), expanded_.data()) != 0)
    fail("ed25519 sign");
  return sig;
}

bool ed25519_verify(const PublicKey& public_key, ByteView message, const Signature& signature) {
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length) {
  static EVP_KDF* kdf = EVP_KDF_fetch(nullptr, "HKDF", nullptr);
  if (kdf == nullptr) fail("HKDF fetch");
  std::unique_ptr<EVP_KDF_CTX, KdfCtxDeleter> ctx(EVP_KDF_CTX_new(kdf));
  if (!ctx) fail("HKDF ctx");
  // OpenSSL wants non-const pointers in OSSL_PARAM even for inputs.
  char digest[] = "SHA256";
  std::uint8_t empty = 0;
  auto mut = [&](ByteView v) { return const_cast<std::uint8_t*>(v.empty() ? &empty : v.data()); };
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, mut(ikm), ikm.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_SALT, mut(salt), salt.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_INFO, mut(info), info.size()),
      OSSL_PARAM_construct_end(),
  };
  Bytes out(length);
  if (EVP_KDF_derive(ctx.get(), out.data(), out.size(), params) != 1) fail("HKDF derive");
  return out;
}

namespace {
const EVP_CIPHER* gcm_for(ByteView key) {
  if (key.size() == 16) return EVP_aes_128_gcm();
  if (key.size() == 32) return EVP_aes_256_gcm();
  throw Error(Errc::InvalidArgument, "AEAD key must be 16 or 32 bytes");
}
}  // namespace

Bytes aead_seal(ByteView key, const AeadNonce& nonce, ByteView associated_data, ByteView plaintext) {
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), gcm_for(key), nullptr, key.data(), nonce.data()) != 1) {
    fail("gcm init");
  }
  int len = 0;
  if (!associated_data.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                        static_cast<int>(associated_data.size())) != 1) {
    fail("gcm aad");
  }
  Bytes out(plaintext.size() + kAeadTagSize);
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1) {
    fail("gcm update");
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + plaintext.size(), &len) != 1) fail("gcm final");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize, out.data() + plaintext.size()) != 1) {
    fail("gcm tag");
  }
  return out;
}

Bytes aead_open(ByteView key, const AeadNonce& nonce, ByteView associated_data, ByteView sealed) {
  if (sealed.size() < kAeadTagSize) throw Error(Errc::AuthenticationFailure, "ciphertext shorter than tag");
  const std::size_t body = sealed.size() - kAeadTagSize;
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), gcm_for(key), nullptr, key.data(), nonce.data()) != 1) {
    fail("gcm init");
  }
  int len = 0;
  if (!associated_data.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                        static_cast<int>(associated_data.size())) != 1) {
    fail("gcm aad");
  }
  Bytes out(body);
  if (body > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) != 1) {
    fail("gcm update");
  }
  ByteArray<kAeadTagSize> tag;
  std::memcpy(tag.data(), sealed.data() + body, kAeadTagSize);
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize, tag.data()) != 1) fail("gcm tag");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body, &len) != 1) {
    throw Error(Errc::AuthenticationFailure, "AEAD tag mismatch");
  }
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace apna::crypto

// ---- Edwards <-> Montgomery conversion (field arithmetic mod 2^255 - 19) ----

namespace apna::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const noexcept { BN_free(b); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* c) const noexcept { BN_CTX_free(c); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;

BnPtr field_prime() {
  BnPtr p(BN_new());
  BN_set_bit(p.get(), 255);
  BN_sub_word(p.get(), 19);
  return p;
}

// Little-endian 32-byte field element, top bit cleared.
BnPtr load_le(const ByteArray<32>& in) {
  ByteArray<32> be;
  for (int i = 0; i < 32; ++i) be[i] = in[31 - i];
  be[0] &= 0x7f;
  return BnPtr(BN_bin2bn(be.data(), 32, nullptr));
}

ByteArray<32> store_le(const BIGNUM* v) {
  ByteArray<32> be{};
  BN_bn2binpad(v, be.data(), 32);
  ByteArray<32> out;
  for (int i = 0; i < 32; ++i) out[i] = be[31 - i];
  return out;
}

// (a + s1) * inverse(a + s2) mod p, with s1, s2 in {-1, +1}. Empty when the divisor is zero.
std::optional<ByteArray<32>> ratio(const ByteArray<32>& in, int s1, int s2) {
  std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  auto p = field_prime();
  auto a = load_le(in);
  BnPtr num(BN_new()), den(BN_new()), one(BN_new()), out(BN_new());
  BN_one(one.get());
  auto shift = [&](BIGNUM* r, int s) {
    if (s > 0) BN_mod_add(r, a.get(), one.get(), p.get(), ctx.get());
    else BN_mod_sub(r, a.get(), one.get(), p.get(), ctx.get());
  };
  shift(num.get(), s1);
  shift(den.get(), s2);
  if (BN_is_zero(den.get())) return std::nullopt;
  if (!BN_mod_inverse(den.get(), den.get(), p.get(), ctx.get())) return std::nullopt;
  BN_mod_mul(out.get(), num.get(), den.get(), p.get(), ctx.get());
  return store_le(out.get());
}

}  // namespace

PrivateKey x25519_private_from_ed25519_seed(const ByteArray<32>& seed) {
  std::uint8_t digest[SHA512_DIGEST_LENGTH];
  SHA512(seed.data(), seed.size(), digest);
  PrivateKey out;
  std::memcpy(out.data(), digest, 32);
  out[0] &= 248;
  out[31] &= 127;
  out[31] |= 64;
  return out;
}

PublicKey montgomery_from_edwards(const PublicKey& edwards) {
  // u = (1 + y) / (1 - y) = -(y + 1) / (y - 1)
  auto r = ratio(edwards, +1, -1);
  if (!r) return PublicKey{};
  std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  auto p = field_prime();
  auto v = load_le(*r);
  BnPtr neg(BN_new());
  BN_mod_sub(neg.get(), p.get(), v.get(), p.get(), ctx.get());
  return store_le(neg.get());
}

std::optional<PublicKey> edwards_from_montgomery(const PublicKey& montgomery, bool sign_bit) {
  auto y = ratio(montgomery, -1, +1);
  if (!y) return std::nullopt;
  if (sign_bit) (*y)[31] |= 0x80;
  return y;
}

}  // namespace apna::crypto
