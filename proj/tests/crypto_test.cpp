#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "apna/crypto/certificate.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/keys.hpp"
#include "apna/error.hpp"
#include "support/golden.hpp"
#include "support/reference_aes.hpp"

namespace apna {
namespace {

using crypto::Key16;
using testing::golden;

template <std::size_t N>
ByteArray<N> hex_array(std::string_view hex) {
  return to_array<N>(from_hex(hex));
}

Bytes as_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }

AsSecretKey counting_key() {
  AsSecretKey k;
  for (int i = 0; i < 16; ++i) k.bytes[i] = static_cast<std::uint8_t>(i);
  return k;
}

TEST(Aes128, MatchesFips197) {
  Key16 key = hex_array<16>("000102030405060708090a0b0c0d0e0f");
  auto out = crypto::Aes128(key).encrypt_block(hex_array<16>("00112233445566778899aabbccddeeff"));
  EXPECT_EQ(as_bytes(out), golden("aes128_fips197_c1"));
}

TEST(Aes128, AgreesWithReferenceOnRandomInputs) {
  crypto::SeededRandom rng(7);
  for (int i = 0; i < 200; ++i) {
    auto key = rng.bytes<16>();
    auto block = rng.bytes<16>();
    EXPECT_EQ(crypto::Aes128(key).encrypt_block(block), testing::ReferenceAes128(key).encrypt(block));
  }
}

// RFC 4493 section 4.
TEST(Cmac, Rfc4493Vectors) {
  const Key16 key = hex_array<16>("2b7e151628aed2a6abf7158809cf4f3c");
  const Bytes msg = from_hex(
      "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
      "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
  const std::pair<std::size_t, const char*> cases[] = {
      {0, "bb1d6929e95937287fa37d129b756746"},
      {16, "070a16b46b4d4144f79bdd9dd04a287c"},
      {40, "dfa66747de9ae63030ca32611497c827"},
      {64, "51f0bebf7e3b9d92fc49741779363cfe"},
  };
  crypto::Cmac cmac(key);
  for (auto [len, expected] : cases) {
    auto tag = cmac.update(ByteView(msg).first(len)).finish();
    EXPECT_EQ(to_hex(tag), expected) << "len " << len;
  }
}

TEST(Cmac, SplitUpdatesMatchOneShot) {
  std::mt19937 gen(11);
  crypto::SeededRandom rng(12);
  crypto::Cmac cmac(rng.bytes<16>());
  for (int trial = 0; trial < 300; ++trial) {
    Bytes msg(gen() % 200);
    rng.fill(msg);
    auto expected = cmac.update(msg).finish();
    std::size_t pos = 0;
    while (pos < msg.size()) {
      std::size_t n = std::min<std::size_t>(gen() % 40, msg.size() - pos);
      cmac.update(ByteView(msg).subspan(pos, n));
      pos += n;
    }
    EXPECT_EQ(cmac.finish(), expected) << "size " << msg.size();
  }
}

TEST(X25519, Rfc7748Vector) {
  auto alice = crypto::X25519KeyPair::from_private(
      hex_array<32>("77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a"));
  auto bob = crypto::X25519KeyPair::from_private(
      hex_array<32>("5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb"));
  EXPECT_EQ(to_hex(alice.public_key), "8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a");
  EXPECT_EQ(to_hex(bob.public_key), "de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f");
  EXPECT_EQ(to_hex(crypto::x25519(alice.private_key, bob.public_key)),
            "4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c1e161742");
}

TEST(Ed25519, Rfc8032TestOne) {
  auto key = crypto::SigningKey::from_seed(
      hex_array<32>("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"));
  EXPECT_EQ(to_hex(key.public_key()), "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  auto sig = key.sign({});
  EXPECT_EQ(to_hex(sig),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46b"
            "d25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(crypto::ed25519_verify(key.public_key(), {}, sig));
  sig[0] ^= 1;
  EXPECT_FALSE(crypto::ed25519_verify(key.public_key(), {}, sig));
}

// --- derive_as_subkeys ---

TEST(AsSubkeys, DeterministicAndMatchesOracle) {
  auto a = derive_as_subkeys(counting_key());
  auto b = derive_as_subkeys(counting_key());
  EXPECT_EQ(a.enc, b.enc);
  EXPECT_EQ(a.mac, b.mac);
  EXPECT_EQ(as_bytes(a.enc), golden("subkey_enc"));
  EXPECT_EQ(as_bytes(a.mac), golden("subkey_mac"));
}

TEST(AsSubkeys, DistinctMastersNeverCollideAndEncDiffersFromMac) {
  crypto::SeededRandom rng(1000);
  std::set<Key16> seen;
  for (int i = 0; i < 1000; ++i) {
    auto sub = derive_as_subkeys(AsSecretKey{rng.bytes<16>()});
    EXPECT_NE(sub.enc, sub.mac);
    seen.insert(sub.enc);
  }
  EXPECT_EQ(seen.size(), 1000u);
}

// --- mint / open ---

TEST(EphIdToken, FieldWidthsSumToSixteen) {
  EphId e;
  EXPECT_EQ(e.ct.size(), 8u);
  EXPECT_EQ(e.iv.size(), 4u);
  EXPECT_EQ(e.tag.size(), 4u);
  EXPECT_EQ(e.bytes().size(), 16u);
}

TEST(EphIdToken, ZeroKeyVectorMatchesReferenceAes) {
  AsSubkeys zero{};
  auto e = mint_ephid(zero, Hid{1}, 0x5F000000, 1);
  EXPECT_EQ(as_bytes(e.bytes()), golden("ephid_zero_keys"));
  // ct alone is the first 8 keystream bytes XOR (hid || exp).
  testing::ReferenceAes128::Block ctr{};
  ctr[3] = 1;
  auto ks = testing::ReferenceAes128({}).encrypt(ctr);
  const std::uint8_t plain[8] = {0, 0, 0, 1, 0x5F, 0, 0, 0};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(e.ct[i], ks[i] ^ plain[i]);
}

TEST(EphIdToken, DerivedKeyVectorMatchesGolden) {
  auto e = mint_ephid(derive_as_subkeys(counting_key()), Hid{0xDEADBEEF}, 1700000900, 42);
  EXPECT_EQ(as_bytes(e.bytes()), golden("ephid_derived"));
}

TEST(EphIdToken, RandomMintsAgreeWithReference) {
  crypto::SeededRandom rng(3);
  for (int i = 0; i < 200; ++i) {
    AsSubkeys sub{rng.bytes<16>(), rng.bytes<16>()};
    auto hid = rng.next_u32(), exp = rng.next_u32(), iv = rng.next_u32();
    auto ours = mint_ephid(sub, Hid{hid}, exp, iv);
    auto ref = testing::ReferenceEphId::mint(sub.enc, sub.mac, hid, exp, iv);
    EXPECT_EQ(ours.bytes(), ref.bytes);
  }
}

TEST(EphIdToken, RoundTripProperty) {
  crypto::SeededRandom rng(4);
  EphIdCodec codec(derive_as_subkeys(AsSecretKey{rng.bytes<16>()}));
  for (int i = 0; i < 10000; ++i) {
    Hid hid{rng.next_u32()};
    UnixTime exp = rng.next_u32();
    auto e = codec.mint(hid, exp, rng.next_u32());
    auto opened = codec.open(e);
    ASSERT_EQ(opened.hid, hid);
    ASSERT_EQ(opened.exp_time, exp);
  }
}

TEST(EphIdToken, EverySingleBitFlipIsRejected) {
  EphIdCodec codec(derive_as_subkeys(counting_key()));
  const auto original = codec.mint(Hid{0x01020304}, 1700000000, 7).bytes();
  int rejected = 0;
  for (int bit = 0; bit < 128; ++bit) {
    auto mutated = original;
    mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (!codec.try_open(EphId::from_bytes(mutated))) ++rejected;
  }
  EXPECT_EQ(rejected, 128);
}

TEST(EphIdToken, WrongAsKeyIsRejected) {
  auto e = mint_ephid(derive_as_subkeys(counting_key()), Hid{9}, 100, 1);
  AsSecretKey other = counting_key();
  other.bytes[0] ^= 0xff;
  try {
    open_ephid(derive_as_subkeys(other), e);
    FAIL() << "expected AuthenticationFailure";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::AuthenticationFailure);
  }
}

TEST(EphIdToken, DistinctIvsGiveDistinctCiphertext) {
  EphIdCodec codec(derive_as_subkeys(counting_key()));
  std::set<ByteArray<8>> cts;
  for (std::uint32_t iv = 0; iv < 1000; ++iv) cts.insert(codec.mint(Hid{5}, 1234, iv).ct);
  EXPECT_EQ(cts.size(), 1000u);
}

// --- key agreement ---

TEST(SessionKeys, EndpointSymmetryProperty) {
  crypto::SeededRandom rng(5);
  EphIdCodec codec(derive_as_subkeys(counting_key()));
  for (int i = 0; i < 1000; ++i) {
    auto a = EphemeralKeyPair::generate(rng);
    auto b = EphemeralKeyPair::generate(rng);
    auto ea = codec.mint(Hid{1}, 10, rng.next_u32());
    auto eb = codec.mint(Hid{2}, 10, rng.next_u32());
    ASSERT_EQ(dh_session_key(a, b.public_key(), ea, eb), dh_session_key(b, a.public_key(), eb, ea));
  }
}

TEST(SessionKeys, DifferentEphIdPairGivesDifferentKey) {
  crypto::SeededRandom rng(6);
  EphIdCodec codec(derive_as_subkeys(counting_key()));
  auto a = EphemeralKeyPair::generate(rng);
  auto b = EphemeralKeyPair::generate(rng);
  auto e1 = codec.mint(Hid{1}, 10, 1), e2 = codec.mint(Hid{2}, 10, 2), e3 = codec.mint(Hid{2}, 10, 3);
  EXPECT_NE(dh_session_key(a, b.public_key(), e1, e2), dh_session_key(a, b.public_key(), e1, e3));
}

TEST(SessionKeys, LowOrderPeerPointsAreRejected) {
  crypto::SeededRandom rng(8);
  auto a = EphemeralKeyPair::generate(rng);
  EphId e;
  crypto::PublicKey zero{};
  crypto::PublicKey one{};
  one[0] = 1;
  for (const auto& bad : {zero, one}) {
    try {
      dh_session_key(a, bad, e, e);
      FAIL() << "expected InvalidPublicKey";
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), Errc::InvalidPublicKey);
    }
  }
}

template <typename Pair>
concept SessionKeyFrom = requires(const Pair& p, const crypto::PublicKey& k, const EphId& e) {
  dh_session_key(p, k, e, e);
};

TEST(SessionKeys, OnlyEphemeralPairsCanDeriveSessionKeys) {
  static_assert(SessionKeyFrom<EphemeralKeyPair>);
  static_assert(!SessionKeyFrom<LongTermKeyPair>);
  static_assert(!SessionKeyFrom<crypto::X25519KeyPair>);
}

TEST(EphemeralSigning, MontgomeryFormOfSignerMatchesExchangeKey) {
  crypto::SeededRandom rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto seed = rng.bytes<32>();
    const auto signer = crypto::SigningKey::from_seed(seed);
    const auto pair = EphemeralKeyPair::from_seed(seed);
    ASSERT_EQ(crypto::montgomery_from_edwards(signer.public_key()), pair.public_key());
    const bool sign_bit = (signer.public_key()[31] & 0x80) != 0;
    ASSERT_EQ(crypto::edwards_from_montgomery(pair.public_key(), sign_bit), signer.public_key());
  }
}

TEST(EphemeralSigning, VerifiesWithExchangePublicKeyOnly) {
  crypto::SeededRandom rng(22);
  const std::string text = "stop this flow";
  const ByteView msg(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  for (int i = 0; i < 50; ++i) {
    auto pair = EphemeralKeyPair::generate(rng);
    auto other = EphemeralKeyPair::generate(rng);
    auto sig = pair.sign(msg);
    ASSERT_TRUE(verify_ephemeral_signature(pair.public_key(), msg, sig));
    ASSERT_FALSE(verify_ephemeral_signature(other.public_key(), msg, sig));
    sig[5] ^= 1;
    ASSERT_FALSE(verify_ephemeral_signature(pair.public_key(), msg, sig));
  }
}

TEST(HostAsKeys, BothSidesAgreeAndKeysAreDistinct) {
  crypto::SeededRandom rng(9);
  auto as = LongTermKeyPair::generate(rng);
  auto h1 = LongTermKeyPair::generate(rng);
  auto h2 = LongTermKeyPair::generate(rng);
  auto host_side = derive_host_as_keys(h1, as.pair.public_key);
  auto as_side = derive_host_as_keys(as, h1.pair.public_key);
  EXPECT_EQ(host_side, as_side);
  EXPECT_NE(host_side.ctrl, host_side.pkt);
  EXPECT_NE(derive_host_as_keys(h2, as.pair.public_key).pkt, host_side.pkt);
}

// --- certificates ---

class CertificateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    EphIdCodec codec(derive_as_subkeys(counting_key()));
    body_.ephid = codec.mint(Hid{77}, 2000, 1);
    body_.exp_time = 2000;
    body_.pubkey = EphemeralKeyPair::generate(rng_).public_key();
    body_.aid = Aid{100};
    body_.aa_ephid = codec.mint(Hid{0}, 9000, 2);
  }
  crypto::SeededRandom rng_{10};
  crypto::SigningKey as_key_ = crypto::SigningKey::generate(rng_);
  CertificateBody body_;
};

TEST_F(CertificateTest, SignVerifyRoundTrip) {
  auto cert = sign_certificate(as_key_, body_);
  EXPECT_TRUE(verify_certificate(as_key_.public_key(), cert));
  EXPECT_EQ(EphIdCertificate::decode(cert.encode()), cert);
  EXPECT_EQ(cert.encode().size(), 136u);
}

TEST_F(CertificateTest, MutatedExpiryFailsVerification) {
  auto cert = sign_certificate(as_key_, body_);
  cert.body.exp_time += 1;
  EXPECT_FALSE(verify_certificate(as_key_.public_key(), cert));
}

TEST_F(CertificateTest, EveryMutatedByteFailsVerification) {
  const auto encoded = sign_certificate(as_key_, body_).encode();
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    auto copy = encoded;
    copy[i] ^= 0x01;
    EXPECT_FALSE(verify_certificate(as_key_.public_key(), EphIdCertificate::decode(copy))) << "byte " << i;
  }
}

TEST_F(CertificateTest, OtherAsKeyFailsVerification) {
  auto cert = sign_certificate(as_key_, body_);
  auto other = crypto::SigningKey::generate(rng_);
  EXPECT_FALSE(verify_certificate(other.public_key(), cert));
}

// --- payload AEAD and packet MAC ---

TEST(Payload, SealOpenRoundTripAndTamper) {
  crypto::SeededRandom rng(13);
  SessionKey key{rng.bytes<32>()};
  crypto::AeadNonce nonce{};
  nonce[11] = 1;
  const Bytes ad = {1, 2, 3};
  const Bytes msg = {'h', 'e', 'l', 'l', 'o'};
  auto sealed = seal_payload(key, nonce, ad, msg);
  EXPECT_EQ(open_payload(key, nonce, ad, sealed), msg);
  sealed[0] ^= 0x80;
  EXPECT_THROW(open_payload(key, nonce, ad, sealed), Error);
}

TEST(Payload, EmptyPlaintextIsTagOnly) {
  SessionKey key{};
  crypto::AeadNonce nonce{};
  auto sealed = seal_payload(key, nonce, {}, {});
  EXPECT_EQ(sealed.size(), crypto::kAeadTagSize);
  EXPECT_TRUE(open_payload(key, nonce, {}, sealed).empty());
}

TEST(PacketMacTest, CoversHeaderAndPayload) {
  crypto::SeededRandom rng(14);
  auto k = rng.bytes<16>();
  Bytes header(56);
  rng.fill(header);
  std::fill(header.begin() + 40, header.begin() + 48, 0);
  Bytes payload(100);
  rng.fill(payload);
  auto mac = packet_mac(k, header, payload);
  EXPECT_EQ(mac, packet_mac(k, header, payload));
  EXPECT_TRUE(verify_packet_mac(k, header, payload, mac));
  auto h2 = header;
  h2[30] ^= 1;  // destination EphID
  EXPECT_FALSE(verify_packet_mac(k, h2, payload, mac));
  auto p2 = payload;
  p2[99] ^= 1;
  EXPECT_FALSE(verify_packet_mac(k, header, p2, mac));
}

}  // namespace
}  // namespace apna
