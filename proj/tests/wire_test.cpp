#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "apna/error.hpp"
#include "apna/wire/messages.hpp"
#include "apna/wire/packet.hpp"
#include "support/golden.hpp"

using namespace apna;
using namespace apna::wire;
using apna::testing::golden;

namespace {

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no apna::Error thrown";
  return Errc::InvalidArgument;
}

template <std::size_t N>
ByteArray<N> filled(std::uint8_t v) {
  ByteArray<N> a;
  a.fill(v);
  return a;
}

template <std::size_t N>
ByteArray<N> sequence(std::uint8_t start) {
  ByteArray<N> a;
  for (std::size_t i = 0; i < N; ++i) a[i] = static_cast<std::uint8_t>(start + i);
  return a;
}

EphId ephid_of(const ByteArray<16>& b) { return EphId::from_bytes(b); }

EphId random_ephid(crypto::RandomSource& rng) { return ephid_of(rng.bytes<16>()); }

ApnaHeader random_header(crypto::RandomSource& rng) {
  ApnaHeader h;
  h.src_aid = Aid{rng.next_u32()};
  h.src_ephid = random_ephid(rng);
  h.dst_aid = Aid{rng.next_u32()};
  h.dst_ephid = random_ephid(rng);
  h.mac = rng.bytes<8>();
  h.nonce = (std::uint64_t{rng.next_u32()} << 32) | rng.next_u32();
  return h;
}

Bytes random_bytes(crypto::RandomSource& rng, std::size_t max_len) {
  Bytes b(rng.next_u32() % (max_len + 1));
  rng.fill(b);
  return b;
}

EphIdCertificate random_cert(crypto::RandomSource& rng) {
  EphIdCertificate c;
  c.body.ephid = random_ephid(rng);
  c.body.exp_time = rng.next_u32();
  c.body.pubkey = rng.bytes<32>();
  c.body.aid = Aid{rng.next_u32()};
  c.body.aa_ephid = random_ephid(rng);
  c.signature = rng.bytes<64>();
  return c;
}

std::string random_name(crypto::RandomSource& rng) {
  std::string s(rng.next_u32() % 40, 'a');
  for (auto& ch : s) ch = static_cast<char>('a' + rng.next_u32() % 26);
  return s;
}

ApnaHeader example_header() {
  ApnaHeader h;
  h.src_aid = Aid{10};
  h.src_ephid = ephid_of(sequence<16>(0x00));
  h.dst_aid = Aid{20};
  h.dst_ephid = ephid_of(sequence<16>(0x10));
  h.mac = sequence<8>(0xA0);
  h.nonce = 0x0102030405060708ULL;
  return h;
}

Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

EphIdCertificate example_cert() {
  const auto as_key = crypto::SigningKey::from_seed(filled<32>(0x11));
  CertificateBody body;
  body.ephid = ephid_of(sequence<16>(0x00));
  body.exp_time = 1700000900;
  body.pubkey = EphemeralKeyPair::from_seed(filled<32>(0x66)).public_key();
  body.aid = Aid{7};
  body.aa_ephid = ephid_of(sequence<16>(0xF0));
  return sign_certificate(as_key, body);
}

Bytes as_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }

}  // namespace

// --- header ---

TEST(Header, EncodesToFiftySixBytes) {
  EXPECT_EQ(encode_header(ApnaHeader{}).size(), 56u);
  EXPECT_EQ(kHeaderSize, 4u + 16 + 4 + 16 + 8 + 8);
}

TEST(Header, GoldenLayoutMatchesOracle) {
  const auto enc = encode_header(example_header());
  EXPECT_EQ(as_bytes(enc), golden("header_example"));
  // Field offsets checked directly against the documented table.
  EXPECT_EQ(load_u32(enc.data() + 0), 10u);
  EXPECT_EQ(enc[4], 0x00);
  EXPECT_EQ(load_u32(enc.data() + 20), 20u);
  EXPECT_EQ(enc[24], 0x10);
  EXPECT_EQ(enc[40], 0xA0);
  EXPECT_EQ(load_u64(enc.data() + 48), 0x0102030405060708ULL);
  EXPECT_EQ(decode_header(golden("header_example")), example_header());
}

TEST(Header, TruncatedInputIsRejected) {
  Bytes b(55);
  EXPECT_EQ(error_code_of([&] { decode_header(b); }), Errc::TruncatedHeader);
  EXPECT_EQ(error_code_of([&] { decode_header(ByteView{}); }), Errc::TruncatedHeader);
}

TEST(Header, RoundTripFuzz) {
  crypto::SeededRandom rng(100);
  for (int i = 0; i < 10000; ++i) {
    const auto h = random_header(rng);
    const auto enc = encode_header(h);
    ASSERT_EQ(decode_header(enc), h);
    ASSERT_EQ(encode_header(decode_header(enc)), enc);
  }
}

TEST(Packet, RoundTripFuzz) {
  crypto::SeededRandom rng(101);
  for (int i = 0; i < 10000; ++i) {
    Packet p{random_header(rng), random_bytes(rng, 300)};
    const auto enc = p.encode();
    ASSERT_EQ(Packet::decode(enc), p);
    ASSERT_EQ(Packet::decode(enc).encode(), enc);
  }
}

TEST(Packet, MacMatchesOracleAndCoversNonceAndPayload) {
  const crypto::Key16 k_pkt = filled<16>(0x55);
  auto bytes = Packet{example_header(), text("hello")}.encode();
  EXPECT_EQ(as_bytes(compute_packet_mac(k_pkt, bytes)), golden("packet_mac_example"));

  stamp_packet_mac(k_pkt, bytes);
  EXPECT_TRUE(verify_packet_mac(k_pkt, bytes));
  for (std::size_t i : {std::size_t{0}, offset::kDstEphId, offset::kNonce + 7, bytes.size() - 1}) {
    auto tampered = bytes;
    tampered[i] ^= 0x01;
    EXPECT_FALSE(verify_packet_mac(k_pkt, tampered)) << "byte " << i;
  }
  EXPECT_FALSE(verify_packet_mac(filled<16>(0x56), bytes));
}

// --- GRE ---

TEST(Gre, GoldenFrameMatchesOracle) {
  GreFrame f;
  f.outer_src_ip = 0x0A000001;
  f.outer_dst_ip = 0x0A000002;
  f.header = example_header();
  f.payload = text("hello");
  EXPECT_EQ(encode_gre(f), golden("gre_example"));
  EXPECT_EQ(decode_gre(golden("gre_example")), f);
  EXPECT_EQ(encapsulate_gre(0x0A000001, 0x0A000002, Packet{f.header, f.payload}.encode()), golden("gre_example"));
}

TEST(Gre, RoundTripFuzz) {
  crypto::SeededRandom rng(102);
  for (int i = 0; i < 10000; ++i) {
    GreFrame f;
    f.outer_src_ip = rng.next_u32();
    f.outer_dst_ip = rng.next_u32();
    f.header = random_header(rng);
    f.payload = random_bytes(rng, 200);
    const auto enc = encode_gre(f);
    ASSERT_EQ(decode_gre(enc), f);
    ASSERT_EQ(encode_gre(decode_gre(enc)), enc);
  }
}

TEST(Gre, Ipv4ProtocolTypeIsRejected) {
  GreFrame f;
  f.protocol_type = 0x0800;
  EXPECT_EQ(error_code_of([&] { decode_gre(encode_gre(f)); }), Errc::UnknownProtocolType);
}

TEST(Gre, TruncatedFramesAreRejected) {
  auto enc = encode_gre(GreFrame{});
  EXPECT_EQ(error_code_of([&] { decode_gre(ByteView(enc).first(9)); }), Errc::TruncatedFrame);
  EXPECT_EQ(error_code_of([&] { decode_gre(ByteView(enc).first(kGrePrefixSize + kHeaderSize - 1)); }),
            Errc::TruncatedFrame);
  EXPECT_NO_THROW(decode_gre(ByteView(enc).first(kGrePrefixSize + kHeaderSize)));
}

// --- control messages ---

TEST(Messages, GoldenVectorsMatchOracle) {
  const auto cert = example_cert();
  EXPECT_EQ(as_bytes(cert.encode()), golden("certificate_example"));

  const crypto::Key16 infra = filled<16>(0x33), k_ctrl = filled<16>(0x44), k_pkt = filled<16>(0x55);
  EXPECT_EQ(encode_message(BootstrapInfra::seal(infra, control_nonce(ControlDirection::Infra, 1),
                                                HostProvisioning{Hid{0xDEADBEEF}, HostAsKeys{k_ctrl, k_pkt}})),
            golden("msg_bootstrap_infra"));

  const auto as_key = crypto::SigningKey::from_seed(filled<32>(0x11));
  BootstrapHost m2;
  m2.id_info = IdInfo{ephid_of(sequence<16>(0x40)), 1700003600};
  m2.signature = as_key.sign(m2.id_info.encode());
  m2.dns_cert = cert;
  m2.ems_cert = cert;
  EXPECT_EQ(encode_message(m2), golden("msg_bootstrap_host"));

  const auto eph = EphemeralKeyPair::from_seed(filled<32>(0x66));
  EXPECT_EQ(encode_message(EphIdRequest::seal(k_ctrl, control_nonce(ControlDirection::HostToAs, 7),
                                              EphIdRequestBody{EphIdKind::Data, eph.public_key()})),
            golden("msg_ephid_request"));
  EXPECT_EQ(encode_message(EphIdReply::seal(k_ctrl, control_nonce(ControlDirection::AsToHost, 7), cert)),
            golden("msg_ephid_reply"));

  const auto evidence = Packet{example_header(), text("hello")}.encode();
  EXPECT_EQ(encode_message(ShutoffRequest{evidence, eph.sign(evidence), cert}), golden("msg_shutoff"));

  EXPECT_EQ(encode_message(DnsRegister{"www.example", cert}), golden("msg_dns_register"));
  EXPECT_EQ(encode_message(DnsQuery{"www.example"}), golden("msg_dns_query"));
  EXPECT_EQ(encode_message(DnsAnswer{"www.example", cert}), golden("msg_dns_answer"));
  EXPECT_EQ(encode_message(DnsAnswer{"www.example", std::nullopt}), golden("msg_dns_answer_missing"));
  Bytes ct(20);
  for (std::size_t i = 0; i < ct.size(); ++i) ct[i] = static_cast<std::uint8_t>(0x90 + i);
  EXPECT_EQ(encode_message(DataMessage{ct}), golden("msg_data"));
  const auto hdr = encode_header(example_header());
  EXPECT_EQ(encode_message(IcmpMessage{3, 1, Bytes(hdr.begin(), hdr.end())}), golden("msg_icmp"));
  EXPECT_EQ(encode_message(Hello{cert}), golden("msg_hello"));
  EXPECT_EQ(encode_message(HelloAck{cert}), golden("msg_hello_ack"));
}

TEST(Messages, GoldenVectorsDecode) {
  for (const char* name : {"msg_bootstrap_infra", "msg_bootstrap_host", "msg_ephid_request", "msg_ephid_reply",
                           "msg_shutoff", "msg_dns_register", "msg_dns_query", "msg_dns_answer",
                           "msg_dns_answer_missing", "msg_data", "msg_icmp", "msg_hello", "msg_hello_ack"}) {
    const auto& g = golden(name);
    EXPECT_EQ(encode_message(decode_message(g)), g) << name;
  }
}

TEST(Messages, BootstrapIdInfoSignatureVerifies) {
  const auto as_key = crypto::SigningKey::from_seed(filled<32>(0x11));
  const auto m2 = std::get<BootstrapHost>(decode_message(golden("msg_bootstrap_host")));
  EXPECT_TRUE(m2.verify(as_key.public_key()));
  EXPECT_TRUE(m2.verify(to_array<32>(golden("as_sign_public"))));
  EXPECT_FALSE(m2.verify(crypto::SigningKey::from_seed(filled<32>(0x12)).public_key()));
  auto forged = m2;
  forged.id_info.exp_time += 1;
  EXPECT_FALSE(forged.verify(as_key.public_key()));
}

TEST(Messages, SealedMessagesOpenUnderTheRightKeyOnly) {
  const crypto::Key16 k_ctrl = filled<16>(0x44), wrong = filled<16>(0x45);
  const auto req = std::get<EphIdRequest>(decode_message(golden("msg_ephid_request")));
  const auto body = req.open(k_ctrl);
  EXPECT_EQ(body.kind, EphIdKind::Data);
  EXPECT_EQ(body.pubkey, to_array<32>(golden("ephemeral_public_66")));
  EXPECT_EQ(error_code_of([&] { req.open(wrong); }), Errc::AuthenticationFailure);

  auto flipped = req;
  flipped.sealed[3] ^= 0x80;
  EXPECT_EQ(error_code_of([&] { flipped.open(k_ctrl); }), Errc::AuthenticationFailure);

  const auto reply = std::get<EphIdReply>(decode_message(golden("msg_ephid_reply")));
  EXPECT_EQ(reply.open(k_ctrl), example_cert());
  EXPECT_EQ(error_code_of([&] { reply.open(wrong); }), Errc::AuthenticationFailure);

  const auto m1 = std::get<BootstrapInfra>(decode_message(golden("msg_bootstrap_infra")));
  const auto prov = m1.open(filled<16>(0x33));
  EXPECT_EQ(prov.hid, Hid{0xDEADBEEF});
  EXPECT_EQ(prov.keys.pkt, filled<16>(0x55));
  EXPECT_EQ(error_code_of([&] { m1.open(wrong); }), Errc::AuthenticationFailure);
}

TEST(Messages, ShutoffSignatureVerifiesUnderCertifiedKey) {
  const auto req = std::get<ShutoffRequest>(decode_message(golden("msg_shutoff")));
  EXPECT_TRUE(verify_ephemeral_signature(req.cert.body.pubkey, req.evidence, req.signature));
  EXPECT_TRUE(verify_certificate(to_array<32>(golden("as_sign_public")), req.cert));
}

TEST(Messages, ControlNonceLayout) {
  const auto n = control_nonce(ControlDirection::AsToHost, 0x1122334455667788ULL);
  EXPECT_EQ(to_hex(n), "020000001122334455667788");
  EXPECT_EQ(control_counter(n), 0x1122334455667788ULL);
  EXPECT_EQ(control_direction(n), ControlDirection::AsToHost);
}

TEST(Messages, RoundTripFuzzEveryType) {
  crypto::SeededRandom rng(103);
  auto sealed = [&](auto m) {
    m.nonce = rng.bytes<12>();
    m.sealed = random_bytes(rng, 200);
    m.sealed.resize(std::max<std::size_t>(m.sealed.size(), crypto::kAeadTagSize));
    return m;
  };
  std::array<int, std::variant_size_v<Message>> seen{};
  for (int i = 0; i < 10000 * static_cast<int>(std::variant_size_v<Message>); ++i) {
    Message m;
    switch (i % std::variant_size_v<Message>) {
      case 0: m = sealed(BootstrapInfra{}); break;
      case 1:
        m = BootstrapHost{IdInfo{random_ephid(rng), rng.next_u32()}, rng.bytes<64>(), random_cert(rng),
                          random_cert(rng)};
        break;
      case 2: m = sealed(EphIdRequest{}); break;
      case 3: m = sealed(EphIdReply{}); break;
      case 4: m = ShutoffRequest{random_bytes(rng, 400), rng.bytes<64>(), random_cert(rng)}; break;
      case 5: m = DnsRegister{random_name(rng), random_cert(rng)}; break;
      case 6: m = DnsQuery{random_name(rng)}; break;
      case 7:
        m = DnsAnswer{random_name(rng), rng.next_u32() % 2 ? std::optional(random_cert(rng)) : std::nullopt};
        break;
      case 8: m = DataMessage{random_bytes(rng, 400)}; break;
      case 9:
        m = IcmpMessage{static_cast<std::uint8_t>(rng.next_u32()), static_cast<std::uint8_t>(rng.next_u32()),
                        random_bytes(rng, 100)};
        break;
      case 10: m = Hello{random_cert(rng)}; break;
      default: m = HelloAck{random_cert(rng)}; break;
    }
    ++seen[m.index()];
    const auto enc = encode_message(m);
    ASSERT_EQ(decode_message(enc), m) << to_string(message_type(m));
    ASSERT_EQ(encode_message(decode_message(enc)), enc);
  }
  for (int count : seen) EXPECT_EQ(count, 10000);
}

TEST(Messages, MalformedRecordsAreRejected) {
  const auto& hello = golden("msg_hello");
  EXPECT_EQ(error_code_of([&] { decode_message(ByteView{}); }), Errc::MalformedMessage);
  EXPECT_EQ(error_code_of([&] { decode_message(ByteView(hello).first(hello.size() - 1)); }), Errc::MalformedMessage);
  auto extra = hello;
  extra.push_back(0);
  EXPECT_EQ(error_code_of([&] { decode_message(extra); }), Errc::MalformedMessage);
  auto unknown = hello;
  unknown[0] = 0x7F;
  EXPECT_EQ(error_code_of([&] { decode_message(unknown); }), Errc::MalformedMessage);
  Bytes bad_flag = golden("msg_dns_answer_missing");
  bad_flag.back() = 2;
  EXPECT_EQ(error_code_of([&] { decode_message(bad_flag); }), Errc::MalformedMessage);
}

TEST(Messages, RandomGarbageNeverCrashesTheDecoder) {
  crypto::SeededRandom rng(104);
  for (int i = 0; i < 20000; ++i) {
    auto b = random_bytes(rng, 300);
    if (!b.empty() && i % 2 == 0) b[0] = static_cast<std::uint8_t>(0x01 + rng.next_u32() % 0x13);
    try {
      decode_message(b);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), Errc::MalformedMessage);
    }
  }
}

TEST(Messages, EncryptedControlPlaneHidesHidAndRequestedKey) {
  crypto::SeededRandom rng(105);
  for (int i = 0; i < 500; ++i) {
    const auto k_ctrl = rng.bytes<16>();
    const Hid hid{rng.next_u32()};
    const auto eph = EphemeralKeyPair::generate(rng);
    ByteArray<4> hid_bytes;
    store_u32(hid_bytes.data(), hid.value);

    const auto wire_req = encode_message(
        EphIdRequest::seal(k_ctrl, control_nonce(ControlDirection::HostToAs, i), {EphIdKind::Data, eph.public_key()}));
    EphIdCertificate cert = random_cert(rng);
    cert.body.pubkey = eph.public_key();
    const auto wire_reply = encode_message(EphIdReply::seal(k_ctrl, control_nonce(ControlDirection::AsToHost, i), cert));
    const auto wire_m1 = encode_message(BootstrapInfra::seal(k_ctrl, control_nonce(ControlDirection::Infra, i),
                                                             HostProvisioning{hid, HostAsKeys{}}));
    for (const auto* wire : {&wire_req, &wire_reply, &wire_m1}) {
      ASSERT_EQ(std::search(wire->begin(), wire->end(), eph.public_key().begin(), eph.public_key().end()), wire->end());
    }
    ASSERT_EQ(std::search(wire_m1.begin(), wire_m1.end(), hid_bytes.begin(), hid_bytes.end()), wire_m1.end())
        << "iteration " << i;
  }
}

// --- key material against the oracle ---

TEST(KeyVectors, EphemeralAndSessionKeysMatchOracle) {
  const auto a = EphemeralKeyPair::from_seed(filled<32>(0x66));
  const auto b = EphemeralKeyPair::from_seed(filled<32>(0x77));
  EXPECT_EQ(as_bytes(a.public_key()), golden("ephemeral_public_66"));
  EXPECT_EQ(as_bytes(b.public_key()), golden("ephemeral_public_77"));
  const auto k = dh_session_key(a, b.public_key(), ephid_of(sequence<16>(0x10)), ephid_of(sequence<16>(0x00)));
  EXPECT_EQ(as_bytes(k.bytes), golden("session_key_66_77"));
}

TEST(KeyVectors, HostAsKeysMatchOracle) {
  const LongTermKeyPair host{crypto::X25519KeyPair::from_private(filled<32>(0x21))};
  const LongTermKeyPair as{crypto::X25519KeyPair::from_private(filled<32>(0x31))};
  const auto keys = derive_host_as_keys(host, as.pair.public_key);
  EXPECT_EQ(as_bytes(keys.ctrl), golden("host_as_ctrl"));
  EXPECT_EQ(as_bytes(keys.pkt), golden("host_as_pkt"));
}
