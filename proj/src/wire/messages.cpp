#include "apna/wire/messages.hpp"

#include <cstring>

#include "apna/error.hpp"

namespace apna::wire {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedMessage, what); }

ByteView type_ad(const MsgType& type) { return {reinterpret_cast<const std::uint8_t*>(&type), 1}; }

EphIdCertificate read_cert(Reader& r) { return EphIdCertificate::decode(r.take(kCertificateSize)); }

void write_name(Writer& w, const std::string& name) {
  if (name.size() > 255) malformed("name longer than 255 bytes");
  w.u8(static_cast<std::uint8_t>(name.size()));
  w.raw({reinterpret_cast<const std::uint8_t*>(name.data()), name.size()});
}

std::string read_name(Reader& r) {
  const auto len = r.u8();
  const auto raw = r.take(len);
  return {reinterpret_cast<const char*>(raw.data()), raw.size()};
}

template <typename Sealed>
void write_sealed(Writer& w, const Sealed& m) {
  w.raw(m.nonce).raw(m.sealed);
}

template <typename Sealed>
Sealed read_sealed(Reader& r) {
  Sealed m;
  m.nonce = r.array<12>();
  if (r.remaining() < crypto::kAeadTagSize) malformed("sealed body shorter than the AEAD tag");
  const auto rest = r.rest();
  m.sealed.assign(rest.begin(), rest.end());
  return m;
}

void encode_value(Writer& w, const BootstrapInfra& m) { write_sealed(w, m); }
void encode_value(Writer& w, const BootstrapHost& m) {
  w.raw(m.id_info.encode()).raw(m.signature).raw(m.dns_cert.encode()).raw(m.ems_cert.encode());
}
void encode_value(Writer& w, const EphIdRequest& m) { write_sealed(w, m); }
void encode_value(Writer& w, const EphIdReply& m) { write_sealed(w, m); }
void encode_value(Writer& w, const ShutoffRequest& m) {
  if (m.evidence.size() > 0xFFFF) malformed("shutoff evidence too long");
  w.u16(static_cast<std::uint16_t>(m.evidence.size())).raw(m.evidence).raw(m.signature).raw(m.cert.encode());
}
void encode_value(Writer& w, const DnsRegister& m) {
  write_name(w, m.name);
  w.raw(m.cert.encode());
}
void encode_value(Writer& w, const DnsQuery& m) { write_name(w, m.name); }
void encode_value(Writer& w, const DnsAnswer& m) {
  write_name(w, m.name);
  w.u8(m.cert ? 1 : 0);
  if (m.cert) w.raw(m.cert->encode());
}
void encode_value(Writer& w, const DataMessage& m) { w.raw(m.ciphertext); }
void encode_value(Writer& w, const IcmpMessage& m) { w.u8(m.icmp_type).u8(m.code).raw(m.body); }
void encode_value(Writer& w, const Hello& m) { w.raw(m.cert.encode()); }
void encode_value(Writer& w, const HelloAck& m) { w.raw(m.cert.encode()); }

Message decode_value(MsgType type, Reader& r) {
  switch (type) {
    case MsgType::BootstrapInfra:
      return read_sealed<BootstrapInfra>(r);
    case MsgType::BootstrapHost: {
      BootstrapHost m;
      m.id_info.ctrl_ephid = EphId::from_bytes(r.take(kEphIdSize));
      m.id_info.exp_time = r.u32();
      m.signature = r.array<64>();
      m.dns_cert = read_cert(r);
      m.ems_cert = read_cert(r);
      return m;
    }
    case MsgType::EphIdRequest:
      return read_sealed<EphIdRequest>(r);
    case MsgType::EphIdReply:
      return read_sealed<EphIdReply>(r);
    case MsgType::Shutoff: {
      ShutoffRequest m;
      const auto len = r.u16();
      const auto ev = r.take(len);
      m.evidence.assign(ev.begin(), ev.end());
      m.signature = r.array<64>();
      m.cert = read_cert(r);
      return m;
    }
    case MsgType::DnsRegister: {
      DnsRegister m;
      m.name = read_name(r);
      m.cert = read_cert(r);
      return m;
    }
    case MsgType::DnsQuery:
      return DnsQuery{read_name(r)};
    case MsgType::DnsAnswer: {
      DnsAnswer m;
      m.name = read_name(r);
      const auto found = r.u8();
      if (found > 1) malformed("DNS answer flag must be 0 or 1");
      if (found) m.cert = read_cert(r);
      return m;
    }
    case MsgType::Data: {
      const auto rest = r.rest();
      return DataMessage{Bytes(rest.begin(), rest.end())};
    }
    case MsgType::Icmp: {
      IcmpMessage m;
      m.icmp_type = r.u8();
      m.code = r.u8();
      const auto rest = r.rest();
      m.body.assign(rest.begin(), rest.end());
      return m;
    }
    case MsgType::Hello:
      return Hello{read_cert(r)};
    case MsgType::HelloAck:
      return HelloAck{read_cert(r)};
  }
  malformed("unknown message type");
}

bool known_type(std::uint8_t t) {
  switch (static_cast<MsgType>(t)) {
    case MsgType::BootstrapInfra:
    case MsgType::BootstrapHost:
    case MsgType::EphIdRequest:
    case MsgType::EphIdReply:
    case MsgType::Shutoff:
    case MsgType::DnsRegister:
    case MsgType::DnsQuery:
    case MsgType::DnsAnswer:
    case MsgType::Data:
    case MsgType::Icmp:
    case MsgType::Hello:
    case MsgType::HelloAck:
      return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(MsgType type) {
  switch (type) {
    case MsgType::BootstrapInfra: return "BootstrapInfra";
    case MsgType::BootstrapHost: return "BootstrapHost";
    case MsgType::EphIdRequest: return "EphIdRequest";
    case MsgType::EphIdReply: return "EphIdReply";
    case MsgType::Shutoff: return "Shutoff";
    case MsgType::DnsRegister: return "DnsRegister";
    case MsgType::DnsQuery: return "DnsQuery";
    case MsgType::DnsAnswer: return "DnsAnswer";
    case MsgType::Data: return "Data";
    case MsgType::Icmp: return "Icmp";
    case MsgType::Hello: return "Hello";
    case MsgType::HelloAck: return "HelloAck";
  }
  return "Unknown";
}

std::string_view to_string(EphIdKind kind) {
  switch (kind) {
    case EphIdKind::Control: return "control";
    case EphIdKind::Data: return "data";
    case EphIdKind::ReceiveOnly: return "receive-only";
  }
  return "unknown";
}

crypto::AeadNonce control_nonce(ControlDirection direction, std::uint64_t counter) {
  crypto::AeadNonce n{};
  n[0] = static_cast<std::uint8_t>(direction);
  store_u64(n.data() + 4, counter);
  return n;
}

std::uint64_t control_counter(const crypto::AeadNonce& nonce) { return load_u64(nonce.data() + 4); }

ControlDirection control_direction(const crypto::AeadNonce& nonce) { return static_cast<ControlDirection>(nonce[0]); }

BootstrapInfra BootstrapInfra::seal(const crypto::Key16& infra_key, const crypto::AeadNonce& nonce,
                                    const HostProvisioning& plain) {
  Bytes pt;
  Writer(pt).u32(plain.hid.value).raw(plain.keys.ctrl).raw(plain.keys.pkt);
  return {nonce, crypto::aead_seal(infra_key, nonce, type_ad(MsgType::BootstrapInfra), pt)};
}

HostProvisioning BootstrapInfra::open(const crypto::Key16& infra_key) const {
  const auto pt = crypto::aead_open(infra_key, nonce, type_ad(MsgType::BootstrapInfra), sealed);
  Reader r(pt);
  HostProvisioning p;
  p.hid = Hid{r.u32()};
  p.keys.ctrl = r.array<16>();
  p.keys.pkt = r.array<16>();
  r.expect_end();
  return p;
}

ByteArray<20> IdInfo::encode() const {
  ByteArray<20> out{};
  const auto e = ctrl_ephid.bytes();
  std::memcpy(out.data(), e.data(), kEphIdSize);
  store_u32(out.data() + kEphIdSize, exp_time);
  return out;
}

bool BootstrapHost::verify(const crypto::PublicKey& as_signing_public) const {
  return crypto::ed25519_verify(as_signing_public, id_info.encode(), signature);
}

EphIdRequest EphIdRequest::seal(const crypto::Key16& k_ctrl, const crypto::AeadNonce& nonce,
                                const EphIdRequestBody& body) {
  Bytes pt;
  Writer(pt).u8(static_cast<std::uint8_t>(body.kind)).raw(body.pubkey);
  return {nonce, crypto::aead_seal(k_ctrl, nonce, type_ad(MsgType::EphIdRequest), pt)};
}

EphIdRequestBody EphIdRequest::open(const crypto::Key16& k_ctrl) const {
  const auto pt = crypto::aead_open(k_ctrl, nonce, type_ad(MsgType::EphIdRequest), sealed);
  Reader r(pt);
  EphIdRequestBody body;
  const auto kind = r.u8();
  if (kind > static_cast<std::uint8_t>(EphIdKind::ReceiveOnly)) malformed("unknown EphID kind");
  body.kind = static_cast<EphIdKind>(kind);
  body.pubkey = r.array<32>();
  r.expect_end();
  return body;
}

EphIdReply EphIdReply::seal(const crypto::Key16& k_ctrl, const crypto::AeadNonce& nonce,
                            const EphIdCertificate& cert) {
  const auto pt = cert.encode();
  return {nonce, crypto::aead_seal(k_ctrl, nonce, type_ad(MsgType::EphIdReply), pt)};
}

EphIdCertificate EphIdReply::open(const crypto::Key16& k_ctrl) const {
  const auto pt = crypto::aead_open(k_ctrl, nonce, type_ad(MsgType::EphIdReply), sealed);
  return EphIdCertificate::decode(pt);
}

MsgType message_type(const Message& message) {
  static constexpr MsgType kTypes[] = {MsgType::BootstrapInfra, MsgType::BootstrapHost, MsgType::EphIdRequest,
                                       MsgType::EphIdReply,     MsgType::Shutoff,       MsgType::DnsRegister,
                                       MsgType::DnsQuery,       MsgType::DnsAnswer,     MsgType::Data,
                                       MsgType::Icmp,           MsgType::Hello,         MsgType::HelloAck};
  static_assert(std::size(kTypes) == std::variant_size_v<Message>);
  return kTypes[message.index()];
}

Bytes encode_message(const Message& message) {
  Bytes value;
  Writer vw(value);
  std::visit([&](const auto& m) { encode_value(vw, m); }, message);
  if (value.size() > 0xFFFF) malformed("message value exceeds 65535 bytes");
  Bytes out;
  out.reserve(kTlvHeaderSize + value.size());
  Writer(out).u8(static_cast<std::uint8_t>(message_type(message))).u16(static_cast<std::uint16_t>(value.size())).raw(
      value);
  return out;
}

MsgType peek_type(ByteView bytes) {
  if (bytes.empty()) malformed("empty message");
  if (!known_type(bytes[0])) malformed("unknown message type 0x" + to_hex(bytes.first(1)));
  return static_cast<MsgType>(bytes[0]);
}

Message decode_message(ByteView bytes) {
  Reader outer(bytes);
  const auto type = peek_type(bytes);
  outer.u8();
  const auto len = outer.u16();
  if (outer.remaining() != len) {
    malformed("TLV length " + std::to_string(len) + " but " + std::to_string(outer.remaining()) + " bytes follow");
  }
  Reader r(outer.rest());
  auto m = decode_value(type, r);
  r.expect_end();
  return m;
}

}  // namespace apna::wire
