#include "apna/wire/packet.hpp"

#include <cstring>

#include "apna/error.hpp"

namespace apna::wire {

ByteArray<kHeaderSize> encode_header(const ApnaHeader& h) {
  ByteArray<kHeaderSize> out{};
  auto* p = out.data();
  store_u32(p + offset::kSrcAid, h.src_aid.value);
  const auto src = h.src_ephid.bytes();
  std::memcpy(p + offset::kSrcEphId, src.data(), kEphIdSize);
  store_u32(p + offset::kDstAid, h.dst_aid.value);
  const auto dst = h.dst_ephid.bytes();
  std::memcpy(p + offset::kDstEphId, dst.data(), kEphIdSize);
  std::memcpy(p + offset::kMac, h.mac.data(), kPacketMacSize);
  store_u64(p + offset::kNonce, h.nonce);
  return out;
}

ApnaHeader decode_header(ByteView bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(Errc::TruncatedHeader, "need 56 bytes, got " + std::to_string(bytes.size()));
  }
  const auto* p = bytes.data();
  ApnaHeader h;
  h.src_aid = Aid{load_u32(p + offset::kSrcAid)};
  h.src_ephid = EphId::from_bytes(bytes.subspan(offset::kSrcEphId, kEphIdSize));
  h.dst_aid = Aid{load_u32(p + offset::kDstAid)};
  h.dst_ephid = EphId::from_bytes(bytes.subspan(offset::kDstEphId, kEphIdSize));
  std::memcpy(h.mac.data(), p + offset::kMac, kPacketMacSize);
  h.nonce = load_u64(p + offset::kNonce);
  return h;
}

Bytes Packet::encode() const {
  Bytes out;
  out.reserve(kHeaderSize + payload.size());
  const auto h = encode_header(header);
  out.insert(out.end(), h.begin(), h.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Packet Packet::decode(ByteView bytes) {
  Packet p;
  p.header = decode_header(bytes);
  p.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return p;
}

PacketMac compute_packet_mac(crypto::Cmac& cmac, ByteView packet) {
  if (packet.size() < kHeaderSize) throw Error(Errc::TruncatedHeader, "packet shorter than header");
  static const ByteArray<kPacketMacSize> kZero{};
  cmac.update(packet.first(offset::kMac));
  cmac.update(kZero);
  cmac.update(packet.subspan(offset::kNonce));
  return to_array<kPacketMacSize>(cmac.finish());
}

PacketMac compute_packet_mac(const crypto::Key16& k_pkt, ByteView packet) {
  crypto::Cmac cmac(k_pkt);
  return compute_packet_mac(cmac, packet);
}

void stamp_packet_mac(const crypto::Key16& k_pkt, std::span<std::uint8_t> packet) {
  const auto mac = compute_packet_mac(k_pkt, packet);
  std::memcpy(packet.data() + offset::kMac, mac.data(), kPacketMacSize);
}

bool verify_packet_mac(crypto::Cmac& cmac, ByteView packet) {
  if (packet.size() < kHeaderSize) return false;
  const auto expected = compute_packet_mac(cmac, packet);
  return crypto::constant_time_equal(expected, packet.subspan(offset::kMac, kPacketMacSize));
}

bool verify_packet_mac(const crypto::Key16& k_pkt, ByteView packet) {
  crypto::Cmac cmac(k_pkt);
  return verify_packet_mac(cmac, packet);
}

void encapsulate_gre_into(Bytes& out, std::uint32_t outer_src_ip, std::uint32_t outer_dst_ip, ByteView packet) {
  out.resize(kGrePrefixSize + packet.size());
  store_u32(out.data(), outer_src_ip);
  store_u32(out.data() + 4, outer_dst_ip);
  store_u16(out.data() + 8, kApnaEtherType);
  std::memcpy(out.data() + kGrePrefixSize, packet.data(), packet.size());
}

Bytes encapsulate_gre(std::uint32_t outer_src_ip, std::uint32_t outer_dst_ip, ByteView packet) {
  Bytes out;
  encapsulate_gre_into(out, outer_src_ip, outer_dst_ip, packet);
  return out;
}

Bytes encode_gre(const GreFrame& frame) {
  Bytes out;
  out.reserve(kGrePrefixSize + kHeaderSize + frame.payload.size());
  Writer w(out);
  w.u32(frame.outer_src_ip).u32(frame.outer_dst_ip).u16(frame.protocol_type);
  w.raw(encode_header(frame.header)).raw(frame.payload);
  return out;
}

ByteView gre_inner(ByteView bytes) {
  if (bytes.size() < kGrePrefixSize) {
    throw Error(Errc::TruncatedFrame, "GRE prefix needs 10 bytes, got " + std::to_string(bytes.size()));
  }
  const auto protocol = load_u16(bytes.data() + 8);
  if (protocol != kApnaEtherType) {
    throw Error(Errc::UnknownProtocolType, "EtherType 0x" + to_hex(bytes.subspan(8, 2)));
  }
  if (bytes.size() < kGrePrefixSize + kHeaderSize) {
    throw Error(Errc::TruncatedFrame, "inner packet shorter than the 56-byte header");
  }
  return bytes.subspan(kGrePrefixSize);
}

GreFrame decode_gre(ByteView bytes) {
  const auto inner = gre_inner(bytes);
  GreFrame frame;
  frame.outer_src_ip = load_u32(bytes.data());
  frame.outer_dst_ip = load_u32(bytes.data() + 4);
  frame.protocol_type = load_u16(bytes.data() + 8);
  frame.header = decode_header(inner);
  frame.payload.assign(inner.begin() + kHeaderSize, inner.end());
  return frame;
}

}  // namespace apna::wire
