#pragma once

// Data-plane framing.
//
// APNA header, 56 bytes, all integers big-endian:
//
//   offset  size  field
//   0       4     src_aid
//   4       16    src_ephid
//   20      4     dst_aid
//   24      16    dst_ephid
//   40      8     mac    AES-CMAC/8 under the source host's k_pkt over the whole
//                        packet with this field zeroed (nonce and payload included)
//   48      8     nonce  per-source-EphID packet counter, used for replay detection
//
// GRE frame between ASes, 10-byte prefix followed by header and payload:
//
//   0       4     outer_src_ip
//   4       4     outer_dst_ip
//   8       2     protocol_type (0x88B5 for APNA)
//   10      56    APNA header
//   66      ...   payload

#include <cstdint>

#include "apna/bytes.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/keys.hpp"

namespace apna::wire {

inline constexpr std::size_t kHeaderSize = 56;
namespace offset {
inline constexpr std::size_t kSrcAid = 0;
inline constexpr std::size_t kSrcEphId = 4;
inline constexpr std::size_t kDstAid = 20;
inline constexpr std::size_t kDstEphId = 24;
inline constexpr std::size_t kMac = 40;
inline constexpr std::size_t kNonce = 48;
}  // namespace offset

inline constexpr std::uint16_t kApnaEtherType = 0x88B5;
inline constexpr std::size_t kGrePrefixSize = 10;

struct ApnaHeader {
  Aid src_aid;
  EphId src_ephid;
  Aid dst_aid;
  EphId dst_ephid;
  PacketMac mac{};
  std::uint64_t nonce = 0;

  friend bool operator==(const ApnaHeader&, const ApnaHeader&) = default;
};

ByteArray<kHeaderSize> encode_header(const ApnaHeader& header);
/// Reads the first 56 bytes; anything after is payload. Throws Error{TruncatedHeader}.
ApnaHeader decode_header(ByteView bytes);

struct Packet {
  ApnaHeader header;
  Bytes payload;

  Bytes encode() const;
  static Packet decode(ByteView bytes);
  friend bool operator==(const Packet&, const Packet&) = default;
};

/// MAC over an encoded packet, treating bytes [40, 48) as zero.
PacketMac compute_packet_mac(crypto::Cmac& cmac, ByteView packet);
PacketMac compute_packet_mac(const crypto::Key16& k_pkt, ByteView packet);
/// Computes the MAC and writes it into the MAC field.
void stamp_packet_mac(const crypto::Key16& k_pkt, std::span<std::uint8_t> packet);
bool verify_packet_mac(crypto::Cmac& cmac, ByteView packet);
bool verify_packet_mac(const crypto::Key16& k_pkt, ByteView packet);

struct GreFrame {
  std::uint32_t outer_src_ip = 0;
  std::uint32_t outer_dst_ip = 0;
  std::uint16_t protocol_type = kApnaEtherType;
  ApnaHeader header;
  Bytes payload;

  friend bool operator==(const GreFrame&, const GreFrame&) = default;
};

Bytes encode_gre(const GreFrame& frame);
/// Wraps an already-encoded APNA packet without re-encoding the header.
Bytes encapsulate_gre(std::uint32_t outer_src_ip, std::uint32_t outer_dst_ip, ByteView packet);
void encapsulate_gre_into(Bytes& out, std::uint32_t outer_src_ip, std::uint32_t outer_dst_ip, ByteView packet);
/// Throws Error{TruncatedFrame} or Error{UnknownProtocolType}.
GreFrame decode_gre(ByteView bytes);
/// The encoded APNA packet inside a GRE frame, validated like decode_gre.
ByteView gre_inner(ByteView bytes);

}  // namespace apna::wire
