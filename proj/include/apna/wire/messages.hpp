#pragma once

// Control and data payloads carried inside APNA packets (or, for the bootstrap
// pair, handed over directly inside the AS). Every payload is one TLV record:
//
//   offset  size  field
//   0       1     type
//   1       2     length of value (big-endian)
//   3       len   value
//
// Value layouts (c = AES-GCM ciphertext || 16-byte tag):
//
//   0x01 BootstrapInfra  nonce12 | c(hid4 | k_ctrl16 | k_pkt16)      under the AS infra key
//   0x02 BootstrapHost   ctrl_ephid16 | exp4 | sig64 | dns_cert136 | ems_cert136
//                        sig is the AS signature over ctrl_ephid | exp
//   0x03 EphIdRequest    nonce12 | c(kind1 | pubkey32)               under k_ctrl
//   0x04 EphIdReply      nonce12 | c(cert136)                        under k_ctrl
//   0x05 Shutoff         evidence_len2 | evidence | sig64 | cert136
//   0x06 DnsRegister     name_len1 | name | cert136
//   0x07 DnsQuery        name_len1 | name
//   0x08 DnsAnswer       name_len1 | name | found1 | [cert136]
//   0x10 Data            session AEAD ciphertext
//   0x11 Icmp            icmp_type1 | code1 | body
//   0x12 Hello           cert136 of the sender's EphID
//   0x13 HelloAck        cert136 of the EphID now serving the session
//
// Encrypted records use the type byte as associated data. Control nonces are
// direction1 | 0^24 | counter64, so the two directions never share a nonce.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "apna/bytes.hpp"
#include "apna/crypto/certificate.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/keys.hpp"

namespace apna::wire {

enum class MsgType : std::uint8_t {
  BootstrapInfra = 0x01,
  BootstrapHost = 0x02,
  EphIdRequest = 0x03,
  EphIdReply = 0x04,
  Shutoff = 0x05,
  DnsRegister = 0x06,
  DnsQuery = 0x07,
  DnsAnswer = 0x08,
  Data = 0x10,
  Icmp = 0x11,
  Hello = 0x12,
  HelloAck = 0x13,
};

std::string_view to_string(MsgType type);

inline constexpr std::size_t kTlvHeaderSize = 3;

/// Lifetime class requested for a new EphID.
enum class EphIdKind : std::uint8_t { Control = 0, Data = 1, ReceiveOnly = 2 };

std::string_view to_string(EphIdKind kind);

enum class ControlDirection : std::uint8_t { HostToAs = 1, AsToHost = 2, Infra = 3 };

crypto::AeadNonce control_nonce(ControlDirection direction, std::uint64_t counter);
std::uint64_t control_counter(const crypto::AeadNonce& nonce);
ControlDirection control_direction(const crypto::AeadNonce& nonce);

// ---- bootstrap ----

/// Plaintext of m1: what the registry service replicates to the other AS roles.
struct HostProvisioning {
  Hid hid;
  HostAsKeys keys;
  friend bool operator==(const HostProvisioning&, const HostProvisioning&) = default;
};

struct BootstrapInfra {
  crypto::AeadNonce nonce{};
  Bytes sealed;

  static BootstrapInfra seal(const crypto::Key16& infra_key, const crypto::AeadNonce& nonce,
                             const HostProvisioning& plain);
  /// Throws Error{AuthenticationFailure} or Error{MalformedMessage}.
  HostProvisioning open(const crypto::Key16& infra_key) const;
  friend bool operator==(const BootstrapInfra&, const BootstrapInfra&) = default;
};

/// Signed part of m2.
struct IdInfo {
  EphId ctrl_ephid;
  UnixTime exp_time = 0;

  ByteArray<20> encode() const;
  friend bool operator==(const IdInfo&, const IdInfo&) = default;
};

struct BootstrapHost {
  IdInfo id_info;
  crypto::Signature signature{};
  EphIdCertificate dns_cert;
  EphIdCertificate ems_cert;

  bool verify(const crypto::PublicKey& as_signing_public) const;
  friend bool operator==(const BootstrapHost&, const BootstrapHost&) = default;
};

// ---- EphID issuance ----

struct EphIdRequestBody {
  EphIdKind kind = EphIdKind::Data;
  crypto::PublicKey pubkey{};
  friend bool operator==(const EphIdRequestBody&, const EphIdRequestBody&) = default;
};

struct EphIdRequest {
  crypto::AeadNonce nonce{};
  Bytes sealed;

  static EphIdRequest seal(const crypto::Key16& k_ctrl, const crypto::AeadNonce& nonce,
                           const EphIdRequestBody& body);
  /// Throws Error{AuthenticationFailure} or Error{MalformedMessage}.
  EphIdRequestBody open(const crypto::Key16& k_ctrl) const;
  friend bool operator==(const EphIdRequest&, const EphIdRequest&) = default;
};

struct EphIdReply {
  crypto::AeadNonce nonce{};
  Bytes sealed;

  static EphIdReply seal(const crypto::Key16& k_ctrl, const crypto::AeadNonce& nonce, const EphIdCertificate& cert);
  EphIdCertificate open(const crypto::Key16& k_ctrl) const;
  friend bool operator==(const EphIdReply&, const EphIdReply&) = default;
};

// ---- shutoff ----

struct ShutoffRequest {
  Bytes evidence;               // full bytes of the unwanted APNA packet
  crypto::Signature signature{};  // by the destination EphID's key over evidence
  EphIdCertificate cert;        // certificate of that destination EphID
  friend bool operator==(const ShutoffRequest&, const ShutoffRequest&) = default;
};

// ---- DNS ----

struct DnsRegister {
  std::string name;
  EphIdCertificate cert;
  friend bool operator==(const DnsRegister&, const DnsRegister&) = default;
};

struct DnsQuery {
  std::string name;
  friend bool operator==(const DnsQuery&, const DnsQuery&) = default;
};

struct DnsAnswer {
  std::string name;
  std::optional<EphIdCertificate> cert;
  friend bool operator==(const DnsAnswer&, const DnsAnswer&) = default;
};

// ---- data plane ----

struct DataMessage {
  Bytes ciphertext;
  friend bool operator==(const DataMessage&, const DataMessage&) = default;
};

struct IcmpMessage {
  std::uint8_t icmp_type = 0;
  std::uint8_t code = 0;
  Bytes body;
  friend bool operator==(const IcmpMessage&, const IcmpMessage&) = default;
};

struct Hello {
  EphIdCertificate cert;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
  EphIdCertificate cert;
  friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

using Message = std::variant<BootstrapInfra, BootstrapHost, EphIdRequest, EphIdReply, ShutoffRequest, DnsRegister,
                             DnsQuery, DnsAnswer, DataMessage, IcmpMessage, Hello, HelloAck>;

MsgType message_type(const Message& message);
/// Throws Error{MalformedMessage} if a field exceeds its length prefix.
Bytes encode_message(const Message& message);
/// Exactly one record; trailing bytes, unknown types and bad lengths throw Error{MalformedMessage}.
Message decode_message(ByteView bytes);

/// Type byte of an encoded record without parsing the value.
MsgType peek_type(ByteView bytes);

}  // namespace apna::wire
