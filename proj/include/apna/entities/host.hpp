#pragma once

// An end host: bootstrap completion, EphID acquisition, DNS, the Hello/HelloAck
// handshake, encrypted data with replay protection, ICMP and shutoff requests.
// Every method that emits traffic returns a fully MAC'd APNA packet.

#include <bitset>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apna/crypto/certificate.hpp"
#include "apna/crypto/keys.hpp"
#include "apna/entities/types.hpp"
#include "apna/wire/messages.hpp"
#include "apna/wire/packet.hpp"

namespace apna {

/// Sliding window over the last 1024 nonces of one session.
class ReplayWindow {
 public:
  static constexpr std::size_t kSize = 1024;

  /// False for nonce 0, duplicates and nonces older than the window.
  bool accept(std::uint64_t nonce);
  std::uint64_t highest() const { return highest_; }
  const std::bitset<kSize>& seen() const { return seen_; }  // bit i <-> nonce highest - i
  void restore(std::uint64_t highest, const std::bitset<kSize>& seen) {
    highest_ = highest;
    seen_ = seen;
  }

 private:
  std::uint64_t highest_ = 0;
  std::bitset<kSize> seen_;
};

struct PeerAddress {
  Aid aid;
  EphId ephid;
  friend auto operator<=>(const PeerAddress&, const PeerAddress&) = default;
};

struct SessionId {
  EphId local;
  PeerAddress peer;
  friend auto operator<=>(const SessionId&, const SessionId&) = default;
};

struct SessionState {
  SessionKey key;
  EphIdCertificate peer_cert;
  bool confirmed = false;                    // HelloAck seen, or we answered the Hello
  std::optional<PeerAddress> first_contact;  // receive-only address the client originally dialed
  ReplayWindow window;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
};

struct EphIdEntry {
  std::string label;
  EphIdKind kind = EphIdKind::Data;
  EphemeralKeyPair keys;
  EphIdCertificate cert;

  const EphId& ephid() const { return cert.body.ephid; }
};

struct HostEvent {
  enum class Kind : std::uint8_t { Data, Icmp, EphIdIssued, HelloAccepted, HelloAcked, DnsAnswer };

  Kind kind = Kind::Data;
  std::optional<SessionId> session;
  Bytes payload;              // decrypted data or ICMP body
  std::string detail;         // EphID label or DNS name
  std::vector<Bytes> replies; // packets the host sends in response

  /// "recv-data", "recv-icmp", "ephid-issued", "hello", "hello-ack", "dns-answer".
  std::string_view describe() const;
};

class Host {
 public:
  Host(std::string name, Aid aid, crypto::RandomSource& rng, std::shared_ptr<const AsDirectory> directory);

  const std::string& name() const { return name_; }
  Aid aid() const { return aid_; }
  const crypto::PublicKey& long_term_public() const { return long_term_.pair.public_key; }
  bool bootstrapped() const { return bootstrapped_; }
  Hid hid() const { return hid_; }
  const HostAsKeys& as_keys() const { return keys_; }
  const EphId& control_ephid() const { return ctrl_.ctrl_ephid; }
  UnixTime control_expiry() const { return ctrl_.exp_time; }

  /// `hid` comes from the out-of-band authentication step. Throws
  /// Error{AuthenticationFailure} for a bad id_info signature, Error{BadCertificate}
  /// for bad service certificates.
  void complete_bootstrap(Hid hid, const wire::BootstrapHost& m2, UnixTime now);

  /// Encrypted request to the EMS; the new EphID is stored under `label` once the reply arrives.
  Bytes request_ephid(const std::string& label, EphIdKind kind, crypto::RandomSource& rng);
  Bytes register_name(const std::string& label, const std::string& name);
  Bytes query_name(const std::string& name);

  struct Connection {
    SessionId id;
    Bytes hello;
  };
  /// Verifies the peer certificate and derives the session key.
  /// Throws Error{BadCertificate | ExpiredCertificate | NoEphId | InvalidArgument}.
  Connection connect(const std::string& local_label, const EphIdCertificate& peer_cert, UnixTime now);
  /// Resolves `name` first; the Hello is emitted when the DNS answer arrives.
  Bytes connect_by_name(const std::string& local_label, const std::string& name);

  /// Throws Error{NoSession}.
  Bytes send(const SessionId& session, ByteView payload, UnixTime now);
  /// Unencrypted ICMP back to the source of `triggering_packet`, quoting its header.
  Bytes send_icmp(ByteView triggering_packet, std::uint8_t icmp_type, std::uint8_t code, UnixTime now);
  /// Signed shutoff request to the accountability agent of the packet's source AS.
  Bytes request_shutoff(ByteView unwanted_packet, UnixTime now);

  /// Processes a packet delivered by this host's AS. Throws Error{AuthenticationFailure |
  /// ReplayDetected | NoSession | NoEphId | BadCertificate | ExpiredCertificate | NameNotFound |
  /// MalformedMessage}.
  HostEvent receive(ByteView packet, UnixTime now);

  const EphIdEntry* ephid(const std::string& label) const;
  const EphIdEntry* find_ephid(const EphId& ephid) const;
  const std::vector<EphIdEntry>& ephids() const { return ephids_; }
  const SessionState* session(const SessionId& id) const;
  const std::map<SessionId, SessionState>& sessions() const { return sessions_; }
  /// The session whose local EphID carries `label` and whose peer was first dialed as `peer`
  /// (or currently is `peer`).
  std::optional<SessionId> find_session(const std::string& local_label, const PeerAddress& peer) const;
  std::optional<SessionId> latest_session(const std::string& local_label) const;
  const std::map<std::string, EphIdCertificate>& resolved_names() const { return resolved_; }

  std::string snapshot() const;
  static Host restore(std::string_view snapshot, std::shared_ptr<const AsDirectory> directory);

 private:
  struct PendingRequest {
    std::string label;
    EphIdKind kind;
    EphemeralKeyPair keys;
  };

  Host(std::string name, Aid aid, LongTermKeyPair long_term, std::shared_ptr<const AsDirectory> directory);

  void require_bootstrap() const;
  wire::ApnaHeader next_header(const EphId& src, const PeerAddress& dst);
  Bytes finish_packet(const wire::ApnaHeader& header, const wire::Message& message) const;
  void check_peer_certificate(const EphIdCertificate& cert, UnixTime now) const;
  const EphIdEntry& sending_ephid(UnixTime now) const;
  std::optional<SessionId> find_session_by_local(const EphId& local, std::optional<PeerAddress> peer) const;

  HostEvent on_ephid_reply(const wire::EphIdReply& reply);
  HostEvent on_dns_answer(const wire::DnsAnswer& answer, UnixTime now);
  HostEvent on_hello(const wire::ApnaHeader& h, const EphIdEntry& local, const wire::Hello& hello, UnixTime now);
  HostEvent on_hello_ack(const wire::ApnaHeader& h, const wire::HelloAck& ack, UnixTime now);
  HostEvent on_data(const wire::ApnaHeader& h, ByteView packet, const wire::DataMessage& data);

  std::string name_;
  Aid aid_;
  LongTermKeyPair long_term_;
  std::shared_ptr<const AsDirectory> directory_;

  bool bootstrapped_ = false;
  Hid hid_;
  HostAsKeys keys_;
  wire::IdInfo ctrl_;
  EphIdCertificate ems_cert_;
  EphIdCertificate dns_cert_;

  std::vector<EphIdEntry> ephids_;
  std::vector<PendingRequest> pending_;
  std::map<std::string, std::vector<std::string>> pending_connects_;  // name -> local labels
  std::map<std::string, EphIdCertificate> resolved_;
  std::map<SessionId, SessionState> sessions_;
  std::map<EphId, std::uint64_t> nonce_counters_;  // per source EphID
  std::uint64_t request_counter_ = 0;
  std::uint64_t last_reply_counter_ = 0;
};

}  // namespace apna
