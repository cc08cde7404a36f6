#pragma once

// One AS and its infrastructure roles over a single shared state: registry
// service (bootstrap), EphID management service (issuance), border router
// (forwarding checks), accountability agent (shutoff) and DNS front end.
//
// Service EphIDs belong to the infrastructure HID 0, so packets to and from the
// services travel through the same border-router checks as host traffic.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "apna/crypto/certificate.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/crypto/keys.hpp"
#include "apna/crypto/primitives.hpp"
#include "apna/entities/types.hpp"
#include "apna/wire/messages.hpp"
#include "apna/wire/packet.hpp"

namespace apna {

struct HostRecord {
  Hid hid;
  HostAsKeys keys;
  bool revoked = false;
  /// Highest EphID-request nonce counter accepted from this host.
  std::uint64_t last_request_counter = 0;
};

/// Work done by the border-router checks since the last reset. `packets` counts
/// forward_outgoing calls; ephid_opens also counts destination opens on ingress.
struct ForwardCounters {
  std::uint64_t packets = 0;
  std::uint64_t ephid_opens = 0;
  std::uint64_t table_lookups = 0;  // revoked-set and host-table probes; routing excluded
  std::uint64_t mac_verifications = 0;
  friend bool operator==(const ForwardCounters&, const ForwardCounters&) = default;
};

enum class Service : std::uint8_t { Ems, Dns, Aa };
std::string_view to_string(Service service);

/// Result of handing a packet addressed to HID 0 to the AS services.
struct ServiceResult {
  std::string verdict;          // e.g. "ems:issued", "aa:rejected:RoguePacket"
  std::optional<Bytes> reply;   // packet from a service EphID, if any
};

class AutonomousSystem {
 public:
  struct Secrets {
    AsSecretKey master;
    ByteArray<32> sign_seed{};
    crypto::PrivateKey kex_private{};
  };

  /// Draws fresh secrets from `rng` and mints the service EphIDs valid from `now`.
  AutonomousSystem(Aid aid, crypto::RandomSource& rng, UnixTime now, std::shared_ptr<const AsDirectory> directory,
                   std::shared_ptr<DnsTable> dns);
  AutonomousSystem(Aid aid, const Secrets& secrets, crypto::RandomSource& rng, UnixTime now,
                   std::shared_ptr<const AsDirectory> directory, std::shared_ptr<DnsTable> dns);

  AutonomousSystem(const AutonomousSystem&) = delete;
  AutonomousSystem& operator=(const AutonomousSystem&) = delete;
  AutonomousSystem(AutonomousSystem&&) = default;
  AutonomousSystem& operator=(AutonomousSystem&&) = default;

  Aid aid() const { return aid_; }
  AsPublicInfo public_info() const;
  const AsSubkeys& subkeys() const { return subkeys_; }
  const crypto::PublicKey& sign_public() const { return sign_key_.public_key(); }

  // ---- registry service ----

  struct BootstrapResult {
    wire::BootstrapInfra m1;  // replicated to the other roles
    wire::BootstrapHost m2;   // handed to the host
  };
  /// Random HID not yet used in this AS (never 0).
  Hid allocate_hid(crypto::RandomSource& rng) const;
  /// `hid` is the identity established by out-of-band host authentication.
  /// Throws Error{DuplicateHid}.
  BootstrapResult bootstrap(Hid hid, const crypto::PublicKey& host_public, UnixTime now);
  /// Installs a host record from an m1 sealed under this AS's infra key.
  void apply_provisioning(const wire::BootstrapInfra& m1);

  // ---- EphID management service ----

  /// Throws Error{AuthenticationFailure | Expired | UnknownHid | ReplayDetected}.
  wire::EphIdReply issue(const EphId& src_ctrl_ephid, const wire::EphIdRequest& request, UnixTime now);

  // ---- border router ----

  Verdict forward_outgoing(ByteView packet, UnixTime now);
  Verdict forward_incoming(ByteView packet, UnixTime now);

  void set_route(Aid destination, Aid next_hop) { routes_[destination] = next_hop; }
  std::optional<Aid> next_hop(Aid destination) const;

  const ForwardCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

  // ---- accountability agent ----

  ShutoffOutcome handle_shutoff(const wire::ShutoffRequest& request, UnixTime now);
  bool is_revoked(const EphId& ephid) const { return revoked_.contains(ephid); }
  std::size_t revoked_count() const { return revoked_.size(); }
  /// Drops revoked entries (and receive-only bookkeeping) that have expired.
  std::size_t prune_revoked(UnixTime now);
  /// Marks the record revoked and returns a fresh HID for re-bootstrap. Throws Error{UnknownHid}.
  Hid revoke_host(Hid hid, crypto::RandomSource& rng);

  // ---- DNS front end ----

  /// Accepts only unexpired receive-only certificates issued here. Throws Error{BadCertificate}.
  void dns_register(const std::string& name, const EphIdCertificate& cert, UnixTime now);
  /// Throws Error{NameNotFound}.
  EphIdCertificate dns_lookup(const std::string& name) const;

  // ---- services ----

  const EphId& service_ephid(Service s) const;
  const EphIdCertificate& service_certificate(Service s) const;
  std::optional<Service> service_for(const EphId& ephid) const;
  /// Dispatches a packet that forward_incoming delivered to HID 0.
  ServiceResult handle_service_packet(ByteView packet, UnixTime now);
  /// Packet from a service EphID, MAC'd under the infrastructure key.
  Bytes make_service_packet(Service from, Aid dst_aid, const EphId& dst_ephid, const wire::Message& message);

  const HostRecord* host(Hid hid) const;
  std::size_t host_count() const { return hosts_.size(); }
  std::uint32_t iv_counter() const { return iv_counter_; }
  /// EphIDs issued with the receive-only lifetime class, with their expiry.
  bool is_receive_only(const EphId& ephid) const { return receive_only_.contains(ephid); }

  /// Self-describing JSON of the whole state, secrets included (hex).
  std::string snapshot() const;
  static AutonomousSystem restore(std::string_view snapshot, std::shared_ptr<const AsDirectory> directory,
                                  std::shared_ptr<DnsTable> dns);

 private:
  struct HostEntry {
    HostRecord record;
    std::unique_ptr<crypto::Cmac> mac;  // cached k_pkt schedule
  };
  struct ServiceIdentity {
    EphId ephid;
    EphemeralKeyPair keys;
    EphIdCertificate cert;
  };

  AutonomousSystem(Aid aid, const Secrets& secrets, std::shared_ptr<const AsDirectory> directory,
                   std::shared_ptr<DnsTable> dns);

  void install_host(const HostRecord& record);
  std::uint32_t next_iv();
  EphId mint(Hid hid, UnixTime exp_time);
  EphIdCertificate certify(const EphId& ephid, UnixTime exp_time, const crypto::PublicKey& pubkey) const;
  ServiceIdentity make_service(crypto::RandomSource& rng, UnixTime now);
  ServiceIdentity& service(Service s);
  const ServiceIdentity& service(Service s) const;

  Aid aid_;
  Secrets secrets_;
  AsSubkeys subkeys_;
  EphIdCodec codec_;
  crypto::SigningKey sign_key_;
  LongTermKeyPair kex_keys_;
  crypto::Key16 infra_key_{};
  std::shared_ptr<const AsDirectory> directory_;
  std::shared_ptr<DnsTable> dns_;

  std::unordered_map<std::uint32_t, HostEntry> hosts_;
  std::unordered_map<EphId, UnixTime, EphIdHash> revoked_;
  std::unordered_map<EphId, UnixTime, EphIdHash> receive_only_;
  std::map<Aid, Aid> routes_;
  std::uint32_t iv_counter_ = 0;
  std::uint64_t reply_counter_ = 0;
  std::uint64_t infra_counter_ = 0;
  std::uint64_t service_nonce_ = 0;
  std::vector<ServiceIdentity> services_;  // indexed by Service
  ForwardCounters counters_;
};

}  // namespace apna
