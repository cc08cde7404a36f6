#pragma once

// Shared vocabulary of the protocol actors: lifetimes, forwarding verdicts,
// the AS directory that stands in for an RPKI, and the DNS table.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "apna/bytes.hpp"
#include "apna/crypto/certificate.hpp"
#include "apna/crypto/ephid.hpp"
#include "apna/wire/messages.hpp"

namespace apna {

using wire::EphIdKind;

inline constexpr UnixTime kControlLifetime = 3600;
inline constexpr UnixTime kDataLifetime = 900;
inline constexpr UnixTime kReceiveOnlyLifetime = 86400;
/// EMS, DNS and AA EphIDs.
inline constexpr UnixTime kServiceLifetime = 30 * 86400;

UnixTime lifetime_of(EphIdKind kind);

/// HID owning the AS's own service EphIDs. Never handed to a host.
inline constexpr Hid kInfrastructureHid{0};

/// An EphID whose sealed expiry is strictly before `now` is expired.
constexpr bool is_expired(UnixTime exp_time, UnixTime now) { return exp_time < now; }

enum class DropReason : std::uint8_t { Expired, Revoked, UnknownHid, BadMac, BadEphId, Malformed, NoRoute };
std::string_view to_string(DropReason reason);

struct Verdict {
  enum class Kind : std::uint8_t { Forward, DeliverLocal, Drop };

  Kind kind = Kind::Drop;
  Aid next_as;      // Forward
  Hid hid;          // DeliverLocal
  DropReason reason = DropReason::Malformed;  // Drop

  static Verdict forward(Aid next) { return {Kind::Forward, next, {}, {}}; }
  static Verdict deliver(Hid h) { return {Kind::DeliverLocal, {}, h, {}}; }
  static Verdict drop(DropReason r) { return {Kind::Drop, {}, {}, r}; }

  bool is_drop() const { return kind == Kind::Drop; }
  /// "forward", "deliver" or "drop:<Reason>".
  std::string describe() const;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class ShutoffRejection : std::uint8_t { BadCert, BadSignature, NotRecipient, Expired, UnknownHid, RoguePacket };
std::string_view to_string(ShutoffRejection reason);

struct ShutoffOutcome {
  bool revoked = false;
  EphId ephid;  // the revoked source EphID when revoked
  ShutoffRejection reason = ShutoffRejection::RoguePacket;

  std::string describe() const;
};

/// Public facts about one AS, distributed out of band.
struct AsPublicInfo {
  Aid aid;
  crypto::PublicKey sign_public{};
  crypto::PublicKey kex_public{};
  EphId aa_ephid;
};

class AsDirectory {
 public:
  void add(const AsPublicInfo& info) { entries_[info.aid] = info; }
  const AsPublicInfo* find(Aid aid) const {
    auto it = entries_.find(aid);
    return it == entries_.end() ? nullptr : &it->second;
  }
  /// Throws Error{InvalidArgument} for an unknown AID.
  const AsPublicInfo& at(Aid aid) const;

 private:
  std::map<Aid, AsPublicInfo> entries_;
};

/// name -> receive-only certificate. Validation happens at the registering AS.
class DnsTable {
 public:
  void put(const std::string& name, const EphIdCertificate& cert) { entries_[name] = cert; }
  /// Throws Error{NameNotFound}.
  const EphIdCertificate& lookup(const std::string& name) const;
  std::optional<EphIdCertificate> find(const std::string& name) const;
  const std::map<std::string, EphIdCertificate>& entries() const { return entries_; }

 private:
  std::map<std::string, EphIdCertificate> entries_;
};

}  // namespace apna
