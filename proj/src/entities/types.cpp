#include "apna/entities/types.hpp"

#include "apna/error.hpp"

namespace apna {

UnixTime lifetime_of(EphIdKind kind) {
  switch (kind) {
    case EphIdKind::Control: return kControlLifetime;
    case EphIdKind::Data: return kDataLifetime;
    case EphIdKind::ReceiveOnly: return kReceiveOnlyLifetime;
  }
  throw Error(Errc::InvalidArgument, "unknown EphID kind");
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::Expired: return "Expired";
    case DropReason::Revoked: return "Revoked";
    case DropReason::UnknownHid: return "UnknownHid";
    case DropReason::BadMac: return "BadMac";
    case DropReason::BadEphId: return "BadEphId";
    case DropReason::Malformed: return "Malformed";
    case DropReason::NoRoute: return "NoRoute";
  }
  return "Unknown";
}

std::string Verdict::describe() const {
  switch (kind) {
    case Kind::Forward: return "forward";
    case Kind::DeliverLocal: return "deliver";
    case Kind::Drop: return "drop:" + std::string(to_string(reason));
  }
  return "unknown";
}

std::string_view to_string(ShutoffRejection reason) {
  switch (reason) {
    case ShutoffRejection::BadCert: return "BadCert";
    case ShutoffRejection::BadSignature: return "BadSignature";
    case ShutoffRejection::NotRecipient: return "NotRecipient";
    case ShutoffRejection::Expired: return "Expired";
    case ShutoffRejection::UnknownHid: return "UnknownHid";
    case ShutoffRejection::RoguePacket: return "RoguePacket";
  }
  return "Unknown";
}

std::string ShutoffOutcome::describe() const {
  return revoked ? "revoked" : "rejected:" + std::string(to_string(reason));
}

const AsPublicInfo& AsDirectory::at(Aid aid) const {
  if (const auto* info = find(aid)) return *info;
  throw Error(Errc::InvalidArgument, "no directory entry for AS " + std::to_string(aid.value));
}

const EphIdCertificate& DnsTable::lookup(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(Errc::NameNotFound, name);
  return it->second;
}

std::optional<EphIdCertificate> DnsTable::find(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

}  // namespace apna
