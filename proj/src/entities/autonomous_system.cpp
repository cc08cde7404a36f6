#include "apna/entities/autonomous_system.hpp"

#include <algorithm>

#include "apna/error.hpp"
#include "json.hpp"

namespace apna {

using nlohmann::json;

namespace {

crypto::Key16 derive_infra_key(const AsSecretKey& master) {
  static constexpr std::string_view kLabel = "as-infra";
  const ByteView info(reinterpret_cast<const std::uint8_t*>(kLabel.data()), kLabel.size());
  return to_array<16>(crypto::hkdf_sha256(master.bytes, {}, info, 16));
}

std::string err_name(const Error& e) { return std::string(to_string(e.code())); }

template <std::size_t N>
ByteArray<N> hex_array(const json& j) {
  const auto b = from_hex(j.get<std::string>());
  if (b.size() != N) throw Error(Errc::ParseError, "expected " + std::to_string(N) + " hex bytes");
  return to_array<N>(b);
}

EphId hex_ephid(const json& j) { return EphId::from_bytes(from_hex(j.get<std::string>())); }

json ephid_map_json(const std::unordered_map<EphId, UnixTime, EphIdHash>& m) {
  std::vector<std::pair<EphId, UnixTime>> sorted(m.begin(), m.end());
  std::sort(sorted.begin(), sorted.end());
  json out = json::array();
  for (const auto& [e, exp] : sorted) out.push_back({{"ephid", to_hex(e.bytes())}, {"exp", exp}});
  return out;
}

}  // namespace

std::string_view to_string(Service service) {
  switch (service) {
    case Service::Ems: return "ems";
    case Service::Dns: return "dns";
    case Service::Aa: return "aa";
  }
  return "unknown";
}

AutonomousSystem::AutonomousSystem(Aid aid, const Secrets& secrets, std::shared_ptr<const AsDirectory> directory,
                                   std::shared_ptr<DnsTable> dns)
    : aid_(aid),
      secrets_(secrets),
      subkeys_(derive_as_subkeys(secrets.master)),
      codec_(subkeys_),
      sign_key_(crypto::SigningKey::from_seed(secrets.sign_seed)),
      kex_keys_{crypto::X25519KeyPair::from_private(secrets.kex_private)},
      infra_key_(derive_infra_key(secrets.master)),
      directory_(std::move(directory)),
      dns_(std::move(dns)) {}

AutonomousSystem::AutonomousSystem(Aid aid, crypto::RandomSource& rng, UnixTime now,
                                   std::shared_ptr<const AsDirectory> directory, std::shared_ptr<DnsTable> dns)
    : AutonomousSystem(aid,
                       Secrets{AsSecretKey{rng.bytes<16>()}, rng.bytes<32>(), rng.bytes<32>()},
                       rng, now, std::move(directory), std::move(dns)) {}

AutonomousSystem::AutonomousSystem(Aid aid, const Secrets& secrets, crypto::RandomSource& rng, UnixTime now,
                                   std::shared_ptr<const AsDirectory> directory, std::shared_ptr<DnsTable> dns)
    : AutonomousSystem(aid, secrets, std::move(directory), std::move(dns)) {
  install_host(HostRecord{kInfrastructureHid, HostAsKeys{rng.bytes<16>(), rng.bytes<16>()}});
  // The AA EphID goes into every certificate, so it is minted first.
  auto aa = make_service(rng, now);
  services_.push_back(make_service(rng, now));
  services_.push_back(make_service(rng, now));
  services_.push_back(std::move(aa));
  for (auto& s : services_) s.cert = certify(s.ephid, s.cert.body.exp_time, s.keys.public_key());
}

AsPublicInfo AutonomousSystem::public_info() const {
  return AsPublicInfo{aid_, sign_key_.public_key(), kex_keys_.pair.public_key, service(Service::Aa).ephid};
}

AutonomousSystem::ServiceIdentity AutonomousSystem::make_service(crypto::RandomSource& rng, UnixTime now) {
  auto keys = EphemeralKeyPair::generate(rng);
  const UnixTime exp = now + kServiceLifetime;
  const auto ephid = mint(kInfrastructureHid, exp);
  EphIdCertificate cert;
  cert.body.exp_time = exp;  // signed once the AA EphID is known
  return ServiceIdentity{ephid, std::move(keys), cert};
}

AutonomousSystem::ServiceIdentity& AutonomousSystem::service(Service s) {
  return services_.at(static_cast<std::size_t>(s));
}
const AutonomousSystem::ServiceIdentity& AutonomousSystem::service(Service s) const {
  return services_.at(static_cast<std::size_t>(s));
}

const EphId& AutonomousSystem::service_ephid(Service s) const { return service(s).ephid; }
const EphIdCertificate& AutonomousSystem::service_certificate(Service s) const { return service(s).cert; }

std::optional<Service> AutonomousSystem::service_for(const EphId& ephid) const {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].ephid == ephid) return static_cast<Service>(i);
  }
  return std::nullopt;
}

void AutonomousSystem::install_host(const HostRecord& record) {
  HostEntry entry{record, std::make_unique<crypto::Cmac>(record.keys.pkt)};
  hosts_.insert_or_assign(record.hid.value, std::move(entry));
}

std::uint32_t AutonomousSystem::next_iv() {
  if (iv_counter_ == UINT32_MAX) throw Error(Errc::InvalidArgument, "IV space exhausted; rotate the AS master key");
  return iv_counter_++;
}

EphId AutonomousSystem::mint(Hid hid, UnixTime exp_time) { return codec_.mint(hid, exp_time, next_iv()); }

EphIdCertificate AutonomousSystem::certify(const EphId& ephid, UnixTime exp_time,
                                           const crypto::PublicKey& pubkey) const {
  CertificateBody body;
  body.ephid = ephid;
  body.exp_time = exp_time;
  body.pubkey = pubkey;
  body.aid = aid_;
  body.aa_ephid = services_.size() > static_cast<std::size_t>(Service::Aa) ? service(Service::Aa).ephid : ephid;
  return sign_certificate(sign_key_, body);
}

Hid AutonomousSystem::allocate_hid(crypto::RandomSource& rng) const {
  for (;;) {
    const Hid h{rng.next_u32()};
    if (h != kInfrastructureHid && !hosts_.contains(h.value)) return h;
  }
}

const HostRecord* AutonomousSystem::host(Hid hid) const {
  auto it = hosts_.find(hid.value);
  return it == hosts_.end() ? nullptr : &it->second.record;
}

// ---- registry service ----

AutonomousSystem::BootstrapResult AutonomousSystem::bootstrap(Hid hid, const crypto::PublicKey& host_public,
                                                              UnixTime now) {
  if (hosts_.contains(hid.value)) throw Error(Errc::DuplicateHid, "HID " + std::to_string(hid.value));
  const auto keys = derive_host_as_keys(kex_keys_, host_public);
  BootstrapResult out;
  out.m1 = wire::BootstrapInfra::seal(infra_key_, wire::control_nonce(wire::ControlDirection::Infra, ++infra_counter_),
                                      wire::HostProvisioning{hid, keys});
  apply_provisioning(out.m1);

  const UnixTime exp = now + kControlLifetime;
  out.m2.id_info = wire::IdInfo{mint(hid, exp), exp};
  out.m2.signature = sign_key_.sign(out.m2.id_info.encode());
  out.m2.dns_cert = service(Service::Dns).cert;
  out.m2.ems_cert = service(Service::Ems).cert;
  return out;
}

void AutonomousSystem::apply_provisioning(const wire::BootstrapInfra& m1) {
  const auto p = m1.open(infra_key_);
  if (hosts_.contains(p.hid.value)) throw Error(Errc::DuplicateHid, "HID " + std::to_string(p.hid.value));
  install_host(HostRecord{p.hid, p.keys});
}

// ---- EphID management service ----

wire::EphIdReply AutonomousSystem::issue(const EphId& src_ctrl_ephid, const wire::EphIdRequest& request,
                                         UnixTime now) {
  const auto ctrl = codec_.open(src_ctrl_ephid);
  if (is_expired(ctrl.exp_time, now)) throw Error(Errc::Expired, "control EphID expired");
  auto it = hosts_.find(ctrl.hid.value);
  if (it == hosts_.end() || it->second.record.revoked || ctrl.hid == kInfrastructureHid) {
    throw Error(Errc::UnknownHid, "HID not registered");
  }
  auto& record = it->second.record;
  if (wire::control_direction(request.nonce) != wire::ControlDirection::HostToAs) {
    throw Error(Errc::AuthenticationFailure, "request nonce has the wrong direction");
  }
  const auto body = request.open(record.keys.ctrl);
  const auto counter = wire::control_counter(request.nonce);
  if (counter <= record.last_request_counter) throw Error(Errc::ReplayDetected, "stale request nonce");
  record.last_request_counter = counter;

  const UnixTime exp = now + lifetime_of(body.kind);
  const auto ephid = mint(ctrl.hid, exp);
  if (body.kind == EphIdKind::ReceiveOnly) receive_only_[ephid] = exp;
  const auto cert = certify(ephid, exp, body.pubkey);
  return wire::EphIdReply::seal(record.keys.ctrl,
                                wire::control_nonce(wire::ControlDirection::AsToHost, ++reply_counter_), cert);
}

// ---- border router ----

std::optional<Aid> AutonomousSystem::next_hop(Aid destination) const {
  if (destination == aid_) return aid_;
  auto it = routes_.find(destination);
  if (it == routes_.end()) return std::nullopt;
  return it->second;
}

Verdict AutonomousSystem::forward_outgoing(ByteView packet, UnixTime now) {
  ++counters_.packets;
  if (packet.size() < wire::kHeaderSize) return Verdict::drop(DropReason::Malformed);
  if (load_u32(packet.data() + wire::offset::kSrcAid) != aid_.value) return Verdict::drop(DropReason::BadEphId);

  const auto src = EphId::from_bytes(packet.subspan(wire::offset::kSrcEphId, kEphIdSize));
  ++counters_.ephid_opens;
  const auto contents = codec_.try_open(src);
  if (!contents) return Verdict::drop(DropReason::BadEphId);
  if (is_expired(contents->exp_time, now)) return Verdict::drop(DropReason::Expired);

  ++counters_.table_lookups;
  if (revoked_.contains(src)) return Verdict::drop(DropReason::Revoked);
  ++counters_.table_lookups;
  auto it = hosts_.find(contents->hid.value);
  if (it == hosts_.end() || it->second.record.revoked) return Verdict::drop(DropReason::UnknownHid);

  ++counters_.mac_verifications;
  if (!wire::verify_packet_mac(*it->second.mac, packet)) return Verdict::drop(DropReason::BadMac);

  const auto next = next_hop(Aid{load_u32(packet.data() + wire::offset::kDstAid)});
  return next ? Verdict::forward(*next) : Verdict::drop(DropReason::NoRoute);
}

Verdict AutonomousSystem::forward_incoming(ByteView packet, UnixTime now) {
  if (packet.size() < wire::kHeaderSize) return Verdict::drop(DropReason::Malformed);
  const Aid dst_aid{load_u32(packet.data() + wire::offset::kDstAid)};
  if (dst_aid != aid_) {
    const auto next = next_hop(dst_aid);
    return next ? Verdict::forward(*next) : Verdict::drop(DropReason::NoRoute);
  }
  const auto dst = EphId::from_bytes(packet.subspan(wire::offset::kDstEphId, kEphIdSize));
  ++counters_.ephid_opens;
  const auto contents = codec_.try_open(dst);
  if (!contents) return Verdict::drop(DropReason::BadEphId);
  if (is_expired(contents->exp_time, now)) return Verdict::drop(DropReason::Expired);
  if (revoked_.contains(dst)) return Verdict::drop(DropReason::Revoked);
  auto it = hosts_.find(contents->hid.value);
  if (it == hosts_.end() || it->second.record.revoked) return Verdict::drop(DropReason::UnknownHid);
  return Verdict::deliver(contents->hid);
}

// ---- accountability agent ----

ShutoffOutcome AutonomousSystem::handle_shutoff(const wire::ShutoffRequest& request, UnixTime now) {
  auto reject = [](ShutoffRejection r) { return ShutoffOutcome{false, {}, r}; };
  const auto& cert = request.cert;
  const auto* issuer = directory_ ? directory_->find(cert.body.aid) : nullptr;
  if (!issuer || !verify_certificate(issuer->sign_public, cert) || is_expired(cert.body.exp_time, now)) {
    return reject(ShutoffRejection::BadCert);
  }
  if (!verify_ephemeral_signature(cert.body.pubkey, request.evidence, request.signature)) {
    return reject(ShutoffRejection::BadSignature);
  }
  if (request.evidence.size() < wire::kHeaderSize) return reject(ShutoffRejection::RoguePacket);
  const auto header = wire::decode_header(request.evidence);
  if (header.dst_aid != cert.body.aid || header.dst_ephid != cert.body.ephid) {
    return reject(ShutoffRejection::NotRecipient);
  }
  if (header.src_aid != aid_) return reject(ShutoffRejection::RoguePacket);
  const auto src = codec_.try_open(header.src_ephid);
  if (!src) return reject(ShutoffRejection::RoguePacket);
  if (is_expired(src->exp_time, now)) return reject(ShutoffRejection::Expired);
  auto it = hosts_.find(src->hid.value);
  if (it == hosts_.end() || it->second.record.revoked) return reject(ShutoffRejection::UnknownHid);
  if (!wire::verify_packet_mac(*it->second.mac, request.evidence)) return reject(ShutoffRejection::RoguePacket);

  revoked_[header.src_ephid] = src->exp_time;
  return ShutoffOutcome{true, header.src_ephid, {}};
}

std::size_t AutonomousSystem::prune_revoked(UnixTime now) {
  const auto removed = std::erase_if(revoked_, [now](const auto& kv) { return is_expired(kv.second, now); });
  std::erase_if(receive_only_, [now](const auto& kv) { return is_expired(kv.second, now); });
  return removed;
}

Hid AutonomousSystem::revoke_host(Hid hid, crypto::RandomSource& rng) {
  auto it = hosts_.find(hid.value);
  if (it == hosts_.end() || it->second.record.revoked || hid == kInfrastructureHid) {
    throw Error(Errc::UnknownHid, "HID " + std::to_string(hid.value));
  }
  it->second.record.revoked = true;
  return allocate_hid(rng);
}

// ---- DNS ----

void AutonomousSystem::dns_register(const std::string& name, const EphIdCertificate& cert, UnixTime now) {
  if (cert.body.aid != aid_ || !verify_certificate(sign_key_.public_key(), cert)) {
    throw Error(Errc::BadCertificate, "certificate not issued by this AS");
  }
  if (is_expired(cert.body.exp_time, now)) throw Error(Errc::BadCertificate, "certificate expired");
  auto it = receive_only_.find(cert.body.ephid);
  if (it == receive_only_.end()) throw Error(Errc::BadCertificate, "not a receive-only EphID");
  if (!dns_) throw Error(Errc::InvalidArgument, "no DNS table attached");
  dns_->put(name, cert);
}

EphIdCertificate AutonomousSystem::dns_lookup(const std::string& name) const {
  if (!dns_) throw Error(Errc::NameNotFound, name);
  return dns_->lookup(name);
}

// ---- services ----

Bytes AutonomousSystem::make_service_packet(Service from, Aid dst_aid, const EphId& dst_ephid,
                                            const wire::Message& message) {
  wire::ApnaHeader h;
  h.src_aid = aid_;
  h.src_ephid = service(from).ephid;
  h.dst_aid = dst_aid;
  h.dst_ephid = dst_ephid;
  h.nonce = ++service_nonce_;
  auto bytes = wire::Packet{h, wire::encode_message(message)}.encode();
  wire::stamp_packet_mac(hosts_.at(kInfrastructureHid.value).record.keys.pkt, bytes);
  return bytes;
}

ServiceResult AutonomousSystem::handle_service_packet(ByteView packet, UnixTime now) {
  const auto header = wire::decode_header(packet);
  const auto svc = service_for(header.dst_ephid);
  if (!svc) return {"service:drop:NoService", std::nullopt};
  const std::string prefix = std::string(to_string(*svc)) + ":";

  wire::Message message;
  try {
    message = wire::decode_message(packet.subspan(wire::kHeaderSize));
  } catch (const Error& e) {
    return {prefix + "drop:" + err_name(e), std::nullopt};
  }

  try {
    switch (*svc) {
      case Service::Ems:
        if (const auto* req = std::get_if<wire::EphIdRequest>(&message)) {
          auto reply = issue(header.src_ephid, *req, now);
          return {"ems:issued", make_service_packet(Service::Ems, header.src_aid, header.src_ephid, reply)};
        }
        break;
      case Service::Dns:
        if (const auto* reg = std::get_if<wire::DnsRegister>(&message)) {
          // Only the owner of the receive-only EphID may publish it.
          const auto requester = codec_.try_open(header.src_ephid);
          const auto target = codec_.try_open(reg->cert.body.ephid);
          if (header.src_aid != aid_ || !requester || !target || requester->hid != target->hid) {
            throw Error(Errc::BadCertificate, "requester does not own the EphID");
          }
          dns_register(reg->name, reg->cert, now);
          return {"dns:registered", std::nullopt};
        }
        if (const auto* query = std::get_if<wire::DnsQuery>(&message)) {
          wire::DnsAnswer answer{query->name, dns_ ? dns_->find(query->name) : std::nullopt};
          const std::string verdict = answer.cert ? "dns:answered" : "dns:not-found";
          return {verdict, make_service_packet(Service::Dns, header.src_aid, header.src_ephid, answer)};
        }
        break;
      case Service::Aa:
        if (const auto* req = std::get_if<wire::ShutoffRequest>(&message)) {
          return {"aa:" + handle_shutoff(*req, now).describe(), std::nullopt};
        }
        break;
    }
  } catch (const Error& e) {
    const bool is_dns = *svc == Service::Dns;
    return {prefix + (is_dns ? "rejected:" : "drop:") + err_name(e), std::nullopt};
  }
  return {prefix + "drop:UnexpectedMessage", std::nullopt};
}

// ---- snapshot ----

std::string AutonomousSystem::snapshot() const {
  json j;
  j["type"] = "apna-as";
  j["version"] = 1;
  j["aid"] = aid_.value;
  j["secrets"] = {{"master", to_hex(secrets_.master.bytes)},
                  {"sign_seed", to_hex(secrets_.sign_seed)},
                  {"kex_private", to_hex(secrets_.kex_private)}};
  j["iv_counter"] = iv_counter_;
  j["reply_counter"] = reply_counter_;
  j["infra_counter"] = infra_counter_;
  j["service_nonce"] = service_nonce_;

  std::vector<const HostRecord*> records;
  for (const auto& [_, entry] : hosts_) records.push_back(&entry.record);
  std::sort(records.begin(), records.end(), [](auto* a, auto* b) { return a->hid < b->hid; });
  json hosts = json::array();
  for (const auto* r : records) {
    hosts.push_back({{"hid", r->hid.value},
                     {"k_ctrl", to_hex(r->keys.ctrl)},
                     {"k_pkt", to_hex(r->keys.pkt)},
                     {"revoked", r->revoked},
                     {"last_request_counter", r->last_request_counter}});
  }
  j["hosts"] = std::move(hosts);
  j["revoked_ephids"] = ephid_map_json(revoked_);
  j["receive_only_ephids"] = ephid_map_json(receive_only_);

  json routes = json::array();
  for (const auto& [dst, next] : routes_) routes.push_back({{"dst", dst.value}, {"next", next.value}});
  j["routes"] = std::move(routes);

  json services = json::array();
  for (std::size_t i = 0; i < services_.size(); ++i) {
    services.push_back({{"service", to_string(static_cast<Service>(i))},
                        {"seed", to_hex(services_[i].keys.seed())},
                        {"cert", to_hex(services_[i].cert.encode())}});
  }
  j["services"] = std::move(services);
  return j.dump(2);
}

AutonomousSystem AutonomousSystem::restore(std::string_view snapshot, std::shared_ptr<const AsDirectory> directory,
                                           std::shared_ptr<DnsTable> dns) {
  json j;
  try {
    j = json::parse(snapshot);
    if (j.at("type") != "apna-as" || j.at("version") != 1) throw Error(Errc::ParseError, "not an AS snapshot v1");
    const auto& s = j.at("secrets");
    Secrets secrets{AsSecretKey{hex_array<16>(s.at("master"))}, hex_array<32>(s.at("sign_seed")),
                    hex_array<32>(s.at("kex_private"))};
    AutonomousSystem as(Aid{j.at("aid").get<std::uint32_t>()}, secrets, std::move(directory), std::move(dns));
    as.iv_counter_ = j.at("iv_counter").get<std::uint32_t>();
    as.reply_counter_ = j.at("reply_counter").get<std::uint64_t>();
    as.infra_counter_ = j.at("infra_counter").get<std::uint64_t>();
    as.service_nonce_ = j.at("service_nonce").get<std::uint64_t>();
    for (const auto& h : j.at("hosts")) {
      HostRecord r{Hid{h.at("hid").get<std::uint32_t>()},
                   HostAsKeys{hex_array<16>(h.at("k_ctrl")), hex_array<16>(h.at("k_pkt"))},
                   h.at("revoked").get<bool>(), h.at("last_request_counter").get<std::uint64_t>()};
      as.install_host(r);
    }
    for (const auto& e : j.at("revoked_ephids")) as.revoked_[hex_ephid(e.at("ephid"))] = e.at("exp").get<UnixTime>();
    for (const auto& e : j.at("receive_only_ephids")) {
      as.receive_only_[hex_ephid(e.at("ephid"))] = e.at("exp").get<UnixTime>();
    }
    for (const auto& r : j.at("routes")) {
      as.routes_[Aid{r.at("dst").get<std::uint32_t>()}] = Aid{r.at("next").get<std::uint32_t>()};
    }
    for (const auto& s : j.at("services")) {
      auto keys = EphemeralKeyPair::from_seed(hex_array<32>(s.at("seed")));
      auto cert = EphIdCertificate::decode(from_hex(s.at("cert").get<std::string>()));
      as.services_.push_back(ServiceIdentity{cert.body.ephid, std::move(keys), cert});
    }
    if (as.services_.size() != 3) throw Error(Errc::ParseError, "expected three service identities");
    return as;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

}  // namespace apna
