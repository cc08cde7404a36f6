#include "apna/entities/host.hpp"

#include <algorithm>

#include "apna/error.hpp"
#include "json.hpp"

namespace apna {

using nlohmann::json;

namespace {

crypto::AeadNonce data_nonce(const EphId& src, const EphId& dst, std::uint64_t nonce) {
  crypto::AeadNonce n{};
  n[3] = src < dst ? 1 : 2;
  store_u64(n.data() + 4, nonce);
  return n;
}

ByteView header_ad(ByteView packet) { return packet.first(wire::offset::kMac); }

template <std::size_t N>
ByteArray<N> hex_array(const json& j) {
  const auto b = from_hex(j.get<std::string>());
  if (b.size() != N) throw Error(Errc::ParseError, "expected " + std::to_string(N) + " hex bytes");
  return to_array<N>(b);
}

EphId hex_ephid(const json& j) { return EphId::from_bytes(from_hex(j.get<std::string>())); }
EphIdCertificate hex_cert(const json& j) { return EphIdCertificate::decode(from_hex(j.get<std::string>())); }

json peer_json(const PeerAddress& p) { return {{"aid", p.aid.value}, {"ephid", to_hex(p.ephid.bytes())}}; }
PeerAddress peer_from_json(const json& j) { return {Aid{j.at("aid").get<std::uint32_t>()}, hex_ephid(j.at("ephid"))}; }

}  // namespace

// ---- replay window ----

bool ReplayWindow::accept(std::uint64_t nonce) {
  if (nonce == 0) return false;
  if (nonce > highest_) {
    const auto shift = nonce - highest_;
    if (shift >= kSize) {
      seen_.reset();
    } else {
      seen_ <<= shift;
    }
    seen_.set(0);
    highest_ = nonce;
    return true;
  }
  const auto age = highest_ - nonce;
  if (age >= kSize || seen_.test(age)) return false;
  seen_.set(age);
  return true;
}

std::string_view HostEvent::describe() const {
  switch (kind) {
    case Kind::Data: return "recv-data";
    case Kind::Icmp: return "recv-icmp";
    case Kind::EphIdIssued: return "ephid-issued";
    case Kind::HelloAccepted: return "hello";
    case Kind::HelloAcked: return "hello-ack";
    case Kind::DnsAnswer: return "dns-answer";
  }
  return "unknown";
}

// ---- host ----

Host::Host(std::string name, Aid aid, LongTermKeyPair long_term, std::shared_ptr<const AsDirectory> directory)
    : name_(std::move(name)), aid_(aid), long_term_(long_term), directory_(std::move(directory)) {}

Host::Host(std::string name, Aid aid, crypto::RandomSource& rng, std::shared_ptr<const AsDirectory> directory)
    : Host(std::move(name), aid, LongTermKeyPair::generate(rng), std::move(directory)) {}

void Host::require_bootstrap() const {
  if (!bootstrapped_) throw Error(Errc::NoEphId, name_ + " has not bootstrapped");
}

void Host::complete_bootstrap(Hid hid, const wire::BootstrapHost& m2, UnixTime now) {
  const auto& as = directory_->at(aid_);
  if (!m2.verify(as.sign_public)) throw Error(Errc::AuthenticationFailure, "id_info signature does not verify");
  for (const auto* cert : {&m2.ems_cert, &m2.dns_cert}) {
    if (cert->body.aid != aid_ || !verify_certificate(as.sign_public, *cert)) {
      throw Error(Errc::BadCertificate, "service certificate not signed by the home AS");
    }
  }
  if (is_expired(m2.id_info.exp_time, now)) throw Error(Errc::Expired, "control EphID already expired");
  keys_ = derive_host_as_keys(long_term_, as.kex_public);
  hid_ = hid;
  ctrl_ = m2.id_info;
  ems_cert_ = m2.ems_cert;
  dns_cert_ = m2.dns_cert;
  bootstrapped_ = true;
}

wire::ApnaHeader Host::next_header(const EphId& src, const PeerAddress& dst) {
  wire::ApnaHeader h;
  h.src_aid = aid_;
  h.src_ephid = src;
  h.dst_aid = dst.aid;
  h.dst_ephid = dst.ephid;
  h.nonce = ++nonce_counters_[src];
  return h;
}

Bytes Host::finish_packet(const wire::ApnaHeader& header, const wire::Message& message) const {
  auto bytes = wire::Packet{header, wire::encode_message(message)}.encode();
  wire::stamp_packet_mac(keys_.pkt, bytes);
  return bytes;
}

Bytes Host::request_ephid(const std::string& label, EphIdKind kind, crypto::RandomSource& rng) {
  require_bootstrap();
  auto keys = EphemeralKeyPair::generate(rng);
  const auto nonce = wire::control_nonce(wire::ControlDirection::HostToAs, ++request_counter_);
  const auto request = wire::EphIdRequest::seal(keys_.ctrl, nonce, {kind, keys.public_key()});
  pending_.push_back(PendingRequest{label, kind, std::move(keys)});
  return finish_packet(next_header(ctrl_.ctrl_ephid, {aid_, ems_cert_.body.ephid}), request);
}

Bytes Host::register_name(const std::string& label, const std::string& name) {
  require_bootstrap();
  const auto* entry = ephid(label);
  if (!entry) throw Error(Errc::NoEphId, "no EphID labelled " + label);
  return finish_packet(next_header(ctrl_.ctrl_ephid, {aid_, dns_cert_.body.ephid}), wire::DnsRegister{name, entry->cert});
}

Bytes Host::query_name(const std::string& name) {
  require_bootstrap();
  return finish_packet(next_header(ctrl_.ctrl_ephid, {aid_, dns_cert_.body.ephid}), wire::DnsQuery{name});
}

void Host::check_peer_certificate(const EphIdCertificate& cert, UnixTime now) const {
  const auto* issuer = directory_->find(cert.body.aid);
  if (!issuer || !verify_certificate(issuer->sign_public, cert)) {
    throw Error(Errc::BadCertificate, "certificate not signed by AS " + std::to_string(cert.body.aid.value));
  }
  if (is_expired(cert.body.exp_time, now)) throw Error(Errc::ExpiredCertificate, "peer certificate expired");
}

Host::Connection Host::connect(const std::string& local_label, const EphIdCertificate& peer_cert, UnixTime now) {
  require_bootstrap();
  const auto* local = ephid(local_label);
  if (!local) throw Error(Errc::NoEphId, "no EphID labelled " + local_label);
  if (local->kind == EphIdKind::ReceiveOnly) {
    throw Error(Errc::InvalidArgument, "receive-only EphIDs cannot originate a connection");
  }
  if (is_expired(local->cert.body.exp_time, now)) throw Error(Errc::NoEphId, local_label + " has expired");
  check_peer_certificate(peer_cert, now);

  const PeerAddress peer{peer_cert.body.aid, peer_cert.body.ephid};
  SessionId id{local->ephid(), peer};
  SessionState state;
  state.key = dh_session_key(local->keys, peer_cert.body.pubkey, local->ephid(), peer.ephid);
  state.peer_cert = peer_cert;
  sessions_[id] = std::move(state);
  return {id, finish_packet(next_header(local->ephid(), peer), wire::Hello{local->cert})};
}

Bytes Host::connect_by_name(const std::string& local_label, const std::string& name) {
  if (!ephid(local_label)) throw Error(Errc::NoEphId, "no EphID labelled " + local_label);
  pending_connects_[name].push_back(local_label);
  return query_name(name);
}

Bytes Host::send(const SessionId& id, ByteView payload, UnixTime now) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::NoSession, "no session for this EphID pair");
  const auto* local = find_ephid(id.local);
  if (!local || local->kind == EphIdKind::ReceiveOnly) throw Error(Errc::NoEphId, "session has no sending EphID");
  if (is_expired(local->cert.body.exp_time, now)) throw Error(Errc::NoEphId, local->label + " has expired");

  auto header = next_header(id.local, id.peer);
  const auto encoded = wire::encode_header(header);
  const auto ct = seal_payload(it->second.key, data_nonce(id.local, id.peer.ephid, header.nonce),
                               header_ad(encoded), payload);
  ++it->second.sent;
  return finish_packet(header, wire::DataMessage{ct});
}

const EphIdEntry& Host::sending_ephid(UnixTime now) const {
  for (auto it = ephids_.rbegin(); it != ephids_.rend(); ++it) {
    if (it->kind == EphIdKind::Data && !is_expired(it->cert.body.exp_time, now)) return *it;
  }
  throw Error(Errc::NoEphId, name_ + " holds no unexpired data EphID");
}

Bytes Host::send_icmp(ByteView triggering_packet, std::uint8_t icmp_type, std::uint8_t code, UnixTime now) {
  require_bootstrap();
  const auto trigger = wire::decode_header(triggering_packet);
  const auto* local = find_ephid(trigger.dst_ephid);
  EphId src = (local && local->kind != EphIdKind::ReceiveOnly && !is_expired(local->cert.body.exp_time, now))
                  ? local->ephid()
                  : sending_ephid(now).ephid();
  const auto quoted = triggering_packet.first(wire::kHeaderSize);
  return finish_packet(next_header(src, {trigger.src_aid, trigger.src_ephid}),
                       wire::IcmpMessage{icmp_type, code, Bytes(quoted.begin(), quoted.end())});
}

Bytes Host::request_shutoff(ByteView unwanted_packet, UnixTime now) {
  require_bootstrap();
  const auto offending = wire::decode_header(unwanted_packet);
  const auto* victim = find_ephid(offending.dst_ephid);
  if (!victim) throw Error(Errc::NoEphId, "packet was not addressed to this host");
  wire::ShutoffRequest request{Bytes(unwanted_packet.begin(), unwanted_packet.end()),
                               victim->keys.sign(unwanted_packet), victim->cert};
  const auto& source_as = directory_->at(offending.src_aid);
  EphId src = ctrl_.ctrl_ephid;
  for (auto it = ephids_.rbegin(); it != ephids_.rend(); ++it) {
    if (it->kind == EphIdKind::Data && !is_expired(it->cert.body.exp_time, now)) {
      src = it->ephid();
      break;
    }
  }
  return finish_packet(next_header(src, {source_as.aid, source_as.aa_ephid}), request);
}

// ---- receive path ----

HostEvent Host::receive(ByteView packet, UnixTime now) {
  require_bootstrap();
  const auto header = wire::decode_header(packet);
  const auto message = wire::decode_message(packet.subspan(wire::kHeaderSize));

  if (header.dst_ephid == ctrl_.ctrl_ephid) {
    if (const auto* reply = std::get_if<wire::EphIdReply>(&message)) {
      if (header.src_ephid != ems_cert_.body.ephid) throw Error(Errc::MalformedMessage, "reply not from the EMS");
      return on_ephid_reply(*reply);
    }
    if (const auto* answer = std::get_if<wire::DnsAnswer>(&message)) {
      if (header.src_ephid != dns_cert_.body.ephid) throw Error(Errc::MalformedMessage, "answer not from DNS");
      return on_dns_answer(*answer, now);
    }
    throw Error(Errc::MalformedMessage, "unexpected message on the control EphID");
  }

  const auto* local = find_ephid(header.dst_ephid);
  if (!local) throw Error(Errc::NoEphId, "packet for an EphID this host does not hold");

  if (const auto* data = std::get_if<wire::DataMessage>(&message)) return on_data(header, packet, *data);
  if (const auto* hello = std::get_if<wire::Hello>(&message)) return on_hello(header, *local, *hello, now);
  if (const auto* ack = std::get_if<wire::HelloAck>(&message)) return on_hello_ack(header, *ack, now);
  if (const auto* icmp = std::get_if<wire::IcmpMessage>(&message)) {
    HostEvent ev;
    ev.kind = HostEvent::Kind::Icmp;
    ev.payload = icmp->body;
    ev.detail = std::to_string(icmp->icmp_type) + "/" + std::to_string(icmp->code);
    return ev;
  }
  throw Error(Errc::MalformedMessage, "unexpected message type for a data EphID");
}

HostEvent Host::on_ephid_reply(const wire::EphIdReply& reply) {
  if (wire::control_direction(reply.nonce) != wire::ControlDirection::AsToHost) {
    throw Error(Errc::AuthenticationFailure, "reply nonce has the wrong direction");
  }
  const auto cert = reply.open(keys_.ctrl);
  const auto counter = wire::control_counter(reply.nonce);
  if (counter <= last_reply_counter_) throw Error(Errc::ReplayDetected, "stale EMS reply");
  if (!verify_certificate(directory_->at(aid_).sign_public, cert) || cert.body.aid != aid_) {
    throw Error(Errc::BadCertificate, "issued certificate does not verify");
  }
  auto it = std::find_if(pending_.begin(), pending_.end(),
                         [&](const PendingRequest& p) { return p.keys.public_key() == cert.body.pubkey; });
  if (it == pending_.end()) throw Error(Errc::BadCertificate, "certificate for a key this host never requested");
  last_reply_counter_ = counter;

  HostEvent ev;
  ev.kind = HostEvent::Kind::EphIdIssued;
  ev.detail = it->label;
  std::erase_if(ephids_, [&](const EphIdEntry& e) { return e.label == it->label; });
  ephids_.push_back(EphIdEntry{it->label, it->kind, std::move(it->keys), cert});
  pending_.erase(it);
  return ev;
}

HostEvent Host::on_dns_answer(const wire::DnsAnswer& answer, UnixTime now) {
  auto waiting = pending_connects_.extract(answer.name);
  if (!answer.cert) throw Error(Errc::NameNotFound, answer.name);
  check_peer_certificate(*answer.cert, now);
  resolved_[answer.name] = *answer.cert;

  HostEvent ev;
  ev.kind = HostEvent::Kind::DnsAnswer;
  ev.detail = answer.name;
  if (!waiting.empty()) {
    for (const auto& label : waiting.mapped()) {
      auto conn = connect(label, *answer.cert, now);
      ev.session = conn.id;
      ev.replies.push_back(std::move(conn.hello));
    }
  }
  return ev;
}

HostEvent Host::on_hello(const wire::ApnaHeader& h, const EphIdEntry& local, const wire::Hello& hello, UnixTime now) {
  check_peer_certificate(hello.cert, now);
  if (hello.cert.body.ephid != h.src_ephid || hello.cert.body.aid != h.src_aid) {
    throw Error(Errc::BadCertificate, "Hello certificate does not belong to the sender");
  }
  // A receive-only EphID never answers; a data EphID takes over the session.
  const EphIdEntry& serving = local.kind == EphIdKind::ReceiveOnly ? sending_ephid(now) : local;
  const PeerAddress client{h.src_aid, h.src_ephid};
  SessionId id{serving.ephid(), client};
  SessionState state;
  state.key = dh_session_key(serving.keys, hello.cert.body.pubkey, serving.ephid(), client.ephid);
  state.peer_cert = hello.cert;
  state.confirmed = true;
  sessions_[id] = std::move(state);

  HostEvent ev;
  ev.kind = HostEvent::Kind::HelloAccepted;
  ev.session = id;
  ev.detail = serving.label;
  ev.replies.push_back(finish_packet(next_header(serving.ephid(), client), wire::HelloAck{serving.cert}));
  return ev;
}

HostEvent Host::on_hello_ack(const wire::ApnaHeader& h, const wire::HelloAck& ack, UnixTime now) {
  check_peer_certificate(ack.cert, now);
  if (ack.cert.body.ephid != h.src_ephid || ack.cert.body.aid != h.src_aid) {
    throw Error(Errc::BadCertificate, "HelloAck certificate does not belong to the sender");
  }
  const PeerAddress responder{h.src_aid, h.src_ephid};
  HostEvent ev;
  ev.kind = HostEvent::Kind::HelloAcked;

  SessionId same{h.dst_ephid, responder};
  if (auto it = sessions_.find(same); it != sessions_.end()) {
    if (it->second.peer_cert != ack.cert) throw Error(Errc::BadCertificate, "HelloAck certificate changed");
    it->second.confirmed = true;
    ev.session = same;
    return ev;
  }
  // The responder moved the session from the dialed receive-only EphID to a data EphID.
  auto pending = std::find_if(sessions_.begin(), sessions_.end(), [&](const auto& kv) {
    return kv.first.local == h.dst_ephid && kv.first.peer.aid == h.src_aid && !kv.second.confirmed;
  });
  if (pending == sessions_.end()) throw Error(Errc::NoSession, "HelloAck without a pending Hello");
  const auto* local = find_ephid(h.dst_ephid);
  SessionState moved;
  moved.key = dh_session_key(local->keys, ack.cert.body.pubkey, h.dst_ephid, responder.ephid);
  moved.peer_cert = ack.cert;
  moved.confirmed = true;
  moved.first_contact = pending->first.peer;
  sessions_.erase(pending);
  sessions_[same] = std::move(moved);
  ev.session = same;
  return ev;
}

HostEvent Host::on_data(const wire::ApnaHeader& h, ByteView packet, const wire::DataMessage& data) {
  SessionId id{h.dst_ephid, {h.src_aid, h.src_ephid}};
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::NoSession, "data for an unknown session");
  auto plaintext = open_payload(it->second.key, data_nonce(h.src_ephid, h.dst_ephid, h.nonce), header_ad(packet),
                                data.ciphertext);
  if (!it->second.window.accept(h.nonce)) throw Error(Errc::ReplayDetected, "nonce " + std::to_string(h.nonce));
  ++it->second.received;
  HostEvent ev;
  ev.kind = HostEvent::Kind::Data;
  ev.session = id;
  ev.payload = std::move(plaintext);
  return ev;
}

// ---- queries ----

const EphIdEntry* Host::ephid(const std::string& label) const {
  auto it = std::find_if(ephids_.begin(), ephids_.end(), [&](const EphIdEntry& e) { return e.label == label; });
  return it == ephids_.end() ? nullptr : &*it;
}

const EphIdEntry* Host::find_ephid(const EphId& e) const {
  auto it = std::find_if(ephids_.begin(), ephids_.end(), [&](const EphIdEntry& x) { return x.ephid() == e; });
  return it == ephids_.end() ? nullptr : &*it;
}

const SessionState* Host::session(const SessionId& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : &it->second;
}

std::optional<SessionId> Host::find_session(const std::string& local_label, const PeerAddress& peer) const {
  const auto* local = ephid(local_label);
  if (!local) return std::nullopt;
  for (const auto& [id, state] : sessions_) {
    if (id.local != local->ephid()) continue;
    if (id.peer == peer || state.first_contact == peer) return id;
  }
  return std::nullopt;
}

std::optional<SessionId> Host::latest_session(const std::string& local_label) const {
  const auto* local = ephid(local_label);
  if (!local) return std::nullopt;
  for (const auto& [id, _] : sessions_) {
    if (id.local == local->ephid()) return id;
  }
  return std::nullopt;
}

// ---- snapshot ----

std::string Host::snapshot() const {
  json j;
  j["type"] = "apna-host";
  j["version"] = 1;
  j["name"] = name_;
  j["aid"] = aid_.value;
  j["long_term_private"] = to_hex(long_term_.pair.private_key);
  j["bootstrapped"] = bootstrapped_;
  j["hid"] = hid_.value;
  j["k_ctrl"] = to_hex(keys_.ctrl);
  j["k_pkt"] = to_hex(keys_.pkt);
  j["ctrl_ephid"] = to_hex(ctrl_.ctrl_ephid.bytes());
  j["ctrl_exp"] = ctrl_.exp_time;
  j["ems_cert"] = to_hex(ems_cert_.encode());
  j["dns_cert"] = to_hex(dns_cert_.encode());
  j["request_counter"] = request_counter_;
  j["last_reply_counter"] = last_reply_counter_;

  json ephids = json::array();
  for (const auto& e : ephids_) {
    ephids.push_back({{"label", e.label},
                      {"kind", to_string(e.kind)},
                      {"seed", to_hex(e.keys.seed())},
                      {"cert", to_hex(e.cert.encode())}});
  }
  j["ephids"] = std::move(ephids);

  json pending = json::array();
  for (const auto& p : pending_) {
    pending.push_back({{"label", p.label}, {"kind", to_string(p.kind)}, {"seed", to_hex(p.keys.seed())}});
  }
  j["pending_requests"] = std::move(pending);
  j["pending_connects"] = pending_connects_;

  json resolved = json::object();
  for (const auto& [name, cert] : resolved_) resolved[name] = to_hex(cert.encode());
  j["resolved"] = std::move(resolved);

  json sessions = json::array();
  for (const auto& [id, s] : sessions_) {
    json seen = json::array();
    for (std::size_t i = 0; i < ReplayWindow::kSize; ++i) {
      if (s.window.seen().test(i)) seen.push_back(i);
    }
    json entry = {{"local", to_hex(id.local.bytes())},
                  {"peer", peer_json(id.peer)},
                  {"key", to_hex(s.key.bytes)},
                  {"peer_cert", to_hex(s.peer_cert.encode())},
                  {"confirmed", s.confirmed},
                  {"window_highest", s.window.highest()},
                  {"window_seen", std::move(seen)},
                  {"sent", s.sent},
                  {"received", s.received}};
    if (s.first_contact) entry["first_contact"] = peer_json(*s.first_contact);
    sessions.push_back(std::move(entry));
  }
  j["sessions"] = std::move(sessions);

  json counters = json::array();
  for (const auto& [e, n] : nonce_counters_) counters.push_back({{"ephid", to_hex(e.bytes())}, {"nonce", n}});
  j["nonce_counters"] = std::move(counters);
  return j.dump(2);
}

namespace {
EphIdKind kind_from_string(const std::string& s) {
  for (auto k : {EphIdKind::Control, EphIdKind::Data, EphIdKind::ReceiveOnly}) {
    if (to_string(k) == s) return k;
  }
  throw Error(Errc::ParseError, "unknown EphID kind " + s);
}
}  // namespace

Host Host::restore(std::string_view snapshot, std::shared_ptr<const AsDirectory> directory) {
  try {
    const auto j = json::parse(snapshot);
    if (j.at("type") != "apna-host" || j.at("version") != 1) throw Error(Errc::ParseError, "not a host snapshot v1");
    Host h(j.at("name").get<std::string>(), Aid{j.at("aid").get<std::uint32_t>()},
           LongTermKeyPair{crypto::X25519KeyPair::from_private(hex_array<32>(j.at("long_term_private")))},
           std::move(directory));
    h.bootstrapped_ = j.at("bootstrapped").get<bool>();
    h.hid_ = Hid{j.at("hid").get<std::uint32_t>()};
    h.keys_ = HostAsKeys{hex_array<16>(j.at("k_ctrl")), hex_array<16>(j.at("k_pkt"))};
    h.ctrl_ = wire::IdInfo{hex_ephid(j.at("ctrl_ephid")), j.at("ctrl_exp").get<UnixTime>()};
    h.ems_cert_ = hex_cert(j.at("ems_cert"));
    h.dns_cert_ = hex_cert(j.at("dns_cert"));
    h.request_counter_ = j.at("request_counter").get<std::uint64_t>();
    h.last_reply_counter_ = j.at("last_reply_counter").get<std::uint64_t>();
    for (const auto& e : j.at("ephids")) {
      h.ephids_.push_back(EphIdEntry{e.at("label").get<std::string>(), kind_from_string(e.at("kind")),
                                     EphemeralKeyPair::from_seed(hex_array<32>(e.at("seed"))), hex_cert(e.at("cert"))});
    }
    for (const auto& p : j.at("pending_requests")) {
      h.pending_.push_back(PendingRequest{p.at("label").get<std::string>(), kind_from_string(p.at("kind")),
                                          EphemeralKeyPair::from_seed(hex_array<32>(p.at("seed")))});
    }
    h.pending_connects_ = j.at("pending_connects").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& [name, cert] : j.at("resolved").items()) h.resolved_[name] = hex_cert(cert);
    for (const auto& s : j.at("sessions")) {
      SessionState state;
      state.key.bytes = hex_array<32>(s.at("key"));
      state.peer_cert = hex_cert(s.at("peer_cert"));
      state.confirmed = s.at("confirmed").get<bool>();
      std::bitset<ReplayWindow::kSize> seen;
      for (const auto& i : s.at("window_seen")) seen.set(i.get<std::size_t>());
      state.window.restore(s.at("window_highest").get<std::uint64_t>(), seen);
      state.sent = s.at("sent").get<std::uint64_t>();
      state.received = s.at("received").get<std::uint64_t>();
      if (s.contains("first_contact")) state.first_contact = peer_from_json(s.at("first_contact"));
      h.sessions_[SessionId{hex_ephid(s.at("local")), peer_from_json(s.at("peer"))}] = std::move(state);
    }
    for (const auto& c : j.at("nonce_counters")) {
      h.nonce_counters_[hex_ephid(c.at("ephid"))] = c.at("nonce").get<std::uint64_t>();
    }
    return h;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

}  // namespace apna
