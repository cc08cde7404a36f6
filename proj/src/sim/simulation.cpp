#include "apna/sim/simulation.hpp"

#include <algorithm>

#include "apna/error.hpp"
#include "apna/wire/messages.hpp"
#include "apna/wire/packet.hpp"

namespace apna::sim {
namespace {

const std::set<std::string> kHostVerbs{"bootstrap", "issue",   "register", "query",      "connect",
                                       "send",      "shutoff", "icmp",     "revoke-host"};
const std::set<std::string> kAdversaryVerbs{"replay", "spoof", "rogue-shutoff", "mitm"};

std::string host_actor(const std::string& name) { return "host:" + name; }
std::string as_actor(Aid aid) { return "as:" + std::to_string(aid.value); }
std::string adv_actor(const std::string& name) { return "adv:" + name; }

Aid aid_from_actor(const std::string& actor) {
  return Aid{static_cast<std::uint32_t>(std::stoul(actor.substr(3)))};
}

EphIdKind kind_from(const std::string& s) {
  if (s == "control") return EphIdKind::Control;
  if (s == "receive-only") return EphIdKind::ReceiveOnly;
  return EphIdKind::Data;
}

std::optional<wire::Message> message_in(ByteView packet) {
  if (packet.size() <= wire::kHeaderSize) return std::nullopt;
  try {
    return wire::decode_message(packet.subspan(wire::kHeaderSize));
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool touches(const std::vector<std::string>& vantage, Aid aid) {
  if (in_vantage(vantage, as_link_id(aid))) return true;
  const auto id = std::to_string(aid.value);
  for (const auto& v : vantage) {
    if (!v.starts_with("link:")) continue;
    const auto dash = v.find('-', 5);
    if (v.substr(5, dash - 5) == id || v.substr(dash + 1) == id) return true;
  }
  return false;
}

}  // namespace

Simulation::Simulation(Scenario scenario, std::uint64_t seed) : scenario_(std::move(scenario)), rng_(seed) {
  const auto& topo = scenario_.topology;
  validate();
  const auto hops = topo.next_hops();

  for (const Aid aid : topo.ases) {
    auto as = std::make_unique<AutonomousSystem>(aid, rng_, scenario_.epoch, directory_, dns_);
    directory_->add(as->public_info());
    ases_.emplace(aid, std::move(as));
  }
  for (const auto& [key, via] : hops) ases_.at(key.first)->set_route(key.second, via);

  for (const auto& h : topo.hosts) {
    hosts_.emplace(h.name, HostSlot{h.aid, std::make_unique<Host>(h.name, h.aid, rng_, directory_), {}, {}, {}});
    fact_index_[h.name] = transcript_.facts.hosts.size();
    transcript_.facts.hosts.push_back({h.name, h.aid, {}});
  }
  for (const auto& a : scenario_.adversaries) adversaries_.emplace(a.name, Adversary{a, false});

  for (std::size_t i = 0; i < scenario_.script.size(); ++i)
    queue_.push(Item{scenario_.script[i].tick, next_seq_++, i, nullptr});
}

void Simulation::validate() {
  const auto& topo = scenario_.topology;
  auto need_as = [&](Aid aid, int line) {
    if (!topo.has_as(aid))
      throw Error(Errc::ScriptError, "line " + std::to_string(line) + ": unknown actor as:" + std::to_string(aid.value));
  };
  auto need_host = [&](const std::string& name, int line) {
    if (!topo.find_host(name))
      throw Error(Errc::ScriptError, "line " + std::to_string(line) + ": unknown actor host:" + name);
  };
  for (const auto& l : topo.links) {
    need_as(l.a, 0);
    need_as(l.b, 0);
  }
  for (const auto& r : topo.routes) {
    need_as(r.at, 0);
    need_as(r.destination, 0);
    need_as(r.via, 0);
  }
  for (const auto& h : topo.hosts) need_as(h.aid, 0);
  for (const auto& a : scenario_.adversaries) {
    if (a.host) need_host(*a.host, 0);
    for (const auto& v : a.vantage) {
      if (v.starts_with("as:")) need_as(aid_from_actor(v), 0);
    }
  }
  for (const auto& a : scenario_.script) {
    if (kHostVerbs.contains(a.verb)) need_host(a.args[0], a.line);
    if (kAdversaryVerbs.contains(a.verb) && !adversaries_.contains(a.args[0]) &&
        std::none_of(scenario_.adversaries.begin(), scenario_.adversaries.end(),
                     [&](const AdversaryDecl& d) { return d.name == a.args[0]; }))
      throw Error(Errc::ScriptError, "line " + std::to_string(a.line) + ": unknown actor adv:" + a.args[0]);
    if ((a.verb == "connect" && a.args[2] != "dns") || a.verb == "send") need_host(a.args[2], a.line);
    if (a.verb == "prune") need_as(Aid{static_cast<std::uint32_t>(std::stoul(a.args[0]))}, a.line);
  }
  topo.next_hops();  // connectivity
}

AutonomousSystem& Simulation::as(Aid aid) {
  auto it = ases_.find(aid);
  if (it == ases_.end()) throw Error(Errc::ScriptError, "unknown actor " + as_actor(aid));
  return *it->second;
}

const AutonomousSystem& Simulation::as(Aid aid) const {
  auto it = ases_.find(aid);
  if (it == ases_.end()) throw Error(Errc::ScriptError, "unknown actor " + as_actor(aid));
  return *it->second;
}

Host& Simulation::host(const std::string& name) {
  auto it = hosts_.find(name);
  if (it == hosts_.end()) throw Error(Errc::ScriptError, "unknown actor host:" + name);
  return *it->second.host;
}

AdversaryView Simulation::view(const std::string& adversary) const {
  auto it = adversaries_.find(adversary);
  if (it == adversaries_.end()) throw Error(Errc::ScriptError, "unknown actor adv:" + adversary);
  return view_of(transcript_, it->second.decl.vantage);
}

const Transcript& Simulation::run() {
  if (ran_) return transcript_;
  ran_ = true;
  while (!queue_.empty()) {
    Item item = queue_.top();
    queue_.pop();
    tick_ = item.tick;
    if (item.delivery) {
      process(*item.delivery);
    } else {
      execute(scenario_.script[item.action]);
    }
  }
  return transcript_;
}

void Simulation::schedule(Delivery d, std::uint64_t delay) {
  queue_.push(Item{tick_ + delay, next_seq_++, 0, std::make_shared<Delivery>(std::move(d))});
}

void Simulation::record(const Delivery& d, std::string verdict, std::optional<Bytes> payload) {
  SimEvent e;
  e.seq = transcript_.events.size();
  e.tick = tick_;
  e.time = now();
  e.from = d.from;
  e.to = d.to;
  e.link = d.link;
  e.stage = d.stage;
  e.verdict = std::move(verdict);
  e.format = d.format;
  e.frame = d.frame;
  e.payload = std::move(payload);
  transcript_.events.push_back(std::move(e));
}

void Simulation::record_action(const std::string& actor, std::string verdict) {
  Delivery d;
  d.from = d.to = actor;
  d.stage = "action";
  d.format = FrameFormat::None;
  record(d, std::move(verdict));
}

void Simulation::from_host(const std::string& name, Bytes packet, std::optional<Bytes> payload) {
  const Aid aid = hosts_.at(name).aid;
  schedule(Delivery{host_actor(name), as_actor(aid), as_link_id(aid), "br-out", aid, {}, FrameFormat::Apna,
                    std::move(packet), std::move(payload)});
}

void Simulation::from_adversary(const Adversary& adv, Aid at, const std::string& stage, Bytes packet) {
  schedule(Delivery{adv_actor(adv.decl.name), as_actor(at), as_link_id(at), stage, at, {}, FrameFormat::Apna,
                    std::move(packet), std::nullopt});
}

// ---- frame processing ----

void Simulation::process(Delivery& d) {
  maybe_intercept(d);
  if (d.stage == "br-out") return on_br_out(d);
  if (d.stage == "br-in") return on_br_in(d);
  if (d.stage == "svc") return on_service(d);
  if (d.stage == "host") return on_host(d);
  if (d.stage == "bootstrap") return on_bootstrap(d);
}

void Simulation::on_br_out(Delivery& d) {
  auto& self = as(d.at);
  const auto v = self.forward_outgoing(d.frame, now());
  record(d, "br-out:" + v.describe(), d.payload);
  if (v.kind != Verdict::Kind::Forward) return;
  if (v.next_as == d.at) {
    schedule(Delivery{as_actor(d.at), as_actor(d.at), as_link_id(d.at), "br-in", d.at, {}, FrameFormat::Apna,
                      d.frame, std::nullopt});
  } else {
    schedule(Delivery{as_actor(d.at), as_actor(v.next_as), link_id(d.at, v.next_as), "br-in", v.next_as, {},
                      FrameFormat::Gre, wire::encapsulate_gre(br_ip(d.at), br_ip(v.next_as), d.frame),
                      std::nullopt});
  }
}

void Simulation::on_br_in(Delivery& d) {
  Bytes inner;
  try {
    if (d.format == FrameFormat::Gre) {
      const auto view = wire::gre_inner(d.frame);
      inner.assign(view.begin(), view.end());
    } else {
      inner = d.frame;
    }
  } catch (const Error&) {
    record(d, "br-in:drop:Malformed");
    return;
  }
  const auto v = as(d.at).forward_incoming(inner, now());
  record(d, "br-in:" + v.describe());
  if (v.kind == Verdict::Kind::Forward) {
    schedule(Delivery{as_actor(d.at), as_actor(v.next_as), link_id(d.at, v.next_as), "br-in", v.next_as, {},
                      FrameFormat::Gre, wire::encapsulate_gre(br_ip(d.at), br_ip(v.next_as), inner), std::nullopt});
  } else if (v.kind == Verdict::Kind::DeliverLocal) {
    if (v.hid == kInfrastructureHid) {
      schedule(Delivery{as_actor(d.at), as_actor(d.at), as_link_id(d.at), "svc", d.at, {}, FrameFormat::Apna,
                        std::move(inner), std::nullopt});
      return;
    }
    const auto name = host_at(d.at, v.hid);
    if (name.empty()) {
      record_action(as_actor(d.at), "as:unreachable-hid");
      return;
    }
    schedule(Delivery{as_actor(d.at), host_actor(name), as_link_id(d.at), "host", d.at, name, FrameFormat::Apna,
                      std::move(inner), std::nullopt});
  }
}

void Simulation::on_service(Delivery& d) {
  auto result = as(d.at).handle_service_packet(d.frame, now());
  record(d, result.verdict);
  if (result.reply)
    schedule(Delivery{as_actor(d.at), as_actor(d.at), as_link_id(d.at), "br-out", d.at, {}, FrameFormat::Apna,
                      std::move(*result.reply), std::nullopt});
}

void Simulation::on_host(Delivery& d) {
  auto& slot = hosts_.at(d.host);
  HostEvent ev;
  try {
    ev = slot.host->receive(d.frame, now());
  } catch (const Error& e) {
    record(d, "host:error:" + std::string(to_string(e.code())));
    return;
  }
  std::optional<Bytes> payload;
  if (ev.kind == HostEvent::Kind::Data) {
    payload = ev.payload;
    slot.last_data = d.frame;
  }
  if (ev.kind == HostEvent::Kind::EphIdIssued) {
    const auto* entry = slot.host->ephid(ev.detail);
    if (entry && entry->kind == EphIdKind::ReceiveOnly) transcript_.facts.receive_only.insert(entry->ephid());
  }
  record(d, "host:" + std::string(ev.describe()), std::move(payload));
  for (auto& reply : ev.replies) from_host(d.host, std::move(reply));
}

void Simulation::on_bootstrap(Delivery& d) {
  auto& slot = hosts_.at(d.host);
  try {
    const auto m2 = std::get<wire::BootstrapHost>(wire::decode_message(d.frame));
    slot.host->complete_bootstrap(slot.pending.value_or(Hid{}), m2, now());
    slot.pending.reset();
    record(d, "host:bootstrapped");
  } catch (const Error& e) {
    record(d, "host:error:" + std::string(to_string(e.code())));
  }
}

void Simulation::maybe_intercept(Delivery& d) {
  for (auto& [name, adv] : adversaries_) {
    if (!adv.mitm_armed || !in_vantage(adv.decl.vantage, d.link)) continue;
    Bytes inner;
    std::optional<wire::GreFrame> gre;
    if (d.format == FrameFormat::Gre) {
      try {
        gre = wire::decode_gre(d.frame);
      } catch (const Error&) {
        continue;
      }
      inner = wire::Packet{gre->header, gre->payload}.encode();
    } else if (d.format == FrameFormat::Apna) {
      inner = d.frame;
    } else {
      continue;
    }
    auto msg = message_in(inner);
    if (!msg) continue;
    EphIdCertificate* cert = nullptr;
    if (auto* h = std::get_if<wire::Hello>(&*msg)) cert = &h->cert;
    if (auto* h = std::get_if<wire::HelloAck>(&*msg)) cert = &h->cert;
    if (!cert) continue;

    // Substitute the adversary's own key and re-sign with a key the AS never certified.
    auto body = cert->body;
    body.pubkey = EphemeralKeyPair::generate(rng_).public_key();
    *cert = sign_certificate(crypto::SigningKey::generate(rng_), body);
    auto packet = wire::Packet::decode(inner);
    packet.payload = wire::encode_message(*msg);
    d.frame = gre ? wire::encapsulate_gre(gre->outer_src_ip, gre->outer_dst_ip, packet.encode()) : packet.encode();
    d.from = adv_actor(name);
    adv.mitm_armed = false;
  }
}

// ---- script actions ----

void Simulation::execute(const Action& a) {
  const auto& who = a.args.empty() ? std::string() : a.args[0];
  std::string actor = kHostVerbs.contains(a.verb)        ? host_actor(who)
                      : kAdversaryVerbs.contains(a.verb) ? adv_actor(who)
                                                         : "as:" + who;
  try {
    if (a.verb == "bootstrap") {
      act_bootstrap(who);
    } else if (a.verb == "issue") {
      from_host(who, host(who).request_ephid(a.args[1], kind_from(a.args[2]), rng_));
    } else if (a.verb == "register") {
      from_host(who, host(who).register_name(a.args[1], a.args[2]));
    } else if (a.verb == "query") {
      from_host(who, host(who).query_name(a.args[1]));
    } else if (a.verb == "connect") {
      if (a.args[2] == "dns") {
        from_host(who, host(who).connect_by_name(a.args[1], a.args[3]));
      } else {
        const auto* peer = host(a.args[2]).ephid(a.args[3]);
        if (!peer) throw Error(Errc::NoEphId, a.args[2] + " has no EphID " + a.args[3]);
        from_host(who, host(who).connect(a.args[1], peer->cert, now()).hello);
      }
    } else if (a.verb == "send") {
      act_send(a);
    } else if (a.verb == "shutoff" || a.verb == "icmp") {
      const auto& last = hosts_.at(who).last_data;
      if (last.empty()) throw Error(Errc::NoSession, who + " has not received a data packet");
      from_host(who, a.verb == "shutoff" ? host(who).request_shutoff(last, now())
                                         : host(who).send_icmp(last, 3, 1, now()));
    } else if (a.verb == "revoke-host") {
      auto& slot = hosts_.at(who);
      actor = as_actor(slot.aid);
      slot.next_hid = as(slot.aid).revoke_host(slot.host->hid(), rng_);
      record_action(actor, "rs:revoked-host");
    } else if (a.verb == "prune") {
      const Aid aid{static_cast<std::uint32_t>(std::stoul(who))};
      actor = as_actor(aid);
      as(aid).prune_revoked(now());
      record_action(actor, "aa:pruned");
    } else {
      auto& adv = adversaries_.at(who);
      if (a.verb == "replay") act_replay(adv, a.args[1]);
      if (a.verb == "spoof") act_spoof(adv);
      if (a.verb == "rogue-shutoff") act_rogue_shutoff(adv, a.args[1]);
      if (a.verb == "mitm") {
        adv.mitm_armed = true;
        record_action(actor, "adv:mitm-armed");
      }
    }
  } catch (const Error& e) {
    const auto prefix = actor.substr(0, actor.find(':'));
    record_action(actor, prefix + ":error:" + std::string(to_string(e.code())));
  }
}

void Simulation::act_bootstrap(const std::string& name) {
  auto& slot = hosts_.at(name);
  auto& self = as(slot.aid);
  Hid hid;
  if (slot.next_hid) {
    // Re-bootstrap after revoke-host: a fresh host identity under the new HID.
    hid = *slot.next_hid;
    slot.next_hid.reset();
    slot.host = std::make_unique<Host>(name, slot.aid, rng_, directory_);
    slot.last_data.clear();
  } else if (slot.host->bootstrapped()) {
    hid = slot.host->hid();
  } else {
    hid = self.allocate_hid(rng_);
  }
  const auto result = self.bootstrap(hid, slot.host->long_term_public(), now());
  slot.pending = hid;
  transcript_.facts.hosts[fact_index_.at(name)].hids.push_back(hid);

  record(Delivery{as_actor(slot.aid), as_actor(slot.aid), as_link_id(slot.aid), "registry", slot.aid, {},
                  FrameFormat::Tlv, wire::encode_message(result.m1), std::nullopt},
         "rs:provisioned");
  schedule(Delivery{as_actor(slot.aid), host_actor(name), as_link_id(slot.aid), "bootstrap", slot.aid, name,
                    FrameFormat::Tlv, wire::encode_message(result.m2), std::nullopt});
}

void Simulation::act_send(const Action& a) {
  auto& self = host(a.args[0]);
  const auto& peer_slot = hosts_.at(a.args[2]);
  const auto* peer = peer_slot.host->ephid(a.args[3]);
  if (!peer) throw Error(Errc::NoEphId, a.args[2] + " has no EphID " + a.args[3]);
  const auto session = self.find_session(a.args[1], PeerAddress{peer_slot.aid, peer->ephid()});
  if (!session) throw Error(Errc::NoSession, a.args[1] + " -> " + a.args[2] + "/" + a.args[3]);
  const std::uint64_t count = a.args.size() == 6 ? std::stoull(a.args[5]) : 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto text = count == 1 ? a.args[4] : a.args[4] + "#" + std::to_string(i);
    Bytes payload(text.begin(), text.end());
    from_host(a.args[0], self.send(*session, payload, now()), payload);
  }
}

std::string Simulation::host_at(Aid aid, Hid hid) const {
  for (const auto& [name, slot] : hosts_)
    if (slot.aid == aid && slot.host->bootstrapped() && slot.host->hid() == hid) return name;
  return {};
}

std::optional<SimEvent> Simulation::last_captured_data(const Adversary& adv) const {
  const auto v = view_of(transcript_, adv.decl.vantage);
  for (auto it = v.captured.rbegin(); it != v.captured.rend(); ++it) {
    const auto pkt = it->packet();
    if (!pkt || pkt->size() <= wire::kHeaderSize) continue;
    try {
      if (wire::peek_type(pkt->subspan(wire::kHeaderSize)) == wire::MsgType::Data) return *it;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

std::optional<EphIdCertificate> Simulation::sniffed_certificate(const Adversary& adv, const EphId& ephid) const {
  const auto v = view_of(transcript_, adv.decl.vantage);
  for (const auto& e : v.captured) {
    const auto pkt = e.packet();
    if (!pkt) continue;
    const auto msg = message_in(*pkt);
    if (!msg) continue;
    std::optional<EphIdCertificate> cert;
    if (const auto* m = std::get_if<wire::Hello>(&*msg)) cert = m->cert;
    if (const auto* m = std::get_if<wire::HelloAck>(&*msg)) cert = m->cert;
    if (const auto* m = std::get_if<wire::DnsAnswer>(&*msg)) cert = m->cert;
    if (cert && cert->body.ephid == ephid) return cert;
  }
  return std::nullopt;
}

void Simulation::act_replay(Adversary& adv, const std::string& which) {
  std::optional<SimEvent> chosen;
  if (which == "last-data") {
    chosen = last_captured_data(adv);
  } else {
    const auto v = view_of(transcript_, adv.decl.vantage);
    const auto index = std::stoull(which);
    if (index < v.captured.size()) chosen = v.captured[index];
  }
  if (!chosen) throw Error(Errc::InvalidArgument, "nothing captured to replay");
  const auto& e = *chosen;
  if (e.stage != "br-out" && e.stage != "br-in" && e.stage != "svc" && e.stage != "host")
    throw Error(Errc::InvalidArgument, "cannot replay a " + e.stage + " frame");
  Delivery d{adv_actor(adv.decl.name), e.to, e.link, e.stage, {}, {}, e.format, e.frame, std::nullopt};
  if (e.to.starts_with("as:")) d.at = aid_from_actor(e.to);
  if (e.to.starts_with("host:")) {
    d.host = e.to.substr(5);
    d.at = hosts_.at(d.host).aid;
  }
  schedule(std::move(d));
}

void Simulation::act_spoof(Adversary& adv) {
  const auto e = last_captured_data(adv);
  if (!e) throw Error(Errc::InvalidArgument, "no data packet captured");
  const auto h = wire::decode_header(*e->packet());
  if (!in_vantage(adv.decl.vantage, as_link_id(h.src_aid)))
    throw Error(Errc::InvalidArgument, "spoofing needs a vantage inside the source AS");

  wire::ApnaHeader forged = h;
  forged.nonce = rng_.next_u32();
  Bytes ct(32);
  rng_.fill(ct);
  auto packet = wire::Packet{forged, wire::encode_message(wire::DataMessage{ct})}.encode();
  const auto key = adv.decl.host ? hosts_.at(*adv.decl.host).host->as_keys().pkt : rng_.bytes<16>();
  wire::stamp_packet_mac(key, packet);
  from_adversary(adv, h.src_aid, "br-out", std::move(packet));
}

void Simulation::act_rogue_shutoff(Adversary& adv, const std::string& variant) {
  const auto e = last_captured_data(adv);
  if (!e) throw Error(Errc::InvalidArgument, "no data packet captured");
  const auto victim = Bytes(e->packet()->begin(), e->packet()->end());
  const auto h = wire::decode_header(victim);
  const Aid target = h.src_aid;

  const Host* own_host = adv.decl.host ? hosts_.at(*adv.decl.host).host.get() : nullptr;
  const EphIdEntry* own = nullptr;
  if (own_host && own_host->bootstrapped()) {
    for (const auto& entry : own_host->ephids())
      if (entry.kind != EphIdKind::ReceiveOnly && !is_expired(entry.cert.body.exp_time, now())) own = &entry;
  }

  wire::ShutoffRequest req;
  if (variant == "fabricated") {
    if (!own) throw Error(Errc::NoEphId, "fabricated evidence needs an adversary-held EphID");
    wire::ApnaHeader fh{target, h.src_ephid, own_host->aid(), own->ephid(), {}, rng_.next_u32()};
    Bytes ct(32);
    rng_.fill(ct);
    req.evidence = wire::Packet{fh, wire::encode_message(wire::DataMessage{ct})}.encode();
    wire::stamp_packet_mac(own_host->as_keys().pkt, req.evidence);
    req.cert = own->cert;
    req.signature = own->keys.sign(req.evidence);
  } else {
    req.evidence = victim;
    auto base = sniffed_certificate(adv, h.dst_ephid);
    if (!base && own) base = own->cert;
    if (!base) throw Error(Errc::BadCertificate, "no certificate available to the adversary");
    if (variant == "bad-signature") {
      req.cert = *base;
      rng_.fill(req.signature);
    } else {
      const auto fake = EphemeralKeyPair::generate(rng_);
      auto body = base->body;
      body.pubkey = fake.public_key();
      req.cert = sign_certificate(crypto::SigningKey::generate(rng_), body);
      req.signature = fake.sign(req.evidence);
    }
  }

  const auto& aa = directory_->at(target).aa_ephid;
  if (own) {
    auto packet = wire::Packet{{own_host->aid(), own->ephid(), target, aa, {}, rng_.next_u32()},
                               wire::encode_message(req)}
                      .encode();
    wire::stamp_packet_mac(own_host->as_keys().pkt, packet);
    from_adversary(adv, own_host->aid(), "br-out", std::move(packet));
    return;
  }
  if (!touches(adv.decl.vantage, target)) throw Error(Errc::InvalidArgument, "no vantage next to the target AS");
  EphId src;
  rng_.fill(src.ct);
  rng_.fill(src.iv);
  rng_.fill(src.tag);
  auto packet = wire::Packet{{target, src, target, aa, {}, rng_.next_u32()}, wire::encode_message(req)}.encode();
  from_adversary(adv, target, "br-in", std::move(packet));
}

Transcript run_scenario(const Scenario& scenario, std::uint64_t seed) {
  Simulation sim(scenario, seed);
  return sim.run();
}

}  // namespace apna::sim
