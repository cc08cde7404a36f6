#include "apna/sim/predicates.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "apna/error.hpp"
#include "apna/wire/messages.hpp"
#include "apna/wire/packet.hpp"

namespace apna::sim {
namespace {

void violate(PredicateReport& r, const SimEvent& e, std::string detail) {
  r.passed = false;
  r.violations.push_back(e.seq);
  r.details.push_back("event " + std::to_string(e.seq) + " (" + e.verdict + "): " + detail);
}

bool contains(ByteView haystack, const ByteArray<4>& needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

void no_plaintext_hid(const Transcript& t, PredicateReport& r) {
  for (const auto& e : t.events) {
    if (e.frame.empty()) continue;
    for (const auto& h : t.facts.hosts) {
      if (e.link == as_link_id(h.aid)) continue;  // inside the host's own AS
      for (const auto hid : h.hids) {
        ByteArray<4> b;
        store_u32(b.data(), hid.value);
        if (contains(e.frame, b)) violate(r, e, "HID of " + h.name + " visible on " + e.link);
      }
    }
  }
}

void no_receive_only_src(const Transcript& t, PredicateReport& r) {
  for (const auto& e : t.events) {
    const auto pkt = e.packet();
    if (!pkt) continue;
    const auto h = wire::decode_header(*pkt);
    if (t.facts.receive_only.contains(h.src_ephid)) violate(r, e, "receive-only EphID in source position");
  }
}

void fate_sharing(const Transcript& t, PredicateReport& r) {
  std::set<EphId> revoked;
  for (const auto& e : t.events) {
    if (e.verdict == "aa:revoked") {
      const auto pkt = e.packet();
      if (!pkt) continue;
      try {
        const auto msg = wire::decode_message(pkt->subspan(wire::kHeaderSize));
        const auto& req = std::get<wire::ShutoffRequest>(msg);
        revoked.insert(wire::decode_header(req.evidence).src_ephid);
      } catch (const std::exception&) {
      }
      continue;
    }
    if (e.stage != "br-out") continue;
    const auto pkt = e.packet();
    if (!pkt) continue;
    const auto src = wire::decode_header(*pkt).src_ephid;
    if (revoked.contains(src) && e.verdict == "br-out:forward") violate(r, e, "revoked source EphID forwarded");
    if (!revoked.contains(src) && e.verdict == "br-out:drop:Revoked") violate(r, e, "unrevoked EphID dropped as revoked");
  }
}

void accountability_link(const Transcript& t, const Simulation& sim, PredicateReport& r) {
  for (const auto& e : t.events) {
    if (e.verdict != "br-out:forward") continue;
    const auto pkt = e.packet();
    if (!pkt) {
      violate(r, e, "forwarded frame is not a packet");
      continue;
    }
    const auto h = wire::decode_header(*pkt);
    try {
      const auto& as = sim.as(h.src_aid);
      const auto contents = open_ephid(as.subkeys(), h.src_ephid);
      const auto* record = as.host(contents.hid);
      if (!record) {
        violate(r, e, "source EphID opens to an unknown HID");
      } else if (!wire::verify_packet_mac(record->keys.pkt, *pkt)) {
        violate(r, e, "MAC does not verify under the source HID's key");
      }
    } catch (const Error&) {
      violate(r, e, "source EphID does not open at the source AS");
    }
  }
}

void conservation(const Transcript& t, PredicateReport& r) {
  std::map<std::pair<EphId, EphId>, std::multiset<Bytes>> sent;
  for (const auto& e : t.events) {
    const auto pkt = e.packet();
    if (!pkt || !e.payload) continue;
    const auto h = wire::decode_header(*pkt);
    const auto key = std::make_pair(h.src_ephid, h.dst_ephid);
    if (e.stage == "br-out" && e.from.starts_with("host:")) {
      sent[key].insert(*e.payload);
    } else if (e.verdict == "host:recv-data") {
      auto& pool = sent[key];
      const auto it = pool.find(*e.payload);
      if (it == pool.end()) {
        violate(r, e, "accepted payload was never sent on this EphID pair");
      } else {
        pool.erase(it);
      }
    }
  }
}

}  // namespace

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::NoPlaintextHid: return "no-plaintext-HID";
    case Predicate::NoReceiveOnlySrc: return "no-receive-only-src";
    case Predicate::FateSharing: return "fate-sharing";
    case Predicate::AccountabilityLink: return "accountability-link";
    case Predicate::Conservation: return "conservation";
  }
  return "unknown";
}

PredicateReport assert_transcript(const Transcript& transcript, const Simulation& sim, Predicate predicate) {
  PredicateReport r{std::string(to_string(predicate)), true, {}, {}};
  switch (predicate) {
    case Predicate::NoPlaintextHid: no_plaintext_hid(transcript, r); break;
    case Predicate::NoReceiveOnlySrc: no_receive_only_src(transcript, r); break;
    case Predicate::FateSharing: fate_sharing(transcript, r); break;
    case Predicate::AccountabilityLink: accountability_link(transcript, sim, r); break;
    case Predicate::Conservation: conservation(transcript, r); break;
  }
  return r;
}

std::vector<PredicateReport> check_all(const Simulation& sim) {
  std::vector<PredicateReport> out;
  for (const auto p : kAllPredicates) out.push_back(assert_transcript(sim.transcript(), sim, p));
  return out;
}

std::vector<PredicateReport> check_expectations(const Scenario& scenario, const Transcript& transcript) {
  std::vector<PredicateReport> out;
  for (const auto& x : scenario.expectations) {
    const auto n = transcript.count(x.verdict);
    PredicateReport r;
    r.name = "expect " + x.verdict + (x.at_least ? " >= " : " ") + std::to_string(x.count);
    r.passed = x.at_least ? n >= x.count : n == x.count;
    if (!r.passed)
      r.details.push_back("line " + std::to_string(x.line) + ": observed " + std::to_string(n));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace apna::sim
