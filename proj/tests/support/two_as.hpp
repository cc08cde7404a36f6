#pragma once

// Two directly linked ASes (AID 1 and 2) driven by hand, for entity-level tests.

#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "apna/entities/autonomous_system.hpp"
#include "apna/entities/host.hpp"
#include "apna/error.hpp"

namespace apna::testing {

inline constexpr UnixTime kEpoch = 1700000000;

struct TwoAs {
  crypto::SeededRandom rng{2024};
  UnixTime now = kEpoch;
  std::shared_ptr<AsDirectory> directory = std::make_shared<AsDirectory>();
  std::shared_ptr<DnsTable> dns = std::make_shared<DnsTable>();
  std::vector<std::unique_ptr<AutonomousSystem>> ases;

  TwoAs() {
    for (std::uint32_t a : {1u, 2u}) {
      ases.push_back(std::make_unique<AutonomousSystem>(Aid{a}, rng, now, directory, dns));
      directory->add(ases.back()->public_info());
    }
    as(1).set_route(Aid{2}, Aid{2});
    as(2).set_route(Aid{1}, Aid{1});
  }

  AutonomousSystem& as(std::uint32_t aid) { return *ases.at(aid - 1); }

  std::unique_ptr<Host> make_host(const std::string& name, std::uint32_t aid) {
    auto h = std::make_unique<Host>(name, Aid{aid}, rng, directory);
    const auto hid = as(aid).allocate_hid(rng);
    const auto result = as(aid).bootstrap(hid, h->long_term_public(), now);
    h->complete_bootstrap(hid, result.m2, now);
    return h;
  }

  /// Runs a packet through the sending AS's egress and the destination AS's
  /// ingress. Returns the final verdict (DeliverLocal on success).
  Verdict carry(ByteView packet) {
    const Aid src{load_u32(packet.data() + wire::offset::kSrcAid)};
    const auto out = as(src.value).forward_outgoing(packet, now);
    if (out.kind != Verdict::Kind::Forward) return out;
    return as(out.next_as.value).forward_incoming(packet, now);
  }

  /// Packet to an AS service; the reply (if any) is carried back and handed to `host`.
  ServiceResult to_service(Host& host, ByteView packet, HostEvent* event = nullptr) {
    const auto v = carry(packet);
    EXPECT_EQ(v.kind, Verdict::Kind::DeliverLocal) << v.describe();
    EXPECT_EQ(v.hid, kInfrastructureHid);
    const Aid dst{load_u32(packet.data() + wire::offset::kDstAid)};
    auto result = as(dst.value).handle_service_packet(packet, now);
    if (result.reply) {
      EXPECT_EQ(carry(*result.reply).kind, Verdict::Kind::DeliverLocal);
      auto ev = host.receive(*result.reply, now);
      if (event) *event = ev;
    }
    return result;
  }

  const EphIdEntry& issue(Host& host, const std::string& label, EphIdKind kind) {
    HostEvent ev;
    auto r = to_service(host, host.request_ephid(label, kind, rng), &ev);
    EXPECT_EQ(r.verdict, "ems:issued");
    EXPECT_EQ(ev.detail, label);
    return *host.ephid(label);
  }

  /// Carries a packet and hands it to `to`; returns the host event.
  HostEvent deliver(Host& to, ByteView packet) {
    const auto v = carry(packet);
    if (v.kind != Verdict::Kind::DeliverLocal) throw std::runtime_error("not delivered: " + v.describe());
    return to.receive(packet, now);
  }

  /// Full handshake from client's `client_label` to `server_cert`; returns the client's session.
  SessionId handshake(Host& client, const std::string& client_label, Host& server, const EphIdCertificate& server_cert) {
    auto conn = client.connect(client_label, server_cert, now);
    auto accepted = deliver(server, conn.hello);
    EXPECT_EQ(accepted.kind, HostEvent::Kind::HelloAccepted);
    auto acked = deliver(client, accepted.replies.at(0));
    EXPECT_EQ(acked.kind, HostEvent::Kind::HelloAcked);
    return *acked.session;
  }
};

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no apna::Error thrown";
  return Errc::InvalidArgument;
}

inline ByteView text_view(std::string_view s) { return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}; }

}  // namespace apna::testing
