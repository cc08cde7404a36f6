#include "apna/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <latch>
#include <mutex>
#include <sstream>
#include <thread>

#include "apna/entities/host.hpp"
#include "apna/error.hpp"
#include "json.hpp"

namespace apna::bench {
namespace {

using Clock = std::chrono::steady_clock;
constexpr UnixTime kNow = 1700000000;
volatile std::uint64_t g_sink;  // keeps the forwarding loops observable

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

nlohmann::json report_json(const BenchReport& r) {
  return {{"op", r.op_name},
          {"iterations", r.iterations},
          {"wall_seconds", r.wall_seconds},
          {"ops_per_second", r.ops_per_second},
          {"per_op_microseconds", r.per_op_microseconds}};
}

/// One AS with one bootstrapped host, built from a fixed seed.
struct Bench {
  crypto::SeededRandom rng;
  std::shared_ptr<AsDirectory> directory = std::make_shared<AsDirectory>();
  std::shared_ptr<DnsTable> dns = std::make_shared<DnsTable>();
  AutonomousSystem as;
  Host host;

  explicit Bench(std::uint64_t seed)
      : rng(seed), as(Aid{1}, rng, kNow, directory, dns), host("bench", Aid{1}, rng, directory) {
    directory->add(as.public_info());
    const auto hid = as.allocate_hid(rng);
    const auto result = as.bootstrap(hid, host.long_term_public(), kNow);
    host.complete_bootstrap(hid, result.m2, kNow);
  }

  // Intra-AS round trip through the BR and the EMS.
  const EphIdEntry& issue(const std::string& label) {
    const auto request = host.request_ephid(label, EphIdKind::Data, rng);
    if (as.forward_outgoing(request, kNow).is_drop() || as.forward_incoming(request, kNow).is_drop())
      throw Error(Errc::InvalidArgument, "bench request dropped");
    auto result = as.handle_service_packet(request, kNow);
    if (!result.reply) throw Error(Errc::InvalidArgument, "bench issuance failed: " + result.verdict);
    host.receive(*result.reply, kNow);
    return *host.ephid(label);
  }
};

}  // namespace

BenchReport BenchReport::from(std::string op, std::uint64_t iterations, double seconds) {
  BenchReport r;
  r.op_name = std::move(op);
  r.iterations = iterations;
  r.wall_seconds = seconds;
  r.ops_per_second = seconds > 0 ? static_cast<double>(iterations) / seconds : 0;
  r.per_op_microseconds = iterations > 0 ? seconds * 1e6 / static_cast<double>(iterations) : 0;
  return r;
}

std::string BenchReport::to_text() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << op_name << ": " << iterations << " ops in " << wall_seconds << " s, ";
  out.precision(0);
  out << ops_per_second << " ops/s, ";
  out.precision(3);
  out << per_op_microseconds << " us/op";
  return out.str();
}

std::string BenchReport::to_json() const { return report_json(*this).dump(); }

BenchReport bench_ephid(std::uint64_t n, unsigned threads) {
  if (n == 0) throw Error(Errc::InvalidArgument, "n must be at least 1");
  threads = std::max(1u, threads);

  std::latch ready(threads);
  std::latch go(1);
  std::vector<Clock::time_point> ends(threads);
  std::vector<std::thread> workers;
  std::mutex failure_mutex;
  std::string failure;

  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t share = n / threads + (w < n % threads ? 1 : 0);
    workers.emplace_back([&, w, share] {
      try {
        Bench b(0xbe0c + w);
        const auto pub = EphemeralKeyPair::generate(b.rng).public_key();
        std::vector<wire::EphIdRequest> requests;
        requests.reserve(share);
        for (std::uint64_t i = 0; i < share; ++i)
          requests.push_back(wire::EphIdRequest::seal(
              b.host.as_keys().ctrl, wire::control_nonce(wire::ControlDirection::HostToAs, i + 1),
              {EphIdKind::Data, pub}));
        const auto ctrl = b.host.control_ephid();
        ready.count_down();
        go.wait();
        for (const auto& req : requests) b.as.issue(ctrl, req, kNow);
        ends[w] = Clock::now();
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failure = e.what();
        ready.count_down();
      }
    });
  }
  ready.wait();
  const auto start = Clock::now();
  go.count_down();
  for (auto& t : workers) t.join();
  if (!failure.empty()) throw Error(Errc::InvalidArgument, "ephid bench worker failed: " + failure);
  const auto end = *std::max_element(ends.begin(), ends.end());
  return BenchReport::from("ephid-issue", n, seconds_between(start, end));
}

ForwardBench bench_forward(std::uint64_t n, std::size_t packet_size) {
  if (n == 0) throw Error(Errc::InvalidArgument, "n must be at least 1");
  if (packet_size < wire::kHeaderSize)
    throw Error(Errc::InvalidArgument, "packet size must be at least " + std::to_string(wire::kHeaderSize));

  Bench b(0xf0f0);
  b.as.set_route(Aid{2}, Aid{2});
  const auto& src = b.issue("data");

  constexpr std::size_t kPool = 1024;
  std::vector<Bytes> packets;
  packets.reserve(kPool);
  for (std::size_t i = 0; i < kPool; ++i) {
    wire::ApnaHeader h{Aid{1}, src.ephid(), Aid{2}, {}, {}, i + 1};
    b.rng.fill(h.dst_ephid.ct);
    Bytes payload(packet_size - wire::kHeaderSize);
    b.rng.fill(payload);
    auto pkt = wire::Packet{h, std::move(payload)}.encode();
    wire::stamp_packet_mac(b.host.as_keys().pkt, pkt);
    packets.push_back(std::move(pkt));
  }
  const std::uint32_t own_ip = 0x0A000001, peer_ip = 0x0A000002;
  Bytes out;
  out.reserve(packet_size + wire::kGrePrefixSize);
  std::uint64_t sink = 0;

  // Baseline: what a BR does without any APNA checks.
  auto t0 = Clock::now();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& pkt = packets[i % kPool];
    const auto h = wire::decode_header(pkt);
    const auto next = b.as.next_hop(h.dst_aid);
    wire::encapsulate_gre_into(out, own_ip, next ? peer_ip : 0, pkt);
    sink += out[out.size() - 1];
  }
  const auto baseline = BenchReport::from("forward-baseline", n, seconds_between(t0, Clock::now()));

  b.as.reset_counters();
  t0 = Clock::now();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& pkt = packets[i % kPool];
    const auto v = b.as.forward_outgoing(pkt, kNow);
    if (v.kind != Verdict::Kind::Forward) throw Error(Errc::InvalidArgument, "bench packet " + v.describe());
    wire::encapsulate_gre_into(out, own_ip, peer_ip, pkt);
    sink += out[out.size() - 1];
  }
  const auto checked = BenchReport::from("forward-checked", n, seconds_between(t0, Clock::now()));
  g_sink = sink;

  ForwardBench r{checked, baseline, b.as.counters(), 0};
  r.ratio = baseline.ops_per_second > 0 ? checked.ops_per_second / baseline.ops_per_second : 0;
  return r;
}

std::string ForwardBench::to_text() const {
  std::ostringstream out;
  const auto per = [&](std::uint64_t v) { return static_cast<double>(v) / static_cast<double>(checked.iterations); };
  out << checked.to_text() << "\n" << baseline.to_text() << "\n";
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "ratio checked/baseline: " << ratio << "\n";
  out << "per packet: " << per(counters.ephid_opens) << " EphID opens, " << per(counters.table_lookups)
      << " table lookups, " << per(counters.mac_verifications) << " MAC verifications";
  return out.str();
}

std::string ForwardBench::to_json() const {
  const auto per = [&](std::uint64_t v) { return static_cast<double>(v) / static_cast<double>(checked.iterations); };
  auto j = report_json(checked);
  j["baseline"] = report_json(baseline);
  j["ratio"] = ratio;
  j["per_packet"] = {{"ephid_opens", per(counters.ephid_opens)},
                     {"table_lookups", per(counters.table_lookups)},
                     {"mac_verifications", per(counters.mac_verifications)}};
  return j.dump();
}

}  // namespace apna::bench
