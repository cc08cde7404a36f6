#pragma once

// Deterministic discrete-event fabric. One tick is one second of virtual time
// and one hop; the queue is ordered by (tick, insertion sequence). All keys and
// identifiers come from a single seeded stream, so a run is a pure function of
// (scenario, seed).
//
// Frame path of a packet from host h in AS a to AS b:
//   host:h -> as:a   br-out   (link as:a)
//   as:a   -> as:b   br-in    (GRE on link:a-b, or as:a when a == b)
//   as:b   -> host:x host     or  as:b -> as:b svc  for the AS's own services

#include <map>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "apna/crypto/primitives.hpp"
#include "apna/entities/autonomous_system.hpp"
#include "apna/entities/host.hpp"
#include "apna/sim/scenario.hpp"
#include "apna/sim/transcript.hpp"

namespace apna::sim {

class Simulation {
 public:
  /// Builds every actor. Throws Error{ScriptError} for unknown actors or an
  /// unroutable topology.
  Simulation(Scenario scenario, std::uint64_t seed);

  /// Runs the whole script to quiescence. Calling it again is a no-op.
  const Transcript& run();

  const Scenario& scenario() const { return scenario_; }
  const Transcript& transcript() const { return transcript_; }
  AutonomousSystem& as(Aid aid);
  const AutonomousSystem& as(Aid aid) const;
  Host& host(const std::string& name);
  /// Frames seen so far by the named adversary.
  AdversaryView view(const std::string& adversary) const;
  UnixTime now() const { return scenario_.epoch + static_cast<UnixTime>(tick_); }

 private:
  struct Delivery {
    std::string from;
    std::string to;
    std::string link;
    std::string stage;
    Aid at;                 // AS that processes br-out / br-in / svc
    std::string host;       // recipient of host / bootstrap stages
    FrameFormat format = FrameFormat::Apna;
    Bytes frame;
    std::optional<Bytes> payload;
  };
  struct Item {
    std::uint64_t tick;
    std::uint64_t seq;
    std::size_t action = 0;  // index into the script when !delivery
    std::shared_ptr<Delivery> delivery;
  };
  struct ItemOrder {
    bool operator()(const Item& a, const Item& b) const {
      return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
    }
  };
  struct HostSlot {
    Aid aid;
    std::unique_ptr<Host> host;
    std::optional<Hid> next_hid;  // set by revoke-host
    std::optional<Hid> pending;   // bootstrap in flight
    Bytes last_data;              // last data packet delivered to the host
  };
  struct Adversary {
    AdversaryDecl decl;
    bool mitm_armed = false;
  };

  void validate();
  void schedule(Delivery d, std::uint64_t delay = 1);
  void record(const Delivery& d, std::string verdict, std::optional<Bytes> payload = std::nullopt);
  void record_action(const std::string& actor, std::string verdict);
  void from_host(const std::string& name, Bytes packet, std::optional<Bytes> payload = std::nullopt);
  void from_adversary(const Adversary& adv, Aid at, const std::string& stage, Bytes packet);
  std::uint32_t br_ip(Aid aid) const { return 0x0A000000u | (aid.value & 0xffffu); }

  void execute(const Action& action);
  void process(Delivery& d);
  void on_br_out(Delivery& d);
  void on_br_in(Delivery& d);
  void on_service(Delivery& d);
  void on_host(Delivery& d);
  void on_bootstrap(Delivery& d);
  void maybe_intercept(Delivery& d);

  void act_bootstrap(const std::string& name);
  void act_send(const Action& a);
  void act_replay(Adversary& adv, const std::string& which);
  void act_spoof(Adversary& adv);
  void act_rogue_shutoff(Adversary& adv, const std::string& variant);

  std::string host_at(Aid aid, Hid hid) const;
  std::optional<SimEvent> last_captured_data(const Adversary& adv) const;
  std::optional<EphIdCertificate> sniffed_certificate(const Adversary& adv, const EphId& ephid) const;

  Scenario scenario_;
  crypto::SeededRandom rng_;
  std::shared_ptr<AsDirectory> directory_ = std::make_shared<AsDirectory>();
  std::shared_ptr<DnsTable> dns_ = std::make_shared<DnsTable>();
  std::map<Aid, std::unique_ptr<AutonomousSystem>> ases_;
  std::map<std::string, HostSlot> hosts_;
  std::map<std::string, Adversary> adversaries_;
  std::map<std::string, std::size_t> fact_index_;

  std::priority_queue<Item, std::vector<Item>, ItemOrder> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t tick_ = 0;
  bool ran_ = false;
  Transcript transcript_;
};

/// Convenience: build and run.
Transcript run_scenario(const Scenario& scenario, std::uint64_t seed);

}  // namespace apna::sim
