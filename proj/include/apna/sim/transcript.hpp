#pragma once

// Event log of one simulation run. Each event is one frame arriving at one
// actor and the verdict that actor reached. Actor ids are "as:<aid>",
// "host:<name>" and "adv:<name>".
//
// JSON-lines export: one object per line with sorted keys
//   {"facts": {...}}                                  first line, ground truth
//   {"seq","tick","time","from","to","link","stage","verdict","format","frame"[,"payload"]}
// frame and payload are lowercase hex. format is "apna", "gre", "tlv" or "none".

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apna/bytes.hpp"
#include "apna/crypto/ephid.hpp"

namespace apna::sim {

enum class FrameFormat : std::uint8_t { None, Apna, Gre, Tlv };
std::string_view to_string(FrameFormat f);

struct SimEvent {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  UnixTime time = 0;
  std::string from;
  std::string to;
  std::string link;     // "as:<aid>" inside an AS, "link:<a>-<b>" between ASes
  std::string stage;    // br-out, br-in, svc, host, registry, bootstrap, action
  std::string verdict;  // e.g. "br-out:forward", "host:error:ReplayDetected", "aa:revoked"
  FrameFormat format = FrameFormat::None;
  Bytes frame;
  std::optional<Bytes> payload;  // plaintext handed to send, or accepted by receive

  /// The APNA packet carried by the frame (GRE stripped), if any.
  std::optional<ByteView> packet() const;
};

/// Ground truth about the run that is not visible on the wire.
struct Facts {
  struct HostFact {
    std::string name;
    Aid aid;
    std::vector<Hid> hids;  // every HID the host has held
  };
  std::vector<HostFact> hosts;
  std::set<EphId> receive_only;
};

struct Transcript {
  std::vector<SimEvent> events;
  Facts facts;

  std::size_t count(std::string_view verdict) const;
  std::string to_jsonl() const;
};

/// Does an event on `link` fall inside a vantage ("as:<aid>" or "link:<a>-<b>")?
bool in_vantage(const std::vector<std::string>& vantage, const std::string& link);

struct AdversaryView {
  std::vector<std::string> vantage;
  std::vector<SimEvent> captured;
};
AdversaryView view_of(const Transcript& transcript, const std::vector<std::string>& vantage);

}  // namespace apna::sim
