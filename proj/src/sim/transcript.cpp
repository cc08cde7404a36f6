#include "apna/sim/transcript.hpp"

#include <algorithm>

#include "apna/error.hpp"
#include "apna/wire/packet.hpp"
#include "json.hpp"

namespace apna::sim {

std::string_view to_string(FrameFormat f) {
  switch (f) {
    case FrameFormat::None: return "none";
    case FrameFormat::Apna: return "apna";
    case FrameFormat::Gre: return "gre";
    case FrameFormat::Tlv: return "tlv";
  }
  return "none";
}

std::optional<ByteView> SimEvent::packet() const {
  try {
    if (format == FrameFormat::Apna && frame.size() >= wire::kHeaderSize) return ByteView(frame);
    if (format == FrameFormat::Gre) return wire::gre_inner(frame);
  } catch (const Error&) {
  }
  return std::nullopt;
}

std::size_t Transcript::count(std::string_view verdict) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const SimEvent& e) { return e.verdict == verdict; }));
}

std::string Transcript::to_jsonl() const {
  using nlohmann::json;
  std::string out;
  json hosts = json::array();
  for (const auto& h : facts.hosts) {
    json hids = json::array();
    for (const auto hid : h.hids) hids.push_back(hid.value);
    hosts.push_back({{"name", h.name}, {"aid", h.aid.value}, {"hids", hids}});
  }
  json ro = json::array();
  for (const auto& e : facts.receive_only) ro.push_back(to_hex(e.bytes()));
  out += json{{"facts", {{"hosts", hosts}, {"receive_only", ro}}}}.dump() + "\n";

  for (const auto& e : events) {
    json j{{"seq", e.seq},     {"tick", e.tick},   {"time", e.time},          {"from", e.from},
           {"to", e.to},       {"link", e.link},   {"stage", e.stage},        {"verdict", e.verdict},
           {"frame", to_hex(e.frame)}, {"format", to_string(e.format)}};
    if (e.payload) j["payload"] = to_hex(*e.payload);
    out += j.dump() + "\n";
  }
  return out;
}

bool in_vantage(const std::vector<std::string>& vantage, const std::string& link) {
  for (const auto& v : vantage) {
    if (v == link) return true;
    if (v.starts_with("link:") && link.starts_with("link:")) {
      // accept either orientation in the vantage spelling
      const auto dash = v.find('-', 5);
      if (dash != std::string::npos && "link:" + v.substr(dash + 1) + "-" + v.substr(5, dash - 5) == link) return true;
    }
    if (v.starts_with("as:") && link.starts_with("link:")) {
      const auto aid = v.substr(3);
      const auto dash = link.find('-', 5);
      if (link.substr(5, dash - 5) == aid || link.substr(dash + 1) == aid) return true;
    }
  }
  return false;
}

AdversaryView view_of(const Transcript& transcript, const std::vector<std::string>& vantage) {
  AdversaryView view{vantage, {}};
  for (const auto& e : transcript.events)
    if (e.format != FrameFormat::None && in_vantage(vantage, e.link)) view.captured.push_back(e);
  return view;
}

}  // namespace apna::sim
