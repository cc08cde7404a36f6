#pragma once

// Scenario files: topology, adversaries, a timed script and expectations in one
// line-oriented text file. '#' starts a comment; tokens are separated by blanks;
// a token may be double-quoted to include spaces.
//
//   epoch <unix-time>                      virtual time of tick 0 (default 1700000000)
//   as <aid>
//   link <aid> <aid>                       bidirectional, loss-free, 1 tick per hop
//   route <at-aid> <dst-aid> via <aid>     static override; other routes are BFS shortest
//                                          paths, ties broken by the lower neighbour AID
//   host <name> <aid>
//   adversary <name> vantage <v>[,<v>...] [host <name>]
//       v is as:<aid> (inside that AS and on its links) or link:<a>-<b>
//
//   at <tick> <action>
//     bootstrap <host>
//     issue <host> <label> data|control|receive-only
//     register <host> <label> <dns-name>
//     query <host> <dns-name>
//     connect <host> <label> <peer-host> <peer-label>   peer certificate handed out of band
//     connect <host> <label> dns <dns-name>
//     send <host> <label> <peer-host> <peer-label> <text> [<count>]
//     shutoff <host>                       against the last data packet the host received
//     icmp <host>                          destination-unreachable about that packet
//     revoke-host <host>                   next bootstrap of <host> uses the fresh HID
//     prune <aid>
//     replay <adversary> last-data|<index> re-inject a frame from the adversary's view
//     spoof <adversary>                    sniffed source EphID, adversary's MAC key
//     rogue-shutoff <adversary> bad-cert|bad-signature|fabricated
//     mitm <adversary>                     swap the certificate in the next Hello it sees
//
//   expect <verdict> <count>               exact number of events with that verdict
//   expect <verdict> >= <count>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apna/bytes.hpp"

namespace apna::sim {

struct LinkDecl {
  Aid a;
  Aid b;
};

struct RouteDecl {
  Aid at;
  Aid destination;
  Aid via;
};

struct HostDecl {
  std::string name;
  Aid aid;
};

struct AdversaryDecl {
  std::string name;
  std::vector<std::string> vantage;  // "as:<aid>" or "link:<a>-<b>"
  std::optional<std::string> host;   // a host the adversary controls
};

struct Topology {
  std::vector<Aid> ases;
  std::vector<LinkDecl> links;
  std::vector<RouteDecl> routes;
  std::vector<HostDecl> hosts;

  bool has_as(Aid aid) const;
  bool adjacent(Aid a, Aid b) const;
  const HostDecl* find_host(std::string_view name) const;
  /// Full next-hop table (current, destination) -> neighbour, including
  /// (a, a) -> a. Throws Error{ScriptError} if the graph is disconnected or a
  /// static route is not via a neighbour.
  std::map<std::pair<Aid, Aid>, Aid> next_hops() const;
};

struct Action {
  std::uint64_t tick = 0;
  std::string verb;
  std::vector<std::string> args;
  int line = 0;
};

struct Expectation {
  std::string verdict;
  bool at_least = false;
  std::size_t count = 0;
  int line = 0;
};

struct Scenario {
  UnixTime epoch = 1700000000;
  Topology topology;
  std::vector<AdversaryDecl> adversaries;
  std::vector<Action> script;  // sorted by tick, stable in file order
  std::vector<Expectation> expectations;
};

/// Throws Error{ParseError} naming the line for syntax problems.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// "link:<lo>-<hi>" for an inter-AS link, "as:<aid>" inside an AS.
std::string link_id(Aid a, Aid b);
std::string as_link_id(Aid aid);

}  // namespace apna::sim
