#include "apna/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "apna/error.hpp"

namespace apna::sim {
namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(std::string_view line, int line_no) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    std::string tok;
    if (c == '"') {
      const auto end = line.find('"', i + 1);
      if (end == std::string_view::npos) fail(line_no, "unterminated quote");
      tok = std::string(line.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') tok += line[i++];
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::uint64_t number(const std::string& s, int line) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) fail(line, "expected a number, got '" + s + "'");
  return v;
}

Aid aid_of(const std::string& s, int line) {
  const auto v = number(s, line);
  if (v > 0xffffffffu) fail(line, "AID out of range");
  return Aid{static_cast<std::uint32_t>(v)};
}

// verb -> allowed argument counts
const std::map<std::string, std::set<std::size_t>>& action_arity() {
  static const std::map<std::string, std::set<std::size_t>> table{
      {"bootstrap", {1}},    {"issue", {3}},         {"register", {3}},      {"query", {2}},
      {"connect", {4}},      {"send", {5, 6}},       {"shutoff", {1}},       {"icmp", {1}},
      {"revoke-host", {1}},  {"prune", {1}},         {"replay", {2}},        {"spoof", {1}},
      {"rogue-shutoff", {2}}, {"mitm", {1}},
  };
  return table;
}

void check_action(const Action& a) {
  const auto& table = action_arity();
  const auto it = table.find(a.verb);
  if (it == table.end()) fail(a.line, "unknown action '" + a.verb + "'");
  if (!it->second.contains(a.args.size())) fail(a.line, "wrong number of arguments for '" + a.verb + "'");
  if (a.verb == "issue" && a.args[2] != "data" && a.args[2] != "control" && a.args[2] != "receive-only")
    fail(a.line, "EphID kind must be data, control or receive-only");
  if (a.verb == "rogue-shutoff" && a.args[1] != "bad-cert" && a.args[1] != "bad-signature" &&
      a.args[1] != "fabricated")
    fail(a.line, "rogue-shutoff variant must be bad-cert, bad-signature or fabricated");
  if (a.verb == "replay" && a.args[1] != "last-data") number(a.args[1], a.line);
  if (a.verb == "prune") aid_of(a.args[0], a.line);
  if (a.verb == "send" && a.args.size() == 6 && number(a.args[5], a.line) == 0) fail(a.line, "count must be >= 1");
}

void check_vantage(const std::string& v, int line) {
  if (v.starts_with("as:")) {
    aid_of(v.substr(3), line);
    return;
  }
  if (v.starts_with("link:")) {
    const auto dash = v.find('-', 5);
    if (dash == std::string::npos) fail(line, "link vantage must be link:<a>-<b>");
    aid_of(v.substr(5, dash - 5), line);
    aid_of(v.substr(dash + 1), line);
    return;
  }
  fail(line, "vantage must be as:<aid> or link:<a>-<b>");
}

}  // namespace

std::string link_id(Aid a, Aid b) {
  const auto [lo, hi] = std::minmax(a.value, b.value);
  return "link:" + std::to_string(lo) + "-" + std::to_string(hi);
}

std::string as_link_id(Aid aid) { return "as:" + std::to_string(aid.value); }

bool Topology::has_as(Aid aid) const { return std::find(ases.begin(), ases.end(), aid) != ases.end(); }

bool Topology::adjacent(Aid a, Aid b) const {
  return std::any_of(links.begin(), links.end(),
                     [&](const LinkDecl& l) { return (l.a == a && l.b == b) || (l.a == b && l.b == a); });
}

const HostDecl* Topology::find_host(std::string_view name) const {
  for (const auto& h : hosts)
    if (h.name == name) return &h;
  return nullptr;
}

std::map<std::pair<Aid, Aid>, Aid> Topology::next_hops() const {
  std::map<Aid, std::set<Aid>> nbrs;
  for (const auto& l : links) {
    nbrs[l.a].insert(l.b);
    nbrs[l.b].insert(l.a);
  }
  std::map<std::pair<Aid, Aid>, Aid> table;
  // BFS from every destination; a node's next hop is the lowest neighbour one step closer.
  for (const Aid dst : ases) {
    std::map<Aid, std::size_t> dist{{dst, 0}};
    std::deque<Aid> queue{dst};
    while (!queue.empty()) {
      const Aid cur = queue.front();
      queue.pop_front();
      for (const Aid n : nbrs[cur])
        if (!dist.contains(n)) {
          dist[n] = dist[cur] + 1;
          queue.push_back(n);
        }
    }
    for (const Aid at : ases) {
      if (!dist.contains(at))
        throw Error(Errc::ScriptError,
                    "unroutable destination: AS " + std::to_string(dst.value) + " from AS " + std::to_string(at.value));
      if (at == dst) {
        table[{at, dst}] = dst;
        continue;
      }
      for (const Aid n : nbrs[at])
        if (dist[n] + 1 == dist[at]) {
          table[{at, dst}] = n;
          break;
        }
    }
  }
  for (const auto& r : routes) {
    if (!adjacent(r.at, r.via))
      throw Error(Errc::ScriptError, "route at AS " + std::to_string(r.at.value) + " via non-neighbour AS " +
                                         std::to_string(r.via.value));
    table[{r.at, r.destination}] = r.via;
  }
  return table;
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::set<std::string> names;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto tok = tokenize(line, line_no);
    if (tok.empty()) continue;
    const auto& kw = tok[0];
    const auto argc = tok.size() - 1;

    if (kw == "epoch") {
      if (argc != 1) fail(line_no, "epoch takes one value");
      const auto v = number(tok[1], line_no);
      if (v > 0xffffffffu) fail(line_no, "epoch out of range");
      sc.epoch = static_cast<UnixTime>(v);
    } else if (kw == "as") {
      if (argc != 1) fail(line_no, "as takes one AID");
      const auto aid = aid_of(tok[1], line_no);
      if (sc.topology.has_as(aid)) fail(line_no, "duplicate AS " + tok[1]);
      sc.topology.ases.push_back(aid);
    } else if (kw == "link") {
      if (argc != 2) fail(line_no, "link takes two AIDs");
      sc.topology.links.push_back({aid_of(tok[1], line_no), aid_of(tok[2], line_no)});
    } else if (kw == "route") {
      if (argc != 4 || tok[3] != "via") fail(line_no, "expected: route <at> <dst> via <aid>");
      sc.topology.routes.push_back({aid_of(tok[1], line_no), aid_of(tok[2], line_no), aid_of(tok[4], line_no)});
    } else if (kw == "host") {
      if (argc != 2) fail(line_no, "expected: host <name> <aid>");
      if (!names.insert(tok[1]).second) fail(line_no, "duplicate name " + tok[1]);
      sc.topology.hosts.push_back({tok[1], aid_of(tok[2], line_no)});
    } else if (kw == "adversary") {
      if ((argc != 3 && argc != 5) || tok[2] != "vantage" || (argc == 5 && tok[4] != "host"))
        fail(line_no, "expected: adversary <name> vantage <v,...> [host <name>]");
      if (!names.insert(tok[1]).second) fail(line_no, "duplicate name " + tok[1]);
      AdversaryDecl adv{tok[1], {}, std::nullopt};
      std::stringstream ss(tok[3]);
      for (std::string v; std::getline(ss, v, ',');) {
        check_vantage(v, line_no);
        adv.vantage.push_back(v);
      }
      if (argc == 5) adv.host = tok[5];
      sc.adversaries.push_back(std::move(adv));
    } else if (kw == "at") {
      if (argc < 2) fail(line_no, "expected: at <tick> <action> ...");
      Action a{number(tok[1], line_no), tok[2], {tok.begin() + 3, tok.end()}, line_no};
      check_action(a);
      sc.script.push_back(std::move(a));
    } else if (kw == "expect") {
      if (argc == 2) {
        sc.expectations.push_back({tok[1], false, number(tok[2], line_no), line_no});
      } else if (argc == 3 && tok[2] == ">=") {
        sc.expectations.push_back({tok[1], true, number(tok[3], line_no), line_no});
      } else {
        fail(line_no, "expected: expect <verdict> [>=] <count>");
      }
    } else {
      fail(line_no, "unknown keyword '" + kw + "'");
    }
  }
  std::stable_sort(sc.script.begin(), sc.script.end(),
                   [](const Action& x, const Action& y) { return x.tick < y.tick; });
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace apna::sim
