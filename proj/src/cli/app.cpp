#include "apna/cli/app.hpp"

#include <fstream>

#include "CLI11.hpp"
#include "apna/bench/bench.hpp"
#include "apna/cli/inspect.hpp"
#include "apna/error.hpp"
#include "apna/sim/predicates.hpp"
#include "apna/sim/simulation.hpp"
#include "json.hpp"

namespace apna::cli {
namespace {

struct Options {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string out_path;
  bool json = false;

  std::uint64_t n = 0;
  unsigned threads = 1;
  std::size_t size = 1500;

  std::string kind;
  std::string hex;
};

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  std::unique_ptr<sim::Simulation> simulation;
  try {
    simulation = std::make_unique<sim::Simulation>(sim::load_scenario(o.scenario), o.seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto& transcript = simulation->run();
  if (!o.out_path.empty()) {
    std::ofstream file(o.out_path, std::ios::binary);
    file << transcript.to_jsonl();
    if (!file) {
      err << "error: cannot write " << o.out_path << "\n";
      return kExitUsage;
    }
  }
  auto reports = sim::check_all(*simulation);
  const auto expectations = sim::check_expectations(simulation->scenario(), transcript);
  reports.insert(reports.end(), expectations.begin(), expectations.end());
  bool ok = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) {
    ok = ok && r.passed;
    if (o.json) {
      j.push_back({{"check", r.name}, {"passed", r.passed}, {"violations", r.violations}, {"details", r.details}});
    } else {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << "\n";
      for (const auto& d : r.details) out << "     " << d << "\n";
    }
  }
  if (o.json) {
    out << nlohmann::json{{"events", transcript.events.size()}, {"checks", j}, {"passed", ok}}.dump() << "\n";
  } else {
    out << transcript.events.size() << " events, " << (ok ? "all checks passed" : "checks failed") << "\n";
  }
  return ok ? kExitOk : kExitPredicateFailed;
}

int cmd_inspect(const Options& o, std::ostream& out, std::ostream& err) {
  try {
    const auto kind = parse_inspect_kind(o.kind);
    const auto bytes = from_hex(o.hex);
    out << (o.json ? inspect_json(kind, bytes) + "\n" : inspect(kind, bytes));
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"APNA protocol simulator, benchmarks and wire inspector", "apna"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run a scenario and check the built-in predicates");
  run->add_option("--scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", o.seed, "Random seed");
  run->add_option("--out", o.out_path, "Transcript output (JSON lines)");
  run->add_flag("--json", o.json, "Machine-readable report");

  auto* bench = app.add_subcommand("bench", "Microbenchmarks");
  bench->require_subcommand(1);
  auto* ephid = bench->add_subcommand("ephid", "EphID issuance rate");
  ephid->add_option("--n", o.n, "Issuances")->check(CLI::PositiveNumber);
  ephid->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  ephid->add_flag("--json", o.json, "JSON report");
  auto* forward = bench->add_subcommand("forward", "Border-router egress checks against a no-check baseline");
  forward->add_option("--n", o.n, "Packets")->check(CLI::PositiveNumber);
  forward->add_option("--size", o.size, "Packet size in bytes, header included")->check(CLI::Range(56, 65535));
  forward->add_flag("--json", o.json, "JSON report");

  auto* insp = app.add_subcommand("inspect", "Dump the fields of a wire object");
  insp->add_option("--kind", o.kind, "header, ephid, cert or gre")->required();
  insp->add_option("--hex", o.hex, "Bytes as hex")->required();
  insp->add_flag("--json", o.json, "JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o, out, err);
    if (insp->parsed()) return cmd_inspect(o, out, err);
    if (ephid->parsed()) {
      const auto r = bench::bench_ephid(o.n ? o.n : 100000, o.threads);
      out << (o.json ? r.to_json() : r.to_text()) << "\n";
      return kExitOk;
    }
    if (forward->parsed()) {
      const auto r = bench::bench_forward(o.n ? o.n : 1000000, o.size);
      out << (o.json ? r.to_json() : r.to_text()) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace apna::cli
