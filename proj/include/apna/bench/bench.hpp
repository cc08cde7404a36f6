#pragma once

// Microbenchmarks over fresh actors. Nothing here touches simulation state.
//
// JSON report schema (one object per report):
//   {"op": string, "iterations": int, "wall_seconds": float,
//    "ops_per_second": float, "per_op_microseconds": float}
// bench forward adds {"baseline": <report>, "ratio": float,
//   "per_packet": {"ephid_opens": float, "table_lookups": float, "mac_verifications": float}}

#include <cstdint>
#include <string>

#include "apna/entities/autonomous_system.hpp"

namespace apna::bench {

struct BenchReport {
  std::string op_name;
  std::uint64_t iterations = 0;
  double wall_seconds = 0;
  double ops_per_second = 0;
  double per_op_microseconds = 0;

  static BenchReport from(std::string op, std::uint64_t iterations, double seconds);
  std::string to_text() const;
  std::string to_json() const;
};

/// Full EMS path per iteration: open the sealed request, checks, mint, sign the
/// certificate, seal the reply. Requests are prepared outside the timed region.
/// `threads` workers each drive their own AS and share only the final tally.
BenchReport bench_ephid(std::uint64_t n, unsigned threads = 1);

struct ForwardBench {
  BenchReport checked;   // forward_outgoing + GRE encapsulation
  BenchReport baseline;  // header decode + route lookup + GRE encapsulation
  ForwardCounters counters;  // from the checked pass
  double ratio = 0;          // checked / baseline rate

  std::string to_text() const;
  std::string to_json() const;
};

/// `packet_size` is the APNA packet length including the 56-byte header.
ForwardBench bench_forward(std::uint64_t n, std::size_t packet_size);

}  // namespace apna::bench
