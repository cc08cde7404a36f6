#pragma once

// The `apna` command line:
//
//   apna run --scenario FILE [--seed N] [--out FILE] [--json]
//   apna bench ephid [--n N] [--threads T] [--json]
//   apna bench forward [--n N] [--size BYTES] [--json]
//   apna inspect --kind header|ephid|cert|gre --hex HEX [--json]
//
// Exit codes: 0 success, 1 a predicate or expectation failed, 2 usage, file or parse error.

#include <ostream>
#include <string>
#include <vector>

namespace apna::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPredicateFailed = 1;
inline constexpr int kExitUsage = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apna::cli
