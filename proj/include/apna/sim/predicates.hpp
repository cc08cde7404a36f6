#pragma once

// Security predicates evaluated over a finished run.
//
//   no-plaintext-HID     no frame outside a host's own AS contains that host's HID bytes
//   no-receive-only-src  no packet carries a receive-only EphID as its source
//   fate-sharing         after "aa:revoked" for e, br-out never forwards e again, and
//                        Drop(Revoked) only ever hits revoked EphIDs
//   accountability-link  every packet a BR forwards out opens to a known HID and carries
//                        a valid MAC under that HID's key
//   conservation         every payload a host accepts was sent earlier on the same
//                        (src, dst) EphID pair

#include <string>
#include <vector>

#include "apna/sim/scenario.hpp"
#include "apna/sim/simulation.hpp"
#include "apna/sim/transcript.hpp"

namespace apna::sim {

enum class Predicate : std::uint8_t { NoPlaintextHid, NoReceiveOnlySrc, FateSharing, AccountabilityLink, Conservation };
std::string_view to_string(Predicate p);
inline constexpr Predicate kAllPredicates[] = {Predicate::NoPlaintextHid, Predicate::NoReceiveOnlySrc,
                                               Predicate::FateSharing, Predicate::AccountabilityLink,
                                               Predicate::Conservation};

struct PredicateReport {
  std::string name;
  bool passed = true;
  std::vector<std::uint64_t> violations;  // event seq numbers
  std::vector<std::string> details;
};

/// `sim` supplies AS keys for accountability-link; the transcript may be a modified copy.
PredicateReport assert_transcript(const Transcript& transcript, const Simulation& sim, Predicate predicate);
std::vector<PredicateReport> check_all(const Simulation& sim);

/// One report per `expect` line of the scenario, named "expect <verdict> ...".
std::vector<PredicateReport> check_expectations(const Scenario& scenario, const Transcript& transcript);

}  // namespace apna::sim
