/*
 * Copyright 2026 The kip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef KIP_SYNTH_H_
#define KIP_SYNTH_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kip/activity.h"
#include "kip/address.h"
#include "kip/analysis.h"

namespace kip {

// How an ISP lays customers' /64s out. All presets are synthetic.
enum class SubnetPractice {
  kJpStyle,    // one /64 per customer /48, bits 49-64 zero
  kDispersed,  // several /64s share each /48, low 16 bits random
  kMeeting,    // everyone in three /64s of one /48
};

std::string_view to_string(SubnetPractice p);
SubnetPractice subnet_practice_from_string(std::string_view s);

struct SynthParams {
  std::uint64_t hosts = 100;
  SubnetPractice practice = SubnetPractice::kDispersed;
  int max_hosts_per_subnet = 3;
  double mean_lifetime_hours = 24;  // temporary address lifetime
  double overlap_fraction = 0.2;    // successor starts this early
  double gap_probability = 0.1;     // host goes offline between addresses
  double mean_gap_hours = 8;
  double activity_per_hour = 1;     // Poisson rate while assigned
  int max_addresses_per_host = 0;   // 0 = as many as the window needs
  int activity_per_address = 0;     // fixed count instead of Poisson when > 0
  TimeGrid grid;
  std::uint64_t seed = 1;
};

// One temporary address: assigned over [on, off), active at `activity`.
struct Assignment {
  Address128 address;
  std::int64_t on = 0;
  std::int64_t off = 0;
  std::vector<std::int64_t> activity;  // sorted, each in [on, off)
};

struct GroundTruthHost {
  Prefix subnet;
  std::vector<Assignment> assignments;
};

struct Scenario {
  TimeGrid grid;
  std::vector<GroundTruthHost> hosts;
  SynthParams params;
};

// Deterministic for a given parameter set (including the seed).
Scenario generate(const SynthParams& params);

// Every activity instant as a log event, ordered by (time, address).
std::vector<ActivityEvent> scenario_events(const Scenario& s);
void write_log(std::ostream& out, const Scenario& s);
void write_manifest(std::ostream& out, const Scenario& s);

struct Truth {
  Series interval;   // max concurrent assignments over each closed interval
  Series fencepost;  // concurrent assignments at each boundary instant
};

// Brute-force referee over a set of spans, sweeping only span endpoints
// and fencepost instants.
Truth oracle_truth(const std::vector<const Assignment*>& spans,
                   const TimeGrid& grid);
Truth oracle_truth(const Scenario& s);
std::map<std::uint64_t, Truth> oracle_truth_by_subnet(const Scenario& s);

void write_truth(std::ostream& out, const Scenario& s, const Truth& truth);

struct Violation {
  std::string scope;   // "2001:db8::/64" or "network"
  std::string series;  // "interval", "prefix", "address"
  int index = 0;
  Count bound = 0;
  Count truth = 0;
};

struct SoundnessReport {
  std::vector<Violation> violations;
  // sum(bound) / sum(truth) over the network address fencepost series
  double fencepost_tightness = 0;
  double interval_tightness = 0;
  // indices where some /64's bound met its truth exactly and was non-zero
  std::uint64_t tight_indices = 0;

  bool ok() const { return violations.empty(); }
};

// Checks bound <= truth per /64 for interval, prefix and address series,
// and network-wide for both fencepost series.
SoundnessReport check_soundness(const Scenario& s, const NetworkAnalysis& analysis);

}  // namespace kip

#endif  // KIP_SYNTH_H_
