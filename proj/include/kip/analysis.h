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
#ifndef KIP_ANALYSIS_H_
#define KIP_ANALYSIS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kip/activity.h"
#include "kip/aggregate.h"
#include "kip/classify.h"

namespace kip {

struct AnalysisOptions {
  // Bridge quiet intervals for every address class, not only /64s whose
  // randomized IIDs pass the plausibility test.
  bool bridge_all_classes = false;
};

struct AddressRecord {
  Address128 address;
  IidClass iid_class = IidClass::kRandomizedCandidate;
  Dpl dpl;
  int stable_days = 0;
  IntervalBitmap active;
};

struct SubnetAnalysis {
  std::uint64_t subnet = 0;
  std::size_t first_record = 0;  // range into NetworkAnalysis::records
  std::size_t record_count = 0;
  // Randomized IIDs looked pseudorandom, so their activity is bridged.
  bool bridged = false;
  Series interval_bounds;  // length w
  Series prefix_series;    // 0/1 per fencepost
  Series address_series;   // spanning addresses per fencepost
};

struct NetworkAnalysis {
  TimeGrid grid;
  std::vector<AddressRecord> records;  // sorted by address
  std::vector<SubnetAnalysis> subnets;  // sorted by subnet
  Series interval_bounds;   // accumulated over subnets
  Series prefix_series;
  Series address_series;

  std::span<const AddressRecord> records_of(const SubnetAnalysis& s) const {
    return std::span(records).subspan(s.first_record, s.record_count);
  }
};

// Classifies every address, then bridges and counts each /64.
NetworkAnalysis analyze(ActivityIndex&& index, const RandomnessPolicy& policy,
                        const AnalysisOptions& options = {});

// Episodes of one /64 as counted: bridged rows for randomized addresses in
// a plausible /64, one short episode per active interval otherwise.
std::vector<EpisodeRow> subnet_episodes(const NetworkAnalysis& analysis,
                                        const SubnetAnalysis& subnet,
                                        const AnalysisOptions& options = {});

// Per-/64 series for the aggregation trie.
std::vector<SubnetSeries> subnet_series(const NetworkAnalysis& analysis,
                                        CountMode mode);

// Builds the trie over subnet_series(analysis, cfg.mode) and synthesizes.
SynthesisResult aggregate(const NetworkAnalysis& analysis, const KipConfig& cfg);

// One line per address: address, class, dpl or "-", stable days.
void write_classification(std::ostream& out, const NetworkAnalysis& analysis);

struct NetworkSummary {
  std::uint64_t active_48s = 0;
  std::uint64_t active_64s = 0;
  std::uint64_t active_addresses = 0;
  Count prefix_bound_max = 0;
  Count prefix_bound_median = 0;
  Count address_bound_max = 0;
  Count address_bound_median = 0;

  friend bool operator==(const NetworkSummary&, const NetworkSummary&) = default;
};

// Prefix bounds come from the accumulated fencepost series, address bounds
// from the accumulated interval bounds.
NetworkSummary summarize(const NetworkAnalysis& analysis);
void write_summary(std::ostream& out, const NetworkSummary& summary);

enum class Weighting { kPerAggregate, kPerCovered64 };
Weighting weighting_from_string(std::string_view s);

struct LengthRow {
  int length = 0;
  std::uint64_t count = 0;
  double cumulative = 0;
};

// Histogram and CDF of aggregate lengths. kPerCovered64 counts each
// active /64 under its longest matching aggregate; unmatched /64s are
// left out.
std::vector<LengthRow> eval_lengths(const AggregateSet& set, Weighting weighting,
                                    std::span<const std::uint64_t> active_64s = {});
void write_lengths(std::ostream& out, std::span<const LengthRow> rows);

enum class MatrixView { kRaw, kInferred };
MatrixView matrix_view_from_string(std::string_view s);

// Text activity matrix of one /64. The inferred view orders rows by
// activity (earliest differing active interval first, ties by address) and
// appends totals, background and fencepost rows; it needs
// w >= 2 and throws UnsupportedWindow otherwise.
std::string render_subnet_matrix(const NetworkAnalysis& analysis,
                                 const SubnetAnalysis& subnet, MatrixView view,
                                 const AnalysisOptions& options = {});

}  // namespace kip

#endif  // KIP_ANALYSIS_H_
