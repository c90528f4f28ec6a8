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
#ifndef KIP_AGGREGATE_H_
#define KIP_AGGREGATE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kip/activity.h"
#include "kip/address.h"

namespace kip {

inline constexpr std::string_view kToolVersion = "0.1.0";

// What a /64's series counts: whether the prefix is assigned (0/1) or
// how many of its addresses are.
enum class CountMode { kPrefixCount, kAddressCount };

std::string_view to_string(CountMode m);
CountMode count_mode_from_string(std::string_view s);

enum class ResidualKind { kSuppress, kRootCatchAll };

std::string_view to_string(ResidualKind r);
ResidualKind residual_kind_from_string(std::string_view s);

struct KipConfig {
  Count k = 2;
  Stat stat = Stat::kMin;
  CountMode mode = CountMode::kPrefixCount;
  // Longest prefix emitted; deeper subtrees are judged at this length.
  int max_emit_length = 64;
  ResidualKind residual = ResidualKind::kSuppress;

  // Throws UsageError naming the violated constraint.
  void validate() const;

  friend bool operator==(const KipConfig&, const KipConfig&) = default;
};

struct SubnetSeries {
  std::uint64_t subnet = 0;  // the /64's high 64 bits
  Series series;
};

// Path-compressed binary trie over active /64s. Leaves are exactly the
// input /64s; internal nodes exist only where subtrees diverge.
class PrefixTrie {
 public:
  struct Node {
    Prefix prefix;
    Series series;  // zero-filled for internal nodes
    int child[2] = {-1, -1};

    bool is_leaf() const { return child[0] < 0; }
  };

  bool empty() const { return nodes_.empty(); }
  int root() const { return empty() ? -1 : 0; }
  const Node& node(int index) const { return nodes_[index]; }
  Node& node(int index) { return nodes_[index]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t series_length() const { return series_length_; }

  // Prefix of every node in depth-first order.
  std::vector<Prefix> prefixes() const;

 private:
  friend PrefixTrie build_trie(std::vector<SubnetSeries> leaves);
  int build(std::span<SubnetSeries> leaves);

  std::vector<Node> nodes_;
  std::size_t series_length_ = 0;
};

// Leaves may arrive in any order; duplicate /64s or unequal series
// lengths are contract violations.
PrefixTrie build_trie(std::vector<SubnetSeries> leaves);

struct AggregateEntry {
  Prefix prefix;
  Count min = 0;
  Count median = 0;
  Count max = 0;

  friend bool operator==(const AggregateEntry&, const AggregateEntry&) = default;
};

struct ResidualPolicy {
  ResidualKind kind = ResidualKind::kSuppress;
  // Truncation target for unmatched addresses under kRootCatchAll.
  std::optional<Prefix> catch_all;

  friend bool operator==(const ResidualPolicy&, const ResidualPolicy&) = default;
};

// Anonymous aggregates plus the parameters that produced them.
struct AggregateSet {
  std::vector<AggregateEntry> entries;  // sorted by (base, length)
  ResidualPolicy residual;
  KipConfig config;
  TimeGrid grid;
  std::string tool_version{kToolVersion};

  friend bool operator==(const AggregateSet&, const AggregateSet&) = default;
};

struct SynthesisResult {
  AggregateSet set;
  std::vector<Series> entry_series;  // parallel to set.entries
  Series residual;                   // mass that never reached k
};

// Post-order merge: a node whose statistic is below k folds its series
// into its parent; a node at or above k is emitted and stops there.
// Throws UnsupportedWindow when the grid has no fenceposts.
SynthesisResult synthesize_aggregates(PrefixTrie trie, const KipConfig& cfg,
                                      const TimeGrid& grid);

// Per fencepost, the number of episodes spanning it.
Series address_count_series(std::span<const EpisodeRow> rows,
                            const TimeGrid& grid);

// Tab-separated text with '#' headers; see README for the layout.
void write_aggregate_set(std::ostream& out, const AggregateSet& set);
AggregateSet read_aggregate_set(std::istream& in);

}  // namespace kip

#endif  // KIP_AGGREGATE_H_
