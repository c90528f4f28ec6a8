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
#include "kip/aggregate.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>

#include "kip/errors.h"

namespace kip {

std::string_view to_string(CountMode m) {
  return m == CountMode::kPrefixCount ? "prefix" : "address";
}

CountMode count_mode_from_string(std::string_view s) {
  if (s == "prefix") return CountMode::kPrefixCount;
  if (s == "address") return CountMode::kAddressCount;
  throw UsageError("unknown mode '" + std::string(s) +
                   "' (expected prefix or address)");
}

std::string_view to_string(ResidualKind r) {
  return r == ResidualKind::kSuppress ? "suppress" : "root";
}

ResidualKind residual_kind_from_string(std::string_view s) {
  if (s == "suppress") return ResidualKind::kSuppress;
  if (s == "root") return ResidualKind::kRootCatchAll;
  throw UsageError("unknown residual policy '" + std::string(s) +
                   "' (expected suppress or root)");
}

void KipConfig::validate() const {
  if (k < 2) {
    throw UsageError("k must be at least 2 (k = 1 anonymizes nothing)");
  }
  if (max_emit_length < 0 || max_emit_length > 64) {
    throw UsageError("max emit length must be within 0..64");
  }
}

std::vector<Prefix> PrefixTrie::prefixes() const {
  std::vector<Prefix> out;
  out.reserve(nodes_.size());
  for (const Node& n : nodes_) out.push_back(n.prefix);
  return out;
}

int PrefixTrie::build(std::span<SubnetSeries> leaves) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (leaves.size() == 1) {
    nodes_[index].prefix = Prefix(Address128(leaves[0].subnet, 0), 64);
    nodes_[index].series = std::move(leaves[0].series);
    return index;
  }
  const std::uint64_t lo = leaves.front().subnet;
  const std::uint64_t hi = leaves.back().subnet;
  const int shared = std::countl_zero(lo ^ hi);
  nodes_[index].prefix = truncate_to(Address128(lo, 0), shared);
  nodes_[index].series.assign(series_length_, 0);
  // Leaves are sorted, so the ones with bit shared+1 clear come first.
  const std::uint64_t split_bit = std::uint64_t{1} << (63 - shared);
  auto mid = std::partition_point(
      leaves.begin(), leaves.end(),
      [split_bit](const SubnetSeries& s) { return (s.subnet & split_bit) == 0; });
  const auto cut = static_cast<std::size_t>(mid - leaves.begin());
  const int left = build(leaves.first(cut));
  const int right = build(leaves.subspan(cut));
  nodes_[index].child[0] = left;
  nodes_[index].child[1] = right;
  return index;
}

PrefixTrie build_trie(std::vector<SubnetSeries> leaves) {
  PrefixTrie trie;
  if (leaves.empty()) return trie;
  std::sort(leaves.begin(), leaves.end(),
            [](const SubnetSeries& a, const SubnetSeries& b) {
              return a.subnet < b.subnet;
            });
  trie.series_length_ = leaves.front().series.size();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    require(leaves[i].series.size() == trie.series_length_,
            "build_trie: series length mismatch");
    require(i == 0 || leaves[i - 1].subnet != leaves[i].subnet,
            "build_trie: duplicate /64");
  }
  trie.nodes_.reserve(2 * leaves.size() - 1);
  trie.build(leaves);
  return trie;
}

namespace {

class Synthesizer {
 public:
  Synthesizer(PrefixTrie& trie, const KipConfig& cfg) : trie_(trie), cfg_(cfg) {}

  // Returns the mass handed to the parent; empty once emitted. The root
  // has parent_length -1.
  Series visit(int index, int parent_length) {
    PrefixTrie::Node& node = trie_.node(index);
    Series acc = std::move(node.series);
    if (!node.is_leaf()) {
      for (int child : node.child) {
        Series up = visit(child, node.prefix.length());
        if (!up.empty()) add_into(acc, up);
      }
    }
    // A node below the cap whose edge crosses it is judged at the
    // implicit node of exactly max_emit_length bits on that edge.
    Prefix effective = node.prefix;
    if (effective.length() > cfg_.max_emit_length && parent_length < cfg_.max_emit_length) {
      effective = truncate_to(effective.base(), cfg_.max_emit_length);
    }
    if (parent_length < 0) root_ = effective;
    if (effective.length() <= cfg_.max_emit_length &&
        series_stat(acc, cfg_.stat) >= cfg_.k) {
      emitted_.push_back({effective, std::move(acc)});
      return {};
    }
    return acc;
  }

  std::vector<std::pair<Prefix, Series>>& emitted() { return emitted_; }
  const std::optional<Prefix>& root() const { return root_; }

 private:
  PrefixTrie& trie_;
  const KipConfig& cfg_;
  std::vector<std::pair<Prefix, Series>> emitted_;
  std::optional<Prefix> root_;
};

}  // namespace

SynthesisResult synthesize_aggregates(PrefixTrie trie, const KipConfig& cfg,
                                      const TimeGrid& grid) {
  cfg.validate();
  if (grid.fenceposts() < 1) {
    throw UnsupportedWindow(
        "aggregation needs at least two intervals (no fenceposts in window)");
  }
  const auto f = static_cast<std::size_t>(grid.fenceposts());
  require(trie.empty() || trie.series_length() == f,
          "synthesize_aggregates: trie series length differs from the grid");

  SynthesisResult result;
  result.set.config = cfg;
  result.set.grid = grid;
  result.set.residual.kind = cfg.residual;
  result.residual.assign(f, 0);
  if (trie.empty()) return result;

  Synthesizer synth(trie, cfg);
  Series rest = synth.visit(trie.root(), -1);
  if (!rest.empty()) result.residual = std::move(rest);
  if (cfg.residual == ResidualKind::kRootCatchAll) {
    result.set.residual.catch_all = synth.root();
  }

  auto& emitted = synth.emitted();
  std::sort(emitted.begin(), emitted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [prefix, series] : emitted) {
    result.set.entries.push_back({prefix, series_stat(series, Stat::kMin),
                                  series_stat(series, Stat::kMedian),
                                  series_stat(series, Stat::kMax)});
    result.entry_series.push_back(std::move(series));
  }
  return result;
}

Series address_count_series(std::span<const EpisodeRow> rows,
                            const TimeGrid& grid) {
  return spanning_counts(rows, grid);
}

// File format ------------------------------------------------------------

void write_aggregate_set(std::ostream& out, const AggregateSet& set) {
  out << "# kip aggregate set\n"
      << "# version: " << set.tool_version << '\n'
      << "# k: " << set.config.k << '\n'
      << "# stat: " << to_string(set.config.stat) << '\n'
      << "# mode: " << to_string(set.config.mode) << '\n'
      << "# max-emit-length: " << set.config.max_emit_length << '\n'
      << "# grid-start: " << set.grid.start << '\n'
      << "# interval-seconds: " << set.grid.interval_seconds << '\n'
      << "# intervals: " << set.grid.intervals << '\n'
      << "# residual: " << to_string(set.residual.kind);
  if (set.residual.kind == ResidualKind::kRootCatchAll) {
    out << ' '
        << (set.residual.catch_all ? to_string(*set.residual.catch_all) : "-");
  }
  out << '\n';
  for (const AggregateEntry& e : set.entries) {
    out << to_string(e.prefix) << '\t' << e.min << '\t' << e.median << '\t'
        << e.max << '\n';
  }
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("aggregate set: invalid " + std::string(what) + " '" +
                     std::string(s) + "'");
  }
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
    if (tab == std::string_view::npos) return out;
    pos = tab + 1;
  }
}

}  // namespace

AggregateSet read_aggregate_set(std::istream& in) {
  AggregateSet set;
  std::map<std::string, std::string, std::less<>> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body = std::string_view(line).substr(1);
      std::size_t colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      std::string_view key = body.substr(0, colon);
      std::string_view value = body.substr(colon + 1);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      header.emplace(std::string(key), std::string(value));
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("aggregate set line " + std::to_string(line_no) +
                       ": expected 4 tab-separated fields");
    }
    AggregateEntry e;
    e.prefix = parse_prefix(fields[0]);
    e.min = parse_number<Count>(fields[1], "min");
    e.median = parse_number<Count>(fields[2], "median");
    e.max = parse_number<Count>(fields[3], "max");
    if (!set.entries.empty() && !(set.entries.back().prefix < e.prefix)) {
      throw ParseError("aggregate set line " + std::to_string(line_no) +
                       ": entries must be sorted and unique");
    }
    set.entries.push_back(e);
  }

  auto get = [&](std::string_view key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) {
      throw ParseError("aggregate set: missing header '" + std::string(key) + "'");
    }
    return it->second;
  };
  set.tool_version = get("version");
  set.config.k = parse_number<Count>(get("k"), "k");
  set.config.stat = stat_from_string(get("stat"));
  set.config.mode = count_mode_from_string(get("mode"));
  set.config.max_emit_length = parse_number<int>(get("max-emit-length"),
                                                 "max-emit-length");
  set.grid = TimeGrid(parse_number<std::int64_t>(get("grid-start"), "grid-start"),
                      parse_number<std::int64_t>(get("interval-seconds"),
                                                 "interval-seconds"),
                      parse_number<int>(get("intervals"), "intervals"));
  std::string_view residual = get("residual");
  std::size_t space = residual.find(' ');
  set.residual.kind = residual_kind_from_string(residual.substr(0, space));
  set.config.residual = set.residual.kind;
  if (set.residual.kind == ResidualKind::kRootCatchAll &&
      space != std::string_view::npos) {
    std::string_view target = residual.substr(space + 1);
    if (target != "-") set.residual.catch_all = parse_prefix(target);
  }
  return set;
}

}  // namespace kip
