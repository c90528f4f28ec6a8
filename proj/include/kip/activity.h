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
#ifndef KIP_ACTIVITY_H_
#define KIP_ACTIVITY_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kip/address.h"

namespace kip {

// Per-interval or per-fencepost counters. One element type serves the
// 0/1 series of a single /64 and network-wide accumulations.
using Count = std::uint32_t;
using Series = std::vector<Count>;

// Fixed-size bitmap over the intervals of a window.
class IntervalBitmap {
 public:
  IntervalBitmap() = default;
  explicit IntervalBitmap(int size)
      : size_(size), words_(static_cast<std::size_t>((size + 63) / 64)) {}

  int size() const { return size_; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool any() const;
  int count() const;
  // Index of the lowest/highest set bit, -1 when empty.
  int first() const;
  int last() const;
  std::vector<int> indices() const;

  friend bool operator==(const IntervalBitmap&, const IntervalBitmap&) = default;

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ActivityEvent {
  Address128 address;
  std::int64_t time = 0;
};

// One observed address and the intervals in which it was active.
struct ActivityRow {
  Address128 address;
  IntervalBitmap active;
};

enum class EpisodeKind { kShort, kSpan };

// Inferred assignment from the first to the last active interval.
struct EpisodeRow {
  Address128 address;
  int first = 0;
  int last = 0;

  EpisodeKind kind() const {
    return first == last ? EpisodeKind::kShort : EpisodeKind::kSpan;
  }
  // Matrix mark at interval t: 'X', '>', '<', '@', or 0 outside.
  char mark(int t) const;
};

// Accumulates events into per-address activity bitmaps. Also records the
// distinct UTC days each address was seen on.
class ActivityIndex {
 public:
  explicit ActivityIndex(const TimeGrid& grid) : grid_(grid) {}

  const TimeGrid& grid() const { return grid_; }

  // Throws OutOfWindow for instants outside the grid.
  void add(const Address128& a, std::int64_t t);

  std::size_t address_count() const { return entries_.size(); }

  struct Entry {
    Address128 address;
    IntervalBitmap active;
    std::vector<std::int64_t> days;  // distinct, insertion order
  };

  // Entries sorted by address; consumes the index.
  std::vector<Entry> take_sorted() &&;

 private:
  TimeGrid grid_;
  std::unordered_map<Address128, std::size_t, Address128Hash> slot_;
  std::vector<Entry> entries_;
};

// Rows grouped by /64 (keyed by the subnet64 value), each group sorted by
// address. Events must lie in the window.
std::map<std::uint64_t, std::vector<ActivityRow>> build_rows(
    std::span<const ActivityEvent> events, const TimeGrid& grid);

// Bridges every quiet interval between the first and last activity.
EpisodeRow mark_episodes(const ActivityRow& row);

// Unbridged fallback: one short episode per active interval.
std::vector<EpisodeRow> split_episodes(const ActivityRow& row);

// Per-interval lower bound on simultaneously assigned addresses:
// count('@') + max(count('>'), count('<')) + [any 'X' and no '>'/'<'].
Series interval_lower_bounds(std::span<const EpisodeRow> rows,
                             const TimeGrid& grid);

// Number of episodes spanning each fencepost p (first <= p < last).
Series spanning_counts(std::span<const EpisodeRow> rows, const TimeGrid& grid);

// 1 at fencepost p iff some episode spans it. Length w-1.
Series fencepost_series(std::span<const EpisodeRow> rows, const TimeGrid& grid);

// Elementwise sum; every series must have `length` elements.
Series accumulate(std::span<const Series> series, std::size_t length);
void add_into(Series& acc, const Series& x);

enum class Stat { kMin, kMax, kMedian };

std::string_view to_string(Stat s);
Stat stat_from_string(std::string_view s);

// Median of an even-length series is the lower middle value.
Count series_stat(const Series& series, Stat stat);

// Matrix rendering. Background is '-' with '|' every 24th and '+' every
// 8th column.
char background_char(int index);
std::string render_background(int width);
std::string render_raw_row(const IntervalBitmap& active);
// Marks of all episodes of one address overlaid on the background.
std::string render_episode_row(std::span<const EpisodeRow> episodes,
                               int width);
// Single digits; when any value is >= 10 every value is right-aligned to
// the widest one and separated by a space.
std::string render_totals(const Series& totals);
// '!' where the value is non-zero, '-' otherwise, then a trailing '?'
// for the undecidable moment after the final interval.
std::string render_fenceposts(const Series& fenceposts);

}  // namespace kip

#endif  // KIP_ACTIVITY_H_
