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
#include "kip/activity.h"

#include <algorithm>
#include <bit>

#include "kip/classify.h"
#include "kip/errors.h"

namespace kip {

bool IntervalBitmap::any() const {
  return std::any_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w != 0; });
}

int IntervalBitmap::count() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

int IntervalBitmap::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) {
      return static_cast<int>(i * 64) + std::countr_zero(words_[i]);
    }
  }
  return -1;
}

int IntervalBitmap::last() const {
  for (std::size_t i = words_.size(); i-- > 0;) {
    if (words_[i] != 0) {
      return static_cast<int>(i * 64) + 63 - std::countl_zero(words_[i]);
    }
  }
  return -1;
}

std::vector<int> IntervalBitmap::indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      out.push_back(static_cast<int>(i * 64) + std::countr_zero(w));
      w &= w - 1;
    }
  }
  return out;
}

char EpisodeRow::mark(int t) const {
  if (t < first || t > last) return 0;
  if (first == last) return 'X';
  if (t == first) return '>';
  if (t == last) return '<';
  return '@';
}

void ActivityIndex::add(const Address128& a, std::int64_t t) {
  const int interval = interval_of(grid_, t);
  auto [it, inserted] = slot_.try_emplace(a, entries_.size());
  if (inserted) {
    entries_.push_back({a, IntervalBitmap(grid_.intervals), {}});
  }
  Entry& e = entries_[it->second];
  e.active.set(interval);
  const std::int64_t day = utc_day(t);
  if (std::find(e.days.rbegin(), e.days.rend(), day) == e.days.rend()) {
    e.days.push_back(day);
  }
}

std::vector<ActivityIndex::Entry> ActivityIndex::take_sorted() && {
  slot_.clear();
  std::vector<Entry> out = std::move(entries_);
  std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
    return x.address < y.address;
  });
  return out;
}

std::map<std::uint64_t, std::vector<ActivityRow>> build_rows(
    std::span<const ActivityEvent> events, const TimeGrid& grid) {
  ActivityIndex index(grid);
  for (const ActivityEvent& e : events) index.add(e.address, e.time);
  std::map<std::uint64_t, std::vector<ActivityRow>> out;
  for (auto& entry : std::move(index).take_sorted()) {
    out[entry.address.subnet64()].push_back(
        {entry.address, std::move(entry.active)});
  }
  return out;
}

EpisodeRow mark_episodes(const ActivityRow& row) {
  require(row.active.any(), "mark_episodes: row has no activity");
  return {row.address, row.active.first(), row.active.last()};
}

std::vector<EpisodeRow> split_episodes(const ActivityRow& row) {
  require(row.active.any(), "split_episodes: row has no activity");
  std::vector<EpisodeRow> out;
  for (int t : row.active.indices()) out.push_back({row.address, t, t});
  return out;
}

namespace {

void check_episode(const EpisodeRow& r, const TimeGrid& grid) {
  require(r.first >= 0 && r.first <= r.last && r.last < grid.intervals,
          "episode outside the window");
}

}  // namespace

Series interval_lower_bounds(std::span<const EpisodeRow> rows,
                             const TimeGrid& grid) {
  const auto w = static_cast<std::size_t>(grid.intervals);
  // '@' via a difference array; the others are point marks.
  std::vector<std::int64_t> at_diff(w + 1, 0);
  std::vector<Count> starts(w, 0);
  std::vector<Count> ends(w, 0);
  std::vector<Count> shorts(w, 0);
  for (const EpisodeRow& r : rows) {
    check_episode(r, grid);
    if (r.first == r.last) {
      ++shorts[r.first];
      continue;
    }
    ++starts[r.first];
    ++ends[r.last];
    if (r.last - r.first >= 2) {
      ++at_diff[r.first + 1];
      --at_diff[r.last];
    }
  }
  Series totals(w, 0);
  std::int64_t at = 0;
  for (std::size_t t = 0; t < w; ++t) {
    at += at_diff[t];
    Count total = static_cast<Count>(at) + std::max(starts[t], ends[t]);
    if (shorts[t] > 0 && starts[t] == 0 && ends[t] == 0) ++total;
    totals[t] = total;
  }
  return totals;
}

Series spanning_counts(std::span<const EpisodeRow> rows, const TimeGrid& grid) {
  const int f = grid.fenceposts();
  if (f <= 0) return {};
  std::vector<std::int64_t> diff(static_cast<std::size_t>(f) + 1, 0);
  for (const EpisodeRow& r : rows) {
    check_episode(r, grid);
    if (r.first == r.last) continue;
    // fenceposts first .. last-1
    ++diff[r.first];
    --diff[r.last];
  }
  Series out(static_cast<std::size_t>(f), 0);
  std::int64_t running = 0;
  for (int p = 0; p < f; ++p) {
    running += diff[p];
    out[p] = static_cast<Count>(running);
  }
  return out;
}

Series fencepost_series(std::span<const EpisodeRow> rows, const TimeGrid& grid) {
  Series out = spanning_counts(rows, grid);
  for (Count& c : out) c = c > 0 ? 1 : 0;
  return out;
}

void add_into(Series& acc, const Series& x) {
  require(acc.size() == x.size(), "accumulate: series length mismatch");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

Series accumulate(std::span<const Series> series, std::size_t length) {
  Series acc(length, 0);
  for (const Series& s : series) add_into(acc, s);
  return acc;
}

std::string_view to_string(Stat s) {
  switch (s) {
    case Stat::kMin:
      return "min";
    case Stat::kMax:
      return "max";
    case Stat::kMedian:
      return "median";
  }
  return "unknown";
}

Stat stat_from_string(std::string_view s) {
  if (s == "min") return Stat::kMin;
  if (s == "max") return Stat::kMax;
  if (s == "median") return Stat::kMedian;
  throw UsageError("unknown statistic '" + std::string(s) +
                   "' (expected min, max or median)");
}

Count series_stat(const Series& series, Stat stat) {
  require(!series.empty(), "series_stat: empty series");
  switch (stat) {
    case Stat::kMin:
      return *std::min_element(series.begin(), series.end());
    case Stat::kMax:
      return *std::max_element(series.begin(), series.end());
    case Stat::kMedian: {
      Series copy = series;
      auto mid = copy.begin() + static_cast<std::ptrdiff_t>((copy.size() - 1) / 2);
      std::nth_element(copy.begin(), mid, copy.end());
      return *mid;
    }
  }
  return 0;
}

char background_char(int index) {
  if (index % 24 == 0) return '|';
  if (index % 8 == 0) return '+';
  return '-';
}

std::string render_background(int width) {
  std::string out(static_cast<std::size_t>(width), '-');
  for (int i = 0; i < width; ++i) out[i] = background_char(i);
  return out;
}

std::string render_raw_row(const IntervalBitmap& active) {
  std::string out = render_background(active.size());
  for (int t : active.indices()) out[t] = '#';
  return out;
}

std::string render_episode_row(std::span<const EpisodeRow> episodes,
                               int width) {
  std::string out = render_background(width);
  for (const EpisodeRow& e : episodes) {
    for (int t = e.first; t <= e.last && t < width; ++t) out[t] = e.mark(t);
  }
  return out;
}

std::string render_totals(const Series& totals) {
  Count widest = totals.empty() ? 0 : *std::max_element(totals.begin(), totals.end());
  if (widest < 10) {
    std::string out;
    out.reserve(totals.size());
    for (Count c : totals) out += static_cast<char>('0' + c);
    return out;
  }
  const std::size_t cell = std::to_string(widest).size();
  std::string out;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (i > 0) out += ' ';
    std::string v = std::to_string(totals[i]);
    out.append(cell - v.size(), ' ');
    out += v;
  }
  return out;
}

std::string render_fenceposts(const Series& fenceposts) {
  std::string out;
  out.reserve(fenceposts.size() + 1);
  for (Count c : fenceposts) out += c > 0 ? '!' : '-';
  out += '?';
  return out;
}

}  // namespace kip
