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
#include "kip/analysis.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

#include "kip/anonymize.h"
#include "kip/errors.h"

namespace kip {

namespace {

bool bridges(const AddressRecord& r, const SubnetAnalysis& s,
             const AnalysisOptions& options) {
  if (options.bridge_all_classes) return true;
  return s.bridged && r.iid_class == IidClass::kRandomizedCandidate;
}

void append_episodes(const AddressRecord& r, bool bridge,
                     std::vector<EpisodeRow>& out) {
  ActivityRow row{r.address, r.active};
  if (bridge) {
    out.push_back(mark_episodes(row));
  } else {
    for (EpisodeRow& e : split_episodes(row)) out.push_back(e);
  }
}

}  // namespace

NetworkAnalysis analyze(ActivityIndex&& index, const RandomnessPolicy& policy,
                        const AnalysisOptions& options) {
  NetworkAnalysis out;
  out.grid = index.grid();
  const TimeGrid& grid = out.grid;
  const auto w = static_cast<std::size_t>(grid.intervals);
  const auto f = static_cast<std::size_t>(grid.fenceposts());
  out.interval_bounds.assign(w, 0);
  out.prefix_series.assign(f, 0);
  out.address_series.assign(f, 0);

  std::vector<ActivityIndex::Entry> entries = std::move(index).take_sorted();
  {
    std::vector<Address128> sorted;
    sorted.reserve(entries.size());
    for (const auto& e : entries) sorted.push_back(e.address);
    std::vector<Dpl> dpls = compute_dpls_sorted(sorted);
    out.records.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto& e = entries[i];
      out.records.push_back({e.address, classify_iid_stateless(e.address),
                             dpls[i], compute_stable_days(e.days),
                             std::move(e.active)});
    }
  }
  entries.clear();
  entries.shrink_to_fit();

  std::vector<Address128> randomized;
  std::vector<EpisodeRow> episodes;
  for (std::size_t begin = 0; begin < out.records.size();) {
    const std::uint64_t subnet = out.records[begin].address.subnet64();
    std::size_t end = begin;
    while (end < out.records.size() &&
           out.records[end].address.subnet64() == subnet) {
      ++end;
    }
    SubnetAnalysis s;
    s.subnet = subnet;
    s.first_record = begin;
    s.record_count = end - begin;

    randomized.clear();
    for (std::size_t i = begin; i < end; ++i) {
      if (out.records[i].iid_class == IidClass::kRandomizedCandidate) {
        randomized.push_back(out.records[i].address);
      }
    }
    // A lone randomized address has nothing to collide with.
    s.bridged = randomized.size() == 1 ||
                (randomized.size() >= 2 && plausible_random_set(randomized, policy));

    episodes.clear();
    for (std::size_t i = begin; i < end; ++i) {
      append_episodes(out.records[i], bridges(out.records[i], s, options),
                      episodes);
    }
    s.interval_bounds = interval_lower_bounds(episodes, grid);
    s.address_series = spanning_counts(episodes, grid);
    s.prefix_series = s.address_series;
    for (Count& c : s.prefix_series) c = c > 0 ? 1 : 0;

    add_into(out.interval_bounds, s.interval_bounds);
    add_into(out.prefix_series, s.prefix_series);
    add_into(out.address_series, s.address_series);
    out.subnets.push_back(std::move(s));
    begin = end;
  }
  return out;
}

std::vector<EpisodeRow> subnet_episodes(const NetworkAnalysis& analysis,
                                        const SubnetAnalysis& subnet,
                                        const AnalysisOptions& options) {
  std::vector<EpisodeRow> out;
  for (const AddressRecord& r : analysis.records_of(subnet)) {
    append_episodes(r, bridges(r, subnet, options), out);
  }
  return out;
}

std::vector<SubnetSeries> subnet_series(const NetworkAnalysis& analysis,
                                        CountMode mode) {
  std::vector<SubnetSeries> out;
  out.reserve(analysis.subnets.size());
  for (const SubnetAnalysis& s : analysis.subnets) {
    out.push_back({s.subnet, mode == CountMode::kPrefixCount ? s.prefix_series
                                                            : s.address_series});
  }
  return out;
}

SynthesisResult aggregate(const NetworkAnalysis& analysis, const KipConfig& cfg) {
  cfg.validate();
  return synthesize_aggregates(build_trie(subnet_series(analysis, cfg.mode)), cfg,
                               analysis.grid);
}

void write_classification(std::ostream& out, const NetworkAnalysis& analysis) {
  for (const AddressRecord& r : analysis.records) {
    out << to_string(r.address) << '\t' << to_string(r.iid_class) << '\t';
    if (r.dpl) {
      out << *r.dpl;
    } else {
      out << '-';
    }
    out << '\t' << r.stable_days << '\n';
  }
}

NetworkSummary summarize(const NetworkAnalysis& analysis) {
  NetworkSummary s;
  s.active_addresses = analysis.records.size();
  s.active_64s = analysis.subnets.size();
  std::uint64_t last48 = 0;
  for (std::size_t i = 0; i < analysis.subnets.size(); ++i) {
    const std::uint64_t p48 = analysis.subnets[i].subnet >> 16;
    if (i == 0 || p48 != last48) ++s.active_48s;
    last48 = p48;
  }
  if (s.active_64s == 0) return s;
  if (!analysis.prefix_series.empty()) {
    s.prefix_bound_max = series_stat(analysis.prefix_series, Stat::kMax);
    s.prefix_bound_median = series_stat(analysis.prefix_series, Stat::kMedian);
  }
  s.address_bound_max = series_stat(analysis.interval_bounds, Stat::kMax);
  s.address_bound_median = series_stat(analysis.interval_bounds, Stat::kMedian);
  return s;
}

void write_summary(std::ostream& out, const NetworkSummary& s) {
  out << "# kip network summary\n"
      << "active_48s\t" << s.active_48s << '\n'
      << "active_64s\t" << s.active_64s << '\n'
      << "active_addresses\t" << s.active_addresses << '\n'
      << "prefix_bound_max\t" << s.prefix_bound_max << '\n'
      << "prefix_bound_median\t" << s.prefix_bound_median << '\n'
      << "address_bound_max\t" << s.address_bound_max << '\n'
      << "address_bound_median\t" << s.address_bound_median << '\n';
}

Weighting weighting_from_string(std::string_view s) {
  if (s == "aggregate") return Weighting::kPerAggregate;
  if (s == "covered64") return Weighting::kPerCovered64;
  throw UsageError("unknown weighting '" + std::string(s) +
                   "' (expected aggregate or covered64)");
}

std::vector<LengthRow> eval_lengths(const AggregateSet& set, Weighting weighting,
                                    std::span<const std::uint64_t> active_64s) {
  std::map<int, std::uint64_t> histogram;
  if (weighting == Weighting::kPerAggregate) {
    for (const AggregateEntry& e : set.entries) ++histogram[e.prefix.length()];
  } else {
    PrefixMatcher matcher = build_matcher(set);
    for (std::uint64_t subnet : active_64s) {
      if (auto m = matcher.longest_match(Address128(subnet, 0))) {
        ++histogram[m->length()];
      }
    }
  }
  std::uint64_t total = 0;
  for (const auto& [length, count] : histogram) total += count;
  std::vector<LengthRow> rows;
  std::uint64_t running = 0;
  for (const auto& [length, count] : histogram) {
    running += count;
    rows.push_back({length, count,
                    static_cast<double>(running) / static_cast<double>(total)});
  }
  return rows;
}

void write_lengths(std::ostream& out, std::span<const LengthRow> rows) {
  char buf[32];
  for (const LengthRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.cumulative);
    out << r.length << '\t' << r.count << '\t' << buf << '\n';
  }
}

MatrixView matrix_view_from_string(std::string_view s) {
  if (s == "raw") return MatrixView::kRaw;
  if (s == "inferred") return MatrixView::kInferred;
  throw UsageError("unknown view '" + std::string(s) +
                   "' (expected raw or inferred)");
}

namespace {

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string axis_tens(int width) {
  std::string out(static_cast<std::size_t>(width), ' ');
  for (int t = 0; t < width; t += 10) out[t] = static_cast<char>('0' + (t / 10) % 10);
  return out;
}

std::string axis_ones(int width) {
  std::string out(static_cast<std::size_t>(width), ' ');
  for (int t = 0; t < width; ++t) out[t] = static_cast<char>('0' + t % 10);
  return out;
}

}  // namespace

std::string render_subnet_matrix(const NetworkAnalysis& analysis,
                                 const SubnetAnalysis& subnet, MatrixView view,
                                 const AnalysisOptions& options) {
  const int w = analysis.grid.intervals;
  if (view == MatrixView::kInferred && analysis.grid.fenceposts() < 1) {
    throw UnsupportedWindow("inferred matrix needs at least two intervals");
  }
  auto records = analysis.records_of(subnet);
  std::size_t label = view == MatrixView::kRaw ? 7 : 9;  // "address", "fencepost"
  for (const AddressRecord& r : records) {
    label = std::max(label, to_string(r.address).size());
  }

  std::string out;
  const Prefix p64(Address128(subnet.subnet, 0), 64);
  out += to_string(p64) + " " + std::to_string(records.size()) +
         (records.size() == 1 ? " address" : " addresses") +
         (subnet.bridged ? ", bridged" : ", not bridged") + "\n";

  if (view == MatrixView::kRaw) {
    const std::string lead = pad_right("address", label) + " DPL SD ";
    out += rstrip(lead + axis_tens(w)) + "\n";
    out += rstrip(std::string(lead.size(), ' ') + axis_ones(w)) + "\n";
    for (const AddressRecord& r : records) {
      out += pad_right(to_string(r.address), label) + " " +
             pad_left(r.dpl ? std::to_string(*r.dpl) : "-", 3) + " " +
             pad_left(std::to_string(r.stable_days), 2) + " " +
             render_raw_row(r.active) + "\n";
    }
    return out;
  }

  const std::string blank(label + 1, ' ');
  out += rstrip(blank + axis_tens(w)) + "\n";
  out += rstrip(blank + axis_ones(w)) + "\n";
  std::vector<const AddressRecord*> order;
  for (const AddressRecord& r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [w](const AddressRecord* a, const AddressRecord* b) {
                     // At the first differing interval the active row leads.
                     for (int t = 0; t < w; ++t) {
                       if (a->active.test(t) != b->active.test(t)) return a->active.test(t);
                     }
                     return false;
                   });
  std::vector<EpisodeRow> episodes;
  for (const AddressRecord* r : order) {
    episodes.clear();
    append_episodes(*r, bridges(*r, subnet, options), episodes);
    out += pad_right(to_string(r->address), label) + " " +
           render_episode_row(episodes, w) + "\n";
  }
  out += pad_right("total", label) + " " + render_totals(subnet.interval_bounds) + "\n";
  out += blank + render_background(w) + "\n";
  out += pad_right("fencepost", label) + " " + render_fenceposts(subnet.prefix_series) + "\n";
  return out;
}

}  // namespace kip
