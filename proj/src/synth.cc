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
#include "kip/synth.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <unordered_set>

#include "kip/errors.h"
#include "kip/logio.h"

namespace kip {

std::string_view to_string(SubnetPractice p) {
  switch (p) {
    case SubnetPractice::kJpStyle:
      return "jp";
    case SubnetPractice::kDispersed:
      return "dispersed";
    case SubnetPractice::kMeeting:
      return "meeting";
  }
  return "unknown";
}

SubnetPractice subnet_practice_from_string(std::string_view s) {
  if (s == "jp") return SubnetPractice::kJpStyle;
  if (s == "dispersed") return SubnetPractice::kDispersed;
  if (s == "meeting") return SubnetPractice::kMeeting;
  throw UsageError("unknown preset '" + std::string(s) +
                   "' (expected jp, dispersed or meeting)");
}

namespace {

// mt19937_64's output sequence is fixed by the standard; the
// distributions below are written out so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }
  double exponential(double mean) { return -std::log1p(-uniform()) * mean; }

 private:
  std::mt19937_64 engine_;
};

constexpr std::uint64_t kIspBase = 0x2400000000000000ULL;  // 2400::/12
constexpr std::uint64_t kRfc4941Bit = std::uint64_t{1} << 57;  // IID bit 7

std::uint64_t random_48(Rng& rng, std::unordered_set<std::uint64_t>& used) {
  while (true) {
    std::uint64_t p48 = kIspBase | ((rng.bits() & ((std::uint64_t{1} << 36) - 1)) << 16);
    if (used.insert(p48).second) return p48;
  }
}

std::vector<std::uint64_t> allocate_subnets(const SynthParams& params, Rng& rng,
                                            std::size_t count) {
  std::vector<std::uint64_t> out;
  std::unordered_set<std::uint64_t> used;
  switch (params.practice) {
    case SubnetPractice::kJpStyle:
      for (std::size_t i = 0; i < count; ++i) out.push_back(random_48(rng, used));
      break;
    case SubnetPractice::kDispersed: {
      std::vector<std::uint64_t> p48s((count + 3) / 4);
      for (auto& p : p48s) p = random_48(rng, used);
      std::unordered_set<std::uint64_t> taken;
      while (out.size() < count) {
        std::uint64_t s = p48s[rng.below(p48s.size())] | (rng.bits() & 0xffff);
        if (taken.insert(s).second) out.push_back(s);
      }
      break;
    }
    case SubnetPractice::kMeeting:
      out = {0x20010db803700000ULL, 0x20010db803700128ULL, 0x20010db803700228ULL};
      break;
  }
  return out;
}

}  // namespace

Scenario generate(const SynthParams& params) {
  require(params.max_hosts_per_subnet >= 1, "max hosts per subnet must be >= 1");
  require(params.mean_lifetime_hours > 0, "address lifetime must be positive");
  require(params.activity_per_hour > 0 || params.activity_per_address > 0,
          "activity rate must be positive");
  Scenario s;
  s.grid = params.grid;
  s.params = params;
  if (params.hosts == 0) return s;

  Rng rng(params.seed);
  // Host -> subnet slot.
  std::vector<std::size_t> slot(params.hosts);
  std::size_t subnet_count = 0;
  if (params.practice == SubnetPractice::kMeeting) {
    subnet_count = 3;
    for (auto& h : slot) h = rng.below(3);
  } else {
    for (std::size_t h = 0; h < params.hosts;) {
      std::size_t take = 1 + rng.below(static_cast<std::uint64_t>(params.max_hosts_per_subnet));
      for (std::size_t i = 0; i < take && h < params.hosts; ++i) slot[h++] = subnet_count;
      ++subnet_count;
    }
  }
  const std::vector<std::uint64_t> subnets = allocate_subnets(params, rng, subnet_count);

  const double life_mean = params.mean_lifetime_hours * 3600;
  const double window = static_cast<double>(params.grid.end() - params.grid.start);
  const std::int64_t horizon = params.grid.end() + params.grid.interval_seconds;
  std::unordered_set<Address128, Address128Hash> seen;

  for (std::size_t h = 0; h < params.hosts; ++h) {
    GroundTruthHost host;
    host.subnet = Prefix(Address128(subnets[slot[h]], 0), 64);
    double on = static_cast<double>(params.grid.start) - rng.uniform() * life_mean +
                rng.uniform() * window * 0.5;
    while (on < static_cast<double>(horizon)) {
      if (params.max_addresses_per_host > 0 &&
          static_cast<int>(host.assignments.size()) >= params.max_addresses_per_host) {
        break;
      }
      const double life = std::max(60.0, life_mean * (0.5 + rng.uniform()));
      Assignment a;
      do {
        a.address = Address128(subnets[slot[h]], rng.bits() & ~kRfc4941Bit);
      } while (!seen.insert(a.address).second);
      a.on = static_cast<std::int64_t>(std::floor(on));
      a.off = static_cast<std::int64_t>(std::floor(on + life));
      if (params.activity_per_address > 0) {
        for (int i = 0; i < params.activity_per_address; ++i) {
          a.activity.push_back(a.on + static_cast<std::int64_t>(
                                          rng.below(static_cast<std::uint64_t>(a.off - a.on))));
        }
      } else {
        const double mean_gap = 3600.0 / params.activity_per_hour;
        for (double t = on + rng.exponential(mean_gap); t < on + life;
             t += rng.exponential(mean_gap)) {
          auto instant = static_cast<std::int64_t>(std::floor(t));
          if (instant >= a.on && instant < a.off) a.activity.push_back(instant);
        }
      }
      std::sort(a.activity.begin(), a.activity.end());
      a.activity.erase(std::unique(a.activity.begin(), a.activity.end()),
                       a.activity.end());
      host.assignments.push_back(std::move(a));
      if (rng.uniform() < params.gap_probability) {
        on = on + life + rng.exponential(params.mean_gap_hours * 3600);
      } else {
        on = on + life * (1 - params.overlap_fraction * rng.uniform());
      }
    }
    s.hosts.push_back(std::move(host));
  }
  return s;
}

std::vector<ActivityEvent> scenario_events(const Scenario& s) {
  std::vector<ActivityEvent> events;
  for (const GroundTruthHost& h : s.hosts) {
    for (const Assignment& a : h.assignments) {
      for (std::int64_t t : a.activity) events.push_back({a.address, t});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const ActivityEvent& x, const ActivityEvent& y) {
              return x.time != y.time ? x.time < y.time : x.address < y.address;
            });
  return events;
}

void write_log(std::ostream& out, const Scenario& s) {
  std::string line;
  for (const ActivityEvent& e : scenario_events(s)) {
    line = std::to_string(e.time);
    line += '\t';
    line += to_string(e.address);
    line += '\n';
    out << line;
  }
}

void write_manifest(std::ostream& out, const Scenario& s) {
  const SynthParams& p = s.params;
  std::size_t addresses = 0;
  for (const auto& h : s.hosts) addresses += h.assignments.size();
  out << "# kip synthetic scenario\n"
      << "seed: " << p.seed << '\n'
      << "preset: " << to_string(p.practice) << '\n'
      << "hosts: " << p.hosts << '\n'
      << "max-hosts-per-subnet: " << p.max_hosts_per_subnet << '\n'
      << "mean-lifetime-hours: " << p.mean_lifetime_hours << '\n'
      << "overlap-fraction: " << p.overlap_fraction << '\n'
      << "gap-probability: " << p.gap_probability << '\n'
      << "mean-gap-hours: " << p.mean_gap_hours << '\n'
      << "activity-per-hour: " << p.activity_per_hour << '\n'
      << "max-addresses-per-host: " << p.max_addresses_per_host << '\n'
      << "activity-per-address: " << p.activity_per_address << '\n'
      << "grid-start: " << s.grid.start << '\n'
      << "interval-seconds: " << s.grid.interval_seconds << '\n'
      << "intervals: " << s.grid.intervals << '\n'
      << "addresses: " << addresses << '\n';
}

Truth oracle_truth(const std::vector<const Assignment*>& spans,
                   const TimeGrid& grid) {
  std::vector<std::int64_t> ons;
  std::vector<std::int64_t> offs;
  ons.reserve(spans.size());
  offs.reserve(spans.size());
  for (const Assignment* a : spans) {
    ons.push_back(a->on);
    offs.push_back(a->off);
  }
  std::sort(ons.begin(), ons.end());
  std::sort(offs.begin(), offs.end());
  // Spans are half-open, so at instant x the count is on <= x < off.
  auto concurrent = [&](std::int64_t x) {
    auto started = std::upper_bound(ons.begin(), ons.end(), x) - ons.begin();
    auto ended = std::upper_bound(offs.begin(), offs.end(), x) - offs.begin();
    return static_cast<Count>(started - ended);
  };

  Truth truth;
  truth.interval.assign(static_cast<std::size_t>(grid.intervals), 0);
  truth.fencepost.assign(static_cast<std::size_t>(std::max(0, grid.fenceposts())), 0);
  for (int t = 0; t < grid.intervals; ++t) {
    const std::int64_t a = grid.interval_start(t);
    const std::int64_t b = grid.interval_start(t + 1);
    Count best = concurrent(a);
    // The count only rises at span starts, so those are the candidates.
    for (auto it = std::upper_bound(ons.begin(), ons.end(), a);
         it != ons.end() && *it <= b; ++it) {
      best = std::max(best, concurrent(*it));
    }
    truth.interval[t] = best;
  }
  for (int p = 0; p < grid.fenceposts(); ++p) {
    truth.fencepost[p] = concurrent(grid.fencepost_instant(p));
  }
  return truth;
}

Truth oracle_truth(const Scenario& s) {
  std::vector<const Assignment*> spans;
  for (const auto& h : s.hosts) {
    for (const auto& a : h.assignments) spans.push_back(&a);
  }
  return oracle_truth(spans, s.grid);
}

std::map<std::uint64_t, Truth> oracle_truth_by_subnet(const Scenario& s) {
  std::map<std::uint64_t, std::vector<const Assignment*>> grouped;
  for (const auto& h : s.hosts) {
    for (const auto& a : h.assignments) grouped[a.address.subnet64()].push_back(&a);
  }
  std::map<std::uint64_t, Truth> out;
  for (const auto& [subnet, spans] : grouped) out[subnet] = oracle_truth(spans, s.grid);
  return out;
}

void write_truth(std::ostream& out, const Scenario& s, const Truth& truth) {
  out << "# kip synthetic truth\n"
      << "# seed: " << s.params.seed << '\n'
      << "# interval\n";
  for (std::size_t t = 0; t < truth.interval.size(); ++t) {
    out << t << '\t' << truth.interval[t] << '\n';
  }
  out << "# fencepost\n";
  for (std::size_t p = 0; p < truth.fencepost.size(); ++p) {
    out << p << '\t' << truth.fencepost[p] << '\n';
  }
}

namespace {

void compare(const Series& bound, const Series& truth, const std::string& scope,
             const char* name, SoundnessReport& report) {
  for (std::size_t i = 0; i < bound.size(); ++i) {
    const Count t = i < truth.size() ? truth[i] : 0;
    if (bound[i] > t) {
      report.violations.push_back({scope, name, static_cast<int>(i), bound[i], t});
    }
  }
}

double ratio(const Series& bound, const Series& truth) {
  double b = 0;
  double t = 0;
  for (Count c : bound) b += c;
  for (Count c : truth) t += c;
  return t > 0 ? b / t : 1.0;
}

}  // namespace

SoundnessReport check_soundness(const Scenario& s, const NetworkAnalysis& analysis) {
  require(s.grid == analysis.grid, "check_soundness: grids differ");
  SoundnessReport report;
  const auto per_subnet = oracle_truth_by_subnet(s);
  const Truth network = oracle_truth(s);
  const auto w = static_cast<std::size_t>(s.grid.intervals);
  const auto f = static_cast<std::size_t>(std::max(0, s.grid.fenceposts()));
  const Truth none{Series(w, 0), Series(f, 0)};

  Series interval_truth_sum(w, 0);
  Series prefix_truth(f, 0);
  for (const auto& [subnet, truth] : per_subnet) {
    add_into(interval_truth_sum, truth.interval);
    for (std::size_t p = 0; p < f; ++p) prefix_truth[p] += truth.fencepost[p] > 0 ? 1 : 0;
  }

  for (const SubnetAnalysis& sub : analysis.subnets) {
    auto it = per_subnet.find(sub.subnet);
    const Truth& truth = it == per_subnet.end() ? none : it->second;
    const std::string scope = to_string(Prefix(Address128(sub.subnet, 0), 64));
    compare(sub.interval_bounds, truth.interval, scope, "interval", report);
    compare(sub.address_series, truth.fencepost, scope, "address", report);
    Series occupied(f, 0);
    for (std::size_t p = 0; p < f; ++p) occupied[p] = truth.fencepost[p] > 0 ? 1 : 0;
    compare(sub.prefix_series, occupied, scope, "prefix", report);
    for (std::size_t t = 0; t < w; ++t) {
      if (sub.interval_bounds[t] > 0 && sub.interval_bounds[t] == truth.interval[t]) {
        ++report.tight_indices;
      }
    }
  }
  compare(analysis.interval_bounds, interval_truth_sum, "network", "interval", report);
  compare(analysis.address_series, network.fencepost, "network", "address", report);
  compare(analysis.prefix_series, prefix_truth, "network", "prefix", report);
  report.fencepost_tightness = ratio(analysis.address_series, network.fencepost);
  report.interval_tightness = ratio(analysis.interval_bounds, interval_truth_sum);
  return report;
}

}  // namespace kip
