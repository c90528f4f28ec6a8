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
#include "kip/classify.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "kip/errors.h"

namespace kip {

namespace {

// Above this count the product is evaluated as a sum of log terms.
constexpr std::uint64_t kDirectProductLimit = 1000;
constexpr int kMaxBits = 128;

long double log_distinct_probability(std::uint64_t count, int bits) {
  long double s = std::ldexp(1.0L, bits);
  long double sum = 0;
  for (std::uint64_t j = 1; j < count; ++j) {
    sum += std::log1pl(-static_cast<long double>(j) / s);
  }
  return sum;
}

bool exceeds_space(std::uint64_t count, int bits) {
  return bits < 64 && count > (std::uint64_t{1} << bits);
}

bool is_decimal_hextet(std::uint16_t h) {
  for (int shift = 12; shift >= 0; shift -= 4) {
    if (((h >> shift) & 0xf) > 9) return false;
  }
  // hex digits read as decimal: 0x0255 -> 255
  int value = ((h >> 12) & 0xf) * 1000 + ((h >> 8) & 0xf) * 100 +
              ((h >> 4) & 0xf) * 10 + (h & 0xf);
  return value <= 255;
}

}  // namespace

std::string_view to_string(IidClass c) {
  switch (c) {
    case IidClass::kIeeeDerived:
      return "ieee-derived";
    case IidClass::kEmbeddedIpv4:
      return "embedded-ipv4";
    case IidClass::kLowByte:
      return "low-byte";
    case IidClass::kPatternBytes:
      return "pattern-bytes";
    case IidClass::kRandomizedCandidate:
      return "randomized";
  }
  return "unknown";
}

std::optional<IidClass> iid_class_from_string(std::string_view s) {
  for (IidClass c :
       {IidClass::kIeeeDerived, IidClass::kEmbeddedIpv4, IidClass::kLowByte,
        IidClass::kPatternBytes, IidClass::kRandomizedCandidate}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

IidClass classify_iid_stateless(const Address128& a) {
  const std::uint64_t iid = a.iid();
  std::array<std::uint8_t, 8> bytes{};
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<std::uint8_t>(iid >> (56 - 8 * i));
  }

  if (bytes[3] == 0xff && bytes[4] == 0xfe) return IidClass::kIeeeDerived;

  // 0:0:a.b:c.d with a non-zero leading octet, or 192:168:0:1 style.
  if ((iid >> 32) == 0 && bytes[4] != 0) return IidClass::kEmbeddedIpv4;
  std::array<std::uint16_t, 4> hextets{};
  for (int i = 0; i < 4; ++i) {
    hextets[i] = static_cast<std::uint16_t>(iid >> (48 - 16 * i));
  }
  if (hextets[0] != 0 && std::all_of(hextets.begin(), hextets.end(),
                                     is_decimal_hextet)) {
    return IidClass::kEmbeddedIpv4;
  }

  if ((iid >> 16) == 0) return IidClass::kLowByte;

  for (std::uint8_t b : bytes) {
    if (std::count(bytes.begin(), bytes.end(), b) >= 4) {
      return IidClass::kPatternBytes;
    }
  }
  return IidClass::kRandomizedCandidate;
}

Dpl compute_dpl(const Address128& a, std::span<const Address128> others) {
  if (others.empty()) return std::nullopt;
  int best = 0;
  for (const Address128& o : others) {
    require(o != a, "compute_dpl: address must not appear among others");
    best = std::max(best, common_prefix_len(a, o));
  }
  return best + 1;
}

std::vector<Dpl> compute_dpls_sorted(std::span<const Address128> sorted) {
  std::vector<Dpl> out(sorted.size());
  if (sorted.size() < 2) return out;
  std::vector<int> adjacent(sorted.size() - 1);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    require(sorted[i] < sorted[i + 1],
            "compute_dpls_sorted: input must be strictly increasing");
    adjacent[i] = common_prefix_len(sorted[i], sorted[i + 1]);
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    int best = 0;
    if (i > 0) best = adjacent[i - 1];
    if (i + 1 < sorted.size()) best = std::max(best, adjacent[i]);
    out[i] = best + 1;
  }
  return out;
}

int compute_stable_days(std::span<const std::int64_t> days) {
  require(!days.empty(), "compute_stable_days: no active days");
  std::vector<std::int64_t> sorted(days.begin(), days.end());
  std::sort(sorted.begin(), sorted.end());
  auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  return static_cast<int>(distinct) - 1;
}

double distinct_probability(std::uint64_t count, int bits) {
  require(bits >= 0, "distinct_probability: negative bit length");
  if (count <= 1) return 1.0;
  if (exceeds_space(count, bits)) return 0.0;
  if (count <= kDirectProductLimit) {
    long double s = std::ldexp(1.0L, bits);
    long double p = 1;
    for (std::uint64_t j = 1; j < count; ++j) {
      p *= (s - static_cast<long double>(j)) / s;
    }
    return static_cast<double>(p);
  }
  return static_cast<double>(std::exp(log_distinct_probability(count, bits)));
}

int required_distinct_bits(std::uint64_t count, double confidence) {
  require(confidence > 0 && confidence < 1,
          "required_distinct_bits: confidence must be in (0, 1)");
  if (count <= 1) return 0;
  // distinct_probability is nondecreasing in the bit length.
  int lo = 0;
  int hi = kMaxBits;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (distinct_probability(count, mid) >= confidence) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

RandomnessPolicy::RandomnessPolicy(double confidence,
                                   std::uint64_t table_limit)
    : confidence_(confidence), table_limit_(table_limit), table_{0, 0} {
  require(confidence > 0 && confidence < 1,
          "confidence must be in (0, 1)");
}

void RandomnessPolicy::extend_locked(std::uint64_t limit) const {
  const long double log_confidence = std::log(static_cast<long double>(confidence_));
  while (table_.size() <= limit) {
    const std::uint64_t count = table_.size();
    int bits = table_.back();
    if (count <= kDirectProductLimit) {
      while (distinct_probability(count, bits) < confidence_) ++bits;
      table_.push_back(bits);
      if (count == kDirectProductLimit) {
        log_sum_ = log_distinct_probability(count, bits);
      }
      continue;
    }
    // P(A, N) = P(A-1, N) * (1 - (A-1)/2^N)
    long double candidate =
        log_sum_ + std::log1pl(-static_cast<long double>(count - 1) /
                               std::ldexp(1.0L, bits));
    while (exceeds_space(count, bits) || candidate < log_confidence) {
      ++bits;
      candidate = log_distinct_probability(count, bits);
    }
    log_sum_ = candidate;
    table_.push_back(bits);
  }
}

int RandomnessPolicy::required_bits(std::uint64_t count) const {
  if (count <= 1) return 0;
  if (count > table_limit_) return required_distinct_bits(count, confidence_);
  std::lock_guard lock(mu_);
  if (count >= table_.size()) extend_locked(count);
  return table_[count];
}

std::vector<int> RandomnessPolicy::table(std::uint64_t limit) const {
  std::lock_guard lock(mu_);
  if (limit >= table_.size()) extend_locked(limit);
  return {table_.begin(), table_.begin() + static_cast<std::ptrdiff_t>(limit + 1)};
}

bool plausible_random_set(std::span<const Address128> addrs,
                          const RandomnessPolicy& policy) {
  std::vector<Address128> sorted(addrs.begin(), addrs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  require(sorted.size() >= 2,
          "plausible_random_set: needs at least two distinct addresses");
  require(sorted.front().subnet64() == sorted.back().subnet64(),
          "plausible_random_set: addresses span more than one /64");
  int max_dpl = 0;
  for (const Dpl& d : compute_dpls_sorted(sorted)) max_dpl = std::max(max_dpl, *d);
  return max_dpl <= policy.max_plausible_dpl(sorted.size());
}

}  // namespace kip
