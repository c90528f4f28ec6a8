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
#ifndef KIP_CLASSIFY_H_
#define KIP_CLASSIFY_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kip/address.h"

namespace kip {

// Structural interface-identifier classes. Detection order is the
// declaration order; kRandomizedCandidate is the fall-through.
enum class IidClass {
  kIeeeDerived,     // ff:fe in IID bytes 3-4 (modified EUI-64)
  kEmbeddedIpv4,    // IPv4 address in the low 32 bits or as decimal hextets
  kLowByte,         // IID bytes 0-5 all zero
  kPatternBytes,    // some byte value repeated at least 4 times
  kRandomizedCandidate,
};

std::string_view to_string(IidClass c);
std::optional<IidClass> iid_class_from_string(std::string_view s);

IidClass classify_iid_stateless(const Address128& a);

// Discriminating prefix length: 1 + the longest common prefix with any
// other observed address. nullopt means "no neighbour".
using Dpl = std::optional<int>;

Dpl compute_dpl(const Address128& a, std::span<const Address128> others);

// DPL of every element of a strictly increasing sequence. The nearest
// neighbour in prefix terms is always adjacent in sorted order.
std::vector<Dpl> compute_dpls_sorted(std::span<const Address128> sorted);

// Stable days: distinct active UTC days minus one. `days` holds day
// numbers (epoch seconds / 86400); duplicates are ignored.
int compute_stable_days(std::span<const std::int64_t> days);

inline std::int64_t utc_day(std::int64_t epoch_seconds) {
  return epoch_seconds >= 0 ? epoch_seconds / 86400
                            : -((-epoch_seconds + 86399) / 86400);
}

// Probability that `count` uniformly random `bits`-bit strings are
// pairwise distinct: prod_{j<count} (S - j) / S with S = 2^bits.
double distinct_probability(std::uint64_t count, int bits);

// Smallest N with distinct_probability(count, N) >= confidence.
int required_distinct_bits(std::uint64_t count, double confidence);

// Memoized required_distinct_bits at one confidence level. The table is
// filled lazily; concurrent readers are safe.
class RandomnessPolicy {
 public:
  static constexpr std::uint64_t kDefaultTableLimit = 1U << 20;

  explicit RandomnessPolicy(double confidence = 0.99,
                            std::uint64_t table_limit = kDefaultTableLimit);

  double confidence() const { return confidence_; }
  std::uint64_t table_limit() const { return table_limit_; }

  int required_bits(std::uint64_t count) const;

  // 64 + 1 + N: the largest DPL a set of `count` random IIDs in one /64
  // is expected to show at the configured confidence.
  int max_plausible_dpl(std::uint64_t count) const {
    return 64 + 1 + required_bits(count);
  }

  // Fills the table for counts 2..limit and returns a copy of it
  // (index = count; entries 0 and 1 are 0).
  std::vector<int> table(std::uint64_t limit) const;

 private:
  void extend_locked(std::uint64_t limit) const;

  double confidence_;
  std::uint64_t table_limit_;
  mutable std::mutex mu_;
  mutable std::vector<int> table_;  // table_[A] for A < table_.size()
  mutable long double log_sum_ = 0;  // log P(table_.size()-1, table_.back())
};

// True iff the largest within-set DPL is at most 64 + 1 + N(|addrs|).
// All addresses must share one /64 and there must be at least two
// distinct ones. A false result withholds the inference; it is not a
// proof that the IIDs are structured.
bool plausible_random_set(std::span<const Address128> addrs,
                          const RandomnessPolicy& policy);

}  // namespace kip

#endif  // KIP_CLASSIFY_H_
