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
#ifndef KIP_ADDRESS_H_
#define KIP_ADDRESS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace kip {

// A 128-bit IPv6 address. Bit positions are 1-based from the most
// significant bit, so bit 1 is the top bit of the first hextet and a
// "/55" prefix keeps bits 1..55.
class Address128 {
 public:
  constexpr Address128() = default;
  constexpr Address128(std::uint64_t high, std::uint64_t low)
      : high_(high), low_(low) {}

  constexpr std::uint64_t high() const { return high_; }
  constexpr std::uint64_t low() const { return low_; }

  // The 64-bit interface identifier.
  constexpr std::uint64_t iid() const { return low_; }
  // The /64 subnet identifier (network bits 1..64).
  constexpr std::uint64_t subnet64() const { return high_; }

  // Bit `position` in 1..128.
  bool bit(int position) const;

  // Byte `index` in 0..15, network order.
  std::uint8_t byte(int index) const;

  friend constexpr auto operator<=>(const Address128&,
                                    const Address128&) = default;

 private:
  std::uint64_t high_ = 0;
  std::uint64_t low_ = 0;
};

// Parses RFC 4291 text ("2001:db8::1", "::ffff:192.0.2.1"). Throws
// ParseError naming the offending token.
Address128 parse_address(std::string_view text);

// Non-throwing variant used on hot ingestion paths.
std::optional<Address128> try_parse_address(std::string_view text);

// Canonical RFC 5952 text: lowercase, no leading zeros, longest zero run
// compressed.
std::string to_string(const Address128& a);

// Number of leading bits a and b share, 0..128.
int common_prefix_len(const Address128& a, const Address128& b);

// Address with every bit after `length` cleared.
Address128 mask_to(const Address128& a, int length);

class Prefix {
 public:
  constexpr Prefix() = default;
  // Throws ContractViolation if `length` is out of range or `base` has
  // bits set past `length`.
  Prefix(const Address128& base, int length);

  const Address128& base() const { return base_; }
  int length() const { return length_; }

  bool contains(const Address128& a) const;
  bool contains(const Prefix& p) const;

  friend auto operator<=>(const Prefix&, const Prefix&) = default;

 private:
  Address128 base_;
  int length_ = 0;
};

// Zero-fills everything after `length`; 0 <= length <= 128.
Prefix truncate_to(const Address128& a, int length);

// "2001:db8:370::/55". Rejects host bits past the length.
Prefix parse_prefix(std::string_view text);
std::string to_string(const Prefix& p);

// Observation window: `intervals` bins of `interval_seconds` starting at
// `start` (UTC epoch seconds). Fenceposts are the w-1 interior boundaries.
struct TimeGrid {
  std::int64_t start = 0;
  std::int64_t interval_seconds = 3600;
  int intervals = 168;

  TimeGrid() = default;
  TimeGrid(std::int64_t start, std::int64_t interval_seconds, int intervals);

  int fenceposts() const { return intervals - 1; }
  std::int64_t end() const { return start + interval_seconds * intervals; }
  bool in_window(std::int64_t t) const { return t >= start && t < end(); }

  // Start instant of interval `index`; index == intervals gives end().
  std::int64_t interval_start(int index) const {
    return start + interval_seconds * index;
  }
  // Boundary instant between intervals p and p+1.
  std::int64_t fencepost_instant(int p) const { return interval_start(p + 1); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// floor((t - start) / i). Throws OutOfWindow outside [start, end).
int interval_of(const TimeGrid& grid, std::int64_t t);
std::optional<int> try_interval_of(const TimeGrid& grid, std::int64_t t);

struct Address128Hash {
  std::size_t operator()(const Address128& a) const noexcept {
    // splitmix-style finalizer over both halves
    std::uint64_t x = a.high() * 0x9e3779b97f4a7c15ULL ^ a.low();
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<std::size_t>(x);
  }
};

}  // namespace kip

#endif  // KIP_ADDRESS_H_
