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
#include "kip/address.h"

#include <array>
#include <bit>
#include <charconv>

#include "kip/errors.h"

namespace kip {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

struct ParseFailure {
  std::string_view token;
  const char* reason;
};

// Parses a dotted quad into two hextets.
bool parse_dotted_quad(std::string_view s, std::uint16_t* out) {
  std::array<unsigned, 4> octets{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (pos >= s.size() || s[pos] != '.') return false;
      ++pos;
    }
    std::size_t begin = pos;
    unsigned v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      v = v * 10 + static_cast<unsigned>(s[pos] - '0');
      if (pos - begin >= 3 || v > 255) return false;
      ++pos;
    }
    if (pos == begin) return false;
    if (pos - begin > 1 && s[begin] == '0') return false;  // no octal-ish
    octets[i] = v;
  }
  if (pos != s.size()) return false;
  out[0] = static_cast<std::uint16_t>(octets[0] << 8 | octets[1]);
  out[1] = static_cast<std::uint16_t>(octets[2] << 8 | octets[3]);
  return true;
}

// Splits `s` on ':' into hextets; the final piece may be a dotted quad.
// Returns the number of hextets written or a failure.
std::optional<int> parse_groups(std::string_view s, std::uint16_t* out,
                                int max_groups, bool allow_dotted_tail,
                                ParseFailure* failure) {
  if (s.empty()) return 0;
  int n = 0;
  std::size_t pos = 0;
  while (true) {
    std::size_t colon = s.find(':', pos);
    std::string_view token =
        s.substr(pos, colon == std::string_view::npos ? colon : colon - pos);
    bool last = colon == std::string_view::npos;
    if (last && allow_dotted_tail &&
        token.find('.') != std::string_view::npos) {
      if (n + 2 > max_groups || !parse_dotted_quad(token, out + n)) {
        *failure = {token, "invalid embedded IPv4 part"};
        return std::nullopt;
      }
      return n + 2;
    }
    if (token.empty() || token.size() > 4) {
      *failure = {token, token.empty() ? "empty group" : "group too long"};
      return std::nullopt;
    }
    unsigned v = 0;
    for (char c : token) {
      int h = hex_value(c);
      if (h < 0) {
        *failure = {token, "non-hex character"};
        return std::nullopt;
      }
      v = v << 4 | static_cast<unsigned>(h);
    }
    if (n >= max_groups) {
      *failure = {token, "too many groups"};
      return std::nullopt;
    }
    out[n++] = static_cast<std::uint16_t>(v);
    if (last) return n;
    pos = colon + 1;
  }
}

std::optional<Address128> parse_impl(std::string_view text,
                                     ParseFailure* failure) {
  if (text.empty()) {
    *failure = {text, "empty address"};
    return std::nullopt;
  }
  std::array<std::uint16_t, 8> groups{};
  std::size_t gap = text.find("::");
  if (gap == std::string_view::npos) {
    auto n = parse_groups(text, groups.data(), 8, true, failure);
    if (!n) return std::nullopt;
    if (*n != 8) {
      *failure = {text, "expected 8 groups"};
      return std::nullopt;
    }
  } else {
    if (text.find("::", gap + 1) != std::string_view::npos) {
      *failure = {text.substr(gap), "more than one '::'"};
      return std::nullopt;
    }
    std::string_view head = text.substr(0, gap);
    std::string_view tail = text.substr(gap + 2);
    std::array<std::uint16_t, 8> head_groups{};
    std::array<std::uint16_t, 8> tail_groups{};
    auto nh = parse_groups(head, head_groups.data(), 7, false, failure);
    if (!nh) return std::nullopt;
    auto nt = parse_groups(tail, tail_groups.data(), 7, true, failure);
    if (!nt) return std::nullopt;
    if (*nh + *nt > 7) {
      *failure = {text, "'::' must stand for at least one group"};
      return std::nullopt;
    }
    for (int i = 0; i < *nh; ++i) groups[i] = head_groups[i];
    for (int i = 0; i < *nt; ++i) groups[8 - *nt + i] = tail_groups[i];
  }
  std::uint64_t high = 0;
  std::uint64_t low = 0;
  for (int i = 0; i < 4; ++i) high = high << 16 | groups[i];
  for (int i = 4; i < 8; ++i) low = low << 16 | groups[i];
  return Address128(high, low);
}

}  // namespace

bool Address128::bit(int position) const {
  require(position >= 1 && position <= 128, "bit position out of range");
  if (position <= 64) return (high_ >> (64 - position)) & 1U;
  return (low_ >> (128 - position)) & 1U;
}

std::uint8_t Address128::byte(int index) const {
  require(index >= 0 && index < 16, "byte index out of range");
  std::uint64_t half = index < 8 ? high_ : low_;
  int shift = 8 * (7 - index % 8);
  return static_cast<std::uint8_t>(half >> shift);
}

Address128 parse_address(std::string_view text) {
  ParseFailure failure{};
  auto a = parse_impl(text, &failure);
  if (!a) {
    throw ParseError("invalid IPv6 address '" + std::string(text) + "': " +
                     failure.reason + " at '" + std::string(failure.token) +
                     "'");
  }
  return *a;
}

std::optional<Address128> try_parse_address(std::string_view text) {
  ParseFailure failure{};
  return parse_impl(text, &failure);
}

std::string to_string(const Address128& a) {
  std::array<std::uint16_t, 8> g{};
  for (int i = 0; i < 4; ++i) {
    g[i] = static_cast<std::uint16_t>(a.high() >> (48 - 16 * i));
    g[4 + i] = static_cast<std::uint16_t>(a.low() >> (48 - 16 * i));
  }
  // Longest run of zero groups (length >= 2), first one on ties.
  int best_start = -1;
  int best_len = 0;
  for (int i = 0; i < 8;) {
    if (g[i] != 0) {
      ++i;
      continue;
    }
    int j = i;
    while (j < 8 && g[j] == 0) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len < 2) best_start = -1;

  std::string out;
  out.reserve(39);
  char buf[8];
  for (int i = 0; i < 8; ++i) {
    if (i == best_start) {
      out += "::";
      i += best_len - 1;
      continue;
    }
    if (!out.empty() && out.back() != ':') out += ':';
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, g[i], 16);
    out.append(buf, end);
  }
  return out;
}

int common_prefix_len(const Address128& a, const Address128& b) {
  std::uint64_t hx = a.high() ^ b.high();
  if (hx != 0) return std::countl_zero(hx);
  std::uint64_t lx = a.low() ^ b.low();
  if (lx != 0) return 64 + std::countl_zero(lx);
  return 128;
}

Address128 mask_to(const Address128& a, int length) {
  require(length >= 0 && length <= 128, "prefix length out of range");
  if (length == 0) return {};
  if (length <= 64) {
    std::uint64_t m = length == 64 ? ~0ULL : ~(~0ULL >> length);
    return {a.high() & m, 0};
  }
  int low_bits = length - 64;
  std::uint64_t m = low_bits == 64 ? ~0ULL : ~(~0ULL >> low_bits);
  return {a.high(), a.low() & m};
}

Prefix::Prefix(const Address128& base, int length)
    : base_(base), length_(length) {
  require(length >= 0 && length <= 128, "prefix length out of range");
  require(mask_to(base, length) == base,
          "prefix base has bits set past its length: " + to_string(base) +
              "/" + std::to_string(length));
}

bool Prefix::contains(const Address128& a) const {
  return mask_to(a, length_) == base_;
}

bool Prefix::contains(const Prefix& p) const {
  return p.length_ >= length_ && contains(p.base_);
}

Prefix truncate_to(const Address128& a, int length) {
  return Prefix(mask_to(a, length), length);
}

Prefix parse_prefix(std::string_view text) {
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw ParseError("invalid prefix '" + std::string(text) +
                     "': missing '/'");
  }
  Address128 base = parse_address(text.substr(0, slash));
  std::string_view len_text = text.substr(slash + 1);
  int length = -1;
  auto [ptr, ec] = std::from_chars(len_text.data(),
                                   len_text.data() + len_text.size(), length);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size() ||
      length < 0 || length > 128) {
    throw ParseError("invalid prefix length '" + std::string(len_text) + "'");
  }
  if (mask_to(base, length) != base) {
    throw ParseError("prefix '" + std::string(text) +
                     "' has bits set past its length");
  }
  return Prefix(base, length);
}

std::string to_string(const Prefix& p) {
  return to_string(p.base()) + "/" + std::to_string(p.length());
}

TimeGrid::TimeGrid(std::int64_t start, std::int64_t interval_seconds,
                   int intervals)
    : start(start), interval_seconds(interval_seconds), intervals(intervals) {
  require(interval_seconds > 0, "interval length must be positive");
  require(intervals > 0, "interval count must be positive");
}

std::optional<int> try_interval_of(const TimeGrid& grid, std::int64_t t) {
  if (!grid.in_window(t)) return std::nullopt;
  return static_cast<int>((t - grid.start) / grid.interval_seconds);
}

int interval_of(const TimeGrid& grid, std::int64_t t) {
  auto index = try_interval_of(grid, t);
  if (!index) {
    throw OutOfWindow("instant " + std::to_string(t) +
                      " outside observation window [" +
                      std::to_string(grid.start) + ", " +
                      std::to_string(grid.end()) + ")");
  }
  return *index;
}

}  // namespace kip
