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
#include "kip/anonymize.h"

#include <istream>
#include <ostream>

#include "kip/errors.h"
#include "kip/logio.h"

namespace kip {

PrefixMatcher::PrefixMatcher(std::span<const Prefix> prefixes) {
  for (const Prefix& p : prefixes) {
    std::int32_t at = 0;
    for (int bit = 1; bit <= p.length(); ++bit) {
      const int side = p.base().bit(bit) ? 1 : 0;
      if (nodes_[at].child[side] < 0) {
        nodes_[at].child[side] = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
      }
      at = nodes_[at].child[side];
    }
    require(!nodes_[at].terminal, "duplicate prefix " + to_string(p));
    nodes_[at].terminal = true;
    ++count_;
  }
}

std::optional<Prefix> PrefixMatcher::longest_match(const Address128& a) const {
  int best = nodes_[0].terminal ? 0 : -1;
  std::int32_t at = 0;
  for (int bit = 1; bit <= 128; ++bit) {
    const std::uint64_t half = bit <= 64 ? a.high() : a.low();
    const int side = static_cast<int>((half >> ((128 - bit) % 64)) & 1U);
    at = nodes_[at].child[side];
    if (at < 0) break;
    if (nodes_[at].terminal) best = bit;
  }
  if (best < 0) return std::nullopt;
  return truncate_to(a, best);
}

PrefixMatcher build_matcher(const AggregateSet& set) {
  std::vector<Prefix> prefixes;
  prefixes.reserve(set.entries.size());
  for (const AggregateEntry& e : set.entries) prefixes.push_back(e.prefix);
  return PrefixMatcher(prefixes);
}

AnonymizedAddress anonymize_address(const Address128& a,
                                    const PrefixMatcher& matcher,
                                    const ResidualPolicy& policy) {
  if (auto match = matcher.longest_match(a)) {
    return {match->base(), match->length(), false};
  }
  if (policy.kind == ResidualKind::kRootCatchAll && policy.catch_all &&
      policy.catch_all->contains(a)) {
    return {policy.catch_all->base(), policy.catch_all->length(), true};
  }
  return {Address128(), std::nullopt, false};
}

AnonymizeStats anonymize_stream(std::istream& in, std::ostream& out,
                                const PrefixMatcher& matcher,
                                const ResidualPolicy& policy,
                                const AnonymizeOptions& options) {
  require(options.field >= 1, "anonymize: address field index is 1-based");
  AnonymizeStats stats;
  LineReader reader(in);
  std::string_view line;
  bool had_newline = false;
  std::string rendered;
  while (reader.next(line, had_newline)) {
    ++stats.lines;
    // Locate the address column.
    std::size_t begin = 0;
    bool found = true;
    for (int i = 1; i < options.field; ++i) {
      std::size_t tab = line.find('\t', begin);
      if (tab == std::string_view::npos) {
        found = false;
        break;
      }
      begin = tab + 1;
    }
    std::size_t end = found ? line.find('\t', begin) : std::string_view::npos;
    if (end == std::string_view::npos) end = line.size();
    std::string_view field = found ? line.substr(begin, end - begin) : std::string_view();
    // A CR belongs to the line ending, not the address.
    std::size_t keep_end = end;
    if (!field.empty() && field.back() == '\r' && end == line.size()) {
      field.remove_suffix(1);
      --keep_end;
    }
    std::optional<Address128> address;
    if (found) address = try_parse_address(field);
    if (!address) {
      ++stats.malformed;
      out << options.sentinel;
      if (had_newline) out << '\n';
      continue;
    }
    AnonymizedAddress anon = anonymize_address(*address, matcher, policy);
    if (anon.suppressed()) {
      ++stats.suppressed;
      rendered = options.sentinel;
    } else {
      if (anon.catch_all) {
        ++stats.caught;
      } else {
        ++stats.anonymized;
      }
      rendered = to_string(anon.output);
      if (options.append_length) {
        rendered += '/';
        rendered += std::to_string(*anon.matched_length);
      }
    }
    out.write(line.data(), static_cast<std::streamsize>(begin));
    out << rendered;
    out.write(line.data() + keep_end,
              static_cast<std::streamsize>(line.size() - keep_end));
    if (had_newline) out << '\n';
  }
  return stats;
}

}  // namespace kip
