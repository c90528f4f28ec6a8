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
#ifndef KIP_ANONYMIZE_H_
#define KIP_ANONYMIZE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kip/address.h"
#include "kip/aggregate.h"

namespace kip {

// Binary trie answering "longest prefix containing this address" in at
// most one step per prefix bit.
class PrefixMatcher {
 public:
  PrefixMatcher() = default;
  // Duplicate prefixes are a contract violation.
  explicit PrefixMatcher(std::span<const Prefix> prefixes);

  std::optional<Prefix> longest_match(const Address128& a) const;
  std::size_t size() const { return count_; }

 private:
  struct Node {
    std::int32_t child[2] = {-1, -1};
    bool terminal = false;
  };
  std::vector<Node> nodes_{Node{}};
  std::size_t count_ = 0;
};

PrefixMatcher build_matcher(const AggregateSet& set);

struct AnonymizedAddress {
  Address128 output;
  // Length the input was truncated to; nullopt when suppressed.
  std::optional<int> matched_length;
  // True when the truncation came from the residual catch-all rather
  // than an aggregate.
  bool catch_all = false;

  bool suppressed() const { return !matched_length.has_value(); }
};

AnonymizedAddress anonymize_address(const Address128& a,
                                    const PrefixMatcher& matcher,
                                    const ResidualPolicy& policy);

struct AnonymizeOptions {
  int field = 2;                     // 1-based tab-separated address column
  bool append_length = false;        // write "addr/len"
  std::string sentinel = "suppressed";
};

struct AnonymizeStats {
  std::uint64_t lines = 0;
  std::uint64_t anonymized = 0;
  std::uint64_t caught = 0;      // truncated by the catch-all
  std::uint64_t suppressed = 0;  // address replaced by the sentinel
  std::uint64_t malformed = 0;   // whole line replaced by the sentinel
};

// Rewrites the address column of every line and copies every other byte
// through unchanged. Output has exactly one line per input line.
AnonymizeStats anonymize_stream(std::istream& in, std::ostream& out,
                                const PrefixMatcher& matcher,
                                const ResidualPolicy& policy,
                                const AnonymizeOptions& options);

}  // namespace kip

#endif  // KIP_ANONYMIZE_H_
