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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kip/errors.h"

namespace kip {
namespace {

AggregateSet set_of(std::initializer_list<const char*> prefixes) {
  AggregateSet set;
  for (const char* p : prefixes) set.entries.push_back({parse_prefix(p), 2, 2, 2});
  std::sort(set.entries.begin(), set.entries.end(),
            [](const AggregateEntry& a, const AggregateEntry& b) { return a.prefix < b.prefix; });
  return set;
}

TEST(Matcher, LongestOfNested) {
  auto m = build_matcher(set_of({"::/0", "2001:db8::/32"}));
  auto hit = m.longest_match(parse_address("2001:db8::1"));
  ASSERT_TRUE(hit);
  EXPECT_EQ(to_string(*hit), "2001:db8::/32");
  EXPECT_EQ(m.longest_match(parse_address("2002::1"))->length(), 0);
  EXPECT_EQ(m.size(), 2U);
}

TEST(Matcher, MeetingAggregate) {
  auto m = build_matcher(set_of({"2001:db8:370::/55"}));
  EXPECT_EQ(m.longest_match(parse_address("2001:db8:370:128::9"))->length(), 55);
  EXPECT_FALSE(m.longest_match(parse_address("2001:db8:370:228::9")).has_value());
}

TEST(Matcher, RejectsDuplicates) {
  std::vector<Prefix> dup{parse_prefix("2001:db8::/32"), parse_prefix("2001:db8::/32")};
  EXPECT_THROW(PrefixMatcher{dup}, ContractViolation);
}

TEST(AnonymizeAddress, Examples) {
  const auto set = set_of({"2001:db8:370::/55"});
  const auto m = build_matcher(set);
  ResidualPolicy suppress;
  auto r = anonymize_address(parse_address("2001:db8:370:0:1a2b::cd"), m, suppress);
  EXPECT_EQ(to_string(r.output), "2001:db8:370::");
  EXPECT_EQ(r.matched_length, 55);
  EXPECT_TRUE(anonymize_address(parse_address("2001:db8:370:228::1"), m, suppress).suppressed());

  const auto own = build_matcher(set_of({"2001:db8:1:2::/64"}));
  r = anonymize_address(parse_address("2001:db8:1:2:aaaa:bbbb:cccc:dddd"), own, suppress);
  EXPECT_EQ(to_string(r.output), "2001:db8:1:2::");

  ResidualPolicy root{ResidualKind::kRootCatchAll, parse_prefix("2001:db8:370::/54")};
  r = anonymize_address(parse_address("2001:db8:370:228::1"), m, root);
  EXPECT_TRUE(r.catch_all);
  EXPECT_EQ(r.matched_length, 54);
  EXPECT_EQ(to_string(r.output), "2001:db8:370::");
  EXPECT_TRUE(anonymize_address(parse_address("2001:db9::1"), m, root).suppressed());
}

TEST(AnonymizeAddress, NestedZeroExtensionKeepsTheValue) {
  // The /32 output also lies inside the /48, so a second pass reports a
  // longer match but the same address.
  const auto m = build_matcher(set_of({"2001:db8::/32", "2001:db8::/48"}));
  ResidualPolicy suppress;
  auto once = anonymize_address(parse_address("2001:db8:1::1"), m, suppress);
  auto twice = anonymize_address(once.output, m, suppress);
  EXPECT_EQ(once.matched_length, 32);
  EXPECT_EQ(twice.matched_length, 48);
  EXPECT_EQ(once.output, twice.output);
}

class RandomSets : public ::testing::TestWithParam<int> {};

TEST_P(RandomSets, IdempotentContainedAndPrefixMonotone) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  AggregateSet set;
  std::vector<Prefix> bases;
  const std::uint64_t top = rng() & 0xffff000000000000ULL;
  for (int i = 0; i < 30; ++i) {
    const int len = 16 + static_cast<int>(rng() % 49);
    Prefix p = truncate_to(Address128(top | (rng() >> 16), 0), len);
    if (std::find(bases.begin(), bases.end(), p) == bases.end()) bases.push_back(p);
  }
  std::sort(bases.begin(), bases.end());
  for (const Prefix& p : bases) set.entries.push_back({p, 2, 2, 2});
  const auto m = build_matcher(set);
  const ResidualPolicy policies[] = {
      {ResidualKind::kSuppress, std::nullopt},
      {ResidualKind::kRootCatchAll, truncate_to(Address128(top, 0), 16)}};
  for (const auto& policy : policies) {
    for (int i = 0; i < 2000; ++i) {
      const Prefix& near = bases[rng() % bases.size()];
      Address128 a(near.base().high() ^ (rng() >> (near.length() + rng() % 8)), rng());
      auto r = anonymize_address(a, m, policy);
      if (r.suppressed()) continue;
      const Prefix hit = truncate_to(a, *r.matched_length);
      EXPECT_TRUE(hit.contains(a));
      EXPECT_EQ(hit.base(), r.output);
      if (!r.catch_all) {
        EXPECT_NE(std::find(bases.begin(), bases.end(), hit), bases.end());
      }
      auto again = anonymize_address(r.output, m, policy);
      ASSERT_FALSE(again.suppressed());
      EXPECT_EQ(again.output, r.output);
      EXPECT_GE(*again.matched_length, *r.matched_length);
      Address128 sibling(a.high(), rng());
      EXPECT_EQ(anonymize_address(sibling, m, policy).output, r.output);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomSets, ::testing::Range(1, 21));

std::string run_stream(const std::string& input, const AggregateSet& set,
                       AnonymizeOptions options = {}, AnonymizeStats* stats = nullptr) {
  std::istringstream in(input);
  std::ostringstream out;
  auto s = anonymize_stream(in, out, build_matcher(set), set.residual, options);
  if (stats) *stats = s;
  return out.str();
}

TEST(AnonymizeStream, RewritesOnlyTheAddressField) {
  const auto set = set_of({"2001:db8:370::/55"});
  AnonymizeStats stats;
  const std::string out = run_stream(
      "1490400000\t2001:db8:370:128::9\tGET /x\n"
      "1490400001\t2001:db8:370:228::1\n"
      "garbage\n"
      "1490400002\t2001:db8:370::5\r\n"
      "1490400003\t2001:db8:370::6",
      set, {}, &stats);
  EXPECT_EQ(out,
            "1490400000\t2001:db8:370::\tGET /x\n"
            "1490400001\tsuppressed\n"
            "suppressed\n"
            "1490400002\t2001:db8:370::\r\n"
            "1490400003\t2001:db8:370::");
  EXPECT_EQ(stats.lines, 5U);
  EXPECT_EQ(stats.anonymized, 3U);
  EXPECT_EQ(stats.suppressed, 1U);
  EXPECT_EQ(stats.malformed, 1U);
}

TEST(AnonymizeStream, OptionsApply) {
  const auto set = set_of({"2001:db8:370::/55"});
  AnonymizeOptions opt;
  opt.field = 1;
  opt.append_length = true;
  opt.sentinel = "-";
  EXPECT_EQ(run_stream("2001:db8:370:128::9\tx\n2001:db8:370:228::9\ty\n", set, opt),
            "2001:db8:370::/55\tx\n-\ty\n");
  opt.field = 0;
  EXPECT_THROW(run_stream("", set, opt), ContractViolation);
}

TEST(AnonymizeStream, LineCountIsPreserved) {
  const auto set = set_of({"2001:db8::/32"});
  std::string input;
  std::mt19937 rng(1);
  for (int i = 0; i < 500; ++i) {
    switch (rng() % 4) {
      case 0: input += "1\t2001:db8::" + std::to_string(rng() % 9999) + "\n"; break;
      case 1: input += "1\t2002::1\n"; break;
      case 2: input += "\n"; break;
      default: input += "x\ty\tz\n"; break;
    }
  }
  const std::string out = run_stream(input, set);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 500);
}

}  // namespace
}  // namespace kip
