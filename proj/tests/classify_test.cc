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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kip/errors.h"

namespace kip {
namespace {

const char* const kSingle64[] = {
    "2001:db8::117a:e091:b2bd:ca65", "2001:db8::21ad:6d24:641a:1314",
    "2001:db8::3454:ae0d:20a0:df4d", "2001:db8::4974:fa8b:465d:4c2a",
    "2001:db8::503c:a91d:be00:9a63", "2001:db8::6867:8a64:5417:e731",
    "2001:db8::6d35:ee11:ec45:f658", "2001:db8::7070:a7fc:47d5:02ba",
    "2001:db8::7554:b66a:a983:9665", "2001:db8::7939:1bd6:fec2:85bb",
    "2001:db8::7ccc:3977:7c76:bdef", "2001:db8::890b:1f0d:14e2:0ccb",
    "2001:db8::a0fc:1e18:48aa:eb2e", "2001:db8::f930:9833:f8c5:3926",
    "2001:db8::f94d:fcec:6b8e:d61f", "2001:db8::fd28:50fe:8445:83e7",
};
const int kSingle64Dpl[] = {67, 68, 68, 68, 68, 70, 70, 70, 70, 70, 70, 67, 67, 74, 74, 70};

std::vector<Address128> single64() {
  std::vector<Address128> out;
  for (const char* s : kSingle64) out.push_back(parse_address(s));
  return out;
}

// O(n^2) reference for the DPL definition.
std::vector<int> brute_dpl(const std::vector<Address128>& set) {
  std::vector<int> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    int best = -1;
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i == j) continue;
      int n = 0;
      while (n < 128 && set[i].bit(n + 1) == set[j].bit(n + 1)) ++n;
      best = std::max(best, n);
    }
    out.push_back(best + 1);
  }
  return out;
}

// Smallest N with prod (S - j) / S >= confidence, scanning N upward.
int brute_required_bits(std::uint64_t count, double confidence) {
  for (int n = 0; n <= 128; ++n) {
    long double s = std::ldexp(1.0L, n);
    if (static_cast<long double>(count) > s) continue;
    long double log_p = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
      log_p += std::log1p(-static_cast<long double>(j) / s);
    }
    if (std::exp(log_p) >= confidence) return n;
  }
  return 129;
}

TEST(ClassifyIid, RecognizesStructuralClasses) {
  EXPECT_EQ(classify_iid_stateless(parse_address("2001:db8::3454:ae0d:20a0:df4d")),
            IidClass::kRandomizedCandidate);
  EXPECT_EQ(classify_iid_stateless(parse_address("fe80::0211:22ff:fe33:4455")),
            IidClass::kIeeeDerived);
  EXPECT_EQ(classify_iid_stateless(parse_address("2001:db8::1")), IidClass::kLowByte);
  EXPECT_EQ(classify_iid_stateless(parse_address("2001:db8::c000:201")),
            IidClass::kEmbeddedIpv4);
  EXPECT_EQ(classify_iid_stateless(parse_address("2001:db8::192:0:2:1")),
            IidClass::kEmbeddedIpv4);
  EXPECT_EQ(classify_iid_stateless(parse_address("2001:db8::abab:abab:1234:5678")),
            IidClass::kPatternBytes);
}

TEST(ClassifyIid, Single64AddressesAreRandomized) {
  for (const Address128& a : single64()) {
    EXPECT_EQ(classify_iid_stateless(a), IidClass::kRandomizedCandidate) << to_string(a);
  }
}

TEST(ClassifyIid, ClassNamesRoundTrip) {
  for (IidClass c : {IidClass::kIeeeDerived, IidClass::kEmbeddedIpv4, IidClass::kLowByte,
                     IidClass::kPatternBytes, IidClass::kRandomizedCandidate}) {
    EXPECT_EQ(iid_class_from_string(to_string(c)), c);
  }
  EXPECT_FALSE(iid_class_from_string("nonsense").has_value());
}

TEST(Dpl, Single64ColumnMatches) {
  const auto set = single64();
  const auto dpls = compute_dpls_sorted(set);
  ASSERT_EQ(dpls.size(), 16U);
  for (std::size_t i = 0; i < 16; ++i) {
    ASSERT_TRUE(dpls[i].has_value());
    EXPECT_EQ(*dpls[i], kSingle64Dpl[i]) << kSingle64[i];
  }
  std::vector<Address128> others(set.begin() + 5, set.end());
  others.insert(others.end(), set.begin(), set.begin() + 4);
  EXPECT_EQ(compute_dpl(set[4], others), 68);
  EXPECT_EQ(brute_dpl(set), std::vector<int>(std::begin(kSingle64Dpl), std::end(kSingle64Dpl)));
}

TEST(Dpl, NoNeighbourForSingleton) {
  EXPECT_FALSE(compute_dpl(parse_address("2001:db8::1"), {}).has_value());
  std::vector<Address128> one{parse_address("2001:db8::1")};
  EXPECT_FALSE(compute_dpls_sorted(one)[0].has_value());
}

TEST(Dpl, SortedScanMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    std::vector<Address128> set;
    const int n = 2 + static_cast<int>(rng() % 40);
    const std::uint64_t subnets[] = {rng(), rng(), rng()};
    for (int i = 0; i < n; ++i) {
      // Clustered values so long common prefixes occur.
      std::uint64_t iid = rng() >> (rng() % 64);
      set.emplace_back(subnets[rng() % 3], iid);
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.size() < 2) continue;
    const auto fast = compute_dpls_sorted(set);
    const auto slow = brute_dpl(set);
    for (std::size_t i = 0; i < set.size(); ++i) {
      ASSERT_TRUE(fast[i].has_value());
      EXPECT_EQ(*fast[i], slow[i]);
      EXPECT_GE(*fast[i], 1);
      EXPECT_LE(*fast[i], 128);
    }
  }
}

TEST(Dpl, SortedScanRejectsUnsortedInput) {
  std::vector<Address128> set{parse_address("2001:db8::2"), parse_address("2001:db8::1")};
  EXPECT_THROW(compute_dpls_sorted(set), ContractViolation);
}

TEST(StableDays, CountsDistinctDaysMinusOne) {
  const std::int64_t day = utc_day(1490400000);  // 2017-03-25
  EXPECT_EQ(compute_stable_days(std::vector<std::int64_t>{day}), 0);
  EXPECT_EQ(compute_stable_days(std::vector<std::int64_t>{day, day + 1, day + 2}), 2);
  EXPECT_EQ(compute_stable_days(std::vector<std::int64_t>{day, day + 2}), 1);
  EXPECT_EQ(compute_stable_days(std::vector<std::int64_t>{day, day, day + 2}), 1);
  EXPECT_THROW(compute_stable_days(std::vector<std::int64_t>{}), ContractViolation);
  EXPECT_EQ(utc_day(-1), -1);
  EXPECT_EQ(utc_day(86399), 0);
}

TEST(DistinctProbability, HandValues) {
  EXPECT_NEAR(distinct_probability(2, 6), 63.0 / 64.0, 1e-12);
  EXPECT_EQ(distinct_probability(1, 0), 1.0);
  EXPECT_EQ(distinct_probability(1, 40), 1.0);
  EXPECT_NEAR(distinct_probability(3, 2), 0.375, 1e-15);
  EXPECT_EQ(distinct_probability(5, 2), 0.0);
  EXPECT_EQ(distinct_probability(2, 0), 0.0);
}

TEST(DistinctProbability, IncreasesWithBits) {
  for (std::uint64_t a : {2ULL, 3ULL, 16ULL, 1000ULL, 5000ULL}) {
    double last = -1;
    for (int n = 0; n <= 64; ++n) {
      double p = distinct_probability(a, n);
      EXPECT_GE(p, last);
      if (last > 0 && last < 1 - 1e-12) EXPECT_GT(p, last);
      last = p;
    }
  }
}

TEST(RequiredBits, HandValues) {
  EXPECT_EQ(required_distinct_bits(16, 0.99), 14);
  EXPECT_EQ(required_distinct_bits(2, 0.99), 7);
  EXPECT_EQ(required_distinct_bits(2, 0.5), 1);
  RandomnessPolicy policy;
  EXPECT_EQ(policy.max_plausible_dpl(16), 79);
}

TEST(RequiredBits, MatchesBruteForceScan) {
  RandomnessPolicy policy(0.99, 4096);
  const auto table = policy.table(2100);
  for (std::uint64_t a = 2; a <= 2100; a += (a < 200 ? 1 : 37)) {
    EXPECT_EQ(table[a], brute_required_bits(a, 0.99)) << "A=" << a;
    EXPECT_EQ(required_distinct_bits(a, 0.99), table[a]) << "A=" << a;
  }
  for (std::uint64_t a : {2ULL, 10ULL, 77ULL, 500ULL}) {
    EXPECT_EQ(required_distinct_bits(a, 0.9), brute_required_bits(a, 0.9));
    EXPECT_EQ(required_distinct_bits(a, 0.5), brute_required_bits(a, 0.5));
  }
}

TEST(RequiredBits, MonotoneInCountAndConfidence) {
  RandomnessPolicy policy;
  const auto table = policy.table(100000);
  for (std::size_t a = 3; a < table.size(); ++a) ASSERT_GE(table[a], table[a - 1]) << a;
  for (std::uint64_t a : {2ULL, 16ULL, 1000ULL, 100000ULL}) {
    int last = 0;
    for (double c : {0.5, 0.9, 0.99, 0.999}) {
      int n = required_distinct_bits(a, c);
      EXPECT_GE(n, last);
      last = n;
    }
  }
}

TEST(RequiredBits, BeyondTableIsComputedOnDemand) {
  RandomnessPolicy policy(0.99, 64);
  EXPECT_EQ(policy.required_bits(5000), required_distinct_bits(5000, 0.99));
  EXPECT_EQ(policy.required_bits(16), 14);
}

TEST(PlausibleRandomSet, Single64IsPlausible) {
  RandomnessPolicy policy;
  EXPECT_TRUE(plausible_random_set(single64(), policy));
}

TEST(PlausibleRandomSet, NearDuplicatesAreNot) {
  RandomnessPolicy policy;
  Address128 a = parse_address("2001:db8::3454:ae0d:20a0:df4d");
  Address128 b(a.high(), a.low() ^ 1);
  std::vector<Address128> set{a, b};
  EXPECT_FALSE(plausible_random_set(set, policy));
}

TEST(PlausibleRandomSet, EnforcesPreconditions) {
  RandomnessPolicy policy;
  std::vector<Address128> single{parse_address("2001:db8::3454:ae0d:20a0:df4d")};
  EXPECT_THROW(plausible_random_set(single, policy), ContractViolation);
  std::vector<Address128> mixed{parse_address("2001:db8::3454:ae0d:20a0:df4d"),
                                parse_address("2001:db8:1::3454:ae0d:20a0:df4d")};
  EXPECT_THROW(plausible_random_set(mixed, policy), ContractViolation);
}

TEST(PlausibleRandomSet, RandomIidsUsuallyPass) {
  // At 99% confidence almost every random set passes.
  std::mt19937_64 rng(99);
  RandomnessPolicy policy;
  int passed = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<Address128> set;
    for (int i = 0; i < 50; ++i) set.emplace_back(0x20010db800000000ULL, rng() & ~(1ULL << 57));
    passed += plausible_random_set(set, policy) ? 1 : 0;
  }
  EXPECT_GE(passed, trials * 95 / 100);
}

}  // namespace
}  // namespace kip
