// Copyright 2026 The PLM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "plm/errors.h"
#include "plm/spanspace.h"

namespace plm {
namespace {

std::vector<Span> BruteForceSpans(int n, int max_length) {
  std::vector<Span> spans;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a <= b && b - a + 1 <= max_length) spans.push_back({a, b});
    }
  }
  std::sort(spans.begin(), spans.end());
  return spans;
}

std::vector<int> Sizes(const std::vector<SpanGroup> &groups) {
  std::vector<int> sizes;
  for (const SpanGroup &g : groups) sizes.push_back(g.size());
  return sizes;
}

TEST(EnumerateSpans, SmallCase) {
  EXPECT_EQ(EnumerateSpans(3, 2),
            (std::vector<Span>{{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}}));
}

TEST(EnumerateSpans, EmptySentence) { EXPECT_TRUE(EnumerateSpans(0, 8).empty()); }

TEST(EnumerateSpans, HundredTokens) {
  const auto spans = EnumerateSpans(100, 8);
  EXPECT_EQ(spans.size(), 772u);
  EXPECT_EQ(spans, BruteForceSpans(100, 8));
}

TEST(EnumerateSpans, MatchesBruteForce) {
  for (int n = 0; n <= 30; ++n) {
    for (int l = 1; l <= 10; ++l) {
      ASSERT_EQ(EnumerateSpans(n, l), BruteForceSpans(n, l)) << n << "," << l;
    }
  }
}

TEST(EnumerateSpans, RejectsNonPositiveLength) {
  EXPECT_THROW(EnumerateSpans(5, 0), ConfigError);
}

TEST(NeighborhoodPack, FirstGroupClustersNeighbours) {
  const auto groups = NeighborhoodPack(EnumerateSpans(5, 5), 5);
  EXPECT_EQ(groups[0].spans,
            (std::vector<Span>{{1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}}));
}

TEST(NeighborhoodPack, GroupSizes) {
  EXPECT_EQ(Sizes(NeighborhoodPack(EnumerateSpans(100, 8), 256)),
            (std::vector<int>{256, 256, 256, 4}));
  EXPECT_EQ(Sizes(NeighborhoodPack(EnumerateSpans(4, 4), 100)),
            (std::vector<int>{10}));
}

TEST(NeighborhoodPack, SortsInput) {
  const auto groups = NeighborhoodPack({{2, 2}, {1, 3}, {1, 1}}, 2);
  EXPECT_EQ(groups[0].spans, (std::vector<Span>{{1, 1}, {1, 3}}));
  EXPECT_EQ(groups[1].group_index, 1);
}

TEST(NeighborhoodPack, RejectsZeroK) {
  EXPECT_THROW(NeighborhoodPack(EnumerateSpans(3, 3), 0), ConfigError);
}

TEST(RandomPack, DeterministicPartition) {
  const auto spans = EnumerateSpans(12, 4);
  const auto a = RandomPack(spans, 7, 99);
  const auto b = RandomPack(spans, 7, 99);
  ASSERT_EQ(a.size(), b.size());
  std::multiset<Span> seen;
  for (size_t g = 0; g < a.size(); ++g) {
    EXPECT_EQ(a[g].spans, b[g].spans);
    EXPECT_TRUE(std::is_sorted(a[g].spans.begin(), a[g].spans.end()));
    seen.insert(a[g].spans.begin(), a[g].spans.end());
  }
  EXPECT_EQ(std::vector<Span>(seen.begin(), seen.end()), spans);
}

TEST(RandomPack, ChunkArithmetic) {
  EXPECT_EQ(Sizes(RandomPack(EnumerateSpans(5, 1), 2, 3)),
            (std::vector<int>{2, 2, 1}));
}

TEST(RandomPack, SeedsDiffer) {
  const auto spans = EnumerateSpans(20, 8);
  EXPECT_NE(RandomPack(spans, 16, 1)[0].spans, RandomPack(spans, 16, 2)[0].spans);
}

TEST(PackingStrategy, ParseRoundTrip) {
  for (auto s : {PackingStrategy::kNeighborhood, PackingStrategy::kRandom}) {
    EXPECT_EQ(ParsePackingStrategy(ToString(s)), s);
  }
  EXPECT_THROW(ParsePackingStrategy("subject"), ConfigError);
}

TEST(DirectedLabelSpace, InverseLabels) {
  const DirectedLabelSpace space =
      BuildDirectedLabelSpace({"PHYS", "PER-SOC"}, {"PER-SOC"});
  EXPECT_EQ(space.names(), (std::vector<std::string>{"NO_RELATION", "PHYS",
                                                     "PER-SOC", "PHYS_INV"}));
  EXPECT_EQ(space.name(space.inverse_of(space.Find("PHYS"))), "PHYS_INV");
  EXPECT_TRUE(space.is_symmetric(space.Find("PER-SOC")));
  EXPECT_TRUE(space.is_inverse(space.Find("PHYS_INV")));
  EXPECT_EQ(space.inverse_of(0), 0);
}

TEST(DirectedLabelSpace, EmptyAndAllSymmetric) {
  EXPECT_EQ(BuildDirectedLabelSpace({}, {}).size(), 1);
  EXPECT_EQ(BuildDirectedLabelSpace({"A", "B"}, {"A", "B"}).size(), 3);
}

TEST(DirectedLabelSpace, InverseIsInvolution) {
  const DirectedLabelSpace space =
      BuildDirectedLabelSpace({"A", "B", "C", "D"}, {"B", "D"});
  for (int id = 0; id < space.size(); ++id) {
    EXPECT_EQ(space.inverse_of(space.inverse_of(id)), id);
  }
}

TEST(DirectedLabelSpace, Errors) {
  EXPECT_THROW(BuildDirectedLabelSpace({"A"}, {"B"}), ConfigError);
  EXPECT_THROW(BuildDirectedLabelSpace({"A", "A_INV"}, {}), ConfigError);
}

TEST(CandidatePairs, AllOrderedPairs) {
  const std::vector<EntityMention> entities = {
      {{1, 1}, "X"}, {{3, 4}, "Y"}, {{6, 6}, "Z"}};
  const auto pairs = CandidatePairs(entities);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].subject, (Span{1, 1}));
  EXPECT_EQ(pairs[0].objects, (std::vector<Span>{{3, 4}, {6, 6}}));
  EXPECT_EQ(pairs[1].objects, (std::vector<Span>{{1, 1}, {6, 6}}));
  size_t directed = 0;
  for (const auto &p : pairs) directed += p.objects.size();
  EXPECT_EQ(directed, 6u);
}

TEST(CandidatePairs, SingleEntityHasNoObjects) {
  const auto pairs = CandidatePairs({{{2, 2}, "X"}});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_TRUE(pairs[0].objects.empty());
}

TEST(CandidatePairs, CountMatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 8; ++n) {
    std::vector<EntityMention> entities;
    for (int i = 0; i < n; ++i) entities.push_back({{2 * i + 1, 2 * i + 1}, "E"});
    std::shuffle(entities.begin(), entities.end(), rng);
    size_t directed = 0;
    for (const auto &p : CandidatePairs(entities)) directed += p.objects.size();
    EXPECT_EQ(directed, static_cast<size_t>(n * (n - 1)));
  }
}

}  // namespace
}  // namespace plm
