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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "plm/errors.h"
#include "plm/heads.h"
#include "plm/spanspace.h"
#include "test_util.h"

namespace plm {
namespace {

// Slot i gets the row [base + i*width, ..., base + i*width + width - 1].
SlotOutputs CountingOutputs(int slots, int width, double base = 1.0) {
  SlotOutputs out{Matrix(slots, width)};
  for (int i = 0; i < slots; ++i) {
    for (int c = 0; c < width; ++c) out.hidden(i, c) = base + i * width + c;
  }
  return out;
}

Classifier ZeroClassifier(int in, int hidden, int out) {
  Classifier cls;
  cls.w1 = Matrix(in, hidden);
  cls.b1 = Matrix(1, hidden);
  cls.w2 = Matrix(hidden, out);
  cls.b2 = Matrix(1, out);
  return cls;
}

ContextWindow Window(int n) {
  return ExpandContext(testing::MakeDocument({n}), 1, n);
}

Vocabulary Vocab(int n) {
  std::vector<std::string> words = Vocabulary().words();
  for (int i = 1; i <= n; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary::FromWords(words);
}

TEST(SpanRepresentation, ConcatenatesMarkerRows) {
  // Two text slots, then the marker pair at slots 2 and 3.
  const EncodingLayout l =
      BuildSpanLayout(Window(2), SpanGroup{{{1, 2}}, 0}, Vocab(2), 64);
  SlotOutputs out = CountingOutputs(4, 4);
  for (int c = 0; c < 4; ++c) {
    out.hidden(2, c) = 1 + c;
    out.hidden(3, c) = 5 + c;
  }
  const SpanRepr r = SpanRepresentation(out, l, {1, 2}, true);
  EXPECT_EQ(r.marker, (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(r.tconcat.size(), 8u);
  EXPECT_EQ(r.tconcat[0], out.hidden(0, 0));
  EXPECT_EQ(r.tconcat[4], out.hidden(1, 0));
  EXPECT_THROW(SpanRepresentation(out, l, {2, 2}, false), LookupError);
}

TEST(SpanRepresentation, SingleTokenSpanHasBothMarkers) {
  const EncodingLayout l =
      BuildSpanLayout(Window(3), SpanGroup{{{2, 2}}, 0}, Vocab(3), 64);
  const SpanRepr r =
      SpanRepresentation(CountingOutputs(l.num_slots(), 5), l, {2, 2}, false);
  EXPECT_EQ(r.marker.size(), 10u);
  EXPECT_TRUE(r.tconcat.empty());
}

TEST(NerLogits, ZeroWeightsTieToNone) {
  const int d = 4;
  const SpanRepr repr{std::vector<double>(2 * d, 1.0),
                      std::vector<double>(2 * d, 2.0)};
  for (NerMode mode : {NerMode::kMarkerOnly, NerMode::kMarkerPlusTconcat,
                       NerMode::kTconcatOnly}) {
    const Classifier cls = ZeroClassifier(NerInputDim(mode, d), 3, 5);
    const auto logits = NerLogits(repr, cls, mode);
    EXPECT_EQ(logits, std::vector<double>(5, 0.0));
    EXPECT_EQ(Argmax(logits), 0);
  }
}

TEST(NerLogits, TconcatOnlyIgnoresMarkers) {
  std::mt19937_64 rng(1);
  const Classifier cls =
      MakeClassifier(NerInputDim(NerMode::kTconcatOnly, 3), 4, 3, rng);
  SpanRepr a{{1, 2, 3, 4, 5, 6}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
  SpanRepr b = a;
  b.marker.assign(6, -9.0);
  EXPECT_EQ(NerLogits(a, cls, NerMode::kTconcatOnly),
            NerLogits(b, cls, NerMode::kTconcatOnly));
  EXPECT_NE(NerLogits(a, MakeClassifier(12, 4, 3, rng),
                      NerMode::kMarkerPlusTconcat),
            NerLogits(b, MakeClassifier(12, 4, 3, rng),
                      NerMode::kMarkerPlusTconcat));
}

TEST(NerLogits, ModeMismatch) {
  const SpanRepr marker_only{{1, 2}, {}};
  EXPECT_THROW(NerLogits(marker_only, ZeroClassifier(4, 2, 2),
                         NerMode::kMarkerPlusTconcat),
               ConfigError);
  EXPECT_THROW(NerLogits(marker_only, ZeroClassifier(3, 2, 2),
                         NerMode::kMarkerOnly),
               ConfigError);
  EXPECT_THROW(ParseNerMode("both"), ConfigError);
}

TEST(PairRepresentation, DeclaredOrder) {
  const EncodingLayout l =
      BuildPairLayout(Window(4), {2, 2}, {{4, 4}, {1, 1}}, Vocab(4), 64);
  const SlotOutputs out = CountingOutputs(l.num_slots(), 2);
  const auto r = PairRepresentation(out, l, {4, 4});
  ASSERT_EQ(r.size(), 8u);
  auto row = [&](int slot) {
    return std::vector<double>{out.hidden(slot, 0), out.hidden(slot, 1)};
  };
  std::vector<double> expected;
  for (int slot : {l.subject_start_slot, l.subject_end_slot,
                   l.pairs[0].start_slot, l.pairs[0].end_slot}) {
    const auto v = row(slot);
    expected.insert(expected.end(), v.begin(), v.end());
  }
  EXPECT_EQ(r, expected);
  const auto other = PairRepresentation(out, l, {1, 1});
  EXPECT_TRUE(std::equal(r.begin(), r.begin() + 4, other.begin()));
  EXPECT_THROW(PairRepresentation(out, l, {3, 3}), LookupError);
  const EncodingLayout span =
      BuildSpanLayout(Window(4), SpanGroup{{{1, 1}}, 0}, Vocab(4), 64);
  EXPECT_THROW(PairRepresentation(CountingOutputs(span.num_slots(), 2), span,
                                  {1, 1}),
               LayoutError);
}

TEST(RelationLogits, ShapesAndUniformZero) {
  HeadParams heads;
  heads.re = ZeroClassifier(8, 3, 4);
  heads.aux = ZeroClassifier(8, 3, 2);
  const ReLogits logits = RelationLogits(std::vector<double>(8, 0.5), heads);
  EXPECT_EQ(logits.relation.size(), 4u);
  EXPECT_EQ(logits.object_type.size(), 2u);
  for (double p : Softmax(logits.relation)) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(CombineBidirectional, UniformCase) {
  const DirectedLabelSpace space = BuildDirectedLabelSpace({"PHYS"}, {});
  const std::vector<double> zero(3, 0.0);
  const BidirectionalScores s = CombineBidirectional(zero, zero, space);
  for (double v : s.scores) EXPECT_DOUBLE_EQ(v, 2.0 / 3.0);
  EXPECT_EQ(s.label, DirectedLabelSpace::kNoRelation);
}

TEST(CombineBidirectional, ForwardAndInverseAgree) {
  // Labels: NO_RELATION, PHYS, PHYS_INV.
  const DirectedLabelSpace space = BuildDirectedLabelSpace({"PHYS"}, {});
  const BidirectionalScores s =
      CombineBidirectional(std::vector<double>{0, 3, 0},
                           std::vector<double>{0, 0, 3}, space);
  EXPECT_EQ(s.label, space.Find("PHYS"));
  EXPECT_NEAR(s.scores[1], 1.8188859970254838, 1e-15);
  EXPECT_NEAR(s.scores[0], 0.09055700148725813, 1e-15);
  EXPECT_NEAR(s.scores[2], 0.09055700148725813, 1e-15);
}

TEST(CombineBidirectional, SymmetricSwapInvariance) {
  const DirectedLabelSpace space =
      BuildDirectedLabelSpace({"PHYS", "PER-SOC"}, {"PER-SOC"});
  const int soc = space.Find("PER-SOC");
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> f(space.size()), r(space.size());
    for (double &x : f) x = g(rng);
    for (double &x : r) x = g(rng);
    EXPECT_EQ(CombineBidirectional(f, r, space).scores[soc],
              CombineBidirectional(r, f, space).scores[soc]);
  }
}

TEST(CombineBidirectional, SizeMismatch) {
  const DirectedLabelSpace space = BuildDirectedLabelSpace({"PHYS"}, {});
  EXPECT_THROW(CombineBidirectional(std::vector<double>(3),
                                    std::vector<double>(4), space),
               ConfigError);
}

TEST(CrossEntropy, UniformAndLimits) {
  EXPECT_NEAR(CrossEntropy(std::vector<double>(4, 0.0), 2), std::log(4.0),
              1e-15);
  EXPECT_LT(CrossEntropy(std::vector<double>{0, 60, 0}, 1), 1e-20);
  std::vector<double> grad;
  CrossEntropy(std::vector<double>{1, 2}, 0, &grad);
  EXPECT_NEAR(grad[0] + grad[1], 0.0, 1e-15);
  EXPECT_THROW(CrossEntropy(std::vector<double>{1, 2}, 2), DataError);
  EXPECT_THROW(CrossEntropy(std::vector<double>{1, 2}, -1), DataError);
}

TEST(TrainingLoss, AuxWeight) {
  const std::vector<ReTarget> targets = {
      {std::vector<double>(4, 0.0), std::vector<double>{0, 0, 0}, 1, 2}};
  EXPECT_NEAR(ReTrainingLoss(targets, 0.0), std::log(4.0), 1e-15);
  EXPECT_NEAR(ReTrainingLoss(targets, 0.5),
              std::log(4.0) + 0.5 * std::log(3.0), 1e-15);
  const std::vector<NerTarget> ner = {{{0, 50}, 1}, {{0, 0}, 0}};
  EXPECT_NEAR(NerTrainingLoss(ner), std::log(2.0) / 2, 1e-12);
  EXPECT_GE(NerTrainingLoss(ner), 0.0);
}

TEST(Argmax, LowestIndexWins) {
  EXPECT_EQ(Argmax(std::vector<double>{1, 3, 3}), 1);
  EXPECT_EQ(Argmax(std::vector<double>{2, 2}), 0);
}

TEST(Softmax, StableForLargeLogits) {
  const auto p = Softmax(std::vector<double>{1000, 1000});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
}

}  // namespace
}  // namespace plm
