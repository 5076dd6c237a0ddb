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
#include "plm/objective.h"
#include "plm/optimizer.h"
#include "plm/spanspace.h"
#include "test_util.h"

namespace plm {
namespace {

constexpr int kWords = 30;

struct Fixture {
  EncoderParams params;
  HeadParams heads;
  TrainingBatch batch;
};

// Small mixed NER + RE batch on random sentences.
Fixture MakeFixture(int hidden, uint64_t seed) {
  Fixture f;
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  EncoderConfig config;
  config.vocab_size = vocab.size();
  config.hidden_dim = hidden;
  config.ffn_dim = 2 * hidden;
  config.max_position = 32;
  config.seed = seed;
  f.params = InitParams(config);
  std::mt19937_64 rng(seed);
  f.heads.ner = MakeClassifier(4 * hidden, 8, 4, rng);
  f.heads.stage1 = MakeClassifier(2 * hidden, 8, 4, rng);
  f.heads.re = MakeClassifier(4 * hidden, 8, 5, rng);
  f.heads.aux = MakeClassifier(4 * hidden, 8, 3, rng);
  std::uniform_int_distribution<int> label(0, 3);
  for (int s = 0; s < 2; ++s) {
    const Document doc = testing::RandomSentence(rng, 6, kWords);
    const ContextWindow w = ExpandContext(doc, 1, 6);
    const auto groups = NeighborhoodPack(EnumerateSpans(6, 2), 5);
    NerInstance ner;
    ner.layout = BuildSpanLayout(w, groups[s], vocab, 4096);
    for (size_t i = 0; i < ner.layout.pairs.size(); ++i) {
      ner.labels.push_back(label(rng));
    }
    f.batch.ner.push_back(ner);
    ReInstance re;
    re.layout = BuildPairLayout(w, {1, 2}, {{4, 4}, {5, 6}}, vocab, 4096);
    re.relations = {label(rng), 4};
    re.object_types = {label(rng) % 3, 1};
    f.batch.re.push_back(re);
  }
  f.batch.aux_weight = 0.7;
  return f;
}

TEST(LossAndGrad, LossMatchesBatchLoss) {
  const Fixture f = MakeFixture(8, 1);
  const LossAndGradient lg = LossAndGrad(f.params, f.heads, f.batch);
  EXPECT_DOUBLE_EQ(lg.loss, BatchLoss(f.params, f.heads, f.batch));
  EXPECT_GT(lg.loss, 0.0);
}

TEST(LossAndGrad, ZeroHeadGivesUniformLoss) {
  Fixture f = MakeFixture(8, 2);
  f.batch.re.clear();
  for (NamedTensor t : f.heads.Tensors()) t.tensor->SetZero();
  f.heads.stage1 = Classifier();
  EXPECT_NEAR(BatchLoss(f.params, f.heads, f.batch), std::log(4.0), 1e-12);
}

TEST(FiniteDiff, ToyConfigWithinTolerance) {
  const Fixture f = MakeFixture(32, 3);
  const FiniteDiffReport r =
      FiniteDiffCheck(f.params, f.heads, f.batch, 1e-5, 200, 11);
  EXPECT_EQ(r.coordinates, 200);
  EXPECT_GT(r.nonzero, 100);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(FiniteDiff, ConstantLossReportsZero) {
  Fixture f = MakeFixture(8, 4);
  f.batch.re.clear();
  for (NamedTensor t : f.heads.Tensors()) t.tensor->SetZero();
  f.heads.stage1 = Classifier();
  const FiniteDiffReport r =
      FiniteDiffCheck(f.params, f.heads, f.batch, 1e-5, 100, 1, false);
  EXPECT_EQ(r.max_relative_error, 0.0);
}

TEST(FiniteDiff, ErrorShrinksWithStep) {
  const Fixture f = MakeFixture(8, 5);
  const double coarse =
      FiniteDiffCheck(f.params, f.heads, f.batch, 1e-3, 150, 9)
          .max_relative_error;
  const double fine =
      FiniteDiffCheck(f.params, f.heads, f.batch, 1e-5, 150, 9)
          .max_relative_error;
  EXPECT_LT(fine, coarse);
}

TEST(FiniteDiff, RejectsNonPositiveStep) {
  const Fixture f = MakeFixture(8, 6);
  EXPECT_THROW(FiniteDiffCheck(f.params, f.heads, f.batch, 0.0, 1, 1),
               ConfigError);
}

TEST(LossAndGrad, LabelOutOfRange) {
  Fixture f = MakeFixture(8, 7);
  f.batch.ner[0].labels[0] = 9;
  EXPECT_THROW(BatchLoss(f.params, f.heads, f.batch), DataError);
}

TEST(Schedule, WarmupThenDecay) {
  const LinearWarmupSchedule s(1.0, 0.1, 100);
  EXPECT_EQ(s.warmup_steps(), 10);
  EXPECT_DOUBLE_EQ(s.Rate(5), 0.5);
  EXPECT_DOUBLE_EQ(s.Rate(10), 1.0);
  EXPECT_GT(s.Rate(11), s.Rate(50));
  EXPECT_GT(s.Rate(100), 0.0);
  EXPECT_THROW(LinearWarmupSchedule(1.0, 1.5, 10), ConfigError);
}

TEST(Adam, FirstStepMovesBySignTimesRate) {
  Matrix p(1, 2, 1.0);
  Matrix g(1, 2);
  g(0, 0) = 0.5;
  g(0, 1) = -2.0;
  AdamOptimizer adam;
  adam.Step({{"p", &p}}, {{"g", &g}}, 0.1);
  EXPECT_NEAR(p(0, 0), 0.9, 1e-7);
  EXPECT_NEAR(p(0, 1), 1.1, 1e-7);
}

TEST(Adam, DescendsQuadratic) {
  Matrix p(1, 1, 3.0);
  Matrix g(1, 1);
  AdamOptimizer adam;
  for (int i = 0; i < 500; ++i) {
    g(0, 0) = 2.0 * p(0, 0);
    adam.Step({{"p", &p}}, {{"g", &g}}, 0.05);
  }
  EXPECT_LT(std::abs(p(0, 0)), 0.05);
}

}  // namespace
}  // namespace plm
