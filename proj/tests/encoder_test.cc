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

#include "plm/encoder.h"
#include "plm/errors.h"
#include "plm/spanspace.h"
#include "test_util.h"

namespace plm {
namespace {

constexpr int kWords = 50;

EncoderParams Params(int layers = 2, uint64_t seed = 3) {
  EncoderConfig config;
  config.vocab_size = testing::NumberedVocabulary(kWords).size();
  config.num_layers = layers;
  config.max_position = 64;
  config.seed = seed;
  return InitParams(config);
}

double RowDiff(const Matrix &a, int ra, const Matrix &b, int rb) {
  double worst = 0.0;
  for (int c = 0; c < a.cols(); ++c) {
    worst = std::max(worst, std::abs(a(ra, c) - b(rb, c)));
  }
  return worst;
}

TEST(EncoderConfig, HeadDivisibility) {
  EncoderConfig config;
  config.vocab_size = 10;
  config.hidden_dim = 33;
  EXPECT_THROW(config.Validate(), ConfigError);
  EXPECT_THROW(InitParams(config), ConfigError);
}

TEST(InitParams, DeterministicAndFinite) {
  const EncoderParams a = Params();
  const EncoderParams b = Params();
  const auto ta = a.Tensors();
  const auto tb = b.Tensors();
  ASSERT_EQ(ta.size(), tb.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(*ta[i].tensor, *tb[i].tensor) << ta[i].name;
    EXPECT_TRUE(AllFinite(*ta[i].tensor)) << ta[i].name;
  }
  EXPECT_NE(Params(2, 4).token_embedding, a.token_embedding);
}

TEST(PromptInitMarkers, CopiesRows) {
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  const MarkerVocab &m = vocab.markers();
  const EncoderParams base = Params();
  const EncoderParams p = PromptInitMarkers(
      base, {{m.span_start, Vocabulary::kMask},
             {m.span_end, Vocabulary::kEntityWord}});
  for (int c = 0; c < base.config.hidden_dim; ++c) {
    EXPECT_EQ(p.token_embedding(m.span_start, c),
              base.token_embedding(Vocabulary::kMask, c));
    EXPECT_EQ(p.token_embedding(m.span_end, c),
              base.token_embedding(Vocabulary::kEntityWord, c));
  }
  EXPECT_EQ(PromptInitMarkers(base, {}).token_embedding, base.token_embedding);
  EXPECT_EQ(PromptInitMarkers(base, {{m.span_start, m.span_start}})
                .token_embedding,
            base.token_embedding);
  EXPECT_THROW(PromptInitMarkers(base, {{m.span_start, 100000}}), ConfigError);
}

TEST(Encode, ZeroLayersReturnEmbeddings) {
  const EncoderParams p = Params(0);
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(1);
  const Document doc = testing::RandomSentence(rng, 5, kWords);
  const EncodingLayout l = BuildSpanLayout(ExpandContext(doc, 1, 5),
                                           SpanGroup{{{2, 3}}, 0}, vocab, 64);
  const SlotOutputs out = Encode(p, l);
  for (int i = 0; i < l.num_slots(); ++i) {
    for (int c = 0; c < p.config.hidden_dim; ++c) {
      EXPECT_EQ(out.hidden(i, c),
                p.token_embedding(l.slot_token_ids[i], c) +
                    p.position_embedding(l.slot_position_ids[i] - 1, c));
    }
  }
}

TEST(Encode, RejectsInvalidLayout) {
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(1);
  const Document doc = testing::RandomSentence(rng, 4, kWords);
  EncodingLayout l = BuildSpanLayout(ExpandContext(doc, 1, 4),
                                     SpanGroup{{{1, 1}, {2, 3}}, 0}, vocab, 64);
  l.set_visible(l.pairs[0].start_slot, l.pairs[1].end_slot, true);
  EXPECT_THROW(Encode(Params(), l), LayoutError);
}

TEST(Encode, PositionOutOfRange) {
  EncoderConfig config;
  config.vocab_size = testing::NumberedVocabulary(kWords).size();
  config.max_position = 4;
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(1);
  const Document doc = testing::RandomSentence(rng, 6, kWords);
  EXPECT_THROW(Encode(InitParams(config),
                      BuildTextLayout(ExpandContext(doc, 1, 6), vocab)),
               LayoutError);
}

TEST(Encode, TextSlotsIgnoreMarkers) {
  const EncoderParams p = Params();
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Document doc = testing::RandomSentence(rng, 3 + trial % 10, kWords);
    const ContextWindow w = ExpandContext(doc, 1, doc.num_tokens());
    const SlotOutputs text = Encode(p, BuildTextLayout(w, vocab));
    const auto groups = NeighborhoodPack(EnumerateSpans(w.size(), 4), 7);
    const SlotOutputs packed =
        Encode(p, BuildSpanLayout(w, groups.back(), vocab, 4096));
    for (int i = 0; i < w.size(); ++i) {
      ASSERT_LE(RowDiff(text.hidden, i, packed.hidden, i), 1e-12);
    }
  }
}

TEST(Encode, PackedMatchesAlone) {
  const EncoderParams p = Params();
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Document doc = testing::RandomSentence(rng, 4 + trial, kWords);
    const ContextWindow w = ExpandContext(doc, 1, doc.num_tokens());
    const auto groups = NeighborhoodPack(EnumerateSpans(w.size(), 3), 16);
    for (const SpanGroup &g : groups) {
      const EncodingLayout packed = BuildSpanLayout(w, g, vocab, 4096);
      const SlotOutputs out = Encode(p, packed);
      for (const MarkerPair &pair : packed.pairs) {
        const EncodingLayout alone =
            BuildSpanLayout(w, SpanGroup{{pair.span}, 0}, vocab, 4096);
        const SlotOutputs single = Encode(p, alone);
        ASSERT_LE(RowDiff(out.hidden, pair.start_slot, single.hidden,
                          alone.pairs[0].start_slot),
                  1e-9);
        ASSERT_LE(RowDiff(out.hidden, pair.end_slot, single.hidden,
                          alone.pairs[0].end_slot),
                  1e-9);
      }
    }
  }
}

TEST(Encode, AttentionRowsNormaliseOverVisibleSlots) {
  const EncoderParams p = Params();
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(4);
  const Document doc = testing::RandomSentence(rng, 6, kWords);
  const EncodingLayout l = BuildPairLayout(
      ExpandContext(doc, 1, 6), {2, 3}, {{1, 1}, {5, 6}}, vocab, 4096);
  EncoderCache cache;
  Forward(p, l, &cache);
  for (int layer = 0; layer < p.config.num_layers; ++layer) {
    for (int h = 0; h < p.config.num_heads; ++h) {
      const Matrix a = AttentionMatrix(cache, layer, h);
      for (int i = 0; i < l.num_slots(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < l.num_slots(); ++j) {
          if (!l.visible(i, j)) EXPECT_EQ(a(i, j), 0.0);
          sum += a(i, j);
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(Encode, Deterministic) {
  const EncoderParams p = Params();
  const Vocabulary vocab = testing::NumberedVocabulary(kWords);
  std::mt19937_64 rng(5);
  const Document doc = testing::RandomSentence(rng, 7, kWords);
  const EncodingLayout l = BuildSpanLayout(
      ExpandContext(doc, 1, 7), NeighborhoodPack(EnumerateSpans(7, 3), 50)[0],
      vocab, 4096);
  EXPECT_EQ(Encode(p, l).hidden, Encode(p, l).hidden);
}

}  // namespace
}  // namespace plm
