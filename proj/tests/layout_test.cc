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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "plm/errors.h"
#include "plm/layout.h"
#include "plm/spanspace.h"
#include "test_util.h"

namespace plm {
namespace {

ContextWindow Window(int n) {
  return ExpandContext(testing::MakeDocument({n}), 1, n);
}

Vocabulary Vocab(int n) {
  std::vector<std::string> words = Vocabulary().words();
  for (int i = 1; i <= n; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary::FromWords(words);
}

TEST(SpanLayout, TwoTokenExample) {
  const Vocabulary vocab = Vocab(2);
  const EncodingLayout l =
      BuildSpanLayout(Window(2), SpanGroup{{{1, 2}}, 0}, vocab, 64);
  ASSERT_EQ(l.num_slots(), 4);
  const MarkerVocab &m = vocab.markers();
  EXPECT_EQ(l.slot_token_ids, (std::vector<int>{vocab.Id("w1"), vocab.Id("w2"),
                                                m.span_start, m.span_end}));
  EXPECT_EQ(l.slot_position_ids, (std::vector<int>{1, 2, 1, 2}));
  EXPECT_EQ(l.visibility, (std::vector<uint8_t>{1, 1, 0, 0,  //
                                                1, 1, 0, 0,  //
                                                1, 1, 1, 1,  //
                                                1, 1, 1, 1}));
  EXPECT_TRUE(ValidateLayout(l).empty());
}

TEST(SpanLayout, MarkersSharePositions) {
  const EncodingLayout l =
      BuildSpanLayout(Window(5), SpanGroup{{{2, 4}}, 0}, Vocab(5), 64);
  EXPECT_EQ(l.slot_position_ids[5], 2);
  EXPECT_EQ(l.slot_position_ids[6], 4);
  EXPECT_EQ(l.slot_roles[5], SlotRole::kLevStart);
  EXPECT_EQ(l.slot_roles[6], SlotRole::kLevEnd);
}

TEST(SpanLayout, ThreeSpansGiveThreeDisjointPairs) {
  const EncodingLayout l = BuildSpanLayout(
      Window(4), SpanGroup{{{1, 1}, {1, 2}, {3, 4}}, 0}, Vocab(4), 64);
  EXPECT_EQ(l.num_slots(), 4 + 6);
  ASSERT_EQ(l.pairs.size(), 3u);
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(l.partner(l.pairs[p].start_slot), l.pairs[p].end_slot);
    for (int q = 0; q < 3; ++q) {
      if (p == q) continue;
      EXPECT_FALSE(l.visible(l.pairs[p].start_slot, l.pairs[q].start_slot));
      EXPECT_FALSE(l.visible(l.pairs[p].end_slot, l.pairs[q].end_slot));
    }
  }
  EXPECT_EQ(l.FindPair({3, 4}), 2);
  EXPECT_EQ(l.FindPair({2, 2}), -1);
}

TEST(SpanLayout, Errors) {
  const Vocabulary vocab = Vocab(4);
  EXPECT_THROW(BuildSpanLayout(Window(4), SpanGroup{{{3, 5}}, 0}, vocab, 64),
               LayoutError);
  try {
    BuildSpanLayout(Window(4), SpanGroup{{{1, 1}, {2, 2}}, 7}, vocab, 7);
    FAIL();
  } catch (const OverflowError &e) {
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos);
  }
}

TEST(SpanLayout, WindowOffsetsUseDocumentCoordinates) {
  const Document doc = testing::MakeDocument({3, 2, 3});
  const ContextWindow w = ExpandContext(doc, 2, 4);
  ASSERT_EQ(w.doc_offset(), 2);
  const EncodingLayout l =
      BuildSpanLayout(w, SpanGroup{{{4, 5}}, 0}, Vocab(8), 64);
  EXPECT_EQ(l.slot_position_ids[w.size()], 2);
  EXPECT_EQ(l.slot_position_ids[w.size() + 1], 3);
  EXPECT_EQ(l.origin.at(w.size()).span, (Span{4, 5}));
}

TEST(PairLayout, InsertsSolidMarkers) {
  const Vocabulary vocab = Vocab(5);
  const EncodingLayout l =
      BuildPairLayout(Window(5), {2, 3}, {{5, 5}}, vocab, 64);
  const MarkerVocab &m = vocab.markers();
  ASSERT_EQ(l.num_slots(), 9);
  EXPECT_EQ(std::vector<int>(l.slot_token_ids.begin(),
                             l.slot_token_ids.begin() + 7),
            (std::vector<int>{vocab.Id("w1"), m.subj_start, vocab.Id("w2"),
                              vocab.Id("w3"), m.subj_end, vocab.Id("w4"),
                              vocab.Id("w5")}));
  EXPECT_EQ(l.slot_position_ids,
            (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 7, 7}));
  EXPECT_EQ(l.slot_roles[1], SlotRole::kSolid);
  EXPECT_EQ(l.subject_start_slot, 1);
  EXPECT_EQ(l.subject_end_slot, 4);
  EXPECT_EQ(l.slot_token_ids[7], m.obj_start);
  EXPECT_TRUE(ValidateLayout(l).empty());
}

TEST(PairLayout, SubjectAtStart) {
  const EncodingLayout l =
      BuildPairLayout(Window(3), {1, 1}, {{3, 3}}, Vocab(3), 64);
  EXPECT_EQ(l.slot_position_ids[0], 1);
  EXPECT_EQ(l.slot_roles[0], SlotRole::kSolid);
  EXPECT_EQ(l.token_slots[0], 1);
  EXPECT_EQ(l.token_positions[0], 2);
}

TEST(PairLayout, ObjectsAppendInOrder) {
  const Vocabulary vocab = Vocab(6);
  const EncodingLayout l = BuildPairLayout(
      Window(6), {1, 1}, {{2, 2}, {4, 5}, {6, 6}}, vocab, 64);
  const int text = 8;
  ASSERT_EQ(l.num_slots(), text + 6);
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(l.pairs[p].start_slot, text + 2 * p);
    EXPECT_EQ(l.pairs[p].end_slot, text + 2 * p + 1);
    EXPECT_EQ(l.slot_token_ids[text + 2 * p], vocab.markers().obj_start);
  }
  EXPECT_FALSE(l.visible(text, text + 2));
  EXPECT_TRUE(l.visible(text, text + 1));
  // Object (4,5) sits at renumbered positions 6 and 7.
  EXPECT_EQ(l.slot_position_ids[text + 2], 6);
  EXPECT_EQ(l.slot_position_ids[text + 3], 7);
}

TEST(PairLayout, RejectsSubjectAsObject) {
  EXPECT_THROW(BuildPairLayout(Window(3), {1, 1}, {{1, 1}}, Vocab(3), 64),
               LayoutError);
}

TEST(TextLayout, FullyVisible) {
  const EncodingLayout l = BuildTextLayout(Window(3), Vocab(3));
  EXPECT_EQ(l.num_slots(), 3);
  EXPECT_EQ(l.visibility, std::vector<uint8_t>(9, 1));
  EXPECT_TRUE(ValidateLayout(l).empty());
}

TEST(ValidateLayout, ForeignMarkerVisibility) {
  EncodingLayout l = BuildSpanLayout(
      Window(3), SpanGroup{{{1, 1}, {2, 3}}, 0}, Vocab(3), 64);
  const int a = l.pairs[0].start_slot;
  const int b = l.pairs[1].start_slot;
  l.set_visible(a, b, true);
  const auto violations = ValidateLayout(l);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].slot_i, a);
  EXPECT_EQ(violations[0].slot_j, b);
}

TEST(ValidateLayout, WrongEndPosition) {
  EncodingLayout l =
      BuildSpanLayout(Window(4), SpanGroup{{{1, 3}}, 0}, Vocab(4), 64);
  l.slot_position_ids[l.pairs[0].end_slot] = 4;
  EXPECT_EQ(ValidateLayout(l).size(), 1u);
}

TEST(ValidateLayout, TextSeeingMarker) {
  EncodingLayout l =
      BuildSpanLayout(Window(4), SpanGroup{{{1, 3}}, 0}, Vocab(4), 64);
  l.set_visible(0, l.pairs[0].start_slot, true);
  EXPECT_EQ(ValidateLayout(l).size(), 1u);
}

TEST(Layout, RandomizedAgainstRuleChecker) {
  std::mt19937_64 rng(17);
  const Vocabulary vocab = testing::NumberedVocabulary(20);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> len(1, 16);
    const Document doc = testing::RandomSentence(rng, len(rng), 20);
    const ContextWindow w = ExpandContext(doc, 1, doc.num_tokens());
    EncodingLayout l;
    if (trial % 2 == 0) {
      const auto groups =
          NeighborhoodPack(EnumerateSpans(doc.num_tokens(), 4), 1 + trial % 9);
      l = BuildSpanLayout(w, groups[trial % groups.size()], vocab, 4096);
    } else {
      auto entities = testing::RandomEntities(rng, doc.num_tokens(), 5, 3);
      const auto pairs = CandidatePairs(entities);
      l = BuildPairLayout(w, pairs[0].subject, pairs[0].objects, vocab, 4096);
    }
    ASSERT_TRUE(ValidateLayout(l).empty()) << "trial " << trial;
    ASSERT_EQ(l.visibility, testing::ExpectedVisibility(l)) << "trial " << trial;
  }
}

TEST(DumpLayout, ListsSlotsAndGrid) {
  const Vocabulary vocab = Vocab(2);
  const EncodingLayout l =
      BuildSpanLayout(Window(2), SpanGroup{{{1, 2}}, 0}, vocab, 64);
  std::ostringstream out;
  DumpLayout(l, vocab, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("slots 4"), std::string::npos);
  EXPECT_NE(text.find("<span>"), std::string::npos);
  EXPECT_NE(text.find("\n1100\n"), std::string::npos);
}

}  // namespace
}  // namespace plm
