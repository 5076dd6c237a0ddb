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

#include <sstream>

#include <gtest/gtest.h>

#include "plm/bench.h"
#include "plm/errors.h"
#include "plm/synthetic.h"

namespace plm {
namespace {

struct BenchFixture {
  Corpus corpus;
  ModelBundle model;
};

BenchFixture MakeFixture() {
  SyntheticOptions synthetic;
  synthetic.documents = 3;
  synthetic.sentences_per_document = 1;
  synthetic.min_sentence_length = 30;
  BenchFixture f;
  f.corpus = GenerateSyntheticCorpus(synthetic);
  TrainConfig config;
  config.hidden_dim = 16;
  config.ffn_dim = 32;
  config.head_hidden = 16;
  f.model = InitNerModel(f.corpus, SyntheticSchema(), config);
  return f;
}

// Spans of length <= 8 per sentence, by direct enumeration.
std::vector<long> SpanCounts(const Corpus &corpus) {
  std::vector<long> counts;
  for (const Document &doc : corpus) {
    for (const Span &s : doc.sentence_bounds) {
      long count = 0;
      for (int a = s.start; a <= s.end; ++a) {
        for (int b = a; b <= s.end && b - a < 8; ++b) ++count;
      }
      counts.push_back(count);
    }
  }
  return counts;
}

TEST(SweepGroupSize, ShapeOfTheSweep) {
  const BenchFixture f = MakeFixture();
  BenchOptions options;
  options.group_sizes = {4, 16, 64, 512};
  options.repetitions = 1;
  const std::vector<BenchRecord> records =
      SweepGroupSize(f.model, f.corpus, options);
  ASSERT_EQ(records.size(), 8u);
  const std::vector<long> spans = SpanCounts(f.corpus);
  for (size_t i = 0; i < records.size(); ++i) {
    const BenchRecord &r = records[i];
    EXPECT_EQ(r.strategy, i < 4 ? PackingStrategy::kNeighborhood
                                : PackingStrategy::kRandom);
    double layouts = 0;
    for (long n : spans) layouts += static_cast<double>((n + r.group_size - 1) / r.group_size);
    EXPECT_DOUBLE_EQ(r.layouts_per_sentence, layouts / spans.size());
    EXPECT_GT(r.sentences_per_second, 0.0);
    EXPECT_DOUBLE_EQ(r.f1, records[0].f1);
    if (i % 4 != 0) {
      EXPECT_GT(r.mean_slots, records[i - 1].mean_slots);
    }
  }
}

TEST(SweepGroupSize, RejectsBadInput) {
  const BenchFixture f = MakeFixture();
  BenchOptions options;
  options.repetitions = 0;
  EXPECT_THROW(SweepGroupSize(f.model, f.corpus, options), ConfigError);
  options.repetitions = 1;
  EXPECT_THROW(SweepGroupSize(f.model, {}, options), DataError);
}

TEST(WriteBenchCsv, HeaderAndRows) {
  BenchRecord r;
  r.group_size = 16;
  r.sentences_per_second = 12.5;
  r.mean_slots = 40;
  r.layouts_per_sentence = 2;
  r.f1 = 0.5;
  std::ostringstream out;
  WriteBenchCsv({r}, out);
  EXPECT_EQ(out.str(),
            "strategy,K,sent_per_sec,mean_slots,layouts_per_sentence,f1\n"
            "neighborhood,16,12.5,40,2,0.5\n");
}

}  // namespace
}  // namespace plm
