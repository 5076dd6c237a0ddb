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

#include "plm/bench.h"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "plm/errors.h"
#include "plm/metrics.h"

namespace plm {

std::vector<BenchRecord> SweepGroupSize(const ModelBundle &model,
                                        const Corpus &corpus,
                                        const BenchOptions &options) {
  if (options.repetitions < 1) {
    throw ConfigError("bench repetitions must be positive");
  }
  if (corpus.empty()) throw DataError("bench corpus is empty");
  std::vector<BenchRecord> records;
  for (PackingStrategy strategy : options.strategies) {
    for (int k : options.group_sizes) {
      PredictOptions predict;
      predict.group_size = k;
      predict.packing = strategy;
      predict.seed = options.seed;
      predict.threads = options.threads;
      PredictStats stats;
      const PipelineOutput output = PredictNer(model, corpus, predict, &stats);
      std::vector<double> seconds;
      for (int r = 0; r < options.repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        PredictNer(model, corpus, predict);
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        seconds.push_back(elapsed.count());
      }
      std::sort(seconds.begin(), seconds.end());
      const double median = seconds[seconds.size() / 2];
      BenchRecord record;
      record.strategy = strategy;
      record.group_size = k;
      record.sentences_per_second =
          median > 0 ? static_cast<double>(stats.sentences) / median : 0.0;
      record.mean_slots =
          stats.layouts > 0
              ? static_cast<double>(stats.slots) / static_cast<double>(stats.layouts)
              : 0.0;
      record.layouts_per_sentence =
          stats.sentences > 0 ? static_cast<double>(stats.layouts) /
                                    static_cast<double>(stats.sentences)
                              : 0.0;
      record.f1 = NerF1(EntityKeys(corpus),
                        EntityKeys(ToCorpus(corpus, output)))
                      .f1;
      records.push_back(record);
    }
  }
  return records;
}

void WriteBenchCsv(const std::vector<BenchRecord> &records, std::ostream &out) {
  out << "strategy,K,sent_per_sec,mean_slots,layouts_per_sentence,f1\n";
  for (const BenchRecord &r : records) {
    out << ToString(r.strategy) << ',' << r.group_size << ','
        << r.sentences_per_second << ',' << r.mean_slots << ','
        << r.layouts_per_sentence << ',' << r.f1 << '\n';
  }
}

}  // namespace plm
