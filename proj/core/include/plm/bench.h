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

#ifndef PLM_BENCH_H_
#define PLM_BENCH_H_

#include <iosfwd>
#include <vector>

#include "plm/pipeline.h"

namespace plm {

struct BenchOptions {
  std::vector<int> group_sizes = {16, 32, 64, 128, 256, 512};
  std::vector<PackingStrategy> strategies = {PackingStrategy::kNeighborhood,
                                             PackingStrategy::kRandom};
  // Timed runs per setting; the median is reported after one warm-up run.
  int repetitions = 3;
  int threads = 1;
  uint64_t seed = 0;
};

struct BenchRecord {
  PackingStrategy strategy = PackingStrategy::kNeighborhood;
  int group_size = 0;
  double sentences_per_second = 0.0;
  double mean_slots = 0.0;
  double layouts_per_sentence = 0.0;
  double f1 = 0.0;
};

// NER inference throughput for every (strategy, K) pair on `corpus`.
std::vector<BenchRecord> SweepGroupSize(const ModelBundle &model,
                                        const Corpus &corpus,
                                        const BenchOptions &options);

// Header "strategy,K,sent_per_sec,mean_slots,layouts_per_sentence,f1".
void WriteBenchCsv(const std::vector<BenchRecord> &records, std::ostream &out);

}  // namespace plm

#endif  // PLM_BENCH_H_
