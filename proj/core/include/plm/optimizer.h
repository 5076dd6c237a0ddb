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

#ifndef PLM_OPTIMIZER_H_
#define PLM_OPTIMIZER_H_

#include <vector>

#include "plm/encoder.h"
#include "plm/tensor.h"

namespace plm {

// Linear warmup to the peak rate over the first warmup_fraction of steps,
// then linear decay to zero at total_steps.
class LinearWarmupSchedule {
 public:
  LinearWarmupSchedule(double peak, double warmup_fraction, long total_steps);

  // Rate for 1-based step `step`.
  double Rate(long step) const;
  long warmup_steps() const { return warmup_steps_; }

 private:
  double peak_;
  long total_steps_;
  long warmup_steps_;
};

// Adam with bias correction. Tensor lists passed to Step must keep the same
// order and shapes across calls.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);

  void Step(const std::vector<NamedTensor> &params,
            const std::vector<NamedTensor> &grads, double rate);
  long steps() const { return step_; }

 private:
  double beta1_;
  double beta2_;
  double eps_;
  long step_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace plm

#endif  // PLM_OPTIMIZER_H_
