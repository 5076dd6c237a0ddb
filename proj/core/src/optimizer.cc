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

#include "plm/optimizer.h"

#include <algorithm>
#include <cmath>

#include "plm/errors.h"

namespace plm {

LinearWarmupSchedule::LinearWarmupSchedule(double peak, double warmup_fraction,
                                           long total_steps)
    : peak_(peak),
      total_steps_(std::max(1L, total_steps)),
      warmup_steps_(static_cast<long>(
          std::ceil(warmup_fraction * static_cast<double>(total_steps_)))) {
  if (warmup_fraction < 0 || warmup_fraction > 1) {
    throw ConfigError("warmup fraction must lie in [0, 1]");
  }
}

double LinearWarmupSchedule::Rate(long step) const {
  if (step <= warmup_steps_) {
    return peak_ * static_cast<double>(step) /
           static_cast<double>(std::max(1L, warmup_steps_));
  }
  const long remaining = total_steps_ - warmup_steps_;
  if (remaining <= 0) return 0.0;
  return peak_ * std::max(0.0, static_cast<double>(total_steps_ - step + 1) /
                                   static_cast<double>(remaining + 1));
}

AdamOptimizer::AdamOptimizer(double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::Step(const std::vector<NamedTensor> &params,
                         const std::vector<NamedTensor> &grads, double rate) {
  if (params.size() != grads.size()) {
    throw ConfigError("parameter and gradient lists differ in length");
  }
  if (m_.empty()) {
    for (const NamedTensor &p : params) {
      m_.push_back(p.tensor->ZerosLike());
      v_.push_back(p.tensor->ZerosLike());
    }
  }
  ++step_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (size_t t = 0; t < params.size(); ++t) {
    std::span<double> p = params[t].tensor->values();
    std::span<const double> g = grads[t].tensor->values();
    std::span<double> m = m_[t].values();
    std::span<double> v = v_[t].values();
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= rate * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace plm
