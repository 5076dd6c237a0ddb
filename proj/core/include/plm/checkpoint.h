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

#ifndef PLM_CHECKPOINT_H_
#define PLM_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "plm/pipeline.h"

namespace plm {

// Binary model file: "PLMMODEL", u32 version, u64 header length, a JSON
// header, then every tensor as little-endian f64 in header order.
inline constexpr char kCheckpointMagic[] = "PLMMODEL";
inline constexpr uint32_t kCheckpointVersion = 1;

void SaveModel(const ModelBundle &model, std::ostream &out);
void SaveModel(const ModelBundle &model, const std::string &path);

// Throws InputError for unreadable or malformed files.
ModelBundle LoadModel(std::istream &in);
ModelBundle LoadModel(const std::string &path);

}  // namespace plm

#endif  // PLM_CHECKPOINT_H_
