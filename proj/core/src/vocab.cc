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

#include "plm/vocab.h"

#include "plm/errors.h"

namespace plm {

namespace {

const char *const kReserved[Vocabulary::kNumReserved] = {
    "[UNK]",  "[MASK]",  "entity",    "<span>", "</span>",
    "[S]",    "[/S]",    "[O]",       "[/O]"};

}  // namespace

Vocabulary::Vocabulary() {
  for (const char *word : kReserved) words_.push_back(word);
  index_["[UNK]"] = kUnk;
  index_["[MASK]"] = kMask;
  index_["entity"] = kEntityWord;
  markers_ = {3, 4, 5, 6, 7, 8};
}

Vocabulary Vocabulary::Build(const Corpus &corpus) {
  Vocabulary vocab;
  for (const Document &doc : corpus) {
    for (const std::string &token : doc.tokens) vocab.Add(token);
  }
  return vocab;
}

Vocabulary Vocabulary::FromWords(const std::vector<std::string> &words) {
  Vocabulary vocab;
  if (words.size() < kNumReserved) {
    throw ConfigError("vocabulary is missing reserved entries");
  }
  for (int i = 0; i < kNumReserved; ++i) {
    if (words[i] != kReserved[i]) {
      throw ConfigError("vocabulary reserved entry " + std::to_string(i) +
                        " is '" + words[i] + "'");
    }
  }
  for (size_t i = kNumReserved; i < words.size(); ++i) {
    if (vocab.Add(words[i]) != static_cast<int>(i)) {
      throw ConfigError("duplicate vocabulary entry '" + words[i] + "'");
    }
  }
  return vocab;
}

int Vocabulary::Add(const std::string &word) {
  auto it = index_.find(word);
  if (it != index_.end()) return it->second;
  const int id = size();
  words_.push_back(word);
  index_.emplace(word, id);
  return id;
}

int Vocabulary::Id(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::Ids(const std::vector<std::string> &tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string &token : tokens) ids.push_back(Id(token));
  return ids;
}

}  // namespace plm
