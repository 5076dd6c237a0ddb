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

#include "plm/synthetic.h"

#include <array>
#include <random>
#include <string>
#include <vector>

#include "plm/errors.h"

namespace plm {

namespace {

// Entity words by type and role. A one-word entity uses a single word; a
// longer one starts with a first word, ends with a last word and fills the
// middle from the middle list. Entities are at least one filler apart, so
// for spans of up to four tokens the label follows from the boundary tokens.
struct TypeWords {
  std::vector<std::string> single, first, middle, last;
};

const std::array<TypeWords, 3> kWords = {{
    {{"alice", "bob", "carol", "dave", "erin", "frank"},
     {"dr", "mr", "ms", "prof"},
     {"j", "k", "m", "t"},
     {"smith", "jones", "brown", "lee"}},
    {{"acme", "globex", "initech", "hooli", "wonka", "stark"},
     {"bank", "bureau", "institute", "society"},
     {"national", "royal", "general", "united"},
     {"inc", "corp", "ltd", "group"}},
    {{"paris", "berlin", "tokyo", "lima", "oslo", "cairo"},
     {"new", "san", "port", "lake"},
     {"upper", "lower", "north", "south"},
     {"city", "harbor", "falls", "springs"}},
}};

const std::vector<std::string> kFiller = {
    "the",  "a",    "of",    "and",   "with",  "met",   "near",
    "from", "in",   "said",  "that",  "then",  "also",  "while",
    "over", "into", "about", "after", "before", "under"};
const std::array<const char *, 3> kTypes = {"PER", "ORG", "LOC"};

// Relation implied by an ordered type pair, or nullptr.
const char *RelationFor(const std::string &first, const std::string &second) {
  if (first == "PER" && second == "ORG") return "WORKS_AT";
  if (first == "PER" && second == "LOC") return "LIVES_IN";
  if (first == "ORG" && second == "LOC") return "LOCATED_IN";
  if (first == "PER" && second == "PER") return "KNOWS";
  return nullptr;
}

int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

LabelSchema SyntheticSchema() {
  LabelSchema schema;
  schema.entity_types = {"PER", "ORG", "LOC"};
  schema.relation_types = {"WORKS_AT", "LIVES_IN", "LOCATED_IN", "KNOWS"};
  schema.symmetric_relations = {"KNOWS"};
  return schema;
}

Corpus GenerateSyntheticCorpus(const SyntheticOptions &o) {
  if (o.documents < 0 || o.sentences_per_document < 1 || o.max_entities < 0 ||
      o.min_gap < 1 || o.max_gap < o.min_gap) {
    throw ConfigError("invalid synthetic corpus options");
  }
  std::mt19937_64 rng(o.seed);
  Corpus corpus;
  for (int d = 0; d < o.documents; ++d) {
    Document doc;
    doc.doc_id = "synth-" + std::to_string(d);
    for (int s = 0; s < o.sentences_per_document; ++s) {
      const int start = doc.num_tokens() + 1;
      std::vector<EntityMention> mentions;
      const int count = Uniform(rng, 1, std::max(1, o.max_entities));
      for (int e = 0; e < count && o.max_entities > 0; ++e) {
        for (int g = Uniform(rng, o.min_gap, o.max_gap); g > 0; --g) {
          doc.tokens.push_back(kFiller[Uniform(rng, 0, kFiller.size() - 1)]);
        }
        const int type = Uniform(rng, 0, 2);
        const TypeWords &words = kWords[type];
        const int length = Uniform(rng, 1, 3);
        const int first = doc.num_tokens() + 1;
        auto pick = [&](const std::vector<std::string> &list) {
          doc.tokens.push_back(list[Uniform(rng, 0, list.size() - 1)]);
        };
        if (length == 1) {
          pick(words.single);
        } else {
          pick(words.first);
          for (int w = 2; w < length; ++w) pick(words.middle);
          pick(words.last);
        }
        mentions.push_back({{first, first + length - 1}, kTypes[type]});
      }
      doc.tokens.push_back(kFiller[Uniform(rng, 0, kFiller.size() - 1)]);
      while (doc.num_tokens() - start + 2 < o.min_sentence_length) {
        doc.tokens.push_back(kFiller[Uniform(rng, 0, kFiller.size() - 1)]);
      }
      doc.tokens.push_back(".");
      doc.sentence_bounds.push_back({start, doc.num_tokens()});
      for (size_t i = 0; i < mentions.size(); ++i) {
        for (size_t j = i + 1; j < mentions.size(); ++j) {
          if (const char *rel =
                  RelationFor(mentions[i].label, mentions[j].label)) {
            doc.relations.push_back({mentions[i].span, mentions[j].span, rel});
          }
        }
      }
      doc.entities.insert(doc.entities.end(), mentions.begin(), mentions.end());
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace plm
