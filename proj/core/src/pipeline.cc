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

#include "plm/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "plm/errors.h"
#include "plm/layout.h"
#include "plm/objective.h"
#include "plm/optimizer.h"

namespace plm {

using json = nlohmann::json;

namespace {

uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  // splitmix64 finalizer over the combined words.
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string Trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(const std::string &value) {
  std::vector<std::string> items;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T>
T ParseNumber(const std::string &key, const std::string &value) {
  std::istringstream in(value);
  T result{};
  in >> result;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return result;
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

std::string FormatDouble(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

struct SentenceRef {
  int doc = 0;
  int sent = 0;  // 0-based
};

std::vector<SentenceRef> AllSentences(const Corpus &corpus) {
  std::vector<SentenceRef> refs;
  for (size_t d = 0; d < corpus.size(); ++d) {
    for (int s = 0; s < corpus[d].num_sentences(); ++s) {
      refs.push_back({static_cast<int>(d), s});
    }
  }
  return refs;
}

// Sentence spans in document coordinates.
std::vector<Span> SentenceSpans(const Document &doc, int sent, int max_length) {
  const Span bounds = doc.sentence_bounds[sent];
  std::vector<Span> spans = EnumerateSpans(bounds.length(), max_length);
  for (Span &span : spans) span = span.Shifted(bounds.start - 1);
  return spans;
}

EncoderConfig MakeEncoderConfig(const TrainConfig &config, int vocab_size) {
  EncoderConfig ec;
  ec.vocab_size = vocab_size;
  ec.hidden_dim = config.hidden_dim;
  ec.num_layers = config.num_layers;
  ec.num_heads = config.num_heads;
  ec.ffn_dim = config.ffn_dim;
  // Pair layouts add two solid markers to the stream.
  ec.max_position = config.context_window + 2;
  ec.seed = config.seed;
  ec.Validate();
  return ec;
}

std::vector<NerInstance> BuildNerInstances(const ModelBundle &model,
                                           const Document &doc, int sent,
                                           PackingStrategy packing,
                                           uint64_t pack_seed) {
  const TrainConfig &config = model.config;
  const ContextWindow window =
      ExpandContext(doc, sent + 1, config.context_window);
  std::map<Span, int> gold;
  for (const EntityMention &e : doc.EntitiesInSentence(sent)) {
    const int cls = model.schema.EntityClass(e.label);
    if (cls < 0) {
      throw DataError("entity type '" + e.label + "' in '" + doc.doc_id +
                      "' is not in the schema");
    }
    gold.emplace(e.span, cls);
  }
  std::vector<NerInstance> instances;
  const std::vector<SpanGroup> groups =
      Pack(SentenceSpans(doc, sent, config.max_span_length), config.group_size,
           packing, pack_seed);
  for (const SpanGroup &group : groups) {
    NerInstance instance;
    instance.layout =
        BuildSpanLayout(window, group, model.vocab, model.max_slots());
    for (const Span &span : group.spans) {
      auto it = gold.find(span);
      instance.labels.push_back(it == gold.end() ? 0 : it->second);
    }
    instances.push_back(std::move(instance));
  }
  return instances;
}

// Directed gold labels for every ordered entity pair of one sentence.
std::map<std::pair<Span, Span>, int> DirectedGold(const ModelBundle &model,
                                                  const Document &doc,
                                                  int sent) {
  std::vector<RelationMention> local;
  for (const RelationMention &r : doc.relations) {
    if (doc.SentenceOf(r.subject.start) == sent &&
        doc.SentenceOf(r.object.start) == sent) {
      local.push_back(r);
    }
  }
  return DirectedGoldLabels(model.relation_space, local);
}

std::vector<ReInstance> BuildReInstances(const ModelBundle &model,
                                         const Document &doc, int sent) {
  const std::vector<EntityMention> entities = doc.EntitiesInSentence(sent);
  if (entities.size() < 2) return {};
  const ContextWindow window =
      ExpandContext(doc, sent + 1, model.config.context_window);
  std::map<Span, int> types;
  for (const EntityMention &e : entities) {
    const int type = model.schema.EntityTypeIndex(e.label);
    if (type < 0) {
      throw DataError("entity type '" + e.label + "' in '" + doc.doc_id +
                      "' is not in the schema");
    }
    types.emplace(e.span, type);
  }
  const auto gold = DirectedGold(model, doc, sent);
  std::vector<ReInstance> instances;
  for (const SubjectCandidates &candidates : CandidatePairs(entities)) {
    if (candidates.objects.empty()) continue;
    ReInstance instance;
    instance.layout = BuildPairLayout(window, candidates.subject,
                                      candidates.objects, model.vocab,
                                      model.max_slots());
    for (const Span &object : candidates.objects) {
      auto it = gold.find({candidates.subject, object});
      instance.relations.push_back(it == gold.end()
                                       ? DirectedLabelSpace::kNoRelation
                                       : it->second);
      instance.object_types.push_back(types.at(object));
    }
    instances.push_back(std::move(instance));
  }
  return instances;
}

template <typename Instance>
using InstanceBuilder =
    std::function<std::vector<Instance>(const SentenceRef &, int epoch)>;

// Shared optimisation loop. `units` are the sentences that yield instances.
template <typename Instance>
void Optimize(ModelBundle *model, const std::vector<SentenceRef> &units,
              const InstanceBuilder<Instance> &build, bool rebuild_each_epoch,
              const ProgressCallback &progress) {
  const TrainConfig &config = model->config;
  std::vector<std::vector<Instance>> cache;
  if (!rebuild_each_epoch) {
    for (const SentenceRef &ref : units) cache.push_back(build(ref, 0));
  }
  const long steps_per_epoch =
      (static_cast<long>(units.size()) + config.batch_size - 1) /
      config.batch_size;
  LinearWarmupSchedule schedule(config.learning_rate, config.warmup_fraction,
                                steps_per_epoch * config.epochs);
  AdamOptimizer optimizer;
  std::mt19937_64 rng(MixSeed(config.seed, 0x5eed));
  std::vector<size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    double loss_sum = 0.0;
    long batches = 0;
    double rate = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      TrainingBatch batch;
      batch.aux_weight = config.aux_weight;
      const size_t end = std::min(order.size(), begin + config.batch_size);
      for (size_t i = begin; i < end; ++i) {
        std::vector<Instance> built;
        const std::vector<Instance> &instances =
            rebuild_each_epoch ? (built = build(units[order[i]], epoch))
                               : cache[order[i]];
        for (const Instance &instance : instances) {
          if constexpr (std::is_same_v<Instance, NerInstance>) {
            batch.ner.push_back(instance);
          } else {
            batch.re.push_back(instance);
          }
        }
      }
      ++step;
      rate = schedule.Rate(step);
      if (batch.num_targets() == 0) continue;
      LossAndGradient lg = LossAndGrad(model->encoder, model->heads, batch);
      std::vector<NamedTensor> params = model->encoder.Tensors();
      std::vector<NamedTensor> grads = lg.encoder_grad.Tensors();
      for (const NamedTensor &t : model->heads.Tensors()) params.push_back(t);
      for (const NamedTensor &t : lg.head_grad.Tensors()) grads.push_back(t);
      optimizer.Step(params, grads, rate);
      loss_sum += lg.loss;
      ++batches;
    }
    if (progress) {
      progress({epoch, batches == 0 ? 0.0 : loss_sum / batches, rate});
    }
  }
}

ModelBundle StartModel(ModelTask task, const Corpus &corpus,
                       const LabelSchema &schema, const TrainConfig &config) {
  config.Validate();
  schema.Validate();
  if (corpus.empty() || AllSentences(corpus).empty()) {
    throw DataError("training corpus is empty");
  }
  ModelBundle model;
  model.task = task;
  model.config = config;
  model.schema = schema;
  model.relation_space =
      DirectedLabelSpace(schema.relation_types, schema.symmetric_relations);
  model.vocab = Vocabulary::Build(corpus);
  model.encoder = InitParams(MakeEncoderConfig(config, model.vocab.size()));
  return model;
}

// Greedy non-overlapping selection by descending score.
std::vector<ScoredEntity> ResolveOverlaps(std::vector<ScoredEntity> candidates,
                                          bool nested) {
  auto by_span = [](const ScoredEntity &a, const ScoredEntity &b) {
    return a.mention.span < b.mention.span;
  };
  if (nested) {
    std::sort(candidates.begin(), candidates.end(), by_span);
    return candidates;
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const ScoredEntity &a, const ScoredEntity &b) {
              if (a.score != b.score) return a.score > b.score;
              return a.mention.span < b.mention.span;
            });
  std::vector<ScoredEntity> kept;
  for (const ScoredEntity &c : candidates) {
    const bool clash = std::any_of(
        kept.begin(), kept.end(), [&](const ScoredEntity &k) {
          return k.mention.span.Overlaps(c.mention.span);
        });
    if (!clash) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), by_span);
  return kept;
}

// Runs `task(i)` for i in [0, count) on up to `threads` workers.
void ParallelFor(int count, int threads,
                 const std::function<void(int)> &task) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (int i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread &worker : workers) worker.join();
  for (const std::exception_ptr &error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

struct SentencePrediction {
  std::vector<ScoredEntity> entities;
  std::vector<ScoredRelation> relations;
  std::map<Span, std::vector<std::string>> type_votes;
  PredictStats stats;
};

SentencePrediction PredictNerSentence(const ModelBundle &model,
                                      const ModelBundle &filter,
                                      const Document &doc, int doc_index,
                                      int sent, const PredictOptions &options) {
  SentencePrediction result;
  result.stats.sentences = 1;
  const TrainConfig &config = model.config;
  const ContextWindow window =
      ExpandContext(doc, sent + 1, config.context_window);
  std::vector<Span> candidates =
      SentenceSpans(doc, sent, config.max_span_length);

  if (options.two_stage_top_m > 0) {
    const EncodingLayout text = BuildTextLayout(window, filter.vocab);
    EncoderCache cache;
    const SlotOutputs outputs = Forward(filter.encoder, text, &cache);
    ++result.stats.layouts;
    ++result.stats.text_passes;
    result.stats.slots += text.num_slots();
    std::vector<std::pair<double, Span>> ranked;
    for (const Span &span : candidates) {
      const std::vector<double> probs = Softmax(ClassifierForward(
          filter.heads.stage1, TconcatFeature(outputs, text, span)));
      ranked.push_back({1.0 - probs[0], span});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto &a, const auto &b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second < b.second;
                     });
    if (static_cast<int>(ranked.size()) > options.two_stage_top_m) {
      ranked.resize(options.two_stage_top_m);
    }
    candidates.clear();
    for (const auto &entry : ranked) candidates.push_back(entry.second);
  }

  const bool want_tconcat = config.ner_mode != NerMode::kMarkerOnly;
  std::vector<ScoredEntity> scored;
  const std::vector<SpanGroup> groups =
      Pack(candidates, options.group_size, options.packing,
           MixSeed(options.seed, doc_index, sent));
  for (const SpanGroup &group : groups) {
    const EncodingLayout layout =
        BuildSpanLayout(window, group, model.vocab, model.max_slots());
    EncoderCache cache;
    const SlotOutputs outputs = Forward(model.encoder, layout, &cache);
    ++result.stats.layouts;
    result.stats.slots += layout.num_slots();
    for (const Span &span : group.spans) {
      const SpanRepr repr =
          SpanRepresentation(outputs, layout, span, want_tconcat);
      const std::vector<double> probs =
          Softmax(NerLogits(repr, model.heads.ner, config.ner_mode));
      ++result.stats.spans_scored;
      const int label = Argmax(probs);
      if (label == 0) continue;
      scored.push_back(
          {{span, model.schema.entity_types[label - 1]}, probs[label]});
    }
  }
  result.entities = ResolveOverlaps(std::move(scored), config.nested);
  return result;
}

SentencePrediction PredictReSentence(const ModelBundle &model,
                                     const Document &doc, int sent,
                                     const std::vector<ScoredEntity> &all) {
  SentencePrediction result;
  result.stats.sentences = 1;
  const Span bounds = doc.sentence_bounds[sent];
  std::vector<EntityMention> entities;
  for (const ScoredEntity &e : all) {
    if (bounds.Contains(e.mention.span.start) &&
        bounds.Contains(e.mention.span.end)) {
      entities.push_back(e.mention);
    }
  }
  const std::vector<SubjectCandidates> pairs = CandidatePairs(entities);
  if (pairs.size() < 2) return result;
  const ContextWindow window =
      ExpandContext(doc, sent + 1, model.config.context_window);

  std::map<std::pair<Span, Span>, ReLogits> logits;
  for (const SubjectCandidates &candidates : pairs) {
    const EncodingLayout layout =
        BuildPairLayout(window, candidates.subject, candidates.objects,
                        model.vocab, model.max_slots());
    EncoderCache cache;
    const SlotOutputs outputs = Forward(model.encoder, layout, &cache);
    ++result.stats.layouts;
    result.stats.slots += layout.num_slots();
    for (const Span &object : candidates.objects) {
      logits[{candidates.subject, object}] = RelationLogits(
          PairRepresentation(outputs, layout, object), model.heads);
      ++result.stats.spans_scored;
    }
  }

  const DirectedLabelSpace &space = model.relation_space;
  auto vote = [&](const Span &subject, const Span &object) {
    const ReLogits &l = logits.at({subject, object});
    result.type_votes[object].push_back(
        model.schema.entity_types[Argmax(l.object_type)]);
  };
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (size_t j = i + 1; j < pairs.size(); ++j) {
      const Span &a = pairs[i].subject;
      const Span &b = pairs[j].subject;
      const BidirectionalScores combined = CombineBidirectional(
          logits.at({a, b}).relation, logits.at({b, a}).relation, space);
      if (combined.label == DirectedLabelSpace::kNoRelation) continue;
      const double score = combined.scores[combined.label] / 2.0;
      if (space.is_inverse(combined.label)) {
        result.relations.push_back(
            {{b, a, space.name(space.inverse_of(combined.label))}, score});
      } else {
        result.relations.push_back({{a, b, space.name(combined.label)}, score});
      }
      vote(a, b);
      vote(b, a);
    }
  }
  return result;
}

}  // namespace

void TrainConfig::Validate() const {
  auto positive = [](double value, const char *name) {
    if (!(value > 0)) {
      throw ConfigError(std::string(name) + " must be positive");
    }
  };
  positive(learning_rate, "learning_rate");
  positive(epochs, "epochs");
  positive(batch_size, "batch_size");
  positive(group_size, "group_size");
  positive(max_span_length, "max_span_length");
  positive(context_window, "context_window");
  positive(hidden_dim, "hidden_dim");
  positive(num_heads, "num_heads");
  positive(ffn_dim, "ffn_dim");
  positive(head_hidden, "head_hidden");
  if (num_layers < 0) throw ConfigError("num_layers must be non-negative");
  if (warmup_fraction < 0 || warmup_fraction > 1) {
    throw ConfigError("warmup_fraction must lie in [0, 1]");
  }
  if (aux_weight < 0) throw ConfigError("aux_weight must be non-negative");
  if (hidden_dim % num_heads != 0) {
    throw ConfigError("hidden_dim must be divisible by num_heads");
  }
}

std::vector<std::string> TrainConfig::Keys() {
  std::vector<std::string> keys;
  for (const auto &item : TrainConfig().Items()) keys.push_back(item.first);
  return keys;
}

void TrainConfig::Set(const std::string &key, const std::string &raw) {
  const std::string value = Trim(raw);
  if (key == "learning_rate") {
    learning_rate = ParseNumber<double>(key, value);
  } else if (key == "warmup_fraction") {
    warmup_fraction = ParseNumber<double>(key, value);
  } else if (key == "epochs") {
    epochs = ParseNumber<int>(key, value);
  } else if (key == "batch_size") {
    batch_size = ParseNumber<int>(key, value);
  } else if (key == "group_size") {
    group_size = ParseNumber<int>(key, value);
  } else if (key == "max_span_length") {
    max_span_length = ParseNumber<int>(key, value);
  } else if (key == "context_window") {
    context_window = ParseNumber<int>(key, value);
  } else if (key == "packing") {
    packing = ParsePackingStrategy(value);
  } else if (key == "aux_weight") {
    aux_weight = ParseNumber<double>(key, value);
  } else if (key == "seed") {
    seed = ParseNumber<uint64_t>(key, value);
  } else if (key == "hidden_dim") {
    hidden_dim = ParseNumber<int>(key, value);
  } else if (key == "num_layers") {
    num_layers = ParseNumber<int>(key, value);
  } else if (key == "num_heads") {
    num_heads = ParseNumber<int>(key, value);
  } else if (key == "ffn_dim") {
    ffn_dim = ParseNumber<int>(key, value);
  } else if (key == "head_hidden") {
    head_hidden = ParseNumber<int>(key, value);
  } else if (key == "ner_mode") {
    ner_mode = ParseNerMode(value);
  } else if (key == "stage1") {
    stage1 = ParseBool(key, value);
  } else if (key == "prompt_init") {
    prompt_init = ParseBool(key, value);
  } else if (key == "nested") {
    nested = ParseBool(key, value);
  } else if (key == "symmetric") {
    symmetric = SplitList(value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> TrainConfig::Items() const {
  std::string sym;
  for (size_t i = 0; i < symmetric.size(); ++i) {
    sym += (i ? "," : "") + symmetric[i];
  }
  return {{"learning_rate", FormatDouble(learning_rate)},
          {"warmup_fraction", FormatDouble(warmup_fraction)},
          {"epochs", std::to_string(epochs)},
          {"batch_size", std::to_string(batch_size)},
          {"group_size", std::to_string(group_size)},
          {"max_span_length", std::to_string(max_span_length)},
          {"context_window", std::to_string(context_window)},
          {"packing", ToString(packing)},
          {"aux_weight", FormatDouble(aux_weight)},
          {"seed", std::to_string(seed)},
          {"hidden_dim", std::to_string(hidden_dim)},
          {"num_layers", std::to_string(num_layers)},
          {"num_heads", std::to_string(num_heads)},
          {"ffn_dim", std::to_string(ffn_dim)},
          {"head_hidden", std::to_string(head_hidden)},
          {"ner_mode", ToString(ner_mode)},
          {"stage1", stage1 ? "true" : "false"},
          {"prompt_init", prompt_init ? "true" : "false"},
          {"nested", nested ? "true" : "false"},
          {"symmetric", sym}};
}

void ApplyConfig(std::istream &in, TrainConfig *config) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    try {
      config->Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError &e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
}

TrainConfig LoadConfigFile(const std::string &path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  ApplyConfig(in, &base);
  return base;
}

ModelBundle InitNerModel(const Corpus &corpus, const LabelSchema &schema,
                         const TrainConfig &config) {
  ModelBundle model = StartModel(ModelTask::kNer, corpus, schema, config);
  model.schema.nested = config.nested || schema.nested;
  model.config.nested = model.schema.nested;
  if (config.prompt_init) {
    const MarkerVocab &m = model.vocab.markers();
    model.encoder = PromptInitMarkers(
        std::move(model.encoder),
        {{m.span_start, Vocabulary::kMask}, {m.span_end, Vocabulary::kEntityWord}});
  }
  std::mt19937_64 rng(MixSeed(config.seed, 0x4ead));
  const int d = config.hidden_dim;
  model.heads.ner_mode = config.ner_mode;
  model.heads.ner = MakeClassifier(NerInputDim(config.ner_mode, d),
                                   config.head_hidden,
                                   schema.num_entity_classes(), rng);
  if (config.stage1) {
    model.heads.stage1 = MakeClassifier(2 * d, config.head_hidden,
                                        schema.num_entity_classes(), rng);
  }
  return model;
}

ModelBundle TrainNer(const Corpus &corpus, const LabelSchema &schema,
                     const TrainConfig &config,
                     const ProgressCallback &progress) {
  ModelBundle model = InitNerModel(corpus, schema, config);
  const std::vector<SentenceRef> units = AllSentences(corpus);
  const bool random = config.packing == PackingStrategy::kRandom;
  InstanceBuilder<NerInstance> build = [&](const SentenceRef &ref, int epoch) {
    return BuildNerInstances(model, corpus[ref.doc], ref.sent, config.packing,
                             MixSeed(config.seed, epoch,
                                     (static_cast<uint64_t>(ref.doc) << 20) |
                                         ref.sent));
  };
  Optimize<NerInstance>(&model, units, build, random, progress);
  return model;
}

ModelBundle TrainRe(const Corpus &corpus, const LabelSchema &schema,
                    const TrainConfig &config,
                    const ProgressCallback &progress) {
  ModelBundle model = StartModel(ModelTask::kRe, corpus, schema, config);
  if (model.relation_space.size() < 2) {
    throw DataError("relation training needs at least one relation type");
  }
  model.relation_dominance = RelationTypeStatistic(corpus);
  std::mt19937_64 rng(MixSeed(config.seed, 0x4ead));
  const int d = config.hidden_dim;
  model.heads.re = MakeClassifier(4 * d, config.head_hidden,
                                  model.relation_space.size(), rng);
  model.heads.aux = MakeClassifier(
      4 * d, config.head_hidden, static_cast<int>(schema.entity_types.size()),
      rng);
  std::vector<SentenceRef> units;
  for (const SentenceRef &ref : AllSentences(corpus)) {
    if (corpus[ref.doc].EntitiesInSentence(ref.sent).size() >= 2) {
      units.push_back(ref);
    }
  }
  if (units.empty()) {
    throw DataError("no sentence has two or more gold entities");
  }
  InstanceBuilder<ReInstance> build = [&](const SentenceRef &ref, int) {
    return BuildReInstances(model, corpus[ref.doc], ref.sent);
  };
  Optimize<ReInstance>(&model, units, build, false, progress);
  return model;
}

void PredictStats::Add(const PredictStats &other) {
  sentences += other.sentences;
  layouts += other.layouts;
  slots += other.slots;
  text_passes += other.text_passes;
  spans_scored += other.spans_scored;
}

PipelineOutput PredictNer(const ModelBundle &model, const Corpus &corpus,
                          const PredictOptions &options, PredictStats *stats,
                          const ModelBundle *stage1) {
  if (options.group_size < 1) {
    throw ConfigError("group size must be positive");
  }
  const ModelBundle &filter = stage1 != nullptr ? *stage1 : model;
  if (options.two_stage_top_m > 0 && filter.heads.stage1.empty()) {
    throw ConfigError("two-stage prediction requested but the model has no "
                      "stage-1 T-Concat head");
  }
  const std::vector<SentenceRef> refs = AllSentences(corpus);
  std::vector<SentencePrediction> results(refs.size());
  ParallelFor(static_cast<int>(refs.size()), options.threads, [&](int i) {
    results[i] = PredictNerSentence(model, filter, corpus[refs[i].doc],
                                    refs[i].doc, refs[i].sent, options);
  });
  PipelineOutput output(corpus.size());
  for (size_t d = 0; d < corpus.size(); ++d) output[d].doc_id = corpus[d].doc_id;
  for (size_t i = 0; i < refs.size(); ++i) {
    DocumentPrediction &doc = output[refs[i].doc];
    doc.entities.insert(doc.entities.end(), results[i].entities.begin(),
                        results[i].entities.end());
    if (stats != nullptr) stats->Add(results[i].stats);
  }
  return output;
}

PipelineOutput PredictRe(const ModelBundle &model, const Corpus &corpus,
                         const PipelineOutput &entities,
                         const PredictOptions &options, PredictStats *stats) {
  if (entities.size() != corpus.size()) {
    throw ConfigError("entity predictions do not align with the corpus");
  }
  const std::vector<SentenceRef> refs = AllSentences(corpus);
  std::vector<SentencePrediction> results(refs.size());
  ParallelFor(static_cast<int>(refs.size()), options.threads, [&](int i) {
    results[i] = PredictReSentence(model, corpus[refs[i].doc], refs[i].sent,
                                   entities[refs[i].doc].entities);
  });
  PipelineOutput output = entities;
  for (DocumentPrediction &doc : output) {
    doc.relations.clear();
    doc.type_votes.clear();
  }
  for (size_t i = 0; i < refs.size(); ++i) {
    DocumentPrediction &doc = output[refs[i].doc];
    doc.relations.insert(doc.relations.end(), results[i].relations.begin(),
                         results[i].relations.end());
    for (auto &[span, votes] : results[i].type_votes) {
      std::vector<std::string> &dst = doc.type_votes[span];
      dst.insert(dst.end(), votes.begin(), votes.end());
    }
    if (stats != nullptr) stats->Add(results[i].stats);
  }
  return output;
}

double RelationTypeStatistic(const Corpus &corpus) {
  std::map<std::string, std::map<std::pair<std::string, std::string>, long>>
      counts;
  long total = 0;
  for (const Document &doc : corpus) {
    std::map<Span, std::string> types;
    for (const EntityMention &e : doc.entities) types.emplace(e.span, e.label);
    for (const RelationMention &r : doc.relations) {
      auto s = types.find(r.subject);
      auto o = types.find(r.object);
      if (s == types.end() || o == types.end()) {
        throw DataError("relation endpoint without an entity type in '" +
                        doc.doc_id + "'");
      }
      ++counts[r.label][{s->second, o->second}];
      ++total;
    }
  }
  if (total == 0) {
    throw DataError("relation type statistic is undefined without relations");
  }
  long dominant = 0;
  for (const auto &[label, pairs] : counts) {
    long best = 0;
    for (const auto &[pair, count] : pairs) best = std::max(best, count);
    dominant += best;
  }
  return static_cast<double>(dominant) / static_cast<double>(total);
}

PipelineOutput RefineEntityTypes(const PipelineOutput &predictions,
                                 double dominance, double threshold) {
  if (dominance < threshold) return predictions;
  PipelineOutput refined = predictions;
  for (DocumentPrediction &doc : refined) {
    for (ScoredEntity &e : doc.entities) {
      auto it = doc.type_votes.find(e.mention.span);
      if (it == doc.type_votes.end() || it->second.empty()) continue;
      std::map<std::string, int> tally;
      for (const std::string &type : it->second) ++tally[type];
      int best = 0;
      int best_count = 0;
      std::string winner;
      for (const auto &[type, count] : tally) {
        if (count > best) {
          best = count;
          best_count = 1;
          winner = type;
        } else if (count == best) {
          ++best_count;
        }
      }
      if (best_count == 1) e.mention.label = winner;
    }
  }
  return refined;
}

PipelineOutput GoldEntities(const Corpus &corpus) {
  PipelineOutput output;
  for (const Document &doc : corpus) {
    DocumentPrediction prediction;
    prediction.doc_id = doc.doc_id;
    for (const EntityMention &e : doc.entities) {
      prediction.entities.push_back({e, 1.0});
    }
    output.push_back(std::move(prediction));
  }
  return output;
}

Corpus ToCorpus(const Corpus &corpus, const PipelineOutput &predictions) {
  if (predictions.size() != corpus.size()) {
    throw ConfigError("predictions do not align with the corpus");
  }
  Corpus result;
  for (size_t d = 0; d < corpus.size(); ++d) {
    Document doc = corpus[d];
    doc.entities.clear();
    doc.relations.clear();
    for (const ScoredEntity &e : predictions[d].entities) {
      doc.entities.push_back(e.mention);
    }
    for (const ScoredRelation &r : predictions[d].relations) {
      doc.relations.push_back(r.mention);
    }
    result.push_back(std::move(doc));
  }
  return result;
}

void WritePredictions(const Corpus &corpus, const PipelineOutput &predictions,
                      std::ostream &out) {
  if (predictions.size() != corpus.size()) {
    throw ConfigError("predictions do not align with the corpus");
  }
  for (size_t d = 0; d < corpus.size(); ++d) {
    const Document &doc = corpus[d];
    const DocumentPrediction &pred = predictions[d];
    const int n = doc.num_sentences();
    json sentences = json::array();
    json ner(n, json::array());
    json ner_scores(n, json::array());
    json relations(n, json::array());
    json relation_scores(n, json::array());
    for (int s = 0; s < n; ++s) {
      json tokens = json::array();
      for (int t = doc.sentence_bounds[s].start; t <= doc.sentence_bounds[s].end;
           ++t) {
        tokens.push_back(doc.token(t));
      }
      sentences.push_back(std::move(tokens));
    }
    for (const ScoredEntity &e : pred.entities) {
      const int s = std::max(0, doc.SentenceOf(e.mention.span.start));
      ner[s].push_back({e.mention.span.start, e.mention.span.end,
                        e.mention.label});
      ner_scores[s].push_back(e.score);
    }
    for (const ScoredRelation &r : pred.relations) {
      const int s = std::max(0, doc.SentenceOf(r.mention.subject.start));
      relations[s].push_back({r.mention.subject.start, r.mention.subject.end,
                              r.mention.object.start, r.mention.object.end,
                              r.mention.label});
      relation_scores[s].push_back(r.score);
    }
    json obj;
    obj["doc_key"] = doc.doc_id;
    obj["sentences"] = std::move(sentences);
    obj["ner"] = std::move(ner);
    obj["relations"] = std::move(relations);
    obj["ner_scores"] = std::move(ner_scores);
    obj["relation_scores"] = std::move(relation_scores);
    out << obj.dump() << '\n';
  }
}

}  // namespace plm
