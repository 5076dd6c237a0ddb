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

#include "plm/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "plm/errors.h"

namespace plm {

using json = nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoints assume a little-endian host");

const char *kClassifierNames[] = {"ner", "stage1", "re", "aux"};

template <typename T>
void WriteRaw(std::ostream &out, T value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::istream &in) {
  T value{};
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in) throw InputError("truncated model file");
  return value;
}

json EncoderConfigToJson(const EncoderConfig &c) {
  return {{"vocab_size", c.vocab_size},   {"hidden_dim", c.hidden_dim},
          {"num_layers", c.num_layers},   {"num_heads", c.num_heads},
          {"ffn_dim", c.ffn_dim},         {"max_position", c.max_position},
          {"max_slots", c.max_slots},     {"seed", c.seed}};
}

EncoderConfig EncoderConfigFromJson(const json &j) {
  EncoderConfig c;
  c.vocab_size = j.at("vocab_size");
  c.hidden_dim = j.at("hidden_dim");
  c.num_layers = j.at("num_layers");
  c.num_heads = j.at("num_heads");
  c.ffn_dim = j.at("ffn_dim");
  c.max_position = j.at("max_position");
  c.max_slots = j.at("max_slots");
  c.seed = j.at("seed");
  return c;
}

Classifier &ClassifierByName(HeadParams &heads, const std::string &name) {
  if (name == "ner") return heads.ner;
  if (name == "stage1") return heads.stage1;
  if (name == "re") return heads.re;
  return heads.aux;
}

}  // namespace

void SaveModel(const ModelBundle &model, std::ostream &out) {
  json header;
  header["task"] = model.task == ModelTask::kNer ? "ner" : "re";
  json config = json::object();
  for (const auto &[key, value] : model.config.Items()) config[key] = value;
  header["config"] = config;
  header["encoder"] = EncoderConfigToJson(model.encoder.config);
  header["schema"] = {{"entity_types", model.schema.entity_types},
                      {"relation_types", model.schema.relation_types},
                      {"symmetric_relations", model.schema.symmetric_relations},
                      {"nested", model.schema.nested}};
  header["vocab"] = model.vocab.words();
  header["ner_mode"] = ToString(model.heads.ner_mode);
  header["relation_dominance"] = model.relation_dominance;
  json tensors = json::array();
  std::vector<const Matrix *> payload;
  for (const ConstNamedTensor &t : model.encoder.Tensors()) {
    tensors.push_back({{"name", t.name}, {"rows", t.tensor->rows()},
                       {"cols", t.tensor->cols()}});
    payload.push_back(t.tensor);
  }
  for (const ConstNamedTensor &t : model.heads.Tensors()) {
    tensors.push_back({{"name", t.name}, {"rows", t.tensor->rows()},
                       {"cols", t.tensor->cols()}});
    payload.push_back(t.tensor);
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();
  out.write(kCheckpointMagic, 8);
  WriteRaw<uint32_t>(out, kCheckpointVersion);
  WriteRaw<uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Matrix *m : payload) {
    out.write(reinterpret_cast<const char *>(m->values().data()),
              static_cast<std::streamsize>(m->size() * sizeof(double)));
  }
  if (!out) throw InputError("failed to write model");
}

void SaveModel(const ModelBundle &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  SaveModel(model, out);
}

ModelBundle LoadModel(std::istream &in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw InputError("not a model file");
  }
  const uint32_t version = ReadRaw<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw InputError("unsupported model version " + std::to_string(version));
  }
  const uint64_t length = ReadRaw<uint64_t>(in);
  if (length > (1ULL << 30)) throw InputError("model header too large");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw InputError("truncated model header");

  ModelBundle model;
  try {
    const json header = json::parse(text);
    model.task = header.at("task") == "ner" ? ModelTask::kNer : ModelTask::kRe;
    for (const auto &[key, value] : header.at("config").items()) {
      model.config.Set(key, value.get<std::string>());
    }
    const json &schema = header.at("schema");
    model.schema.entity_types = schema.at("entity_types");
    model.schema.relation_types = schema.at("relation_types");
    model.schema.symmetric_relations = schema.at("symmetric_relations");
    model.schema.nested = schema.at("nested");
    model.schema.Validate();
    model.relation_space = DirectedLabelSpace(
        model.schema.relation_types, model.schema.symmetric_relations);
    model.vocab = Vocabulary::FromWords(header.at("vocab"));
    model.relation_dominance = header.at("relation_dominance");
    model.encoder = InitParams(EncoderConfigFromJson(header.at("encoder")));
    model.heads.ner_mode = ParseNerMode(header.at("ner_mode"));

    const json &tensors = header.at("tensors");
    for (const json &t : tensors) {
      const std::string name = t.at("name");
      for (const char *prefix : kClassifierNames) {
        const std::string p = prefix;
        if (name.rfind(p + ".", 0) != 0) continue;
        Classifier &cls = ClassifierByName(model.heads, p);
        Matrix shaped(t.at("rows"), t.at("cols"));
        const std::string field = name.substr(p.size() + 1);
        if (field == "w1") cls.w1 = shaped;
        else if (field == "b1") cls.b1 = shaped;
        else if (field == "w2") cls.w2 = shaped;
        else if (field == "b2") cls.b2 = shaped;
      }
    }
    std::vector<NamedTensor> slots = model.encoder.Tensors();
    for (const NamedTensor &t : model.heads.Tensors()) slots.push_back(t);
    if (slots.size() != tensors.size()) {
      throw InputError("model tensor list does not match its configuration");
    }
    for (size_t i = 0; i < slots.size(); ++i) {
      const json &t = tensors[i];
      if (t.at("name") != slots[i].name ||
          t.at("rows") != slots[i].tensor->rows() ||
          t.at("cols") != slots[i].tensor->cols()) {
        throw InputError("model tensor '" + slots[i].name +
                         "' does not match its configuration");
      }
    }
    for (const NamedTensor &t : slots) {
      in.read(reinterpret_cast<char *>(t.tensor->values().data()),
              static_cast<std::streamsize>(t.tensor->size() * sizeof(double)));
      if (!in) throw InputError("truncated tensor '" + t.name + "'");
    }
  } catch (const json::exception &e) {
    throw InputError(std::string("malformed model header: ") + e.what());
  } catch (const ConfigError &e) {
    throw InputError(std::string("invalid model header: ") + e.what());
  }
  return model;
}

ModelBundle LoadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  return LoadModel(in);
}

}  // namespace plm
