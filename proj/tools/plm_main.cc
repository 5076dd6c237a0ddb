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

// plm: data preparation, training, prediction, evaluation and benchmarking.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plm/bench.h"
#include "plm/checkpoint.h"
#include "plm/corpus.h"
#include "plm/errors.h"
#include "plm/metrics.h"
#include "plm/pipeline.h"
#include "plm/synthetic.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string DetectFormat(const std::string &path, const std::string &format) {
  if (format != "auto") return format;
  return EndsWith(path, ".jsonl") || EndsWith(path, ".json") ? "jsonl" : "bio";
}

plm::Corpus LoadCorpus(const std::string &path,
                       const std::string &format = "auto") {
  const plm::ReadResult result = DetectFormat(path, format) == "jsonl"
                                     ? plm::ReadJsonl(path)
                                     : plm::ReadBio(path);
  for (const plm::Diagnostic &d : result.diagnostics) {
    std::cerr << path << ':' << d.line << ": "
              << (d.warning ? "warning" : "error") << ": ";
    if (!d.doc_id.empty()) std::cerr << '[' << d.doc_id << "] ";
    std::cerr << d.message << '\n';
  }
  return result.corpus;
}

std::ostream &OpenOutput(const std::string &path, std::ofstream *file) {
  if (path.empty() || path == "-") return std::cout;
  file->open(path);
  if (!*file) throw plm::InputError("cannot open '" + path + "' for writing");
  return *file;
}

std::vector<std::string> SplitCommas(const std::string &text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Flags mirroring TrainConfig keys; only those given on the command line
// override the config file.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option *> options;

  void Register(CLI::App *app) {
    app->add_option("--config", config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    for (const std::string &key : plm::TrainConfig::Keys()) {
      std::string flag = key;
      for (char &c : flag) {
        if (c == '_') c = '-';
      }
      options[key] = app->add_option("--" + flag, values[key], key);
    }
  }

  plm::TrainConfig Resolve() const {
    plm::TrainConfig config;
    if (!config_path.empty()) config = plm::LoadConfigFile(config_path);
    for (const auto &[key, option] : options) {
      if (option->count() > 0) config.Set(key, values.at(key));
    }
    config.Validate();
    return config;
  }
};

void PrintProgress(const plm::EpochReport &r) {
  std::fprintf(stderr, "epoch %d loss %.6f lr %.3g\n", r.epoch, r.mean_loss,
               r.last_rate);
}

int RunPrepare(const std::string &input, const std::string &output,
               const std::string &from, const std::string &to) {
  const plm::ReadResult result = DetectFormat(input, from) == "jsonl"
                                     ? plm::ReadJsonl(input)
                                     : plm::ReadBio(input);
  for (const plm::Diagnostic &d : result.diagnostics) {
    std::cerr << input << ':' << d.line << ": "
              << (d.warning ? "warning" : "error") << ": " << d.message << '\n';
  }
  std::ofstream file;
  std::ostream &out = OpenOutput(output, &file);
  if (to == "bio") {
    plm::WriteBio(result.corpus, out);
  } else {
    plm::WriteJsonl(result.corpus, out);
  }
  std::cerr << result.corpus.size() << " documents written\n";
  return result.ok() ? 0 : kExitRuntime;
}

int RunTrain(plm::ModelTask task, const std::string &train_path,
             const std::string &model_path, const ConfigFlags &flags,
             bool quiet) {
  const plm::TrainConfig config = flags.Resolve();
  const plm::Corpus corpus = LoadCorpus(train_path);
  const plm::LabelSchema schema =
      plm::LabelSchema::FromCorpus(corpus, config.symmetric, config.nested);
  plm::ProgressCallback progress;
  if (!quiet) progress = PrintProgress;
  const plm::ModelBundle model =
      task == plm::ModelTask::kNer
          ? plm::TrainNer(corpus, schema, config, progress)
          : plm::TrainRe(corpus, schema, config, progress);
  plm::SaveModel(model, model_path);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Packed levitated marker span and relation extraction"};
  app.require_subcommand(1);

  // prepare
  std::string prep_in, prep_out, prep_from = "auto", prep_to = "jsonl";
  CLI::App *prepare = app.add_subcommand(
      "prepare", "Validate a BIO or JSONL corpus and convert it");
  prepare->add_option("--input", prep_in)->required()->check(CLI::ExistingFile);
  prepare->add_option("--output", prep_out, "Output path, '-' for stdout");
  prepare->add_option("--from", prep_from)
      ->check(CLI::IsMember({"auto", "bio", "jsonl"}));
  prepare->add_option("--to", prep_to)->check(CLI::IsMember({"bio", "jsonl"}));

  // train-ner / train-re
  std::string train_in, model_out;
  bool quiet = false;
  ConfigFlags ner_flags, re_flags;
  CLI::App *train_ner = app.add_subcommand("train-ner", "Train a span NER model");
  CLI::App *train_re =
      app.add_subcommand("train-re", "Train a relation model on gold entities");
  for (auto [cmd, flags] : {std::pair{train_ner, &ner_flags},
                            std::pair{train_re, &re_flags}}) {
    cmd->add_option("--train", train_in)->required()->check(CLI::ExistingFile);
    cmd->add_option("--model", model_out, "Output model file")->required();
    cmd->add_flag("--quiet", quiet, "No per-epoch progress");
    flags->Register(cmd);
  }

  // predict
  std::string pred_in, pred_out, ner_model, re_model, stage1_model;
  std::string pred_packing = "neighborhood";
  int pred_k = 256, pred_top_m = 0, pred_threads = 1;
  uint64_t pred_seed = 0;
  double refine_threshold = 0.4;
  bool no_refine = false, show_stats = false;
  CLI::App *predict =
      app.add_subcommand("predict", "Predict entities and relations");
  predict->add_option("--input", pred_in)->required()->check(CLI::ExistingFile);
  predict->add_option("--ner-model", ner_model)
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--re-model", re_model)->check(CLI::ExistingFile);
  predict->add_option("--stage1-model", stage1_model,
                      "Model providing the two-stage filter head")
      ->check(CLI::ExistingFile);
  predict->add_option("--output", pred_out, "Output path, '-' for stdout");
  predict->add_option("--group-size", pred_k);
  predict->add_option("--packing", pred_packing)
      ->check(CLI::IsMember({"neighborhood", "random"}));
  predict->add_option("--seed", pred_seed, "Seed for random packing");
  predict->add_option("--two-stage", pred_top_m,
                      "Keep the top M spans per sentence from a T-Concat pass");
  predict->add_option("--threads", pred_threads);
  predict->add_option("--refine-threshold", refine_threshold);
  predict->add_flag("--no-refine", no_refine);
  predict->add_flag("--stats", show_stats, "Print layout statistics");

  // eval
  std::string gold_path, eval_pred, eval_mode = "all", eval_symmetric;
  CLI::App *eval = app.add_subcommand("eval", "Score predictions");
  eval->add_option("--gold", gold_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", eval_pred)->required()->check(CLI::ExistingFile);
  eval->add_option("--mode", eval_mode)
      ->check(CLI::IsMember({"ner", "boundaries", "strict", "all"}));
  eval->add_option("--symmetric", eval_symmetric,
                   "Comma-separated symmetric relation labels");

  // bench
  std::string bench_model, bench_in, bench_sizes = "16,32,64,128,256,512";
  std::string bench_strategies = "neighborhood,random";
  int bench_reps = 3, bench_threads = 1, bench_sentences = 20,
      bench_length = 100;
  uint64_t bench_seed = 0;
  CLI::App *bench =
      app.add_subcommand("bench", "NER inference throughput sweep over K");
  bench->add_option("--model", bench_model, "NER model; random when omitted")
      ->check(CLI::ExistingFile);
  bench->add_option("--input", bench_in,
                    "Corpus; synthetic long sentences when omitted")
      ->check(CLI::ExistingFile);
  bench->add_option("--group-sizes", bench_sizes);
  bench->add_option("--strategies", bench_strategies);
  bench->add_option("--repetitions", bench_reps);
  bench->add_option("--threads", bench_threads);
  bench->add_option("--sentences", bench_sentences,
                    "Synthetic sentences when no input is given");
  bench->add_option("--sentence-length", bench_length);
  bench->add_option("--seed", bench_seed);

  // synth
  plm::SyntheticOptions synth_options;
  std::string synth_out;
  CLI::App *synth =
      app.add_subcommand("synth", "Write the seeded synthetic corpus");
  synth->add_option("--output", synth_out, "Output path, '-' for stdout");
  synth->add_option("--documents", synth_options.documents);
  synth->add_option("--sentences", synth_options.sentences_per_document);
  synth->add_option("--min-length", synth_options.min_sentence_length);
  synth->add_option("--seed", synth_options.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (prepare->parsed()) {
      return RunPrepare(prep_in, prep_out, prep_from, prep_to);
    }
    for (auto [cmd, flags, task] :
         {std::tuple{train_ner, &ner_flags, plm::ModelTask::kNer},
          std::tuple{train_re, &re_flags, plm::ModelTask::kRe}}) {
      if (!cmd->parsed()) continue;
      if (flags->options.at("seed")->count() == 0) {
        throw UsageError("--seed is required for " + cmd->get_name());
      }
      return RunTrain(task, train_in, model_out, *flags, quiet);
    }
    if (predict->parsed()) {
      const plm::Corpus corpus = LoadCorpus(pred_in);
      const plm::ModelBundle ner = plm::LoadModel(ner_model);
      std::unique_ptr<plm::ModelBundle> filter;
      if (!stage1_model.empty()) {
        filter = std::make_unique<plm::ModelBundle>(plm::LoadModel(stage1_model));
      }
      plm::PredictOptions options;
      options.group_size = pred_k;
      options.packing = plm::ParsePackingStrategy(pred_packing);
      options.seed = pred_seed;
      options.two_stage_top_m = pred_top_m;
      options.threads = pred_threads;
      plm::PredictStats stats;
      plm::PipelineOutput output =
          plm::PredictNer(ner, corpus, options, &stats, filter.get());
      if (!re_model.empty()) {
        const plm::ModelBundle re = plm::LoadModel(re_model);
        output = plm::PredictRe(re, corpus, output, options, &stats);
        if (!no_refine) {
          output = plm::RefineEntityTypes(output, re.relation_dominance,
                                          refine_threshold);
        }
      }
      std::ofstream file;
      plm::WritePredictions(corpus, output, OpenOutput(pred_out, &file));
      if (show_stats) {
        std::cerr << "sentences=" << stats.sentences
                  << " layouts=" << stats.layouts << " slots=" << stats.slots
                  << " text_passes=" << stats.text_passes
                  << " spans_scored=" << stats.spans_scored << '\n';
      }
      return 0;
    }
    if (eval->parsed()) {
      const plm::Corpus gold = LoadCorpus(gold_path, "jsonl");
      const plm::Corpus pred = LoadCorpus(eval_pred, "jsonl");
      const plm::CorpusEvaluation result =
          plm::EvaluateCorpus(gold, pred, SplitCommas(eval_symmetric));
      const std::vector<std::pair<std::string, const plm::EvalReport *>>
          reports = {{"ner", &result.entities},
                     {"boundaries", &result.relations},
                     {"strict", &result.strict_relations}};
      const std::map<std::string, std::string> titles = {
          {"ner", "NER"}, {"boundaries", "Rel"}, {"strict", "Rel+"}};
      for (const auto &[mode, report] : reports) {
        if (eval_mode != "all" && eval_mode != mode) continue;
        std::cout << report->ToText(titles.at(mode)) << '\n'
                  << report->ToKeyValues(mode);
      }
      return 0;
    }
    if (bench->parsed()) {
      plm::BenchOptions options;
      options.group_sizes.clear();
      for (const std::string &k : SplitCommas(bench_sizes)) {
        try {
          options.group_sizes.push_back(std::stoi(k));
        } catch (const std::exception &) {
          throw UsageError("invalid group size '" + k + "'");
        }
      }
      if (options.group_sizes.empty()) throw UsageError("no group sizes given");
      for (int k : options.group_sizes) {
        if (k < 1) throw UsageError("group size must be positive");
      }
      options.strategies.clear();
      for (const std::string &s : SplitCommas(bench_strategies)) {
        options.strategies.push_back(plm::ParsePackingStrategy(s));
      }
      options.repetitions = bench_reps;
      options.threads = bench_threads;
      options.seed = bench_seed;
      plm::Corpus corpus;
      if (!bench_in.empty()) {
        corpus = LoadCorpus(bench_in);
      } else {
        plm::SyntheticOptions synthetic;
        synthetic.documents = bench_sentences;
        synthetic.sentences_per_document = 1;
        synthetic.min_sentence_length = bench_length;
        synthetic.seed = bench_seed;
        corpus = plm::GenerateSyntheticCorpus(synthetic);
      }
      plm::ModelBundle model;
      if (!bench_model.empty()) {
        model = plm::LoadModel(bench_model);
      } else {
        plm::TrainConfig config;
        config.context_window = std::max(config.context_window, bench_length);
        config.seed = bench_seed;
        model = plm::InitNerModel(corpus, plm::SyntheticSchema(), config);
      }
      plm::WriteBenchCsv(plm::SweepGroupSize(model, corpus, options),
                         std::cout);
      return 0;
    }
    if (synth->parsed()) {
      std::ofstream file;
      plm::WriteJsonl(plm::GenerateSyntheticCorpus(synth_options),
                      OpenOutput(synth_out, &file));
      return 0;
    }
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
