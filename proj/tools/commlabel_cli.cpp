// commlabel: community-based automatic labeling of short texts.

#include <deque>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commlabel/error.hpp"
#include "commlabel/pipeline.hpp"
#include "commlabel/synth.hpp"

using namespace commlabel;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kStage = 4 };

// Flag values are kept as text and applied through PipelineConfig::set after
// the config file, so flags win and both paths share one parser.
struct Overrides {
  // deque: CLI11 keeps references to the slots
  std::deque<std::pair<std::string, std::optional<std::string>>> values;
  std::vector<std::string> raw;  // --set key=value
  std::optional<std::string> config_file;

  std::optional<std::string>& slot(const std::string& key) {
    values.emplace_back(key, std::nullopt);
    return values.back().second;
  }
};

void add_pipeline_options(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config_file, "key = value config file");
  app.add_option("--corpus", o.slot("corpus"), "corpus file (.csv or .jsonl)");
  app.add_option("--stopwords", o.slot("stopwords"), "stopword list, one per line");
  app.add_option("--lexicon", o.slot("lexicon"), "synonym lexicon (term<TAB>syn,syn)");
  app.add_option("--answer-key", o.slot("answer_key"), "class,message_id CSV");
  app.add_option("-o,--output-dir", o.slot("output_dir"), "artifact directory");
  app.add_option("--thresholds", o.slot("thresholds"), "sweep grid start:stop:step");
  app.add_option("--threshold", o.slot("threshold"), "fixed threshold, or 'auto'");
  app.add_option("--unlabeled-threshold", o.slot("unlabeled_threshold"), "threshold for unlabeled corpora");
  app.add_option("--synonyms", o.slot("synonyms"), "expand synonyms (true/false)");
  app.add_option("--bigrams", o.slot("bigrams"), "add bigram terms (true/false)");
  app.add_option("--louvain-seed", o.slot("louvain_seed"));
  app.add_option("--model-seed", o.slot("model_seed"));
  app.add_option("--split-seed", o.slot("split_seed"));
  app.add_option("--train-ratio", o.slot("train_ratio"));
  app.add_option("--stratified", o.slot("stratified"), "stratified split (true/false)");
  app.add_option("--svm-lambda", o.slot("svm_lambda"));
  app.add_option("--svm-epochs", o.slot("svm_epochs"));
  app.add_option("--forest-trees", o.slot("forest_trees"));
  app.add_option("--forest-max-depth", o.slot("forest_max_depth"), "0 = unlimited");
  app.add_option("--threads", o.slot("threads"), "0 = hardware concurrency");
  app.add_option("--set", o.raw, "extra key=value settings");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig config = o.config_file ? load_pipeline_config(*o.config_file) : PipelineConfig{};
  for (const auto& [key, value] : o.values)
    if (value) config.set(key, *value);
  for (const auto& kv : o.raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

void print_summary(const PipelineResult& r) {
  std::cout << "threshold " << format_number(r.selection.threshold) << " (" << r.selection.source << ")\n";
  std::cout << "communities " << r.partition.n_communities() << ", edges " << r.graph.n_edges << '\n';
  if (r.scores)
    std::cout << "split " << format_number(r.scores->split_score) << ", merge "
              << format_number(r.scores->merge_score) << '\n';
  for (const auto& row : r.comparison)
    std::cout << row.model << " / " << row.labeling << ": " << format_number(row.result.accuracy) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community-based automatic labeling of short texts"};
  app.require_subcommand(1);

  Overrides overrides;
  const char* stages[] = {"preprocess", "vectorize", "sweep", "graph", "detect",
                          "label",      "train",     "evaluate", "report"};
  std::vector<CLI::App*> stage_cmds;
  for (const char* name : stages) {
    auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " stage against the output directory");
    add_pipeline_options(*cmd, overrides);
    stage_cmds.push_back(cmd);
  }
  auto* run = app.add_subcommand("run", "run the full pipeline");
  add_pipeline_options(*run, overrides);

  SynthConfig synth_cfg;
  std::string synth_out = "synthetic.csv";
  std::optional<std::string> synth_key;
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  synth->add_option("--topics", synth_cfg.k_topics);
  synth->add_option("--per-topic", synth_cfg.per_topic);
  synth->add_option("--vocab", synth_cfg.vocab_per_topic, "topic vocabulary size");
  synth->add_option("--overlap", synth_cfg.overlap, "fraction of words from the shared pool");
  synth->add_option("--ambiguous-share", synth_cfg.ambiguous_share, "share of sentences borrowing another topic's words");
  synth->add_option("--borrow-rate", synth_cfg.borrow_rate, "chance a word of an ambiguous sentence is borrowed");
  synth->add_option("--shared-vocab", synth_cfg.shared_vocab, "shared pool size");
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--out", synth_out, "corpus path (.csv or .jsonl)");
  synth->add_option("--answer-key", synth_key, "also write the class -> message key here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (synth->parsed()) {
      auto generated = generate_synthetic_corpus(synth_cfg);
      save_corpus(generated.corpus, synth_out, format_from_path(synth_out));
      if (synth_key) save_answer_key(generated.key, *synth_key);
      std::cout << "wrote " << generated.corpus.size() << " sentences to " << synth_out << '\n';
      return kOk;
    }
    const auto config = resolve(overrides);
    if (run->parsed()) {
      print_summary(run_pipeline(config, std::cerr));
      return kOk;
    }
    for (auto* cmd : stage_cmds)
      if (cmd->parsed()) run_stage(cmd->get_name(), config, std::cerr);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const StageError& e) {
    std::cerr << "stage failed: " << e.what() << '\n';
    return kStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStage;
  }
}
