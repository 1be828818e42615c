#include "capsf/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "capsf/checkpoint.hpp"
#include "capsf/model.hpp"
#include "capsf/pipeline.hpp"
#include "capsf/trainer.hpp"

namespace capsf {

namespace {

using nlohmann::json;

std::vector<std::string> load_token_list(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read token list: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    for (std::string& t : tokenize(line)) tokens.push_back(std::move(t));
  }
  return tokens;
}

struct PrepareArgs {
  std::string corpus, keywords, stop, out;
  uint64_t seed = 42;
  int seq_len = 64;
  bool no_filter = false;
  std::string negation, pronouns, lexicon;
  double subjectivity_min = 0.5;
};

int run_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  CorpusLoadResult loaded = load_corpus(a.corpus);
  for (const auto& e : loaded.errors) {
    err << a.corpus << ":" << e.line << ": " << e.message << "\n";
  }

  PrepareOptions opts;
  opts.keywords = KeywordList::load_file(a.keywords, KeywordList::Kind::kCollection);
  opts.stop = KeywordList::load_file(a.stop, KeywordList::Kind::kStop);
  opts.seq_len = a.seq_len;
  opts.skip_filter = a.no_filter;
  opts.annotation.subjectivity_min = a.subjectivity_min;
  if (!a.negation.empty()) opts.annotation.negation_cues = load_token_list(a.negation);
  if (!a.pronouns.empty()) opts.annotation.third_person = load_token_list(a.pronouns);
  if (!a.lexicon.empty()) opts.annotation.lexicon = SentimentLexicon::load_file(a.lexicon);

  PreparedCorpus prep = prepare_corpus(loaded.records, opts);
  write_examples(a.out, prep.examples);
  prep.vocab.save_file(a.out + ".vocab.txt");
  save_feature_stats(a.out + ".stats.json", prep.stats);
  write_filter_report(a.out + ".report.csv", prep.stages);

  int positive = 0;
  for (const AnnotatedExample& e : prep.examples) positive += e.label;
  out << "examples=" << prep.examples.size() << " positive=" << positive
      << " negative=" << prep.examples.size() - static_cast<size_t>(positive) << "\n";
  return 0;
}

struct TrainArgs {
  std::string data, config, out;
  std::string vocab, stats;
  double holdout = 0.0;
};

int run_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config = TrainConfig::from_json_file(a.config);
  std::vector<AnnotatedExample> examples = load_examples(a.data);
  const std::string vocab_path = a.vocab.empty() ? a.data + ".vocab.txt" : a.vocab;
  Vocabulary vocab = Vocabulary::load_file(vocab_path);

  FeatureStats stats;
  const std::string stats_path = a.stats.empty() ? a.data + ".stats.json" : a.stats;
  if (std::ifstream(stats_path).good()) {
    stats = load_feature_stats(stats_path);
  } else {
    stats.mean = Tensor::zeros({4});
    stats.sd = Tensor::full({4}, 1.0);
    err << "warning: no feature stats at " << stats_path
        << "; predictions will use identity normalization\n";
  }

  std::vector<AnnotatedExample> train_set = examples;
  if (a.holdout > 0.0) {
    auto [tr, te] = split(examples, 1.0 - a.holdout, config.seed);
    train_set = std::move(tr);
    write_examples(a.out + ".holdout.jsonl", te);
  }

  TrainResult result = train(train_set, config, vocab.size());

  Checkpoint ckpt{config, std::move(vocab), std::move(result.params), stats};
  save_checkpoint(a.out, ckpt);

  std::ofstream curve(a.out + ".loss.csv", std::ios::binary);
  if (!curve) throw std::runtime_error("cannot write loss curve: " + a.out + ".loss.csv");
  curve << "epoch,mean_loss\n";
  char buf[64];
  for (size_t i = 0; i < result.loss_curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, result.loss_curve[i]);
    curve << buf;
  }
  out << "trained epochs=" << config.epochs << " examples=" << train_set.size() << "\n";
  return 0;
}

int run_eval(const std::string& data, const std::string& ckpt_path, std::ostream& out) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  std::vector<AnnotatedExample> examples = load_examples(data);
  MetricsReport report = evaluate(ckpt.params, examples);
  write_metrics_csv(out, "capsfusion", report);
  return 0;
}

struct PredictArgs {
  std::string ckpt, text, features_json;
  bool no_features = false;
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  Checkpoint ckpt = load_checkpoint(a.ckpt);

  Tensor features = Tensor::zeros({7});
  if (!a.no_features) {
    if (a.features_json.empty()) {
      throw std::invalid_argument("predict: provide --features JSON or --no-features");
    }
    json j = json::parse(a.features_json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw std::invalid_argument("predict: --features is not a JSON object");
    }
    TweetRecord r;
    r.id = "predict";
    r.text = a.text;
    for (const char* key :
         {"sentiment", "polarity", "subjectivity", "followers", "likes", "replies", "retweets"}) {
      if (!j.contains(key) || !j[key].is_number()) {
        throw std::invalid_argument(std::string("predict: --features missing numeric '") + key +
                                    "'");
      }
    }
    r.sentiment = j["sentiment"].get<int>();
    r.polarity = j["polarity"].get<double>();
    r.subjectivity = j["subjectivity"].get<double>();
    r.followers = j["followers"].get<int64_t>();
    r.likes = j["likes"].get<int64_t>();
    r.replies = j["replies"].get<int64_t>();
    r.retweets = j["retweets"].get<int64_t>();
    FeatureVector fv{*r.sentiment, *r.polarity, *r.subjectivity,
                     r.followers,  r.likes,     r.replies,
                     r.retweets};
    fv.validate();
    features = featurize(r, ckpt.stats, SentimentLexicon());
  }

  const std::vector<int> ids =
      pad_or_truncate(ckpt.vocab.encode(tokenize(a.text)), ckpt.config.model.seq_len);
  const double p = predict_probability(ckpt.params, ids, features)(0);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f,%s\n", p, p >= 0.5 ? "positive" : "negative");
  out << buf;
  return 0;
}

struct SweepArgs {
  std::string data, grid, out;
  std::string config, vocab;
};

int run_sweep(const SweepArgs& a, std::ostream& out) {
  TrainConfig base = a.config.empty() ? TrainConfig{} : TrainConfig::from_json_file(a.config);
  std::vector<TrainConfig> grid;
  if (a.grid == "dropout") {
    grid = dropout_grid(base);
  } else if (a.grid == "batch") {
    grid = batch_grid(base);
  } else {
    throw std::invalid_argument("sweep: unknown grid '" + a.grid + "' (use dropout or batch)");
  }
  std::vector<AnnotatedExample> examples = load_examples(a.data);
  const std::string vocab_path = a.vocab.empty() ? a.data + ".vocab.txt" : a.vocab;
  Vocabulary vocab = Vocabulary::load_file(vocab_path);

  std::vector<SweepPoint> points = sweep(grid, examples, 0.8, base.seed, vocab.size());
  std::ofstream os(a.out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write sweep csv: " + a.out);
  write_sweep_csv(os, points);
  out << "sweep points=" << points.size() << "\n";
  return 0;
}

struct SynthArgs {
  std::string mode = "text";
  int count = 1000;
  uint64_t seed = 42;
  std::string out;
  int vocab_words = 50;
  double plant_rate = 1.0;
  double positive_fraction = 0.5;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  SynthSpec spec;
  if (a.mode == "text") {
    spec.mode = SynthSpec::Mode::kTextSignal;
  } else if (a.mode == "feature") {
    spec.mode = SynthSpec::Mode::kFeatureSignal;
  } else if (a.mode == "both") {
    spec.mode = SynthSpec::Mode::kBoth;
  } else {
    throw std::invalid_argument("synth: unknown mode '" + a.mode + "'");
  }
  spec.count = a.count;
  spec.vocab_words = a.vocab_words;
  spec.plant_rate = a.plant_rate;
  spec.positive_fraction = a.positive_fraction;
  write_corpus(a.out, synth_corpus(spec, a.seed));
  out << "records=" << spec.count << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"capsule-fusion text classifier"};
  app.require_subcommand(1);

  PrepareArgs pa;
  CLI::App* prepare = app.add_subcommand("prepare", "filter, annotate and featurize a corpus");
  prepare->add_option("--corpus", pa.corpus, "corpus JSONL")->required();
  prepare->add_option("--keywords", pa.keywords, "collection keyword file")->required();
  prepare->add_option("--stop", pa.stop, "stop keyword file")->required();
  prepare->add_option("--out", pa.out, "output examples JSONL")->required();
  prepare->add_option("--seed", pa.seed, "rng seed");
  prepare->add_option("--seq-len", pa.seq_len, "token sequence length");
  prepare->add_flag("--no-filter", pa.no_filter, "skip keyword and stop filtering");
  prepare->add_option("--negation", pa.negation, "negation cue file");
  prepare->add_option("--pronouns", pa.pronouns, "third-person pronoun file");
  prepare->add_option("--lexicon", pa.lexicon, "sentiment lexicon file");
  prepare->add_option("--subjectivity-min", pa.subjectivity_min,
                      "personal-expression threshold");

  TrainArgs ta;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", ta.data, "examples JSONL")->required();
  train_cmd->add_option("--config", ta.config, "train config JSON")->required();
  train_cmd->add_option("--out", ta.out, "checkpoint path")->required();
  train_cmd->add_option("--vocab", ta.vocab, "vocabulary file (default <data>.vocab.txt)");
  train_cmd->add_option("--stats", ta.stats, "feature stats file (default <data>.stats.json)");
  train_cmd->add_option("--holdout", ta.holdout,
                        "fraction held out to <out>.holdout.jsonl before training");

  std::string eval_data, eval_ckpt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--data", eval_data, "examples JSONL")->required();
  eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();

  PredictArgs pra;
  CLI::App* predict = app.add_subcommand("predict", "classify one text");
  predict->add_option("--ckpt", pra.ckpt, "checkpoint path")->required();
  predict->add_option("--text", pra.text, "input text")->required();
  predict->add_option("--features", pra.features_json, "feature JSON with the 7 fields");
  predict->add_flag("--no-features", pra.no_features, "use a zero feature vector");

  SweepArgs sa;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep");
  sweep_cmd->add_option("--data", sa.data, "examples JSONL")->required();
  sweep_cmd->add_option("--grid", sa.grid, "dropout or batch")->required();
  sweep_cmd->add_option("--out", sa.out, "output CSV")->required();
  sweep_cmd->add_option("--config", sa.config, "base train config JSON");
  sweep_cmd->add_option("--vocab", sa.vocab, "vocabulary file");

  SynthArgs sya;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--mode", sya.mode, "text, feature or both");
  synth->add_option("--count", sya.count, "record count");
  synth->add_option("--seed", sya.seed, "rng seed");
  synth->add_option("--out", sya.out, "output corpus JSONL")->required();
  synth->add_option("--vocab-words", sya.vocab_words, "background token inventory");
  synth->add_option("--plant-rate", sya.plant_rate, "marker plant probability");
  synth->add_option("--positive-fraction", sya.positive_fraction, "positive share");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("capsfusion");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (prepare->parsed()) return run_prepare(pa, out, err);
    if (train_cmd->parsed()) return run_train(ta, out, err);
    if (eval_cmd->parsed()) return run_eval(eval_data, eval_ckpt, out);
    if (predict->parsed()) return run_predict(pra, out);
    if (sweep_cmd->parsed()) return run_sweep(sa, out);
    if (synth->parsed()) return run_synth(sya, out);
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace capsf
