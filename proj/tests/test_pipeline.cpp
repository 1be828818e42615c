#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "capsf/pipeline.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace capsf;

namespace {

std::string temp_path(const std::string& name) {
  return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/capsf_" + name;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

}  // namespace

TEST_CASE("load_corpus: empty, well-formed, optional fields, errors") {
  const std::string path = temp_path("corpus.jsonl");

  write_text(path, "");
  CHECK(load_corpus(path).records.empty());

  write_text(path,
             R"({"id":"a","text":"hello suicide","followers":10,"likes":2,"replies":1,)"
             R"("retweets":0,"sentiment":-1,"polarity":-0.5,"subjectivity":0.8,"label":"positive"})"
             "\n");
  CorpusLoadResult one = load_corpus(path);
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].id == "a");
  CHECK(one.records[0].followers == 10);
  CHECK(one.records[0].sentiment == -1);
  CHECK(one.records[0].polarity == -0.5);
  CHECK(one.records[0].label == 1);

  // Missing optional sentiment fields stay absent.
  write_text(path, R"({"id":"b","text":"t","followers":0,"likes":0,"replies":0,"retweets":0})"
                   "\n");
  CorpusLoadResult optional = load_corpus(path);
  REQUIRE(optional.records.size() == 1);
  CHECK_FALSE(optional.records[0].sentiment.has_value());
  CHECK_FALSE(optional.records[0].label.has_value());

  CHECK_THROWS_AS(load_corpus(temp_path("missing_nope.jsonl")), std::runtime_error);
}

TEST_CASE("load_corpus: bad lines reported with numbers, >10% is fatal") {
  const std::string path = temp_path("bad.jsonl");
  std::string good = R"({"id":"x","text":"ok","followers":1,"likes":0,"replies":0,"retweets":0})";
  std::string content;
  for (int i = 0; i < 12; ++i) content += good + "\n";
  content += "this is not json\n";  // line 13 of 13: 1/13 < 10%
  write_text(path, content);
  CorpusLoadResult r = load_corpus(path);
  CHECK(r.records.size() == 12);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 13);

  // 2 bad out of 6 is fatal.
  content.clear();
  for (int i = 0; i < 4; ++i) content += good + "\n";
  content += "{\"id\":\"y\"}\nnot json either\n";
  write_text(path, content);
  CHECK_THROWS_AS(load_corpus(path), SchemaError);
}

TEST_CASE("load_corpus validates field types and ranges") {
  const std::string path = temp_path("fields.jsonl");
  write_text(path,
             R"({"id":"a","text":"ok","followers":-1,"likes":0,"replies":0,"retweets":0})"
             "\n"
             R"({"id":"b","text":"ok","followers":0,"likes":0,"replies":0,"retweets":0,"sentiment":5})"
             "\n"
             R"({"id":"c","text":"   ","followers":0,"likes":0,"replies":0,"retweets":0})"
             "\n"
             R"({"id":"d","text":"fine","followers":0,"likes":0,"replies":0,"retweets":0})"
             "\n");
  // 3 bad of 4 would be fatal; just inspect the messages instead.
  try {
    load_corpus(path);
    CHECK(false);
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("followers") != std::string::npos);
  }
}

TEST_CASE("keyword_match: substring on normalized text") {
  const KeywordList keywords = fixture::fixture_keywords();
  CHECK(keyword_match("thinking about Suicide today", keywords));
  CHECK_FALSE(keyword_match("a perfectly fine afternoon", keywords));
  CHECK(keyword_match("searching ways   to die quietly", keywords));
  CHECK(keyword_match("در مورد خودکشی", keywords));
}

TEST_CASE("stop_filter: exhaustive, order-preserving partition") {
  const std::vector<TweetRecord> records = fixture::corpus20();
  const FilterResult result = stop_filter(records, fixture::fixture_stop());
  CHECK(result.kept.size() + result.removed.size() == records.size());

  std::set<std::string> removed;
  for (const TweetRecord& r : result.removed) removed.insert(r.id);
  CHECK(removed == fixture::removed_ids());

  // Order preserved within each side.
  size_t pos = 0;
  for (const TweetRecord& k : result.kept) {
    while (pos < records.size() && records[pos].id != k.id) ++pos;
    CHECK(pos < records.size());
  }
}

TEST_CASE("stop_filter removes URLs and attack phrases") {
  const KeywordList stop = fixture::fixture_stop();
  TweetRecord url;
  url.id = "u";
  url.text = "look https://example.com";
  TweetRecord attack;
  attack.id = "a";
  attack.text = "a suicide attack happened";
  TweetRecord clean;
  clean.id = "c";
  clean.text = "I feel sad about suicide";
  const FilterResult r = stop_filter({url, attack, clean}, stop);
  REQUIRE(r.removed.size() == 2);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].id == "c");
}

TEST_CASE("annotate: fixture rules") {
  const KeywordList keywords = fixture::fixture_keywords();
  const AnnotationConfig cfg = AnnotationConfig::defaults();
  const auto expected = fixture::expected_labels();
  const auto removed = fixture::removed_ids();
  for (const TweetRecord& r : fixture::corpus20()) {
    if (removed.count(r.id)) continue;
    CAPTURE(r.id);
    CHECK(annotate(r, keywords, cfg) == expected.at(r.id));
  }
}

TEST_CASE("annotate is a pure function of its inputs") {
  const KeywordList keywords = fixture::fixture_keywords();
  const AnnotationConfig cfg = AnnotationConfig::defaults();
  for (const TweetRecord& r : fixture::corpus20()) {
    CHECK(annotate(r, keywords, cfg) == annotate(r, keywords, cfg));
  }
}

TEST_CASE("annotate: negation window is bounded") {
  const KeywordList keywords = fixture::fixture_keywords();
  AnnotationConfig cfg = AnnotationConfig::defaults();
  TweetRecord near;
  near.id = "n";
  near.text = "i will not commit suicide";
  CHECK(annotate(near, keywords, cfg) == 0);

  // Cue four tokens ahead of the keyword no longer fires the rule; the
  // record then falls through to the sentiment rules.
  TweetRecord far;
  far.id = "f";
  far.text = "i do not want people discussing suicide";
  far.sentiment = -1;
  far.polarity = -0.6;
  far.subjectivity = 0.9;
  CHECK(annotate(far, keywords, cfg) == 1);
  cfg.negation_window = 7;
  CHECK(annotate(far, keywords, cfg) == 0);
}

TEST_CASE("featurize: sentiment passthrough and count transforms") {
  FeatureStats identity;
  identity.mean = Tensor::zeros({4});
  identity.sd = Tensor::full({4}, 1.0);
  const SentimentLexicon lexicon = default_sentiment_lexicon();

  TweetRecord r;
  r.id = "x";
  r.text = "whatever";
  r.sentiment = 0;
  r.polarity = 0.0;
  r.subjectivity = 0.5;
  r.followers = 0;
  r.likes = 99;
  const Tensor f = featurize(r, identity, lexicon);
  CHECK(f[0] == 0.0);                                           // neutral
  CHECK(f[3] == 0.0);                                           // log1p(0) = 0
  CHECK(f[4] == doctest::Approx(std::log(100.0)).epsilon(1e-12));  // log1p(99)

  // sd = 0 guards to zero.
  FeatureStats degenerate;
  degenerate.mean = Tensor::zeros({4});
  degenerate.sd = Tensor::zeros({4});
  const Tensor g = featurize(r, degenerate, lexicon);
  for (int i = 3; i < 7; ++i) CHECK(g[i] == 0.0);
}

TEST_CASE("featurize outputs stay in declared ranges") {
  Rng rng(171);
  const SentimentLexicon lexicon = default_sentiment_lexicon();
  std::vector<TweetRecord> records;
  for (int i = 0; i < 50; ++i) {
    TweetRecord r;
    r.id = std::to_string(i);
    r.text = "text " + std::to_string(i);
    r.sentiment = rng.uniform_int(-1, 1);
    r.polarity = rng.uniform(-1.0, 1.0);
    r.subjectivity = rng.uniform01();
    r.followers = rng.uniform_int(0, 100000);
    r.likes = rng.uniform_int(0, 5000);
    r.replies = rng.uniform_int(0, 500);
    r.retweets = rng.uniform_int(0, 800);
    records.push_back(r);
  }
  const FeatureStats stats = fit_feature_stats(records);
  for (const TweetRecord& r : records) {
    const Tensor f = featurize(r, stats, lexicon);
    CHECK((f[0] == -1.0 || f[0] == 0.0 || f[0] == 1.0));
    CHECK(f[1] >= -1.0);
    CHECK(f[1] <= 1.0);
    CHECK(f[2] >= 0.0);
    CHECK(f[2] <= 1.0);
    CHECK(f.all_finite());
  }
}

TEST_CASE("lexicon_sentiment: means, clipping, dead zone") {
  SentimentLexicon lex;
  lex.add("gloom", 0.8, 0.9);
  lex.add("meh", 0.05, 0.2);

  const SentimentScores none = lexicon_sentiment("nothing matches here", lex);
  CHECK(none.se == 0);
  CHECK(none.polarity == 0.0);
  CHECK(none.subjectivity == 0.0);

  const SentimentScores single = lexicon_sentiment("pure gloom", lex);
  CHECK(single.se == 1);
  CHECK(single.polarity == doctest::Approx(0.8));

  const SentimentScores dead = lexicon_sentiment("meh indeed", lex);
  CHECK(dead.se == 0);  // |0.05| < 0.1 dead zone
  CHECK(dead.polarity == doctest::Approx(0.05));
}

TEST_CASE("sentiment lexicon file round trip") {
  const std::string path = temp_path("lex.tsv");
  write_text(path, "# comment\ngrim\t-0.7\t0.8\nfine\t0.3\t0.4\n");
  const SentimentLexicon lex = SentimentLexicon::load_file(path);
  CHECK(lex.size() == 2);
  CHECK(lex.find("grim")->polarity == doctest::Approx(-0.7));
  CHECK(lex.find("absent") == nullptr);
}

namespace {

std::vector<AnnotatedExample> toy_examples(int positives, int negatives) {
  std::vector<AnnotatedExample> out;
  for (int i = 0; i < positives + negatives; ++i) {
    AnnotatedExample e;
    e.token_ids = {2 + i % 3, 0, 0, 0};
    e.features = Tensor::zeros({7});
    e.label = i < positives ? 1 : 0;
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("split: ratios, stratification, determinism, errors") {
  const auto examples = toy_examples(5, 5);
  auto [train1, test1] = split(examples, 0.8, 9);
  CHECK(train1.size() == 8);
  CHECK(test1.size() == 2);
  int train_pos = 0, test_pos = 0;
  for (const auto& e : train1) train_pos += e.label;
  for (const auto& e : test1) test_pos += e.label;
  CHECK(train_pos == 4);
  CHECK(test_pos == 1);

  auto [train2, test2] = split(examples, 0.8, 9);
  REQUIRE(train2.size() == train1.size());
  for (size_t i = 0; i < train1.size(); ++i) {
    CHECK(train1[i].token_ids == train2[i].token_ids);
    CHECK(train1[i].label == train2[i].label);
  }

  const auto uneven = toy_examples(6, 4);
  auto [t3, s3] = split(uneven, 0.8, 1);
  CHECK(t3.size() + s3.size() == 10);
  CHECK(t3.size() == 8);

  CHECK_THROWS_AS(split(toy_examples(1, 9), 0.8, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(examples, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(examples, 1.0, 1), std::invalid_argument);
}

TEST_CASE("synth_corpus: determinism") {
  SynthSpec spec;
  spec.count = 60;
  const auto a = synth_corpus(spec, 123);
  const auto b = synth_corpus(spec, 123);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].followers == b[i].followers);
    CHECK(a[i].label == b[i].label);
  }
  const auto c = synth_corpus(spec, 124);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) any_diff |= a[i].text != c[i].text;
  CHECK(any_diff);
}

TEST_CASE("synth_corpus text-signal: a trivial marker classifier is perfect") {
  SynthSpec spec;
  spec.mode = SynthSpec::Mode::kTextSignal;
  spec.count = 300;
  spec.plant_rate = 1.0;
  for (const TweetRecord& r : synth_corpus(spec, 7)) {
    const bool has_pos_marker = r.text.find("mpos") != std::string::npos;
    CHECK(has_pos_marker == (r.label == 1));
  }
}

TEST_CASE("synth_corpus feature-signal: per-class token counts are homogeneous") {
  SynthSpec spec;
  spec.mode = SynthSpec::Mode::kFeatureSignal;
  spec.count = 1000;
  const auto records = synth_corpus(spec, 42);

  std::map<std::string, std::array<int64_t, 2>> counts;
  for (const TweetRecord& r : records) {
    for (const std::string& tok : tokenize(r.text)) {
      counts[tok][static_cast<size_t>(*r.label)] += 1;
    }
  }
  double total = 0.0, col0 = 0.0, col1 = 0.0;
  for (const auto& [tok, c] : counts) {
    col0 += static_cast<double>(c[0]);
    col1 += static_cast<double>(c[1]);
  }
  total = col0 + col1;
  double stat = 0.0;
  int cells = 0;
  for (const auto& [tok, c] : counts) {
    const double row = static_cast<double>(c[0] + c[1]);
    for (int cls = 0; cls < 2; ++cls) {
      const double expected = row * (cls == 0 ? col0 : col1) / total;
      if (expected > 0.0) {
        const double o = static_cast<double>(c[static_cast<size_t>(cls)]);
        stat += (o - expected) * (o - expected) / expected;
        ++cells;
      }
    }
  }
  const int dof = static_cast<int>(counts.size()) - 1;
  const double p = oracles::chi_square_p(stat, dof);
  CAPTURE(stat);
  CAPTURE(dof);
  CHECK(p > 0.05);
}

TEST_CASE("synth_corpus rejects degenerate specs") {
  SynthSpec spec;
  spec.count = 2;
  CHECK_THROWS_AS(synth_corpus(spec, 1), std::invalid_argument);
  spec.count = 100;
  spec.positive_fraction = 0.0;
  CHECK_THROWS_AS(synth_corpus(spec, 1), std::invalid_argument);
}

TEST_CASE("prepare_corpus composes the full pipeline on the fixture") {
  PrepareOptions opts;
  opts.keywords = fixture::fixture_keywords();
  opts.stop = fixture::fixture_stop();
  opts.seq_len = 12;
  const PreparedCorpus prep = prepare_corpus(fixture::corpus20(), opts);

  REQUIRE(prep.stages.size() == 2);
  CHECK(prep.stages[0].stage == "keyword");
  CHECK(prep.stages[0].kept == 20);
  CHECK(prep.stages[0].removed == 0);
  CHECK(prep.stages[1].stage == "stop");
  CHECK(prep.stages[1].kept == 14);
  CHECK(prep.stages[1].removed == 6);

  REQUIRE(prep.examples.size() == 14);
  const auto expected = fixture::expected_labels();
  const auto removed = fixture::removed_ids();
  size_t idx = 0;
  for (const TweetRecord& r : fixture::corpus20()) {
    if (removed.count(r.id)) continue;
    CAPTURE(r.id);
    CHECK(prep.examples[idx].label == expected.at(r.id));
    CHECK(static_cast<int>(prep.examples[idx].token_ids.size()) == 12);
    ++idx;
  }
}

TEST_CASE("examples file round trip") {
  const std::string path = temp_path("examples.jsonl");
  PrepareOptions opts;
  opts.keywords = fixture::fixture_keywords();
  opts.stop = fixture::fixture_stop();
  opts.seq_len = 8;
  const PreparedCorpus prep = prepare_corpus(fixture::corpus20(), opts);
  write_examples(path, prep.examples);
  const auto loaded = load_examples(path);
  REQUIRE(loaded.size() == prep.examples.size());
  for (size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].token_ids == prep.examples[i].token_ids);
    CHECK(loaded[i].label == prep.examples[i].label);
    for (int j = 0; j < 7; ++j) CHECK(loaded[i].features[j] == prep.examples[i].features[j]);
  }
}

TEST_CASE("keyword list files: comments, dedupe, kind") {
  const std::string path = temp_path("kw.txt");
  write_text(path, "# a comment\nSuicide\nsuicide\nways to die\n");
  const KeywordList list = KeywordList::load_file(path, KeywordList::Kind::kCollection);
  CHECK(list.phrases.size() == 2);  // case-insensitive dedupe
  CHECK(list.phrases[0] == "suicide");
}
