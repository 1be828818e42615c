#include "capsf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "capsf/rng.hpp"

namespace capsf {

using nlohmann::json;

// ---- Keyword lists ---------------------------------------------------------

KeywordList KeywordList::from_phrases(Kind kind, const std::vector<std::string>& raw) {
  KeywordList list;
  list.kind = kind;
  for (const std::string& phrase : raw) {
    std::string norm = normalize_text(phrase);
    if (norm.empty()) continue;
    const bool seen = std::find(list.phrases.begin(), list.phrases.end(), norm) !=
                      list.phrases.end();
    if (!seen) list.phrases.push_back(std::move(norm));
  }
  if (list.phrases.empty()) throw std::invalid_argument("keyword list: no phrases");
  return list;
}

KeywordList KeywordList::load_file(const std::string& path, Kind kind) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read keyword file: " + path);
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    raw.push_back(line);
  }
  return from_phrases(kind, raw);
}

bool keyword_match(const std::string& text, const KeywordList& keywords) {
  const std::string norm = normalize_text(text);
  for (const std::string& phrase : keywords.phrases) {
    if (norm.find(phrase) != std::string::npos) return true;
  }
  return false;
}

FilterResult stop_filter(const std::vector<TweetRecord>& records, const KeywordList& stop) {
  FilterResult result;
  for (const TweetRecord& r : records) {
    (keyword_match(r.text, stop) ? result.removed : result.kept).push_back(r);
  }
  return result;
}

// ---- Corpus I/O ------------------------------------------------------------

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

// Returns an error message, or empty on success.
std::string parse_record(const json& j, TweetRecord& out) {
  if (!j.is_object()) return "not a JSON object";
  if (!j.contains("id") || !j["id"].is_string()) return "missing or non-string 'id'";
  if (!j.contains("text") || !j["text"].is_string()) return "missing or non-string 'text'";
  out.id = j["id"].get<std::string>();
  out.text = j["text"].get<std::string>();
  if (normalize_text(out.text).empty()) return "'text' is empty";

  const char* count_keys[] = {"followers", "likes", "replies", "retweets"};
  int64_t* counts[] = {&out.followers, &out.likes, &out.replies, &out.retweets};
  for (int i = 0; i < 4; ++i) {
    if (!j.contains(count_keys[i]) || !j[count_keys[i]].is_number_integer()) {
      return std::string("missing or non-integer '") + count_keys[i] + "'";
    }
    const int64_t v = j[count_keys[i]].get<int64_t>();
    if (v < 0) return std::string("negative '") + count_keys[i] + "'";
    *counts[i] = v;
  }

  if (j.contains("sentiment")) {
    if (!j["sentiment"].is_number_integer()) return "non-integer 'sentiment'";
    const int s = j["sentiment"].get<int>();
    if (s < -1 || s > 1) return "'sentiment' outside {-1,0,1}";
    out.sentiment = s;
  }
  if (j.contains("polarity")) {
    if (!j["polarity"].is_number()) return "non-numeric 'polarity'";
    const double p = j["polarity"].get<double>();
    if (p < -1.0 || p > 1.0) return "'polarity' outside [-1,1]";
    out.polarity = p;
  }
  if (j.contains("subjectivity")) {
    if (!j["subjectivity"].is_number()) return "non-numeric 'subjectivity'";
    const double s = j["subjectivity"].get<double>();
    if (s < 0.0 || s > 1.0) return "'subjectivity' outside [0,1]";
    out.subjectivity = s;
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) return "non-string 'label'";
    const std::string l = j["label"].get<std::string>();
    if (l == "positive") {
      out.label = 1;
    } else if (l == "negative") {
      out.label = 0;
    } else {
      return "'label' must be \"positive\" or \"negative\"";
    }
  }
  return {};
}

}  // namespace

CorpusLoadResult load_corpus(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read corpus file: " + path);
  CorpusLoadResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.total_lines;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    std::string error;
    TweetRecord record;
    if (j.is_discarded()) {
      error = "invalid JSON";
    } else {
      error = parse_record(j, record);
    }
    if (error.empty()) {
      result.records.push_back(std::move(record));
    } else {
      result.errors.push_back({line_no, error});
    }
  }
  if (result.total_lines > 0 &&
      10 * static_cast<int64_t>(result.errors.size()) > result.total_lines) {
    std::ostringstream os;
    os << path << ": " << result.errors.size() << " of " << result.total_lines
       << " lines invalid (>10%); first error at line " << result.errors.front().line << ": "
       << result.errors.front().message;
    throw SchemaError(os.str());
  }
  return result;
}

void write_corpus(const std::string& path, const std::vector<TweetRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write corpus file: " + path);
  for (const TweetRecord& r : records) {
    json j{{"id", r.id},         {"text", r.text},       {"followers", r.followers},
           {"likes", r.likes},   {"replies", r.replies}, {"retweets", r.retweets}};
    if (r.sentiment) j["sentiment"] = *r.sentiment;
    if (r.polarity) j["polarity"] = *r.polarity;
    if (r.subjectivity) j["subjectivity"] = *r.subjectivity;
    if (r.label) j["label"] = *r.label == 1 ? "positive" : "negative";
    os << j.dump() << '\n';
  }
}

void write_examples(const std::string& path, const std::vector<AnnotatedExample>& examples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write examples file: " + path);
  for (const AnnotatedExample& e : examples) {
    json j{{"token_ids", e.token_ids}, {"label", e.label}};
    std::vector<double> f(e.features.data().data(), e.features.data().data() + e.features.size());
    j["features"] = f;
    os << j.dump() << '\n';
  }
}

std::vector<AnnotatedExample> load_examples(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read examples file: " + path);
  std::vector<AnnotatedExample> examples;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("token_ids") || !j.contains("features") ||
        !j.contains("label")) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid example line");
    }
    AnnotatedExample e;
    e.token_ids = j["token_ids"].get<std::vector<int>>();
    const auto f = j["features"].get<std::vector<double>>();
    if (f.size() != 7) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 7 features");
    }
    e.features = Tensor({7}, Eigen::Map<const Vec>(f.data(), 7));
    e.label = j["label"].get<int>();
    if (e.label != 0 && e.label != 1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    examples.push_back(std::move(e));
  }
  return examples;
}

// ---- Sentiment -------------------------------------------------------------

void SentimentLexicon::add(const std::string& word, double polarity, double subjectivity) {
  const std::vector<std::string> toks = tokenize(word);
  if (toks.size() != 1) throw std::invalid_argument("sentiment lexicon: entries are single words");
  entries_[toks[0]] = {polarity, subjectivity};
}

const SentimentLexicon::Entry* SentimentLexicon::find(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

SentimentLexicon SentimentLexicon::load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read sentiment lexicon: " + path);
  SentimentLexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string word, pol, subj;
    if (!std::getline(ss, word, '\t') || !std::getline(ss, pol, '\t') ||
        !std::getline(ss, subj, '\t')) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected word<TAB>polarity<TAB>subjectivity");
    }
    lex.add(word, std::stod(pol), std::stod(subj));
  }
  return lex;
}

SentimentScores lexicon_sentiment(const std::string& text, const SentimentLexicon& lexicon) {
  double pol_sum = 0.0, subj_sum = 0.0;
  int hits = 0;
  for (const std::string& token : tokenize(text)) {
    if (const SentimentLexicon::Entry* e = lexicon.find(token)) {
      pol_sum += e->polarity;
      subj_sum += e->subjectivity;
      ++hits;
    }
  }
  if (hits == 0) return {0, 0.0, 0.0};
  SentimentScores s;
  s.polarity = std::clamp(pol_sum / hits, -1.0, 1.0);
  s.subjectivity = std::clamp(subj_sum / hits, 0.0, 1.0);
  s.se = std::abs(s.polarity) < 0.1 ? 0 : (s.polarity > 0 ? 1 : -1);
  return s;
}

SentimentScores resolve_sentiment(const TweetRecord& record, const SentimentLexicon& lexicon) {
  if (record.sentiment || record.polarity || record.subjectivity) {
    SentimentScores s;
    s.polarity = record.polarity.value_or(0.0);
    s.subjectivity = record.subjectivity.value_or(0.0);
    s.se = record.sentiment.value_or(std::abs(s.polarity) < 0.1 ? 0
                                                                : (s.polarity > 0 ? 1 : -1));
    return s;
  }
  return lexicon_sentiment(record.text, lexicon);
}

// ---- Annotation ------------------------------------------------------------

namespace {

bool is_clause_break(uint32_t cp) {
  switch (cp) {
    case '.':
    case '!':
    case '?':
    case ';':
    case ',':
    case '\n':
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x06D4:  // Arabic full stop
    case 0x2026:  // ellipsis
      return true;
    default:
      return false;
  }
}

std::vector<std::string> split_clauses(const std::string& text) {
  std::vector<std::string> clauses;
  std::vector<uint32_t> current;
  for (uint32_t cp : decode_utf8(text)) {
    if (is_clause_break(cp)) {
      if (!current.empty()) {
        clauses.push_back(encode_utf8(current));
        current.clear();
      }
      continue;
    }
    current.push_back(cp);
  }
  if (!current.empty()) clauses.push_back(encode_utf8(current));
  return clauses;
}

// Start indices of every occurrence of any keyword phrase in the token
// sequence (phrases compared token-wise after the same normalization).
std::vector<size_t> keyword_positions(const std::vector<std::string>& tokens,
                                      const KeywordList& keywords) {
  std::vector<size_t> starts;
  for (const std::string& phrase : keywords.phrases) {
    const std::vector<std::string> p = tokenize(phrase);
    if (p.empty() || p.size() > tokens.size()) continue;
    for (size_t i = 0; i + p.size() <= tokens.size(); ++i) {
      if (std::equal(p.begin(), p.end(), tokens.begin() + static_cast<long>(i))) {
        starts.push_back(i);
      }
    }
  }
  return starts;
}

bool contains_token(const std::vector<std::string>& tokens,
                    const std::vector<std::string>& lexicon) {
  for (const std::string& t : tokens) {
    if (std::find(lexicon.begin(), lexicon.end(), t) != lexicon.end()) return true;
  }
  return false;
}

}  // namespace

AnnotationConfig AnnotationConfig::defaults() {
  AnnotationConfig cfg;
  cfg.negation_cues = {"not",  "no",    "never", "cannot", "cant",  "dont", "wont",
                       "wouldnt", "didnt", "doesnt", "isnt", "aint", "نه",  "نمی",
                       "هرگز", "نخواهم", "نیست"};
  cfg.third_person = {"he",      "she",     "they",    "him",        "her",     "them",
                      "his",     "hers",    "their",   "theirs",     "himself", "herself",
                      "themselves", "او",   "آنها",    "ایشان",      "وی"};
  cfg.lexicon = default_sentiment_lexicon();
  return cfg;
}

int annotate(const TweetRecord& record, const KeywordList& keywords,
             const AnnotationConfig& config) {
  const std::vector<std::string> tokens = tokenize(record.text);

  // Rule: negation cue within the window before a matched keyword.
  for (size_t start : keyword_positions(tokens, keywords)) {
    const size_t lo = start > static_cast<size_t>(config.negation_window)
                          ? start - static_cast<size_t>(config.negation_window)
                          : 0;
    for (size_t i = lo; i < start; ++i) {
      if (std::find(config.negation_cues.begin(), config.negation_cues.end(), tokens[i]) !=
          config.negation_cues.end()) {
        return 0;
      }
    }
  }

  // Rule: third-person subject in the clause that carries the keyword.
  for (const std::string& clause : split_clauses(record.text)) {
    if (!keyword_match(clause, keywords)) continue;
    if (contains_token(tokenize(clause), config.third_person)) return 0;
  }

  // Rule: non-personal text (factual rather than opinionated).
  const SentimentScores s = resolve_sentiment(record, config.lexicon);
  if (s.subjectivity < config.subjectivity_min) return 0;

  // First-person negative-affect expression; anything else stays negative.
  return s.se == -1 ? 1 : 0;
}

// ---- Featurization ---------------------------------------------------------

FeatureStats fit_feature_stats(const std::vector<TweetRecord>& records) {
  FeatureStats stats;
  if (records.empty()) {
    stats.sd = Tensor::full({4}, 0.0);
    return stats;
  }
  const auto counts = [](const TweetRecord& r) {
    return std::array<int64_t, 4>{r.followers, r.likes, r.replies, r.retweets};
  };
  for (int f = 0; f < 4; ++f) {
    double sum = 0.0;
    for (const TweetRecord& r : records) sum += std::log1p(static_cast<double>(counts(r)[f]));
    const double mean = sum / static_cast<double>(records.size());
    double var = 0.0;
    for (const TweetRecord& r : records) {
      const double d = std::log1p(static_cast<double>(counts(r)[f])) - mean;
      var += d * d;
    }
    stats.mean[f] = mean;
    stats.sd[f] = std::sqrt(var / static_cast<double>(records.size()));
  }
  return stats;
}

Tensor featurize(const TweetRecord& record, const FeatureStats& stats,
                 const SentimentLexicon& lexicon) {
  const SentimentScores s = resolve_sentiment(record, lexicon);
  Tensor f({7});
  f[0] = static_cast<double>(s.se);
  f[1] = s.polarity;
  f[2] = s.subjectivity;
  const int64_t counts[4] = {record.followers, record.likes, record.replies, record.retweets};
  for (int i = 0; i < 4; ++i) {
    const double x = std::log1p(static_cast<double>(counts[i]));
    f[3 + i] = stats.sd[i] > 0.0 ? (x - stats.mean[i]) / stats.sd[i] : 0.0;
  }
  return f;
}

void save_feature_stats(const std::string& path, const FeatureStats& stats) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write feature stats: " + path);
  json j{{"mean", std::vector<double>(stats.mean.data().data(), stats.mean.data().data() + 4)},
         {"sd", std::vector<double>(stats.sd.data().data(), stats.sd.data().data() + 4)}};
  os << j.dump() << '\n';
}

FeatureStats load_feature_stats(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read feature stats: " + path);
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded() || !j.contains("mean") || !j.contains("sd")) {
    throw std::runtime_error("invalid feature stats file: " + path);
  }
  const auto mean = j["mean"].get<std::vector<double>>();
  const auto sd = j["sd"].get<std::vector<double>>();
  if (mean.size() != 4 || sd.size() != 4) {
    throw std::runtime_error("invalid feature stats file: " + path);
  }
  FeatureStats stats;
  for (int i = 0; i < 4; ++i) {
    stats.mean[i] = mean[static_cast<size_t>(i)];
    stats.sd[i] = sd[static_cast<size_t>(i)];
  }
  return stats;
}

// ---- Split -----------------------------------------------------------------

std::pair<std::vector<AnnotatedExample>, std::vector<AnnotatedExample>> split(
    const std::vector<AnnotatedExample>& examples, double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split: ratio must be in (0, 1)");
  }
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < examples.size(); ++i) {
    by_class[examples[i].label].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw std::invalid_argument("split: class " + std::to_string(c) +
                                  " has fewer than 2 examples");
    }
  }
  Rng rng(seed);
  std::vector<size_t> train_idx, test_idx;
  for (int c = 0; c < 2; ++c) {
    std::vector<size_t>& idx = by_class[c];
    rng.shuffle(idx);
    const int n = static_cast<int>(idx.size());
    const int n_train = std::clamp(static_cast<int>(std::llround(ratio * n)), 1, n - 1);
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
    test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
  }
  rng.shuffle(train_idx);
  rng.shuffle(test_idx);
  std::pair<std::vector<AnnotatedExample>, std::vector<AnnotatedExample>> out;
  for (size_t i : train_idx) out.first.push_back(examples[i]);
  for (size_t i : test_idx) out.second.push_back(examples[i]);
  return out;
}

// ---- Synthetic corpora -----------------------------------------------------

std::vector<TweetRecord> synth_corpus(const SynthSpec& spec, uint64_t seed) {
  if (spec.count < 4 || spec.vocab_words < 1 || spec.text_len_min < 1 ||
      spec.text_len_max < spec.text_len_min || spec.plant_rate < 0.0 || spec.plant_rate > 1.0 ||
      !(spec.positive_fraction > 0.0 && spec.positive_fraction < 1.0)) {
    throw std::invalid_argument("synth_corpus: degenerate spec");
  }
  Rng rng(seed);

  std::vector<std::string> words;
  words.reserve(static_cast<size_t>(spec.vocab_words));
  for (int i = 0; i < spec.vocab_words; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%03d", i);
    words.emplace_back(buf);
  }
  const std::vector<std::string> pos_markers = {"mpos0", "mpos1"};
  const std::vector<std::string> neg_markers = {"mneg0", "mneg1"};

  const int n_pos = std::clamp(
      static_cast<int>(std::llround(spec.count * spec.positive_fraction)), 2, spec.count - 2);

  const bool text_signal = spec.mode != SynthSpec::Mode::kFeatureSignal;
  const bool feature_signal = spec.mode != SynthSpec::Mode::kTextSignal;

  std::vector<TweetRecord> records;
  records.reserve(static_cast<size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    const int label = i < n_pos ? 1 : 0;
    TweetRecord r;
    char idbuf[24];
    std::snprintf(idbuf, sizeof idbuf, "synth-%06d", i);
    r.id = idbuf;
    r.label = label;

    const int len = rng.uniform_int(spec.text_len_min, spec.text_len_max);
    std::vector<std::string> toks;
    toks.reserve(static_cast<size_t>(len));
    for (int t = 0; t < len; ++t) {
      toks.push_back(words[static_cast<size_t>(rng.uniform_int(0, spec.vocab_words - 1))]);
    }
    if (text_signal && rng.bernoulli(spec.plant_rate)) {
      const auto& markers = label == 1 ? pos_markers : neg_markers;
      toks[static_cast<size_t>(rng.uniform_int(0, len - 1))] =
          markers[static_cast<size_t>(rng.uniform_int(0, 1))];
    }
    std::string text;
    for (size_t t = 0; t < toks.size(); ++t) {
      if (t) text += ' ';
      text += toks[t];
    }
    r.text = text;

    const auto count_draw = [&](double log_mean, double log_sd) {
      return static_cast<int64_t>(std::llround(std::exp(rng.normal(log_mean, log_sd))));
    };
    if (feature_signal) {
      if (label == 1) {
        r.sentiment = rng.bernoulli(0.85) ? -1 : 0;
        r.polarity = std::clamp(rng.normal(-0.55, 0.15), -1.0, 1.0);
        r.subjectivity = std::clamp(rng.normal(0.75, 0.10), 0.0, 1.0);
        r.followers = count_draw(2.2, 0.7);
        r.likes = count_draw(1.0, 0.7);
        r.replies = count_draw(0.7, 0.6);
        r.retweets = count_draw(0.5, 0.6);
      } else {
        const double u = rng.uniform01();
        r.sentiment = u < 0.60 ? 1 : (u < 0.95 ? 0 : -1);
        r.polarity = std::clamp(rng.normal(0.35, 0.25), -1.0, 1.0);
        r.subjectivity = std::clamp(rng.normal(0.35, 0.15), 0.0, 1.0);
        r.followers = count_draw(4.8, 0.7);
        r.likes = count_draw(3.2, 0.7);
        r.replies = count_draw(2.4, 0.6);
        r.retweets = count_draw(2.6, 0.6);
      }
    } else {
      r.sentiment = rng.uniform_int(-1, 1);
      r.polarity = rng.uniform(-1.0, 1.0);
      r.subjectivity = rng.uniform01();
      r.followers = count_draw(3.0, 1.0);
      r.likes = count_draw(2.0, 1.0);
      r.replies = count_draw(1.5, 0.8);
      r.retweets = count_draw(1.5, 0.8);
    }
    records.push_back(std::move(r));
  }
  rng.shuffle(records);
  return records;
}

// ---- Pipeline composition --------------------------------------------------

void write_filter_report(const std::string& path, const std::vector<StageCount>& stages) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write filter report: " + path);
  os << "stage,kept,removed\n";
  for (const StageCount& s : stages) {
    os << s.stage << ',' << s.kept << ',' << s.removed << '\n';
  }
}

PreparedCorpus prepare_corpus(const std::vector<TweetRecord>& records,
                              const PrepareOptions& options) {
  PreparedCorpus out;

  std::vector<TweetRecord> relevant;
  int irrelevant = 0;
  if (options.skip_filter) {
    relevant = records;
  } else {
    for (const TweetRecord& r : records) {
      if (keyword_match(r.text, options.keywords)) {
        relevant.push_back(r);
      } else {
        ++irrelevant;
      }
    }
  }
  out.stages.push_back({"keyword", static_cast<int>(relevant.size()), irrelevant});

  FilterResult fr;
  if (options.skip_filter) {
    fr.kept = std::move(relevant);
  } else {
    fr = stop_filter(relevant, options.stop);
  }
  out.stages.push_back(
      {"stop", static_cast<int>(fr.kept.size()), static_cast<int>(fr.removed.size())});

  out.stats = fit_feature_stats(fr.kept);
  for (const TweetRecord& r : fr.kept) {
    AnnotatedExample e;
    std::vector<int> ids;
    for (const std::string& tok : tokenize(r.text)) ids.push_back(out.vocab.add(tok));
    e.token_ids = pad_or_truncate(ids, options.seq_len);
    e.features = featurize(r, out.stats, options.annotation.lexicon);
    e.label = options.use_record_labels && r.label
                  ? *r.label
                  : annotate(r, options.keywords, options.annotation);
    out.examples.push_back(std::move(e));
  }
  return out;
}

// ---- Default lists ---------------------------------------------------------

std::vector<std::string> default_keywords() {
  return {
      "suicide",        "kill myself",     "end my life",   "want to die",
      "wanna die",      "ways to die",     "way to die",    "take my own life",
      "hang myself",    "self harm",       "cyanide",       "overdose",
      "خودکشی",         "بمیرم",           "مرگ",           "سیانور",
      "طناب دار",       "راه های مردن",
  };
}

std::vector<std::string> default_stop_keywords() {
  return {
      "suicide bomb",  "suicide attack", "suicide attacks", "bus attack",
      "bus attacks",   "car attack",     "car attacks",     "suicide hotline",
      "https://",      "http://",        ".ac.ir",          "حمله انتحاری",
      "عملیات انتحاری",
  };
}

SentimentLexicon default_sentiment_lexicon() {
  SentimentLexicon lex;
  const struct {
    const char* word;
    double pol;
    double subj;
  } entries[] = {
      {"sad", -0.5, 0.8},      {"hopeless", -0.8, 0.9}, {"depressed", -0.7, 0.9},
      {"miserable", -0.7, 0.8},{"pain", -0.5, 0.6},     {"alone", -0.4, 0.7},
      {"tired", -0.3, 0.6},    {"worthless", -0.8, 0.9},{"cry", -0.5, 0.7},
      {"crying", -0.5, 0.7},   {"die", -0.6, 0.7},      {"death", -0.5, 0.5},
      {"hurt", -0.5, 0.7},     {"hate", -0.7, 0.8},     {"empty", -0.5, 0.7},
      {"dark", -0.3, 0.5},     {"happy", 0.7, 0.7},     {"hope", 0.5, 0.6},
      {"love", 0.6, 0.7},      {"grateful", 0.7, 0.8},  {"joy", 0.8, 0.8},
      {"better", 0.4, 0.5},    {"news", 0.0, 0.1},      {"report", 0.0, 0.1},
      {"study", 0.0, 0.2},     {"police", 0.0, 0.2},    {"statistics", 0.0, 0.1},
      {"article", 0.0, 0.1},   {"غمگین", -0.6, 0.8},    {"ناامید", -0.8, 0.9},
      {"تنها", -0.4, 0.7},     {"درد", -0.5, 0.6},      {"خسته", -0.4, 0.6},
      {"گریه", -0.5, 0.7},     {"خوشحال", 0.7, 0.7},    {"امید", 0.5, 0.6},
      {"خبر", 0.0, 0.1},       {"گزارش", 0.0, 0.1},
  };
  for (const auto& e : entries) lex.add(e.word, e.pol, e.subj);
  return lex;
}

}  // namespace capsf
