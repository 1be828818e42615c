#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "capsf/encoder.hpp"
#include "capsf/tensor.hpp"

namespace capsf {

/// Raised when a corpus fails structural validation (too many bad lines),
/// as opposed to plain I/O failures.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- Records ---------------------------------------------------------------

/// One raw social-media post as read from a corpus file.
struct TweetRecord {
  std::string id;
  std::string text;
  int64_t followers = 0;
  int64_t likes = 0;
  int64_t replies = 0;
  int64_t retweets = 0;
  std::optional<int> sentiment;        // -1 | 0 | 1
  std::optional<double> polarity;      // [-1, 1]
  std::optional<double> subjectivity;  // [0, 1]
  std::optional<int> label;            // 1 positive, 0 negative
};

/// Model-ready example emitted by the preparation pipeline.
struct AnnotatedExample {
  std::vector<int> token_ids;  // fixed length n
  Tensor features;             // [7], normalized
  int label = 0;               // 1 positive, 0 negative
};

// ---- Keyword lists ---------------------------------------------------------

struct KeywordList {
  enum class Kind { kCollection, kStop };
  Kind kind = Kind::kCollection;
  std::vector<std::string> phrases;  // normalized, deduplicated, file order

  static KeywordList from_phrases(Kind kind, const std::vector<std::string>& raw);
  /// One phrase per line, '#' starts a comment line.
  static KeywordList load_file(const std::string& path, Kind kind);
};

/// True iff any phrase occurs as a substring of the normalized text
/// (case-folded, whitespace runs collapsed).
bool keyword_match(const std::string& text, const KeywordList& keywords);

struct FilterResult {
  std::vector<TweetRecord> kept;
  std::vector<TweetRecord> removed;
};

/// Partition records by stop-list match; order-preserving and exhaustive.
FilterResult stop_filter(const std::vector<TweetRecord>& records, const KeywordList& stop);

// ---- Corpus I/O ------------------------------------------------------------

struct CorpusLoadResult {
  std::vector<TweetRecord> records;
  struct LineError {
    int line;  // 1-based
    std::string message;
  };
  std::vector<LineError> errors;
  int total_lines = 0;  // non-blank lines seen
};

/// Read a JSON Lines corpus. Invalid lines are collected with their line
/// numbers and skipped; more than 10% invalid lines is a hard failure.
CorpusLoadResult load_corpus(const std::string& path);

void write_corpus(const std::string& path, const std::vector<TweetRecord>& records);

void write_examples(const std::string& path, const std::vector<AnnotatedExample>& examples);
std::vector<AnnotatedExample> load_examples(const std::string& path);

// ---- Sentiment -------------------------------------------------------------

struct SentimentScores {
  int se = 0;                 // -1 | 0 | 1
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
};

/// Token-level sentiment lexicon used when a record carries no precomputed
/// sentiment fields.
class SentimentLexicon {
 public:
  struct Entry {
    double polarity;
    double subjectivity;
  };

  void add(const std::string& word, double polarity, double subjectivity);
  const Entry* find(const std::string& token) const;
  size_t size() const { return entries_.size(); }

  /// Lines are `word<TAB>polarity<TAB>subjectivity`, '#' comments.
  static SentimentLexicon load_file(const std::string& path);

 private:
  std::unordered_map<std::string, Entry> entries_;
};

/// Mean matched polarity/subjectivity, clipped to range; Se is the sign of
/// the polarity with a +-0.1 dead zone. No matches gives (0, 0, 0).
SentimentScores lexicon_sentiment(const std::string& text, const SentimentLexicon& lexicon);

/// Precomputed record fields when present, lexicon fallback otherwise.
SentimentScores resolve_sentiment(const TweetRecord& record, const SentimentLexicon& lexicon);

// ---- Annotation ------------------------------------------------------------

struct AnnotationConfig {
  std::vector<std::string> negation_cues;  // single tokens, normalized
  std::vector<std::string> third_person;   // pronouns/possessives, normalized
  int negation_window = 3;
  double subjectivity_min = 0.5;  // below this the text counts as non-personal
  SentimentLexicon lexicon;

  static AnnotationConfig defaults();
};

/// Rule-based positive/negative annotation. Negative when a negation cue
/// precedes a matched keyword within the window, when the matched clause
/// carries a third-person subject, or when the text scores as non-personal;
/// positive only for first-person negative-affect expression; negative
/// otherwise.
int annotate(const TweetRecord& record, const KeywordList& keywords,
             const AnnotationConfig& config);

// ---- Featurization ---------------------------------------------------------

/// Normalization statistics for the four engagement counts (log1p domain).
struct FeatureStats {
  Tensor mean{{4}};
  Tensor sd{{4}};
};

FeatureStats fit_feature_stats(const std::vector<TweetRecord>& records);

/// [Se, polarity, subjectivity, z(log1p followers), z(log1p likes),
///  z(log1p replies), z(log1p retweets)].
Tensor featurize(const TweetRecord& record, const FeatureStats& stats,
                 const SentimentLexicon& lexicon);

void save_feature_stats(const std::string& path, const FeatureStats& stats);
FeatureStats load_feature_stats(const std::string& path);

// ---- Split -----------------------------------------------------------------

/// Seeded shuffle then split, stratified so each side's class ratio matches
/// the corpus within one example per class. Throws when a class has fewer
/// than two examples.
std::pair<std::vector<AnnotatedExample>, std::vector<AnnotatedExample>> split(
    const std::vector<AnnotatedExample>& examples, double ratio, uint64_t seed);

// ---- Synthetic corpora -----------------------------------------------------

struct SynthSpec {
  enum class Mode { kTextSignal, kFeatureSignal, kBoth };
  Mode mode = Mode::kTextSignal;
  int count = 1000;
  int vocab_words = 50;  // background token inventory
  int text_len_min = 6;
  int text_len_max = 12;
  double plant_rate = 1.0;  // text modes: probability a record carries its class marker
  double positive_fraction = 0.5;
};

/// Deterministic synthetic corpus. Text-signal mode plants class-indicative
/// marker tokens; feature-signal mode draws class-conditional sentiment and
/// engagement counts over label-independent text.
std::vector<TweetRecord> synth_corpus(const SynthSpec& spec, uint64_t seed);

// ---- Pipeline composition --------------------------------------------------

struct StageCount {
  std::string stage;
  int kept = 0;
  int removed = 0;
};

/// `stage,kept,removed` CSV.
void write_filter_report(const std::string& path, const std::vector<StageCount>& stages);

struct PrepareOptions {
  KeywordList keywords;
  KeywordList stop;
  AnnotationConfig annotation = AnnotationConfig::defaults();
  int seq_len = 64;
  bool skip_filter = false;        // keep every record (synthetic corpora)
  bool use_record_labels = true;   // trust an explicit label field when present
};

struct PreparedCorpus {
  Vocabulary vocab;
  std::vector<AnnotatedExample> examples;
  FeatureStats stats;
  std::vector<StageCount> stages;
};

/// load -> keyword relevance -> stop filter -> annotate -> featurize.
PreparedCorpus prepare_corpus(const std::vector<TweetRecord>& records,
                              const PrepareOptions& options);

// Built-in default lists; all overridable through files.
std::vector<std::string> default_keywords();
std::vector<std::string> default_stop_keywords();
SentimentLexicon default_sentiment_lexicon();

}  // namespace capsf
