#pragma once

// Crafted 20-record corpus: every record carries a collection keyword, six
// carry a stop phrase ("https://", "http://" or "suicide attack"), and the
// fourteen survivors have hand-derived annotation outcomes.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "capsf/pipeline.hpp"

namespace fixture {

inline std::vector<capsf::TweetRecord> corpus20() {
  using capsf::TweetRecord;
  std::vector<TweetRecord> records;
  const auto add = [&](const std::string& id, const std::string& text, int64_t followers,
                       int64_t likes, int64_t replies, int64_t retweets) -> TweetRecord& {
    TweetRecord r;
    r.id = id;
    r.text = text;
    r.followers = followers;
    r.likes = likes;
    r.replies = replies;
    r.retweets = retweets;
    records.push_back(r);
    return records.back();
  };

  // Stop-filtered records.
  add("r01", "News about suicide https://example.com/story", 5000, 40, 3, 12);
  add("r02", "suicide attack reported in the city", 12000, 90, 14, 55);
  add("r03", "another suicide attack near the border", 8000, 60, 9, 30);
  add("r04", "read this suicide story http://news.site", 3000, 25, 2, 8);
  add("r05", "He survived a suicide attack yesterday", 900, 12, 1, 2);
  add("r06", "masterpost about suicide prevention https://h.org", 15000, 200, 20, 80);

  // Kept records with expected labels.
  add("r07", "I will not commit suicide", 120, 4, 1, 0);
  add("r08", "He wants to commit suicide", 340, 8, 2, 1);
  add("r09", "She talked about suicide in class", 210, 3, 0, 0);
  {
    auto& r = add("r10", "Report: suicide rates rising this year", 48000, 150, 30, 95);
    r.sentiment = 0;
    r.polarity = 0.0;
    r.subjectivity = 0.1;
  }
  {
    auto& r = add("r11", "I feel hopeless and think about suicide every night", 85, 2, 1, 0);
    r.sentiment = -1;
    r.polarity = -0.7;
    r.subjectivity = 0.9;
  }
  {
    auto& r = add("r12", "I want to die, everything is pain", 40, 1, 0, 0);
    r.sentiment = -1;
    r.polarity = -0.8;
    r.subjectivity = 0.85;
  }
  add("r13", "so tired and alone, suicide feels close", 66, 0, 0, 0);
  add("r14", "happy news about suicide prevention working", 7000, 80, 6, 22);
  add("r15", "they keep talking about his suicide", 450, 10, 3, 1);
  add("r16", "I would never attempt suicide", 95, 5, 0, 0);
  add("r17", "خودکشی فکر من است و من خسته ام", 52, 1, 0, 0);
  add("r18", "او از خودکشی حرف می زند", 610, 14, 2, 3);
  add("r19", "i cry about suicide because i am sad and hopeless", 73, 2, 0, 1);
  add("r20", "watching a documentary about suicide statistics", 3100, 45, 4, 16);
  return records;
}

inline std::set<std::string> removed_ids() {
  return {"r01", "r02", "r03", "r04", "r05", "r06"};
}

// Expected annotation per kept record (1 positive, 0 negative).
inline std::map<std::string, int> expected_labels() {
  return {
      {"r07", 0}, {"r08", 0}, {"r09", 0}, {"r10", 0}, {"r11", 1}, {"r12", 1}, {"r13", 1},
      {"r14", 0}, {"r15", 0}, {"r16", 0}, {"r17", 1}, {"r18", 0}, {"r19", 1}, {"r20", 0},
  };
}

inline capsf::KeywordList fixture_keywords() {
  return capsf::KeywordList::from_phrases(capsf::KeywordList::Kind::kCollection,
                                          capsf::default_keywords());
}

inline capsf::KeywordList fixture_stop() {
  return capsf::KeywordList::from_phrases(capsf::KeywordList::Kind::kStop,
                                          capsf::default_stop_keywords());
}

}  // namespace fixture
