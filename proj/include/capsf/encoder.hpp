#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "capsf/rng.hpp"
#include "capsf/tensor.hpp"

namespace capsf {

// ---- Text utilities --------------------------------------------------------

/// Decode UTF-8 into code points; invalid bytes decode as U+FFFD.
std::vector<uint32_t> decode_utf8(const std::string& text);
std::string encode_utf8(const std::vector<uint32_t>& cps);

bool is_space_cp(uint32_t cp);
bool is_punct_cp(uint32_t cp);

/// Whitespace-split tokenizer with punctuation stripping and ASCII case
/// folding. Punctuation acts as a token boundary except apostrophes, which
/// are removed in place ("don't" -> "dont"). No stemming; non-ASCII text
/// passes through untouched.
std::vector<std::string> tokenize(const std::string& text);

/// Lowercase (ASCII), collapse every whitespace run to a single space, trim.
/// Used for substring keyword matching.
std::string normalize_text(const std::string& text);

// ---- Vocabulary ------------------------------------------------------------

/// Dense token -> id map. Ids 0 (PAD) and 1 (UNK) are reserved and never
/// correspond to a surface token; corpus tokens start at id 2 in
/// first-appearance order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary() = default;

  /// Id of token, inserting a fresh id if unseen.
  int add(const std::string& token);
  /// Id of token, kUnk if absent.
  int lookup(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()) + 2; }
  /// Surface form for id >= 2.
  const std::string& token(int id) const;

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  /// One token per line, line number = id - 2.
  void save(std::ostream& os) const;
  void save_file(const std::string& path) const;
  static Vocabulary load(std::istream& is);
  static Vocabulary load_file(const std::string& path);

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
};

// ---- Encoder parameters ----------------------------------------------------

/// One independently recurrent cell: h_t = relu(W x_t + u .* h_{t-1} + b).
/// The hidden-to-hidden connection is elementwise, so neuron i recurs only
/// with itself.
struct IndRnnCell {
  Tensor w;  // H x input_dim
  Tensor u;  // H
  Tensor b;  // H

  IndRnnCell attach(Tape& tape) const { return {tape.leaf(w), tape.leaf(u), tape.leaf(b)}; }
};

struct EncoderParams {
  Tensor embedding;  // V x k; row 0 (PAD) is all-zero and never updated
  IndRnnCell fwd;
  IndRnnCell bwd;

  int vocab_size() const { return embedding.dim(0); }
  int embed_dim() const { return embedding.dim(1); }
  int hidden_dim() const { return fwd.u.size(); }

  static EncoderParams init(int vocab, int embed_dim, int hidden, Rng& rng);
  EncoderParams attach(Tape& tape) const;
};

// ---- Operations ------------------------------------------------------------

/// Fix a token-id sequence to length n: right-pad with PAD or keep the
/// first n ids.
std::vector<int> pad_or_truncate(const std::vector<int>& tokens, int n);

/// Embedding lookup; row t is the embedding of tokens[t].
Tensor embed(const std::vector<int>& tokens, const EncoderParams& params);

Tensor indrnn_step(const Tensor& x_t, const Tensor& h_prev, const IndRnnCell& cell);

/// Bidirectional pass over X (n x k) from zero initial states. Row t of the
/// result is [forward state at t, backward state at t] with the backward
/// states re-aligned to original positions.
Tensor bi_indrnn(const Tensor& x, const EncoderParams& params);

}  // namespace capsf
