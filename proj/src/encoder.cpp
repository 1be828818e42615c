#include "capsf/encoder.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace capsf {

// ---- UTF-8 -----------------------------------------------------------------

std::vector<uint32_t> decode_utf8(const std::string& text) {
  std::vector<uint32_t> cps;
  cps.reserve(text.size());
  size_t i = 0;
  const auto byte = [&](size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < text.size()) {
    const unsigned char c = byte(i);
    uint32_t cp = 0xFFFD;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < text.size() && (byte(i + 1) & 0xC0) == 0x80) {
      cp = (static_cast<uint32_t>(c & 0x1F) << 6) | (byte(i + 1) & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < text.size() && (byte(i + 1) & 0xC0) == 0x80 &&
               (byte(i + 2) & 0xC0) == 0x80) {
      cp = (static_cast<uint32_t>(c & 0x0F) << 12) |
           (static_cast<uint32_t>(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < text.size() && (byte(i + 1) & 0xC0) == 0x80 &&
               (byte(i + 2) & 0xC0) == 0x80 && (byte(i + 3) & 0xC0) == 0x80) {
      cp = (static_cast<uint32_t>(c & 0x07) << 18) |
           (static_cast<uint32_t>(byte(i + 1) & 0x3F) << 12) |
           (static_cast<uint32_t>(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
      len = 4;
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

std::string encode_utf8(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_space_cp(uint32_t cp) {
  switch (cp) {
    case ' ':
    case '\t':
    case '\n':
    case '\r':
    case '\f':
    case '\v':
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punct_cp(uint32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
  }
  switch (cp) {
    case 0x00A1:  // inverted exclamation
    case 0x00AB:  // <<
    case 0x00B7:  // middle dot
    case 0x00BB:  // >>
    case 0x00BF:  // inverted question
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x066B:  // Arabic decimal separator
    case 0x066C:  // Arabic thousands separator
    case 0x06D4:  // Arabic full stop
    case 0x2026:  // ellipsis
    case 0x2039:
    case 0x203A:
    case 0x3001:
    case 0x3002:
    case 0xFF01:
    case 0xFF0C:
    case 0xFF1A:
    case 0xFF1B:
    case 0xFF1F:
      return true;
    default:
      return (cp >= 0x2010 && cp <= 0x2027);  // dashes, quotes, daggers
  }
}

namespace {

uint32_t fold_case(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::vector<uint32_t> current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(encode_utf8(current));
      current.clear();
    }
  };
  for (uint32_t cp : decode_utf8(text)) {
    if (cp == '\'' || cp == 0x2019) continue;  // apostrophes removed in place
    if (is_space_cp(cp) || is_punct_cp(cp)) {
      flush();
      continue;
    }
    current.push_back(fold_case(cp));
  }
  flush();
  return tokens;
}

std::string normalize_text(const std::string& text) {
  std::vector<uint32_t> out;
  bool pending_space = false;
  for (uint32_t cp : decode_utf8(text)) {
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(fold_case(cp));
  }
  return encode_utf8(out);
}

// ---- Vocabulary ------------------------------------------------------------

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = size();
  ids_.emplace(token, id);
  tokens_.push_back(token);
  return id;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 2 || id >= size()) throw std::out_of_range("vocabulary id has no surface form");
  return tokens_[static_cast<size_t>(id - 2)];
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(lookup(t));
  return ids;
}

void Vocabulary::save(std::ostream& os) const {
  for (const std::string& t : tokens_) os << t << '\n';
}

void Vocabulary::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write vocabulary file: " + path);
  save(os);
}

Vocabulary Vocabulary::load(std::istream& is) {
  Vocabulary v;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    v.add(line);
  }
  return v;
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read vocabulary file: " + path);
  return load(is);
}

// ---- Encoder ---------------------------------------------------------------

EncoderParams EncoderParams::init(int vocab, int embed_dim, int hidden, Rng& rng) {
  const auto uniform_tensor = [&](std::vector<int> shape, double bound) {
    Tensor t(std::move(shape));
    for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
  };
  EncoderParams p;
  p.embedding = uniform_tensor({vocab, embed_dim}, 0.05);
  p.embedding.data().head(embed_dim).setZero();  // PAD row
  const auto cell = [&] {
    IndRnnCell c;
    c.w = uniform_tensor({hidden, embed_dim}, 1.0 / std::sqrt(static_cast<double>(embed_dim)));
    c.u = uniform_tensor({hidden}, 0.5);
    // Small positive bias keeps the relu off its kink for all-zero inputs
    // (PAD steps start from exactly zero pre-activations otherwise).
    c.b = Tensor::full({hidden}, 0.1);
    return c;
  };
  p.fwd = cell();
  p.bwd = cell();
  return p;
}

EncoderParams EncoderParams::attach(Tape& tape) const {
  EncoderParams p;
  p.embedding = tape.leaf(embedding);
  p.fwd = fwd.attach(tape);
  p.bwd = bwd.attach(tape);
  return p;
}

std::vector<int> pad_or_truncate(const std::vector<int>& tokens, int n) {
  if (n <= 0) throw std::invalid_argument("pad_or_truncate: n must be >= 1");
  std::vector<int> out(tokens.begin(),
                       tokens.size() > static_cast<size_t>(n) ? tokens.begin() + n : tokens.end());
  out.resize(static_cast<size_t>(n), Vocabulary::kPad);
  return out;
}

Tensor embed(const std::vector<int>& tokens, const EncoderParams& params) {
  return gather_rows(params.embedding, tokens);
}

Tensor indrnn_step(const Tensor& x_t, const Tensor& h_prev, const IndRnnCell& cell) {
  return relu(add(add(matmul(cell.w, x_t), hadamard(cell.u, h_prev)), cell.b));
}

Tensor bi_indrnn(const Tensor& x, const EncoderParams& params) {
  const int n = x.dim(0);
  const int hidden = params.hidden_dim();

  std::vector<Tensor> inputs;
  inputs.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) inputs.push_back(take_row(x, t));

  std::vector<Tensor> fwd_states(static_cast<size_t>(n));
  Tensor h = Tensor::zeros({hidden});
  for (int t = 0; t < n; ++t) {
    h = indrnn_step(inputs[static_cast<size_t>(t)], h, params.fwd);
    fwd_states[static_cast<size_t>(t)] = h;
  }

  std::vector<Tensor> bwd_states(static_cast<size_t>(n));
  h = Tensor::zeros({hidden});
  for (int t = n - 1; t >= 0; --t) {
    h = indrnn_step(inputs[static_cast<size_t>(t)], h, params.bwd);
    bwd_states[static_cast<size_t>(t)] = h;  // re-aligned to the original position
  }

  std::vector<Tensor> rows;
  rows.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) {
    rows.push_back(concat(fwd_states[static_cast<size_t>(t)], bwd_states[static_cast<size_t>(t)]));
  }
  return stack_rows(rows);
}

}  // namespace capsf
