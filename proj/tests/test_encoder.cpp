#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "capsf/encoder.hpp"
#include "capsf/tensor.hpp"

using namespace capsf;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("tokenize: whitespace, punctuation, case folding") {
  CHECK(tokenize("Hello,   WORLD!") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("don't stop") == std::vector<std::string>{"dont", "stop"});
  CHECK(tokenize("end.start") == std::vector<std::string>{"end", "start"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize(" .,!? ") == std::vector<std::string>{});
  // Persian passes through with Arabic punctuation stripped.
  CHECK(tokenize("خودکشی، نه!") == std::vector<std::string>{"خودکشی", "نه"});
}

TEST_CASE("normalize_text collapses whitespace and folds case") {
  CHECK(normalize_text("Ways   TO\t die") == "ways to die");
  CHECK(normalize_text("  a  b  ") == "a b");
  CHECK(normalize_text("") == "");
}

TEST_CASE("vocabulary: reserved ids, dense assignment, save/load") {
  Vocabulary v;
  CHECK(v.size() == 2);
  CHECK(v.add("alpha") == 2);
  CHECK(v.add("beta") == 3);
  CHECK(v.add("alpha") == 2);
  CHECK(v.lookup("beta") == 3);
  CHECK(v.lookup("missing") == Vocabulary::kUnk);
  CHECK(v.encode({"alpha", "nope", "beta"}) == std::vector<int>{2, 1, 3});

  std::ostringstream os;
  v.save(os);
  CHECK(os.str() == "alpha\nbeta\n");  // line number = id - 2
  std::istringstream is(os.str());
  Vocabulary loaded = Vocabulary::load(is);
  CHECK(loaded.size() == v.size());
  CHECK(loaded.lookup("beta") == 3);
}

TEST_CASE("pad_or_truncate") {
  CHECK(pad_or_truncate({5, 6}, 4) == std::vector<int>{5, 6, 0, 0});
  CHECK(pad_or_truncate({5, 6, 7, 8}, 4) == std::vector<int>{5, 6, 7, 8});
  CHECK(pad_or_truncate({5, 6, 7, 8, 9}, 4) == std::vector<int>{5, 6, 7, 8});
  CHECK(pad_or_truncate({}, 2) == std::vector<int>{0, 0});
  CHECK_THROWS_AS(pad_or_truncate({1}, 0), std::invalid_argument);
}

TEST_CASE("embed: PAD rows zero, rows match table, OOV uses UNK row") {
  Rng rng(31);
  EncoderParams params = EncoderParams::init(5, 3, 2, rng);

  const Tensor all_pad = embed({0, 0, 0}, params);
  for (int i = 0; i < all_pad.size(); ++i) CHECK(all_pad[i] == 0.0);

  const Tensor one = embed({3}, params);
  for (int j = 0; j < 3; ++j) CHECK(one(0, j) == params.embedding(3, j));

  Vocabulary v;
  v.add("known");
  const Tensor unk = embed(v.encode({"unknown-surface-token"}), params);
  for (int j = 0; j < 3; ++j) CHECK(unk(0, j) == params.embedding(1, j));

  CHECK_THROWS_AS(embed({7}, params), std::out_of_range);
}

TEST_CASE("indrnn_step degenerate and scalar cases") {
  Rng rng(37);
  IndRnnCell cell;
  cell.w = random_tensor({3, 2}, rng);
  cell.u = Tensor::zeros({3});
  cell.b = Tensor::zeros({3});
  const Tensor x = random_tensor({2}, rng);
  const Tensor h_prev = random_tensor({3}, rng);

  // u = 0, b = 0 reduces to a feedforward layer.
  const Tensor h1 = indrnn_step(x, h_prev, cell);
  const Tensor expect1 = relu(matmul(cell.w, x));
  for (int i = 0; i < 3; ++i) CHECK(h1[i] == expect1[i]);

  // x = 0, b = 0 leaves only the recurrent term.
  cell.u = random_tensor({3}, rng);
  const Tensor h2 = indrnn_step(Tensor::zeros({2}), h_prev, cell);
  const Tensor expect2 = relu(hadamard(cell.u, h_prev));
  for (int i = 0; i < 3; ++i) CHECK(h2[i] == expect2[i]);

  // Scalar case: relu(1*2 + 0.5*4 + 0) = 4.
  IndRnnCell scalar_cell{Tensor::matrix(1, 1, {1.0}), Tensor::vector({0.5}),
                         Tensor::vector({0.0})};
  CHECK(indrnn_step(Tensor::vector({2.0}), Tensor::vector({4.0}), scalar_cell)[0] == 4.0);
}

TEST_CASE("indrnn recurrence is elementwise: perturbing h_prev[i] moves only h[i]") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int hidden = rng.uniform_int(2, 6);
    const int k = rng.uniform_int(1, 4);
    IndRnnCell cell{random_tensor({hidden, k}, rng), random_tensor({hidden}, rng),
                    random_tensor({hidden}, rng)};
    const Tensor x = random_tensor({k}, rng);
    Tensor h_prev = random_tensor({hidden}, rng);
    const Tensor base = indrnn_step(x, h_prev, cell);
    const int i = rng.uniform_int(0, hidden - 1);
    h_prev[i] += 0.37;
    const Tensor bumped = indrnn_step(x, h_prev, cell);
    for (int j = 0; j < hidden; ++j) {
      if (j != i) CHECK(bumped[j] == base[j]);
    }
  }
}

TEST_CASE("bi_indrnn output shape is n x 2H") {
  Rng rng(43);
  EncoderParams params = EncoderParams::init(4, 3, 5, rng);
  const Tensor x = random_tensor({7, 3}, rng);
  const Tensor out = bi_indrnn(x, params);
  CHECK(out.shape() == std::vector<int>{7, 10});
}

TEST_CASE("bi_indrnn equals per-direction step composition") {
  Rng rng(47);
  EncoderParams params = EncoderParams::init(4, 2, 3, rng);
  const int n = 5;
  const Tensor x = random_tensor({n, 2}, rng);
  const Tensor out = bi_indrnn(x, params);

  Tensor h = Tensor::zeros({3});
  for (int t = 0; t < n; ++t) {
    h = indrnn_step(take_row(x, t), h, params.fwd);
    for (int j = 0; j < 3; ++j) CHECK(out(t, j) == h[j]);
  }
  h = Tensor::zeros({3});
  for (int t = n - 1; t >= 0; --t) {
    h = indrnn_step(take_row(x, t), h, params.bwd);
    for (int j = 0; j < 3; ++j) CHECK(out(t, 3 + j) == h[j]);
  }
}

TEST_CASE("bi_indrnn: palindromic input with tied cells is mirror-symmetric") {
  Rng rng(53);
  EncoderParams params = EncoderParams::init(4, 2, 3, rng);
  params.bwd = params.fwd;
  const int n = 6;
  Tensor x({n, 2});
  for (int t = 0; t < n / 2; ++t) {
    for (int j = 0; j < 2; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      x.ref(t, j) = v;
      x.ref(n - 1 - t, j) = v;
    }
  }
  const Tensor out = bi_indrnn(x, params);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < 3; ++j) CHECK(out(t, j) == out(n - 1 - t, 3 + j));
  }
}

TEST_CASE("bi_indrnn gradients pass grad_check") {
  Rng rng(61);
  std::vector<Tensor> params = {
      random_tensor({4, 3}, rng),        // input sequence
      random_tensor({2, 3}, rng),  random_tensor({2}, rng), random_tensor({2}, rng, 0.05, 0.4),
      random_tensor({2, 3}, rng),  random_tensor({2}, rng), random_tensor({2}, rng, 0.05, 0.4),
  };
  auto f = [](Tape&, const std::vector<Tensor>& p) {
    EncoderParams ep;
    ep.embedding = Tensor::zeros({2, 3});
    ep.fwd = {p[1], p[2], p[3]};
    ep.bwd = {p[4], p[5], p[6]};
    Tensor out = bi_indrnn(p[0], ep);
    return sum(hadamard(out, sigmoid(out)));
  };
  const GradCheckReport report = grad_check(f, params, 1e-5, 1e-4);
  CHECK(report.max_rel_error < 1e-4);
}
