#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "capsf/checkpoint.hpp"

using namespace capsf;

namespace {

std::string temp_path(const std::string& name) {
  return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/capsf_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Checkpoint make_checkpoint(uint64_t seed) {
  TrainConfig config;
  config.model.seq_len = 6;
  config.model.embed_dim = 4;
  config.model.hidden_dim = 3;
  config.model.caps_out = 2;
  config.model.caps_out_dim = 2;
  config.model.feature_hidden = 3;
  config.model.routing_iters = 2;

  Vocabulary vocab;
  vocab.add("alpha");
  vocab.add("beta");
  vocab.add("gamma");

  Rng rng(seed);
  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.vocab = vocab;
  ckpt.params = CapsFusionParams::init(config.model, vocab.size(), rng);
  ckpt.stats.mean = Tensor({4}, {0.1, 0.2, 0.3, 0.4});
  ckpt.stats.sd = Tensor({4}, {1.1, 1.2, 1.3, 1.4});
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint: save/load/save is byte-identical") {
  const Checkpoint ckpt = make_checkpoint(77);
  const std::string p1 = temp_path("ck1.bin");
  const std::string p2 = temp_path("ck2.bin");
  save_checkpoint(p1, ckpt);
  const Checkpoint loaded = load_checkpoint(p1);
  save_checkpoint(p2, loaded);
  CHECK(slurp(p1) == slurp(p2));

  CHECK(loaded.vocab.size() == ckpt.vocab.size());
  CHECK(loaded.vocab.lookup("gamma") == ckpt.vocab.lookup("gamma"));
  CHECK(loaded.config.model.seq_len == 6);
  CHECK(loaded.stats.mean[2] == 0.3);
}

TEST_CASE("checkpoint: loaded parameters reproduce predictions bit-for-bit") {
  const Checkpoint ckpt = make_checkpoint(78);
  const std::string path = temp_path("ck3.bin");
  save_checkpoint(path, ckpt);
  const Checkpoint loaded = load_checkpoint(path);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> ids(6);
    for (int& id : ids) id = rng.uniform_int(0, ckpt.vocab.size() - 1);
    Tensor features({7});
    for (int i = 0; i < 7; ++i) features[i] = rng.uniform(-1.0, 1.0);
    const double before = predict_probability(ckpt.params, ids, features)(0);
    const double after = predict_probability(loaded.params, ids, features)(0);
    CHECK(before == after);
  }
}

TEST_CASE("checkpoint: magic mismatch is rejected before any tensor read") {
  const Checkpoint ckpt = make_checkpoint(79);
  const std::string path = temp_path("ck4.bin");
  save_checkpoint(path, ckpt);
  std::string bytes = slurp(path);
  bytes[0] = 'X';
  {
    std::ofstream os(path, std::ios::binary);
    os << bytes;
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
}

TEST_CASE("checkpoint: truncation is detected") {
  const Checkpoint ckpt = make_checkpoint(80);
  const std::string path = temp_path("ck5.bin");
  save_checkpoint(path, ckpt);
  std::string bytes = slurp(path);
  bytes.resize(bytes.size() / 2);
  {
    std::ofstream os(path, std::ios::binary);
    os << bytes;
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
}

TEST_CASE("checkpoint: missing file is an I/O error, not a checkpoint error") {
  CHECK_THROWS_AS(load_checkpoint(temp_path("does_not_exist.bin")), std::runtime_error);
  try {
    load_checkpoint(temp_path("does_not_exist.bin"));
  } catch (const CheckpointError&) {
    CHECK(false);  // should be the plain runtime_error path
  } catch (const std::runtime_error&) {
    CHECK(true);
  }
}
