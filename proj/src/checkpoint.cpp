#include "capsf/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace capsf {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace {

constexpr char kMagic[6] = {'C', 'A', 'P', 'S', 'F', '1'};

void write_u32(std::ostream& os, uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF),
                         static_cast<char>((v >> 24) & 0xFF)};
  os.write(bytes, 4);
}

uint32_t read_u32(std::istream& is) {
  unsigned char bytes[4];
  if (!is.read(reinterpret_cast<char*>(bytes), 4)) {
    throw CheckpointError("checkpoint truncated");
  }
  return static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
         (static_cast<uint32_t>(bytes[2]) << 16) | (static_cast<uint32_t>(bytes[3]) << 24);
}

void write_block(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_block(std::istream& is) {
  const uint32_t len = read_u32(is);
  if (len > (1u << 30)) throw CheckpointError("checkpoint block length implausible");
  std::string s(len, '\0');
  if (len > 0 && !is.read(s.data(), len)) throw CheckpointError("checkpoint truncated");
  return s;
}

void write_tensor(std::ostream& os, const std::string& name, const Tensor& t) {
  write_block(os, name);
  write_u32(os, static_cast<uint32_t>(t.rank()));
  for (int d : t.shape()) write_u32(os, static_cast<uint32_t>(d));
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(sizeof(double)) * t.size());
}

std::pair<std::string, Tensor> read_tensor(std::istream& is) {
  std::string name = read_block(is);
  const uint32_t rank = read_u32(is);
  if (rank == 0 || rank > 8) throw CheckpointError("checkpoint tensor rank implausible");
  std::vector<int> shape;
  int64_t count = 1;
  for (uint32_t i = 0; i < rank; ++i) {
    const uint32_t d = read_u32(is);
    if (d == 0 || d > (1u << 28)) throw CheckpointError("checkpoint tensor extent implausible");
    shape.push_back(static_cast<int>(d));
    count *= d;
  }
  Vec data(count);
  if (!is.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(sizeof(double)) * count)) {
    throw CheckpointError("checkpoint truncated");
  }
  return {std::move(name), Tensor(std::move(shape), std::move(data))};
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os.write(kMagic, sizeof kMagic);
  write_block(os, ckpt.config.to_json_text());
  std::ostringstream vocab_text;
  ckpt.vocab.save(vocab_text);
  write_block(os, vocab_text.str());

  std::vector<std::pair<std::string, Tensor>> tensors;
  ckpt.params.for_each(
      [&](const std::string& name, const Tensor& t) { tensors.emplace_back(name, t); });
  tensors.emplace_back("stats.mean", ckpt.stats.mean);
  tensors.emplace_back("stats.sd", ckpt.stats.sd);

  write_u32(os, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) write_tensor(os, name, t);
  if (!os) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);

  char magic[6];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 6, kMagic)) {
    throw CheckpointError("not a CAPSF1 checkpoint: " + path);
  }

  Checkpoint ckpt;
  try {
    ckpt.config = TrainConfig::from_json_text(read_block(is));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
  }
  std::istringstream vocab_text(read_block(is));
  ckpt.vocab = Vocabulary::load(vocab_text);

  std::map<std::string, Tensor> table;
  const uint32_t count = read_u32(is);
  if (count > 1024) throw CheckpointError("checkpoint tensor count implausible");
  for (uint32_t i = 0; i < count; ++i) {
    auto [name, t] = read_tensor(is);
    if (!table.emplace(std::move(name), std::move(t)).second) {
      throw CheckpointError("checkpoint has a duplicate tensor");
    }
  }

  const auto take = [&](const std::string& name) {
    auto it = table.find(name);
    if (it == table.end()) throw CheckpointError("checkpoint missing tensor: " + name);
    Tensor t = std::move(it->second);
    table.erase(it);
    return t;
  };

  Rng dummy(0);
  ckpt.params = CapsFusionParams::init(ckpt.config.model, ckpt.vocab.size(), dummy);
  ckpt.params.for_each([&](const std::string& name, Tensor& t) {
    Tensor loaded = take(name);
    if (!loaded.same_shape(t)) {
      throw CheckpointError("checkpoint tensor " + name + " has shape " + loaded.shape_str() +
                            ", expected " + t.shape_str());
    }
    t = std::move(loaded);
  });
  ckpt.stats.mean = take("stats.mean");
  ckpt.stats.sd = take("stats.sd");
  if (ckpt.stats.mean.size() != 4 || ckpt.stats.sd.size() != 4) {
    throw CheckpointError("checkpoint stats tensors malformed");
  }
  if (!table.empty()) throw CheckpointError("checkpoint has unexpected tensors");
  return ckpt;
}

}  // namespace capsf
