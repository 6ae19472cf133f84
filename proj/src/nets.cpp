#include "laac/nets.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace laac {

std::string StateKey::to_string() const {
  std::string out;
  for (int i = 0; i < kWindowSize; ++i) {
    if (i) out += ',';
    out += std::to_string(ids[static_cast<std::size_t>(i)]);
  }
  return out;
}

StateKey StateKey::parse(const std::string& s) {
  StateKey k;
  std::istringstream ss(s);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= kWindowSize) throw std::invalid_argument("state key has too many ids: " + s);
    k.ids[static_cast<std::size_t>(i++)] = std::stoi(part);
  }
  if (i != kWindowSize) throw std::invalid_argument("state key needs 5 ids: " + s);
  return k;
}

namespace {

std::vector<double> uniform_init(std::size_t n, double bound, SeededRng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return v;
}

Tensor init_matrix(std::size_t rows, std::size_t cols, std::size_t fan_in, SeededRng& rng,
                   const std::string& name) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return parameter({rows, cols}, uniform_init(rows * cols, bound, rng), name);
}

}  // namespace

GruEncoder GruEncoder::init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                            const std::string& p) {
  if (item_count < 1 || embed_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("GruEncoder::init: sizes must be positive");
  GruEncoder e;
  e.num_ids = item_count + 1;
  e.embed_dim = embed_dim;
  e.hidden_dim = hidden_dim;
  const auto n = static_cast<std::size_t>(e.num_ids);
  const auto d = static_cast<std::size_t>(embed_dim);
  const auto h = static_cast<std::size_t>(hidden_dim);
  e.embedding = init_matrix(n, d, d, rng, p + ".embedding");
  e.Wz = init_matrix(d, h, d, rng, p + ".gru.Wz");
  e.Uz = init_matrix(h, h, h, rng, p + ".gru.Uz");
  e.bz = parameter({h}, std::vector<double>(h, 0.0), p + ".gru.bz");
  e.Wr = init_matrix(d, h, d, rng, p + ".gru.Wr");
  e.Ur = init_matrix(h, h, h, rng, p + ".gru.Ur");
  e.br = parameter({h}, std::vector<double>(h, 0.0), p + ".gru.br");
  e.Wn = init_matrix(d, h, d, rng, p + ".gru.Wn");
  e.Un = init_matrix(h, h, h, rng, p + ".gru.Un");
  e.bn = parameter({h}, std::vector<double>(h, 0.0), p + ".gru.bn");
  return e;
}

Tensor GruEncoder::encode(const WindowBatch& windows) const {
  const std::size_t batch = windows.size();
  if (batch == 0) throw std::invalid_argument("encode: empty batch");
  std::vector<int> step_ids(batch);
  Tensor h = zeros({batch, static_cast<std::size_t>(hidden_dim)});
  for (int t = 0; t < kWindowSize; ++t) {
    for (std::size_t i = 0; i < batch; ++i) {
      const int id = windows[i].ids[static_cast<std::size_t>(t)];
      if (id < 0 || id >= num_ids)
        throw std::invalid_argument("encode: item id " + std::to_string(id) +
                                    " out of range [0, " + std::to_string(num_ids - 1) + "]");
      step_ids[i] = id;
    }
    Tensor x = gather_rows(embedding, step_ids);
    Tensor z = sigmoid(add(add(matmul(x, Wz), matmul(h, Uz)), bz));
    Tensor r = sigmoid(add(add(matmul(x, Wr), matmul(h, Ur)), br));
    Tensor n = laac::tanh(add(add(matmul(x, Wn), matmul(mul(r, h), Un)), bn));
    h = add(mul(z, h), mul(sub(1.0, z), n));
  }
  return h;
}

std::vector<Tensor> GruEncoder::params() const {
  return {embedding, Wz, Uz, bz, Wr, Ur, br, Wn, Un, bn};
}

std::vector<double> encode_state(const StateKey& window, const GruEncoder& encoder) {
  NoGradGuard ng;
  return encoder.encode({window}).values();
}

PolicyNetwork PolicyNetwork::init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                                  const std::string& p) {
  PolicyNetwork n;
  n.encoder = GruEncoder::init(item_count, embed_dim, hidden_dim, rng, p);
  n.W_out = init_matrix(static_cast<std::size_t>(hidden_dim),
                        static_cast<std::size_t>(item_count + 1),
                        static_cast<std::size_t>(hidden_dim), rng, p + ".W_out");
  n.b_out = parameter({static_cast<std::size_t>(item_count + 1)},
                      std::vector<double>(static_cast<std::size_t>(item_count + 1), 0.0),
                      p + ".b_out");
  return n;
}

Tensor PolicyNetwork::logits(const WindowBatch& windows) const {
  return add(matmul(encoder.encode(windows), W_out), b_out);
}

Tensor PolicyNetwork::distribution(const WindowBatch& windows) const {
  return softmax_rows(logits(windows), {static_cast<std::size_t>(kPaddingId)});
}

std::vector<double> PolicyNetwork::distribution_one(const StateKey& window) const {
  NoGradGuard ng;
  return distribution({window}).values();
}

std::vector<Tensor> PolicyNetwork::params() const {
  auto p = encoder.params();
  p.push_back(W_out);
  p.push_back(b_out);
  return p;
}

CriticNetwork CriticNetwork::init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                                  const std::string& p) {
  CriticNetwork n;
  n.encoder = GruEncoder::init(item_count, embed_dim, hidden_dim, rng, p);
  n.W_out = init_matrix(static_cast<std::size_t>(hidden_dim),
                        static_cast<std::size_t>(item_count + 1),
                        static_cast<std::size_t>(hidden_dim), rng, p + ".W_out");
  n.b_out = parameter({static_cast<std::size_t>(item_count + 1)},
                      std::vector<double>(static_cast<std::size_t>(item_count + 1), 0.0),
                      p + ".b_out");
  return n;
}

Tensor CriticNetwork::values(const WindowBatch& windows) const {
  return add(matmul(encoder.encode(windows), W_out), b_out);
}

std::vector<double> CriticNetwork::values_one(const StateKey& window) const {
  NoGradGuard ng;
  return values({window}).values();
}

std::vector<Tensor> CriticNetwork::params() const {
  auto p = encoder.params();
  p.push_back(W_out);
  p.push_back(b_out);
  return p;
}

CriticPair CriticPair::init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng) {
  CriticPair pair;
  pair.f1 = CriticNetwork::init(item_count, embed_dim, hidden_dim, rng, "f1");
  pair.f2 = CriticNetwork::init(item_count, embed_dim, hidden_dim, rng, "f2");
  return pair;
}

double expected_value(const std::vector<double>& values, const std::vector<double>& policy) {
  if (values.size() != policy.size())
    throw std::invalid_argument("expected_value: length mismatch, " +
                                std::to_string(values.size()) + " values vs " +
                                std::to_string(policy.size()) + " probabilities");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * policy[i];
  return s;
}

// ---------------------------------------------------------------------------
// checkpoint io

namespace {

constexpr char kMagic[8] = {'L', 'A', 'A', 'C', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const auto len = read_pod<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return s;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint64_t>(out, catalog_hash);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    write_string(out, k);
    write_pod<std::int64_t>(out, v);
  }
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    write_string(out, name);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape().size()));
    for (auto d : t.shape()) write_pod<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.values().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed for checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  const auto version = read_pod<std::uint32_t>(in);
  if (version != 1)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.catalog_hash = read_pod<std::uint64_t>(in);
  const auto n_meta = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = read_string(in);
    ckpt.meta[k] = read_pod<std::int64_t>(in);
  }
  const auto n_tensors = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = read_string(in);
    const auto rank = read_pod<std::uint32_t>(in);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    std::vector<double> vals(shape_size(shape));
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    ckpt.tensors.emplace(name, constant(shape, std::move(vals)));
  }
  return ckpt;
}

Checkpoint make_checkpoint(const std::vector<Tensor>& params, std::uint64_t catalog_hash,
                           std::map<std::string, std::int64_t> meta) {
  Checkpoint ckpt;
  ckpt.catalog_hash = catalog_hash;
  ckpt.meta = std::move(meta);
  for (const auto& p : params) {
    if (p.name().empty()) throw std::invalid_argument("make_checkpoint: unnamed parameter");
    ckpt.tensors.emplace(p.name(), p.detach());
  }
  return ckpt;
}

void restore_params(const Checkpoint& ckpt, const std::vector<Tensor>& params) {
  for (const auto& p : params) {
    auto it = ckpt.tensors.find(p.name());
    if (it == ckpt.tensors.end())
      throw std::runtime_error("checkpoint missing tensor '" + p.name() + "'");
    if (it->second.shape() != p.shape())
      throw std::runtime_error("checkpoint tensor '" + p.name() + "' has shape " +
                               shape_str(it->second.shape()) + ", expected " +
                               shape_str(p.shape()));
    const_cast<Tensor&>(p).mutable_values() = it->second.values();
  }
}

}  // namespace laac
