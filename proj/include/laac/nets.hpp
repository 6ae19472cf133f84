#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "laac/rng.hpp"
#include "laac/tensor.hpp"

namespace laac {

inline constexpr int kWindowSize = 5;
inline constexpr int kPaddingId = 0;

// A user state: the five most recent item ids, oldest first. Histories
// shorter than five are left-padded with id 0.
struct StateKey {
  std::array<int, kWindowSize> ids{};
  bool operator==(const StateKey& o) const { return ids == o.ids; }
  std::string to_string() const;  // comma-joined ids
  static StateKey parse(const std::string& s);
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int id : k.ids) h = splitmix64(h ^ static_cast<std::uint64_t>(id));
    return static_cast<std::size_t>(h);
  }
};

using WindowBatch = std::vector<StateKey>;

// GRU over the embedded window, unrolled left to right from a zero hidden
// state. Gate equations, with x the item embedding and h the previous hidden:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + (r * h) Un + bn)
//   h' = z * h + (1 - z) * n
struct GruEncoder {
  int num_ids = 0;  // item_count + 1, row 0 is the padding embedding
  int embed_dim = 0;
  int hidden_dim = 0;
  Tensor embedding;
  Tensor Wz, Uz, bz;
  Tensor Wr, Ur, br;
  Tensor Wn, Un, bn;

  static GruEncoder init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                         const std::string& name_prefix);

  // batch x hidden_dim; throws when an id falls outside [0, item_count]
  Tensor encode(const WindowBatch& windows) const;
  std::vector<Tensor> params() const;
};

// convenience for the single-state contract
std::vector<double> encode_state(const StateKey& window, const GruEncoder& encoder);

// Actor: encoder plus linear head over item ids, masked softmax with the
// padding id pinned to probability 0.
struct PolicyNetwork {
  GruEncoder encoder;
  Tensor W_out, b_out;  // hidden -> item_count + 1

  static PolicyNetwork init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                            const std::string& name_prefix = "actor");
  Tensor logits(const WindowBatch& windows) const;
  Tensor distribution(const WindowBatch& windows) const;
  std::vector<double> distribution_one(const StateKey& window) const;
  std::vector<Tensor> params() const;
  int item_count() const { return encoder.num_ids - 1; }
};

// One critic head: per-item values f(s, .) in a single pass.
struct CriticNetwork {
  GruEncoder encoder;
  Tensor W_out, b_out;

  static CriticNetwork init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng,
                            const std::string& name_prefix);
  Tensor values(const WindowBatch& windows) const;
  std::vector<double> values_one(const StateKey& window) const;
  std::vector<Tensor> params() const;
};

// Double-Q pair; f1 and f2 share no parameters.
struct CriticPair {
  CriticNetwork f1, f2;
  static CriticPair init(int item_count, int embed_dim, int hidden_dim, SeededRng& rng);
};

// exact expectation E_{a~policy}[values[a]]; lengths must match
double expected_value(const std::vector<double>& values, const std::vector<double>& policy);

// ---------------------------------------------------------------------------
// checkpoints: versioned binary dump of named tensors, bitwise round-trip

struct Checkpoint {
  std::uint64_t catalog_hash = 0;
  std::map<std::string, std::int64_t> meta;
  std::map<std::string, Tensor> tensors;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

Checkpoint make_checkpoint(const std::vector<Tensor>& params, std::uint64_t catalog_hash,
                           std::map<std::string, std::int64_t> meta);
// copies values from the checkpoint into same-named parameters; throws on
// missing names or shape mismatch
void restore_params(const Checkpoint& ckpt, const std::vector<Tensor>& params);

}  // namespace laac
