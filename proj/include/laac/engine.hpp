#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laac/adam.hpp"
#include "laac/dataset.hpp"
#include "laac/nets.hpp"
#include "laac/reference.hpp"
#include "laac/rng.hpp"
#include "laac/tensor.hpp"

namespace laac {

enum class TdTargetMode { sampled, exact };
enum class DoubleQMode { per_critic, min_target };

std::string to_string(TdTargetMode m);
std::string to_string(DoubleQMode m);

struct LaacConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.99;
  double eta_critic = 0.01;
  double eta_actor = 0.001;
  double eta_baseline = 0.005;
  int minibatch_size = 128;
  int total_steps = 10000;
  std::uint64_t seed = 1;
  TdTargetMode td_target_mode = TdTargetMode::sampled;
  DoubleQMode double_q_mode = DoubleQMode::per_critic;
  int embedding_dim = 64;
  int hidden_dim = 64;
  double divergence_threshold = 1e6;

  void validate(bool has_nonterminal) const;
  std::uint64_t hash() const;
};

// key = value text, one field per line, '#' comments; unknown keys rejected
LaacConfig load_config(const std::string& path);
void save_config(const std::string& path, const LaacConfig& cfg);

struct StepRecord {
  int step = 0;
  double L_f1 = 0, L_f2 = 0;
  double Eg_f1 = 0, Eg_f2 = 0;
  double Etd_f1 = 0, Etd_f2 = 0;
  double actor_loss = 0;
};

struct TrainLog {
  std::vector<StepRecord> records;
  void write_csv(const std::string& path) const;
};

// One assembled minibatch with the per-state reference distributions attached.
struct Batch {
  WindowBatch states;
  std::vector<int> actions;
  std::vector<double> rewards;
  WindowBatch next_states;           // placeholder rows for terminal samples
  std::vector<std::uint8_t> terminal;
  Tensor ref_probs;                  // |B| x (|A|+1), constant

  std::size_t size() const { return states.size(); }
};

Batch assemble_batch(const std::vector<const Transition*>& samples,
                     const ReferencePolicyProvider& reference);

// ---------------------------------------------------------------------------
// Eq-style losses over a batch; all three are means, so the critic objective
// L + alpha*Eg + beta*Etd already carries the 1/|batch| normalization.

// mean_s [ f(s, pi) - f(s, pi_ref) ], exact expectations
Tensor adversarial_gap(const Tensor& critic_values, const Tensor& pi_probs,
                       const Tensor& ref_probs);
// mean_s ( f(s,a) - f(s, pi_ref) )^2
Tensor grounding_loss(const Tensor& critic_values, const std::vector<int>& actions,
                      const Tensor& ref_probs);
// mean_s ( f(s,a) - target_s )^2 with precomputed, gradient-free targets
Tensor td_loss_from_targets(const Tensor& critic_values, const std::vector<int>& actions,
                            const std::vector<double>& targets);

// r + gamma * T(s') with T from the sampled action or the exact expectation,
// zero for terminal rows; evaluated without building a graph. In min-target
// mode T uses the elementwise minimum of both critics.
std::vector<double> td_targets(const Batch& batch, const CriticNetwork& self,
                               const CriticPair& pair, const PolicyNetwork& pi,
                               const LaacConfig& cfg, SeededRng& rng);

// full E_td for one critic, targets included
double td_loss(const Batch& batch, const CriticNetwork& f, const CriticPair& pair,
               const PolicyNetwork& pi, const LaacConfig& cfg, SeededRng& rng);

struct CriticStepLog {
  double L_f1 = 0, L_f2 = 0, Eg_f1 = 0, Eg_f2 = 0, Etd_f1 = 0, Etd_f2 = 0;
};

// One Adam step per critic on L + alpha*Eg + beta*Etd. The actor's
// distribution enters as a constant; actor parameters are untouched.
CriticStepLog critic_step(CriticPair& critics, AdamOptimizer& opt_f1, AdamOptimizer& opt_f2,
                          const PolicyNetwork& pi, const Batch& batch, const LaacConfig& cfg,
                          SeededRng& rng);

// One Adam step on -L(f1, pi); critic values enter as constants.
double actor_step(PolicyNetwork& pi, AdamOptimizer& opt, const CriticPair& critics,
                  const Batch& batch, const LaacConfig& cfg);

struct TrainResult {
  PolicyNetwork actor;
  CriticPair critics;
  TrainLog log;
};

// Algorithm: N iterations of {sample minibatch -> critic step -> actor step},
// minibatches uniform with replacement over the training split.
TrainResult train_laac(const OfflineDataset& dataset, const ItemCatalog& catalog,
                       const ReferencePolicyProvider& reference, const LaacConfig& cfg);

// Next-item cross-entropy baseline sharing the actor architecture.
PolicyNetwork train_supervised_baseline(const OfflineDataset& dataset, const ItemCatalog& catalog,
                                        const LaacConfig& cfg, TrainLog* log = nullptr);

}  // namespace laac
