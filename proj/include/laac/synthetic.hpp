#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "laac/catalog.hpp"
#include "laac/dataset.hpp"
#include "laac/reference.hpp"
#include "laac/rng.hpp"

namespace laac {

// Fully specified finite MDP used as a ground-truth oracle. Abstract states
// are encoded as constant windows (state k <-> window of five copies of item
// k+1) so that network policies and critics can consume them directly.
struct SyntheticMDP {
  int state_count = 0;
  int item_count = 0;
  double gamma = 0.9;
  std::vector<std::vector<std::vector<double>>> transition;  // [s][a-1][s']
  std::vector<std::vector<double>> reward;                   // [s][a-1], in [1,5]
  std::vector<double> initial;                               // rho0 over states

  StateKey window_of(int state) const;
  // -1 when the window does not encode a state
  int state_of(const StateKey& window) const;

  void validate() const;
  void save(const std::string& path) const;
  static SyntheticMDP load(const std::string& path);
};

struct SyntheticConfig {
  int state_count = 20;
  int item_count = 50;
  int popular_count = 25;
  int novel_good_count = 5;
  int novel_bad_count = 5;
  double behavior_temperature = 0.5;
  int sample_count = 4000;
  double gamma = 0.9;
  double popular_reward_base = 3.0;
  double popular_reward_spread = 1.0;  // per-item offset in [-spread, +spread]
  double novel_good_reward = 5.0;
  double novel_bad_reward = 1.0;
  double other_reward = 2.0;
  int suggest_good = 3;     // per-state reference suggestions drawn from each group
  int suggest_bad = 3;
  int suggest_logged = 2;
  double eval_fraction = 0.2;

  void validate() const;
};

struct SyntheticBundle {
  SyntheticMDP mdp;
  ItemCatalog catalog;
  OfflineDataset dataset;  // logs popular-item actions only, all non-terminal
  ReferencePolicyTable table;
  std::vector<ProviderRecord> cache_records;  // the table in cache-file form
  std::vector<std::vector<double>> behavior;  // [s][a-1], the logging policy
};

// Popular items are ids 1..popular_count, novel-good the next block, then
// novel-bad; any remaining ids are unlogged mediocre filler. The dataset is
// i.i.d. (s ~ rho0, a ~ behavior, s' ~ P); the reference table suggests a
// per-state mix of novel-good, novel-bad and logged items.
SyntheticBundle generate_synthetic(const SyntheticConfig& config, SeededRng& rng);

using TabularPolicy = std::vector<std::vector<double>>;  // [s][a-1]

// Fixed point of the Bellman evaluation operator, iterated to sup-norm tol.
std::vector<std::vector<double>> exact_q(const SyntheticMDP& mdp, const TabularPolicy& policy,
                                         double tol = 1e-10);
std::vector<double> exact_v(const SyntheticMDP& mdp, const TabularPolicy& policy,
                            double tol = 1e-10);

}  // namespace laac
