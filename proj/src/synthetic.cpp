#include "laac/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace laac {

using nlohmann::json;

StateKey SyntheticMDP::window_of(int state) const {
  if (state < 0 || state >= state_count)
    throw std::invalid_argument("window_of: state " + std::to_string(state) + " out of range");
  StateKey k;
  k.ids.fill(state + 1);
  return k;
}

int SyntheticMDP::state_of(const StateKey& window) const {
  const int first = window.ids[0];
  for (int id : window.ids)
    if (id != first) return -1;
  const int s = first - 1;
  return (s >= 0 && s < state_count) ? s : -1;
}

void SyntheticMDP::validate() const {
  if (state_count < 1 || item_count < 1)
    throw std::invalid_argument("SyntheticMDP: empty state or item space");
  if (state_count > item_count)
    throw std::invalid_argument("SyntheticMDP: window encoding needs state_count <= item_count");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("SyntheticMDP: gamma must be in [0, 1)");
  auto check_simplex = [](const std::vector<double>& p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
      if (x < 0.0) throw std::invalid_argument(what + " has a negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument(what + " sums to " + std::to_string(sum));
  };
  check_simplex(initial, "rho0");
  for (int s = 0; s < state_count; ++s)
    for (int a = 0; a < item_count; ++a) {
      check_simplex(transition[s][a], "P(.|s,a)");
      const double r = reward[s][a];
      if (r < 1.0 || r > 5.0)
        throw std::invalid_argument("reward " + std::to_string(r) + " outside [1, 5]");
    }
}

void SyntheticConfig::validate() const {
  if (state_count < 1 || item_count < 1 || sample_count < 1)
    throw std::invalid_argument("synthetic config: counts must be positive");
  if (popular_count < 1 || novel_good_count < 0 || novel_bad_count < 0)
    throw std::invalid_argument("synthetic config: invalid set sizes");
  if (popular_count + novel_good_count + novel_bad_count > item_count)
    throw std::invalid_argument(
        "synthetic config: popular/novel sets overlap or exceed the catalog");
  if (state_count > item_count)
    throw std::invalid_argument("synthetic config: state_count must not exceed item_count");
  if (behavior_temperature <= 0.0)
    throw std::invalid_argument("synthetic config: behavior_temperature must be positive");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("synthetic config: gamma must be in [0, 1)");
  auto in_range = [](double r) { return r >= 1.0 && r <= 5.0; };
  if (!in_range(popular_reward_base - popular_reward_spread) ||
      !in_range(popular_reward_base + popular_reward_spread) || !in_range(novel_good_reward) ||
      !in_range(novel_bad_reward) || !in_range(other_reward))
    throw std::invalid_argument("synthetic config: rewards must stay within [1, 5]");
  if (suggest_good > novel_good_count || suggest_bad > novel_bad_count ||
      suggest_logged > popular_count)
    throw std::invalid_argument("synthetic config: suggestion counts exceed their groups");
  if (suggest_good + suggest_bad + suggest_logged < 1)
    throw std::invalid_argument("synthetic config: reference table would be empty");
}

SyntheticBundle generate_synthetic(const SyntheticConfig& config, SeededRng& rng) {
  config.validate();
  SyntheticBundle bundle;
  auto& mdp = bundle.mdp;
  mdp.state_count = config.state_count;
  mdp.item_count = config.item_count;
  mdp.gamma = config.gamma;

  const int S = config.state_count;
  const int A = config.item_count;
  const int n_pop = config.popular_count;
  const int good_lo = n_pop + 1;                          // ids [good_lo, good_hi]
  const int good_hi = n_pop + config.novel_good_count;
  const int bad_lo = good_hi + 1;
  const int bad_hi = good_hi + config.novel_bad_count;

  // per-item popular reward offsets, fixed across states
  std::vector<double> popular_offset(static_cast<std::size_t>(n_pop));
  for (auto& o : popular_offset)
    o = rng.uniform(-config.popular_reward_spread, config.popular_reward_spread);

  mdp.reward.assign(static_cast<std::size_t>(S), std::vector<double>(static_cast<std::size_t>(A)));
  for (int s = 0; s < S; ++s)
    for (int a = 1; a <= A; ++a) {
      double r;
      if (a <= n_pop)
        r = config.popular_reward_base + popular_offset[static_cast<std::size_t>(a - 1)];
      else if (a <= good_hi)
        r = config.novel_good_reward;
      else if (a <= bad_hi)
        r = config.novel_bad_reward;
      else
        r = config.other_reward;
      mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a - 1)] = r;
    }

  // random dense transition kernel and uniform initial distribution
  mdp.transition.assign(
      static_cast<std::size_t>(S),
      std::vector<std::vector<double>>(static_cast<std::size_t>(A),
                                       std::vector<double>(static_cast<std::size_t>(S))));
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      auto& row = mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      double sum = 0.0;
      for (auto& p : row) {
        p = -std::log(1.0 - rng.uniform());  // Exp(1) draws normalize to a Dirichlet(1)
        sum += p;
      }
      for (auto& p : row) p /= sum;
    }
  mdp.initial.assign(static_cast<std::size_t>(S), 1.0 / static_cast<double>(S));
  mdp.validate();

  // catalog with synthesized titles; counts filled after the split
  auto& cat = bundle.catalog;
  cat.item_count = A;
  cat.titles.push_back("");
  cat.counts.assign(static_cast<std::size_t>(A) + 1, 0);
  for (int a = 1; a <= A; ++a) {
    std::string title = "Item " + std::to_string(a);
    cat.titles.push_back(title);
    cat.title_to_id.emplace(title, a);
  }

  // behavior policy: state-independent softmax over popular items
  std::vector<double> score(static_cast<std::size_t>(n_pop));
  for (auto& x : score) x = rng.uniform();
  std::vector<double> behavior_row(static_cast<std::size_t>(A), 0.0);
  {
    double denom = 0.0;
    for (int a = 0; a < n_pop; ++a)
      denom += std::exp(score[static_cast<std::size_t>(a)] / config.behavior_temperature);
    for (int a = 0; a < n_pop; ++a)
      behavior_row[static_cast<std::size_t>(a)] =
          std::exp(score[static_cast<std::size_t>(a)] / config.behavior_temperature) / denom;
  }
  bundle.behavior.assign(static_cast<std::size_t>(S), behavior_row);

  // i.i.d. logged samples; continuing task, so no terminals
  auto sample_from = [&](const std::vector<double>& probs) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      u -= probs[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  };
  auto& ds = bundle.dataset;
  for (int i = 0; i < config.sample_count; ++i) {
    const int s = sample_from(mdp.initial);
    const int a = sample_from(behavior_row) + 1;
    const int s2 = sample_from(mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a - 1)]);
    Transition t;
    t.state = mdp.window_of(s);
    t.action = a;
    t.reward = mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a - 1)];
    t.next_state = mdp.window_of(s2);
    t.terminal = false;
    t.user = 0;
    ds.transitions.push_back(t);
  }
  const auto n_eval = static_cast<std::size_t>(config.eval_fraction *
                                               static_cast<double>(config.sample_count));
  ds.split.assign(ds.transitions.size(), Split::train);
  for (std::size_t i = ds.transitions.size() - n_eval; i < ds.transitions.size(); ++i)
    ds.split[i] = Split::eval;
  cat.counts = train_action_counts(ds, A);

  // reference suggestions: per-state mix of novel-good, novel-bad and logged
  const std::uint64_t thash = 0;
  auto draw_from_range = [&](int lo, int hi, int k) {
    std::vector<int> ids;
    for (int a = lo; a <= hi; ++a) ids.push_back(a);
    rng.shuffle(ids);
    ids.resize(static_cast<std::size_t>(k));
    return ids;
  };
  for (int s = 0; s < S; ++s) {
    std::vector<int> suggested;
    for (int id : draw_from_range(good_lo, good_hi, config.suggest_good)) suggested.push_back(id);
    for (int id : draw_from_range(bad_lo, bad_hi, config.suggest_bad)) suggested.push_back(id);
    for (int id : draw_from_range(1, n_pop, config.suggest_logged)) suggested.push_back(id);
    std::sort(suggested.begin(), suggested.end());
    const StateKey key = mdp.window_of(s);
    bundle.table.insert(key, suggested);
    ProviderRecord rec;
    rec.state = key;
    rec.candidate_ids = suggested;
    rec.parsed_ids = suggested;
    rec.provider = "synthetic";
    rec.template_hash = thash;
    bundle.cache_records.push_back(rec);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// exact policy evaluation

namespace {

void check_policy(const SyntheticMDP& mdp, const TabularPolicy& policy) {
  if (policy.size() != static_cast<std::size_t>(mdp.state_count))
    throw std::invalid_argument("policy has " + std::to_string(policy.size()) + " states, MDP has " +
                                std::to_string(mdp.state_count));
  for (const auto& row : policy) {
    if (row.size() != static_cast<std::size_t>(mdp.item_count))
      throw std::invalid_argument("policy row length mismatch");
    double sum = 0.0;
    for (double p : row) sum += p;
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("policy row sums to " + std::to_string(sum));
  }
}

}  // namespace

std::vector<std::vector<double>> exact_q(const SyntheticMDP& mdp, const TabularPolicy& policy,
                                         double tol) {
  if (mdp.gamma >= 1.0) throw std::invalid_argument("exact_q: gamma must be < 1");
  check_policy(mdp, policy);
  const int S = mdp.state_count, A = mdp.item_count;
  std::vector<std::vector<double>> q(static_cast<std::size_t>(S),
                                     std::vector<double>(static_cast<std::size_t>(A), 0.0));
  std::vector<double> v(static_cast<std::size_t>(S), 0.0);
  while (true) {
    // v(s') = sum_a' pi(a'|s') q(s', a')
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int a = 0; a < A; ++a)
        acc += policy[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] *
               q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      v[static_cast<std::size_t>(s)] = acc;
    }
    double delta = 0.0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto& p = mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
        double next = 0.0;
        for (int s2 = 0; s2 < S; ++s2) next += p[static_cast<std::size_t>(s2)] * v[static_cast<std::size_t>(s2)];
        const double updated =
            mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] + mdp.gamma * next;
        delta = std::max(delta,
                         std::abs(updated - q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]));
        q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = updated;
      }
    if (delta < tol) break;
  }
  return q;
}

std::vector<double> exact_v(const SyntheticMDP& mdp, const TabularPolicy& policy, double tol) {
  const auto q = exact_q(mdp, policy, tol);
  std::vector<double> v(static_cast<std::size_t>(mdp.state_count), 0.0);
  for (int s = 0; s < mdp.state_count; ++s) {
    double acc = 0.0;
    for (int a = 0; a < mdp.item_count; ++a)
      acc += policy[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] *
             q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    v[static_cast<std::size_t>(s)] = acc;
  }
  return v;
}

// ---------------------------------------------------------------------------
// file io

void SyntheticMDP::save(const std::string& path) const {
  json j = {{"state_count", state_count}, {"item_count", item_count}, {"gamma", gamma},
            {"transition", transition},   {"reward", reward},         {"initial", initial}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mdp file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for mdp file: " + path);
}

SyntheticMDP SyntheticMDP::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mdp file: " + path);
  json j;
  in >> j;
  SyntheticMDP mdp;
  mdp.state_count = j.at("state_count").get<int>();
  mdp.item_count = j.at("item_count").get<int>();
  mdp.gamma = j.at("gamma").get<double>();
  mdp.transition = j.at("transition").get<std::vector<std::vector<std::vector<double>>>>();
  mdp.reward = j.at("reward").get<std::vector<std::vector<double>>>();
  mdp.initial = j.at("initial").get<std::vector<double>>();
  mdp.validate();
  return mdp;
}

}  // namespace laac
