#include "laac/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace laac {

std::string to_string(TdTargetMode m) {
  return m == TdTargetMode::sampled ? "sampled" : "exact";
}

std::string to_string(DoubleQMode m) {
  return m == DoubleQMode::per_critic ? "per-critic" : "min-target";
}

void LaacConfig::validate(bool has_nonterminal) const {
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("alpha and beta must be >= 0");
  if (eta_critic <= 0.0 || eta_actor <= 0.0 || eta_baseline <= 0.0)
    throw std::invalid_argument("learning rates must be positive");
  if (minibatch_size < 1) throw std::invalid_argument("minibatch_size must be positive");
  if (total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
  if (embedding_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("model dimensions must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0, 1]");
  if (gamma >= 1.0 && has_nonterminal)
    throw std::invalid_argument("gamma must be < 1 when bootstrapping non-terminal data");
}

std::uint64_t LaacConfig::hash() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << alpha << '|' << beta << '|' << gamma << '|' << eta_critic << '|' << eta_actor << '|'
     << eta_baseline << '|' << minibatch_size << '|' << total_steps << '|' << seed << '|'
     << to_string(td_target_mode) << '|' << to_string(double_q_mode) << '|' << embedding_dim
     << '|' << hidden_dim << '|' << divergence_threshold;
  return fnv1a64(ss.str());
}

LaacConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  LaacConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               " is not 'key = value': " + line);
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "alpha") cfg.alpha = std::stod(value);
      else if (key == "beta") cfg.beta = std::stod(value);
      else if (key == "gamma") cfg.gamma = std::stod(value);
      else if (key == "eta_critic") cfg.eta_critic = std::stod(value);
      else if (key == "eta_actor") cfg.eta_actor = std::stod(value);
      else if (key == "eta_baseline") cfg.eta_baseline = std::stod(value);
      else if (key == "minibatch_size") cfg.minibatch_size = std::stoi(value);
      else if (key == "total_steps") cfg.total_steps = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "embedding_dim") cfg.embedding_dim = std::stoi(value);
      else if (key == "hidden_dim") cfg.hidden_dim = std::stoi(value);
      else if (key == "divergence_threshold") cfg.divergence_threshold = std::stod(value);
      else if (key == "td_target_mode") {
        if (value == "sampled") cfg.td_target_mode = TdTargetMode::sampled;
        else if (value == "exact") cfg.td_target_mode = TdTargetMode::exact;
        else throw std::runtime_error("td_target_mode must be 'sampled' or 'exact'");
      } else if (key == "double_q_mode") {
        if (value == "per-critic") cfg.double_q_mode = DoubleQMode::per_critic;
        else if (value == "min-target") cfg.double_q_mode = DoubleQMode::min_target;
        else throw std::runtime_error("double_q_mode must be 'per-critic' or 'min-target'");
      } else {
        throw std::runtime_error("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config key '" + key + "' has a malformed value: " + value);
    }
  }
  return cfg;
}

void save_config(const std::string& path, const LaacConfig& cfg) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  std::fprintf(out, "alpha = %.17g\n", cfg.alpha);
  std::fprintf(out, "beta = %.17g\n", cfg.beta);
  std::fprintf(out, "gamma = %.17g\n", cfg.gamma);
  std::fprintf(out, "eta_critic = %.17g\n", cfg.eta_critic);
  std::fprintf(out, "eta_actor = %.17g\n", cfg.eta_actor);
  std::fprintf(out, "eta_baseline = %.17g\n", cfg.eta_baseline);
  std::fprintf(out, "minibatch_size = %d\n", cfg.minibatch_size);
  std::fprintf(out, "total_steps = %d\n", cfg.total_steps);
  std::fprintf(out, "seed = %llu\n", static_cast<unsigned long long>(cfg.seed));
  std::fprintf(out, "td_target_mode = %s\n", to_string(cfg.td_target_mode).c_str());
  std::fprintf(out, "double_q_mode = %s\n", to_string(cfg.double_q_mode).c_str());
  std::fprintf(out, "embedding_dim = %d\n", cfg.embedding_dim);
  std::fprintf(out, "hidden_dim = %d\n", cfg.hidden_dim);
  std::fprintf(out, "divergence_threshold = %.17g\n", cfg.divergence_threshold);
  if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + path);
}

void TrainLog::write_csv(const std::string& path) const {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write train log: " + path);
  std::fprintf(out, "step,L_f1,L_f2,E_g_f1,E_g_f2,E_td_f1,E_td_f2,actor_loss\n");
  for (const auto& r : records)
    std::fprintf(out, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.L_f1, r.L_f2,
                 r.Eg_f1, r.Eg_f2, r.Etd_f1, r.Etd_f2, r.actor_loss);
  if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + path);
}

Batch assemble_batch(const std::vector<const Transition*>& samples,
                     const ReferencePolicyProvider& reference) {
  if (samples.empty()) throw std::invalid_argument("assemble_batch: empty sample list");
  Batch b;
  std::vector<double> ref_flat;
  std::size_t width = 0;
  for (const Transition* t : samples) {
    b.states.push_back(t->state);
    b.actions.push_back(t->action);
    b.rewards.push_back(t->reward);
    // terminal rows still need a valid window for the batched forward pass
    b.next_states.push_back(t->terminal ? t->state : t->next_state);
    b.terminal.push_back(t->terminal ? 1 : 0);
    auto probs = reference.probabilities(t->state);
    width = probs.size();
    ref_flat.insert(ref_flat.end(), probs.begin(), probs.end());
  }
  b.ref_probs = constant({samples.size(), width}, std::move(ref_flat));
  return b;
}

Tensor adversarial_gap(const Tensor& critic_values, const Tensor& pi_probs,
                       const Tensor& ref_probs) {
  return mean_all(rowwise_sum(mul(critic_values, sub(pi_probs, ref_probs))));
}

Tensor grounding_loss(const Tensor& critic_values, const std::vector<int>& actions,
                      const Tensor& ref_probs) {
  Tensor f_a = take_per_row(critic_values, actions);
  Tensor f_ref = rowwise_sum(mul(critic_values, ref_probs));
  return mean_all(square(sub(f_a, f_ref)));
}

Tensor td_loss_from_targets(const Tensor& critic_values, const std::vector<int>& actions,
                            const std::vector<double>& targets) {
  Tensor f_a = take_per_row(critic_values, actions);
  Tensor t = constant({targets.size()}, targets);
  return mean_all(square(sub(f_a, t)));
}

namespace {

int sample_index(const std::vector<double>& probs, SeededRng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

std::vector<double> td_targets(const Batch& batch, const CriticNetwork& self,
                               const CriticPair& pair, const PolicyNetwork& pi,
                               const LaacConfig& cfg, SeededRng& rng) {
  NoGradGuard ng;
  const std::size_t n = batch.size();
  std::vector<double> targets(n, 0.0);

  // next-state values under the chosen target rule
  Tensor v1 = cfg.double_q_mode == DoubleQMode::min_target ? pair.f1.values(batch.next_states)
                                                           : self.values(batch.next_states);
  std::vector<double> next_vals = v1.values();
  if (cfg.double_q_mode == DoubleQMode::min_target) {
    const auto v2 = pair.f2.values(batch.next_states).values();
    for (std::size_t i = 0; i < next_vals.size(); ++i)
      next_vals[i] = std::min(next_vals[i], v2[i]);
  }
  const std::size_t width = v1.cols();

  Tensor pi_next = pi.distribution(batch.next_states);
  for (std::size_t i = 0; i < n; ++i) {
    double t_next = 0.0;
    if (!batch.terminal[i]) {
      const double* row = next_vals.data() + i * width;
      if (cfg.td_target_mode == TdTargetMode::sampled) {
        std::vector<double> probs(pi_next.values().begin() + static_cast<std::ptrdiff_t>(i * width),
                                  pi_next.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
        t_next = row[sample_index(probs, rng)];
      } else {
        for (std::size_t a = 0; a < width; ++a) t_next += pi_next.at(i, a) * row[a];
      }
    }
    targets[i] = batch.rewards[i] + cfg.gamma * t_next;
  }
  return targets;
}

double td_loss(const Batch& batch, const CriticNetwork& f, const CriticPair& pair,
               const PolicyNetwork& pi, const LaacConfig& cfg, SeededRng& rng) {
  NoGradGuard ng;
  const auto targets = td_targets(batch, f, pair, pi, cfg, rng);
  return td_loss_from_targets(f.values(batch.states), batch.actions, targets).scalar();
}

namespace {

void check_finite(double v, const char* what, double threshold) {
  if (!std::isfinite(v) || std::abs(v) > threshold)
    throw std::runtime_error(std::string("training diverged: ") + what + " = " +
                             std::to_string(v));
}

}  // namespace

CriticStepLog critic_step(CriticPair& critics, AdamOptimizer& opt_f1, AdamOptimizer& opt_f2,
                          const PolicyNetwork& pi, const Batch& batch, const LaacConfig& cfg,
                          SeededRng& rng) {
  // actor distribution is data here, not a differentiable input
  Tensor pi_probs;
  {
    NoGradGuard ng;
    pi_probs = pi.distribution(batch.states);
  }
  // one shared a' draw per transition per update (sampled mode)
  std::vector<double> targets_f1, targets_f2;
  if (cfg.td_target_mode == TdTargetMode::sampled &&
      cfg.double_q_mode == DoubleQMode::per_critic) {
    // draw actions once, evaluate both critics on the same draws
    NoGradGuard ng;
    Tensor pi_next = pi.distribution(batch.next_states);
    const std::size_t width = pi_next.cols();
    std::vector<int> drawn(batch.size(), 0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::vector<double> probs(pi_next.values().begin() + static_cast<std::ptrdiff_t>(i * width),
                                pi_next.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
      drawn[i] = sample_index(probs, rng);
    }
    auto targets_for = [&](const CriticNetwork& f) {
      std::vector<double> t(batch.size(), 0.0);
      const auto vals = f.values(batch.next_states).values();
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double nv = batch.terminal[i] ? 0.0 : vals[i * width + static_cast<std::size_t>(drawn[i])];
        t[i] = batch.rewards[i] + cfg.gamma * nv;
      }
      return t;
    };
    targets_f1 = targets_for(critics.f1);
    targets_f2 = targets_for(critics.f2);
  } else {
    targets_f1 = td_targets(batch, critics.f1, critics, pi, cfg, rng);
    targets_f2 = td_targets(batch, critics.f2, critics, pi, cfg, rng);
  }

  CriticStepLog log;
  auto update = [&](CriticNetwork& f, AdamOptimizer& opt, const std::vector<double>& targets,
                    double& out_L, double& out_Eg, double& out_Etd) {
    Tensor values = f.values(batch.states);
    Tensor L = adversarial_gap(values, pi_probs, batch.ref_probs);
    Tensor Eg = grounding_loss(values, batch.actions, batch.ref_probs);
    Tensor Etd = td_loss_from_targets(values, batch.actions, targets);
    Tensor loss = add(L, add(mul(Eg, cfg.alpha), mul(Etd, cfg.beta)));
    out_L = L.scalar();
    out_Eg = Eg.scalar();
    out_Etd = Etd.scalar();
    check_finite(loss.scalar(), "critic loss", cfg.divergence_threshold);
    opt.zero_grad();
    backward(loss);
    opt.step();
  };
  update(critics.f1, opt_f1, targets_f1, log.L_f1, log.Eg_f1, log.Etd_f1);
  update(critics.f2, opt_f2, targets_f2, log.L_f2, log.Eg_f2, log.Etd_f2);
  return log;
}

double actor_step(PolicyNetwork& pi, AdamOptimizer& opt, const CriticPair& critics,
                  const Batch& batch, const LaacConfig& cfg) {
  // only f1 steers the actor
  Tensor f1_values;
  {
    NoGradGuard ng;
    f1_values = critics.f1.values(batch.states);
  }
  Tensor pi_probs = pi.distribution(batch.states);
  Tensor L = adversarial_gap(f1_values, pi_probs, batch.ref_probs);
  Tensor loss = neg(L);
  const double loss_value = loss.scalar();
  check_finite(loss_value, "actor loss", cfg.divergence_threshold);
  opt.zero_grad();
  backward(loss);
  opt.step();
  return loss_value;
}

TrainResult train_laac(const OfflineDataset& dataset, const ItemCatalog& catalog,
                       const ReferencePolicyProvider& reference, const LaacConfig& cfg) {
  const auto train_idx = dataset.train_indices();
  if (train_idx.empty()) throw std::invalid_argument("train_laac: empty training split");
  bool has_nonterminal = false;
  for (auto i : train_idx) has_nonterminal |= !dataset.transitions[i].terminal;
  cfg.validate(has_nonterminal);

  SeededRng rng(cfg.seed);
  TrainResult result{
      PolicyNetwork::init(catalog.item_count, cfg.embedding_dim, cfg.hidden_dim, rng, "actor"),
      CriticPair::init(catalog.item_count, cfg.embedding_dim, cfg.hidden_dim, rng),
      {}};
  AdamOptimizer opt_actor(result.actor.params(), {cfg.eta_actor});
  AdamOptimizer opt_f1(result.critics.f1.params(), {cfg.eta_critic});
  AdamOptimizer opt_f2(result.critics.f2.params(), {cfg.eta_critic});

  const auto n = static_cast<std::int64_t>(train_idx.size());
  const auto batch_size = static_cast<std::size_t>(
      std::min<std::int64_t>(cfg.minibatch_size, n));
  for (int step = 1; step <= cfg.total_steps; ++step) {
    std::vector<const Transition*> samples;
    samples.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i)
      samples.push_back(&dataset.transitions[train_idx[static_cast<std::size_t>(rng.uniform_int(n))]]);
    Batch batch = assemble_batch(samples, reference);

    StepRecord rec;
    rec.step = step;
    const auto clog = critic_step(result.critics, opt_f1, opt_f2, result.actor, batch, cfg, rng);
    rec.L_f1 = clog.L_f1;
    rec.L_f2 = clog.L_f2;
    rec.Eg_f1 = clog.Eg_f1;
    rec.Eg_f2 = clog.Eg_f2;
    rec.Etd_f1 = clog.Etd_f1;
    rec.Etd_f2 = clog.Etd_f2;
    rec.actor_loss = actor_step(result.actor, opt_actor, result.critics, batch, cfg);
    result.log.records.push_back(rec);
  }
  return result;
}

PolicyNetwork train_supervised_baseline(const OfflineDataset& dataset, const ItemCatalog& catalog,
                                        const LaacConfig& cfg, TrainLog* log) {
  const auto train_idx = dataset.train_indices();
  if (train_idx.empty())
    throw std::invalid_argument("train_supervised_baseline: empty training split");
  cfg.validate(false);

  SeededRng rng(cfg.seed);
  PolicyNetwork net =
      PolicyNetwork::init(catalog.item_count, cfg.embedding_dim, cfg.hidden_dim, rng, "actor");
  AdamOptimizer opt(net.params(), {cfg.eta_baseline});

  const auto n = static_cast<std::int64_t>(train_idx.size());
  const auto batch_size = static_cast<std::size_t>(
      std::min<std::int64_t>(cfg.minibatch_size, n));
  for (int step = 1; step <= cfg.total_steps; ++step) {
    WindowBatch states;
    std::vector<int> actions;
    for (std::size_t i = 0; i < batch_size; ++i) {
      const auto& t = dataset.transitions[train_idx[static_cast<std::size_t>(rng.uniform_int(n))]];
      states.push_back(t.state);
      actions.push_back(t.action);
    }
    Tensor logp = log_softmax_rows(net.logits(states), {static_cast<std::size_t>(kPaddingId)});
    Tensor loss = neg(mean_all(take_per_row(logp, actions)));
    const double loss_value = loss.scalar();
    check_finite(loss_value, "cross-entropy loss", cfg.divergence_threshold);
    opt.zero_grad();
    backward(loss);
    opt.step();
    if (log) {
      StepRecord rec;
      rec.step = step;
      rec.actor_loss = loss_value;
      log->records.push_back(rec);
    }
  }
  return net;
}

}  // namespace laac
