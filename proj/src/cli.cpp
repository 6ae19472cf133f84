#include "laac/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "laac/catalog.hpp"
#include "laac/dataset.hpp"
#include "laac/engine.hpp"
#include "laac/metrics.hpp"
#include "laac/nets.hpp"
#include "laac/reference.hpp"
#include "laac/synthetic.hpp"

namespace laac {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// usage/config problems that should exit with code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LaacConfig load_config_or_usage(const std::string& path) {
  try {
    return load_config(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::exists(path))
    throw UsageError("missing " + what + " file: '" + path + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct ManifestWriter {
  json doc;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  explicit ManifestWriter(const std::string& command) {
    doc["command"] = command;
    doc["artifacts"] = json::array();
  }
  void artifact(const std::string& path) { doc["artifacts"].push_back(path); }
  void field(const std::string& key, const json& value) { doc[key] = value; }
  void write(const std::string& path) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    doc["duration_seconds"] = elapsed.count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << doc.dump(2) << "\n";
  }
};

SyntheticConfig synth_defaults() {
  SyntheticConfig cfg;  // the bundled quickstart world
  return cfg;
}

ReferencePolicyProvider make_provider(const std::string& cache_path, const ItemCatalog& catalog,
                                      int n_c, std::uint64_t seed) {
  auto records = load_cache(cache_path);
  int skipped = 0;
  auto table = table_from_records(records, catalog, 0, &skipped);
  if (skipped > 0)
    std::fprintf(stderr, "note: %d cache records without usable suggestions\n", skipped);
  return ReferencePolicyProvider(std::move(table), catalog,
                                 std::min(n_c, catalog.item_count), seed);
}

std::uint64_t cache_template_hash_of(const std::string& cache_path) {
  if (cache_path.empty() || !fs::exists(cache_path)) return 0;
  auto records = load_cache(cache_path);
  return records.empty() ? 0 : records.front().template_hash;
}

// checkpoint containing the actor (and critics, for the adversarial variant)
void write_model_checkpoint(const std::string& path, const PolicyNetwork& actor,
                            const CriticPair* critics, const ItemCatalog& catalog,
                            const LaacConfig& cfg) {
  std::vector<Tensor> params = actor.params();
  if (critics) {
    for (auto p : critics->f1.params()) params.push_back(p);
    for (auto p : critics->f2.params()) params.push_back(p);
  }
  auto ckpt = make_checkpoint(params, catalog.hash(),
                              {{"item_count", catalog.item_count},
                               {"embedding_dim", cfg.embedding_dim},
                               {"hidden_dim", cfg.hidden_dim},
                               {"seed", static_cast<std::int64_t>(cfg.seed)},
                               {"has_critics", critics ? 1 : 0}});
  ckpt.save(path);
}

PolicyNetwork load_actor(const Checkpoint& ckpt, const ItemCatalog& catalog) {
  if (ckpt.catalog_hash != catalog.hash())
    throw UsageError("checkpoint was trained against a different catalog (hash " +
                     hex64(ckpt.catalog_hash) + " vs " + hex64(catalog.hash()) + ")");
  const int items = static_cast<int>(ckpt.meta.at("item_count"));
  const int embed = static_cast<int>(ckpt.meta.at("embedding_dim"));
  const int hidden = static_cast<int>(ckpt.meta.at("hidden_dim"));
  SeededRng rng(1);
  auto actor = PolicyNetwork::init(items, embed, hidden, rng, "actor");
  restore_params(ckpt, actor.params());
  return actor;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string ratings, movies, users, out;
  int min_item = 3, min_user = 3, user_subsample = 0;
  std::uint64_t sample_seed = 1;
  std::string skew_gender;  // e.g. "M": keep only that gender in train
};

int cmd_ingest(const IngestArgs& a) {
  require_file(a.ratings, "ratings");
  require_file(a.movies, "movies");
  if (!a.users.empty()) require_file(a.users, "users");
  fs::create_directories(a.out);
  ManifestWriter manifest("ingest");

  IngestOptions opts;
  opts.min_item_interactions = a.min_item;
  opts.min_user_interactions = a.min_user;
  opts.user_subsample = a.user_subsample;
  opts.subsample_seed = a.sample_seed;
  auto result = ingest_movielens(a.ratings, a.movies, a.users, opts);

  OfflineDataset* dataset = &result.dataset;
  OfflineDataset skewed;
  if (!a.skew_gender.empty()) {
    const char g = a.skew_gender[0];
    skewed = make_skewed_subset(result.dataset, [g](int, char gender) { return gender == g; });
    dataset = &skewed;
    result.catalog.counts = train_action_counts(skewed, result.catalog.item_count);
  }

  const auto transitions_path = (fs::path(a.out) / "transitions.tsv").string();
  const auto catalog_path = (fs::path(a.out) / "catalog.tsv").string();
  save_transitions(transitions_path, *dataset);
  result.catalog.save(catalog_path);

  std::int64_t train_n = 0, eval_n = 0;
  for (auto s : dataset->split) (s == Split::train ? train_n : eval_n)++;
  std::printf("users: %lld\n", static_cast<long long>(result.stats.users_kept));
  std::printf("items: %lld\n", static_cast<long long>(result.stats.items_kept));
  std::printf("transitions: %lld\n", static_cast<long long>(dataset->transitions.size()));
  std::printf("train: %lld\n", static_cast<long long>(train_n));
  std::printf("eval: %lld\n", static_cast<long long>(eval_n));
  std::printf("malformed lines skipped: %lld\n",
              static_cast<long long>(result.stats.malformed_lines));

  manifest.artifact(transitions_path);
  manifest.artifact(catalog_path);
  manifest.field("dataset_hash", hex64(hash_file(transitions_path)));
  manifest.field("catalog_hash", hex64(result.catalog.hash()));
  manifest.field("train_transitions", train_n);
  manifest.field("eval_transitions", eval_n);
  manifest.write((fs::path(a.out) / "manifest.json").string());
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 1;
  SyntheticConfig cfg = synth_defaults();
};

int cmd_synth(const SynthArgs& a) {
  fs::create_directories(a.out);
  ManifestWriter manifest("synth");
  SeededRng rng(a.seed);
  auto bundle = generate_synthetic(a.cfg, rng);

  const auto transitions_path = (fs::path(a.out) / "transitions.tsv").string();
  const auto catalog_path = (fs::path(a.out) / "catalog.tsv").string();
  const auto cache_path = (fs::path(a.out) / "reference_cache.jsonl").string();
  const auto mdp_path = (fs::path(a.out) / "mdp.json").string();
  save_transitions(transitions_path, bundle.dataset);
  bundle.catalog.save(catalog_path);
  bundle.mdp.save(mdp_path);
  {
    std::ofstream out(cache_path);
    if (!out) throw std::runtime_error("cannot write cache file: " + cache_path);
    for (const auto& rec : bundle.cache_records) out << cache_record_to_line(rec) << "\n";
  }
  std::printf("states: %d\nitems: %d\ntransitions: %zu\nreference states: %zu\n",
              bundle.mdp.state_count, bundle.mdp.item_count, bundle.dataset.transitions.size(),
              bundle.table.size());
  for (const auto& p : {transitions_path, catalog_path, cache_path, mdp_path})
    manifest.artifact(p);
  manifest.field("seed", a.seed);
  manifest.field("dataset_hash", hex64(hash_file(transitions_path)));
  manifest.write((fs::path(a.out) / "manifest.json").string());
  return kExitOk;
}

struct BuildCacheArgs {
  std::string transitions, catalog, out, provider = "stub", template_path;
  int n_c = 100, n_r = 10, concurrency = 1;
  std::uint64_t seed = 1;
};

int cmd_build_cache(const BuildCacheArgs& a) {
  require_file(a.transitions, "transitions");
  require_file(a.catalog, "catalog");
  auto catalog = ItemCatalog::load(a.catalog);
  auto dataset = load_transitions(a.transitions);

  // unique training states in first-appearance order
  std::vector<StateKey> states;
  {
    std::unordered_set<StateKey, StateKeyHash> seen;
    for (std::size_t i = 0; i < dataset.transitions.size(); ++i)
      if (dataset.split[i] == Split::train &&
          seen.insert(dataset.transitions[i].state).second)
        states.push_back(dataset.transitions[i].state);
  }

  BuildCacheOptions opts;
  opts.n_c = std::min(a.n_c, catalog.item_count);
  opts.n_r = a.n_r;
  opts.seed = a.seed;
  opts.concurrency = a.concurrency;
  if (!a.template_path.empty()) {
    require_file(a.template_path, "template");
    std::ifstream in(a.template_path);
    std::stringstream ss;
    ss << in.rdbuf();
    opts.template_text = ss.str();
  }

  BuildCacheStats stats;
  if (a.provider == "stub") {
    StubProvider stub;
    stats = build_cache(states, catalog, stub, a.out, opts);
  } else if (a.provider == "live") {
    auto endpoint = endpoint_from_env();
    if (endpoint.url.empty())
      throw UsageError(
          "live provider needs LAAC_LLM_ENDPOINT (and usually LAAC_LLM_MODEL / "
          "LAAC_LLM_API_KEY) in the environment");
    LiveProvider live(endpoint);
    stats = build_cache(states, catalog, live, a.out, opts);
  } else if (a.provider == "cache") {
    // replay-only: report coverage of the existing cache against the dataset
    require_file(a.out, "cache");
    auto records = load_cache(a.out);
    int skipped = 0;
    auto table = table_from_records(records, catalog, 0, &skipped);
    stats.requested = static_cast<int>(states.size());
    for (const auto& s : states)
      if (table.find(s)) stats.resumed++;
    stats.unmatched = skipped;
  } else {
    throw UsageError("unknown provider '" + a.provider + "' (expected live, cache or stub)");
  }
  std::printf("states requested: %d\nfetched: %d\nresumed: %d\nfailed: %d\nunmatched: %d\n",
              stats.requested, stats.fetched, stats.resumed, stats.failed, stats.unmatched);
  return stats.failed > 0 && stats.fetched == 0 && a.provider != "cache" ? kExitRuntime
                                                                         : kExitOk;
}

struct TrainArgs {
  std::string variant = "laac";
  std::string transitions, catalog, cache, config, out;
  std::int64_t seed = -1;  // -1: keep the config's seed
  int n_c = 100;
};

int cmd_train(const TrainArgs& a) {
  require_file(a.transitions, "transitions");
  require_file(a.catalog, "catalog");
  if (a.variant != "laac" && a.variant != "baseline")
    throw UsageError("unknown variant '" + a.variant + "' (expected laac or baseline)");
  if (a.variant == "laac" && a.cache.empty())
    throw UsageError("the laac variant needs --cache with reference suggestions; "
                     "run build-cache (or synth) first");
  if (!a.cache.empty()) require_file(a.cache, "cache");

  LaacConfig cfg;
  if (!a.config.empty()) {
    require_file(a.config, "config");
    cfg = load_config_or_usage(a.config);
  }
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);

  fs::create_directories(a.out);
  ManifestWriter manifest("train");
  auto catalog = ItemCatalog::load(a.catalog);
  auto dataset = load_transitions(a.transitions);

  const auto ckpt_path = (fs::path(a.out) / "checkpoint.ckpt").string();
  const auto log_path = (fs::path(a.out) / "trainlog.csv").string();
  const auto cfg_path = (fs::path(a.out) / "config_used.kv").string();

  TrainLog log;
  try {
    if (a.variant == "laac") {
      auto provider = make_provider(a.cache, catalog, a.n_c, cfg.seed);
      auto result = train_laac(dataset, catalog, provider, cfg);
      log = std::move(result.log);
      write_model_checkpoint(ckpt_path, result.actor, &result.critics, catalog, cfg);
    } else {
      auto actor = train_supervised_baseline(dataset, catalog, cfg, &log);
      write_model_checkpoint(ckpt_path, actor, nullptr, catalog, cfg);
    }
  } catch (...) {
    log.write_csv(log_path);  // keep whatever was learned before the abort
    throw;
  }
  log.write_csv(log_path);
  save_config(cfg_path, cfg);

  std::printf("trained %s for %d steps; checkpoint at %s\n", a.variant.c_str(), cfg.total_steps,
              ckpt_path.c_str());
  manifest.artifact(ckpt_path);
  manifest.artifact(log_path);
  manifest.artifact(cfg_path);
  manifest.field("variant", a.variant);
  manifest.field("seed", cfg.seed);
  manifest.field("config_hash", hex64(cfg.hash()));
  manifest.field("dataset_hash", hex64(hash_file(a.transitions)));
  manifest.field("cache_template_hash", hex64(cache_template_hash_of(a.cache)));
  manifest.write((fs::path(a.out) / "manifest.json").string());
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string transitions, catalog, mdp, out;
};

int cmd_eval(const EvalArgs& a) {
  require_file(a.transitions, "transitions");
  require_file(a.catalog, "catalog");
  if (a.checkpoints.empty()) throw UsageError("--checkpoint is required");
  for (const auto& c : a.checkpoints) require_file(c, "checkpoint");
  fs::create_directories(a.out);
  ManifestWriter manifest("eval");

  auto catalog = ItemCatalog::load(a.catalog);
  auto dataset = load_transitions(a.transitions);

  std::unique_ptr<RatingLookup> lookup;
  std::unique_ptr<SyntheticMDP> mdp;
  if (!a.mdp.empty()) {
    require_file(a.mdp, "mdp");
    mdp = std::make_unique<SyntheticMDP>(SyntheticMDP::load(a.mdp));
    lookup = std::make_unique<TrueRewardLookup>(*mdp);
  } else {
    lookup = std::make_unique<ObservedRatingLookup>(
        ObservedRatingLookup::from_eval_split(dataset));
  }

  std::vector<std::pair<std::string, MetricsReport>> reports;
  for (const auto& path : a.checkpoints) {
    auto ckpt = Checkpoint::load(path);
    auto actor = load_actor(ckpt, catalog);
    const auto seed = static_cast<std::uint64_t>(ckpt.meta.count("seed") ? ckpt.meta.at("seed") : 0);
    auto report = evaluate_policy(actor, dataset, catalog, *lookup, seed);
    const std::string stem = "report_seed" + std::to_string(seed) + "_cfg" +
                             hex64(ckpt.catalog_hash).substr(8);
    const auto csv = (fs::path(a.out) / (stem + ".csv")).string();
    const auto txt = (fs::path(a.out) / (stem + ".txt")).string();
    emit_report(report, csv, txt);
    manifest.artifact(csv);
    manifest.artifact(txt);
    reports.emplace_back(fs::path(path).filename().string(), report);
    std::printf("%s: HR@10 %.4f NDCG@10 %.4f R@10 %.1f CV@10 %.4f NCV@10 %.4f entropy %.4f\n",
                reports.back().first.c_str(), report.hr10, report.ndcg10, report.r10,
                report.cv10, report.ncv10, report.entropy);
  }

  if (reports.size() > 1) {
    const auto cmp_path = (fs::path(a.out) / "comparison.csv").string();
    std::FILE* out = std::fopen(cmp_path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write comparison: " + cmp_path);
    std::fprintf(out, "checkpoint");
    for (const auto& [name, value] : report_fields(reports.front().second))
      std::fprintf(out, ",%s", name.c_str());
    std::fprintf(out, "\n");
    for (const auto& [name, report] : reports) {
      std::fprintf(out, "%s", name.c_str());
      for (const auto& [metric, value] : report_fields(report)) std::fprintf(out, ",%.17g", value);
      std::fprintf(out, "\n");
    }
    std::fclose(out);
    manifest.artifact(cmp_path);
  }
  manifest.field("dataset_hash", hex64(hash_file(a.transitions)));
  manifest.write((fs::path(a.out) / "manifest.json").string());
  return kExitOk;
}

struct SweepArgs {
  std::string param = "alpha";
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::string transitions, catalog, cache, config, mdp, out;
  int jobs = 0;
  int n_c = 100;
};

int cmd_sweep(const SweepArgs& a) {
  require_file(a.transitions, "transitions");
  require_file(a.catalog, "catalog");
  require_file(a.cache, "cache");
  if (a.param != "alpha" && a.param != "beta")
    throw UsageError("unknown sweep parameter '" + a.param + "' (expected alpha or beta)");
  if (a.values.empty()) throw UsageError("--values must not be empty");
  if (a.seeds.empty()) throw UsageError("--seeds must not be empty");
  fs::create_directories(a.out);
  ManifestWriter manifest("sweep");

  LaacConfig base;
  if (!a.config.empty()) {
    require_file(a.config, "config");
    base = load_config_or_usage(a.config);
  }
  auto catalog = ItemCatalog::load(a.catalog);
  auto dataset = load_transitions(a.transitions);
  std::unique_ptr<SyntheticMDP> mdp;
  if (!a.mdp.empty()) {
    require_file(a.mdp, "mdp");
    mdp = std::make_unique<SyntheticMDP>(SyntheticMDP::load(a.mdp));
  }

  struct Job {
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : a.values)
    for (auto s : a.seeds) jobs.push_back({v, s});
  std::vector<SweepRow> rows(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      LaacConfig cfg = base;
      cfg.seed = jobs[i].seed;
      if (a.param == "alpha") cfg.alpha = jobs[i].value;
      else cfg.beta = jobs[i].value;
      auto provider = make_provider(a.cache, catalog, a.n_c, cfg.seed);
      auto result = train_laac(dataset, catalog, provider, cfg);
      std::unique_ptr<RatingLookup> lookup;
      if (mdp) lookup = std::make_unique<TrueRewardLookup>(*mdp);
      else
        lookup = std::make_unique<ObservedRatingLookup>(
            ObservedRatingLookup::from_eval_split(dataset));
      SweepRow row;
      row.param = a.param;
      row.value = jobs[i].value;
      row.seed = jobs[i].seed;
      row.report = evaluate_policy(result.actor, dataset, catalog, *lookup, cfg.seed);
      rows[i] = std::move(row);
    }
  };
  const int n_threads = a.jobs > 0 ? a.jobs
                                   : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(n_threads, static_cast<int>(jobs.size())); ++t)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  const auto sweep_path = (fs::path(a.out) / "sweep.csv").string();
  const auto summary_path = (fs::path(a.out) / "sweep_summary.csv").string();
  write_sweep_csv(sweep_path, rows);
  write_sweep_summary_csv(summary_path, rows);
  std::printf("swept %s over %zu values x %zu seeds -> %s\n", a.param.c_str(), a.values.size(),
              a.seeds.size(), sweep_path.c_str());
  manifest.artifact(sweep_path);
  manifest.artifact(summary_path);
  manifest.field("param", a.param);
  manifest.field("config_hash", hex64(base.hash()));
  manifest.field("dataset_hash", hex64(hash_file(a.transitions)));
  manifest.write((fs::path(a.out) / "manifest.json").string());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"LLM-guided adversarial actor-critic for sequential recommendation"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Ingest MovieLens-format ratings");
  s_ingest->add_option("--ratings", ingest.ratings, "ratings.dat path")->required();
  s_ingest->add_option("--movies", ingest.movies, "movies.dat path")->required();
  s_ingest->add_option("--users", ingest.users, "users.dat path (demographics)");
  s_ingest->add_option("--out", ingest.out, "output directory")->required();
  s_ingest->add_option("--min-item", ingest.min_item, "min interactions per item");
  s_ingest->add_option("--min-user", ingest.min_user, "min interactions per user");
  s_ingest->add_option("--users-sample", ingest.user_subsample, "subsample this many users");
  s_ingest->add_option("--sample-seed", ingest.sample_seed, "user subsample seed");
  s_ingest->add_option("--skew-gender", ingest.skew_gender,
                       "keep only this gender in the training split");

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic world with a DP oracle");
  s_synth->add_option("--out", synth.out, "output directory")->required();
  s_synth->add_option("--seed", synth.seed, "generator seed");
  s_synth->add_option("--states", synth.cfg.state_count, "number of states");
  s_synth->add_option("--items", synth.cfg.item_count, "catalog size");
  s_synth->add_option("--popular", synth.cfg.popular_count, "logged popular items");
  s_synth->add_option("--novel-good", synth.cfg.novel_good_count, "unlogged high-reward items");
  s_synth->add_option("--novel-bad", synth.cfg.novel_bad_count, "unlogged low-reward items");
  s_synth->add_option("--samples", synth.cfg.sample_count, "logged transitions");
  s_synth->add_option("--temperature", synth.cfg.behavior_temperature,
                      "behavior policy temperature");
  s_synth->add_option("--gamma", synth.cfg.gamma, "discount factor");
  s_synth->add_option("--popular-reward", synth.cfg.popular_reward_base, "popular reward base");
  s_synth->add_option("--popular-spread", synth.cfg.popular_reward_spread,
                      "popular reward spread");
  s_synth->add_option("--good-reward", synth.cfg.novel_good_reward, "novel-good reward");
  s_synth->add_option("--bad-reward", synth.cfg.novel_bad_reward, "novel-bad reward");
  s_synth->add_option("--other-reward", synth.cfg.other_reward, "filler item reward");
  s_synth->add_option("--suggest-good", synth.cfg.suggest_good, "suggestions from novel-good");
  s_synth->add_option("--suggest-bad", synth.cfg.suggest_bad, "suggestions from novel-bad");
  s_synth->add_option("--suggest-logged", synth.cfg.suggest_logged,
                      "suggestions from the logged set");

  BuildCacheArgs cache;
  auto* s_cache = app.add_subcommand("build-cache", "Fetch reference suggestions per state");
  s_cache->add_option("--transitions", cache.transitions, "transitions file")->required();
  s_cache->add_option("--catalog", cache.catalog, "catalog file")->required();
  s_cache->add_option("--out", cache.out, "cache file (appended)")->required();
  s_cache->add_option("--provider", cache.provider, "live | cache | stub");
  s_cache->add_option("--n-c", cache.n_c, "candidate set size");
  s_cache->add_option("--n-r", cache.n_r, "requested suggestions");
  s_cache->add_option("--seed", cache.seed, "candidate sampling seed");
  s_cache->add_option("--template", cache.template_path, "prompt template file");
  s_cache->add_option("--concurrency", cache.concurrency, "parallel requests");

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "Train the adversarial model or the baseline");
  s_train->add_option("--variant", train.variant, "laac | baseline");
  s_train->add_option("--transitions", train.transitions, "transitions file")->required();
  s_train->add_option("--catalog", train.catalog, "catalog file")->required();
  s_train->add_option("--cache", train.cache, "reference cache file");
  s_train->add_option("--config", train.config, "key=value config file");
  s_train->add_option("--seed", train.seed, "override the config seed");
  s_train->add_option("--n-c", train.n_c, "fallback candidate set size");
  s_train->add_option("--out", train.out, "output directory")->required();

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Evaluate checkpoints on the eval split");
  s_eval->add_option("--checkpoint", eval.checkpoints, "checkpoint file (repeatable)")
      ->required();
  s_eval->add_option("--transitions", eval.transitions, "transitions file")->required();
  s_eval->add_option("--catalog", eval.catalog, "catalog file")->required();
  s_eval->add_option("--mdp", eval.mdp, "synthetic mdp for ground-truth rewards");
  s_eval->add_option("--out", eval.out, "output directory")->required();

  SweepArgs sweep;
  auto* s_sweep = app.add_subcommand("sweep", "Train and evaluate across parameter values");
  s_sweep->add_option("--param", sweep.param, "alpha | beta");
  s_sweep->add_option("--values", sweep.values, "parameter values")->required()->delimiter(',');
  s_sweep->add_option("--seeds", sweep.seeds, "training seeds")->required()->delimiter(',');
  s_sweep->add_option("--transitions", sweep.transitions, "transitions file")->required();
  s_sweep->add_option("--catalog", sweep.catalog, "catalog file")->required();
  s_sweep->add_option("--cache", sweep.cache, "reference cache file")->required();
  s_sweep->add_option("--config", sweep.config, "base config file");
  s_sweep->add_option("--mdp", sweep.mdp, "synthetic mdp for ground-truth rewards");
  s_sweep->add_option("--jobs", sweep.jobs, "parallel jobs (default: hardware)");
  s_sweep->add_option("--n-c", sweep.n_c, "fallback candidate set size");
  s_sweep->add_option("--out", sweep.out, "output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("laac");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s_ingest->parsed()) return cmd_ingest(ingest);
    if (s_synth->parsed()) return cmd_synth(synth);
    if (s_cache->parsed()) return cmd_build_cache(cache);
    if (s_train->parsed()) return cmd_train(train);
    if (s_eval->parsed()) return cmd_eval(eval);
    if (s_sweep->parsed()) return cmd_sweep(sweep);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace laac
