#include "laac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace laac {

std::vector<int> top_k_items(const std::vector<double>& probs, int k) {
  if (k < 1) throw std::invalid_argument("top_k_items: k must be positive");
  std::vector<int> ids;
  ids.reserve(probs.size());
  for (std::size_t id = 1; id < probs.size(); ++id) ids.push_back(static_cast<int>(id));
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(kk), ids.end(),
                    [&](int a, int b) {
                      const double pa = probs[static_cast<std::size_t>(a)];
                      const double pb = probs[static_cast<std::size_t>(b)];
                      if (pa != pb) return pa > pb;
                      return a < b;
                    });
  ids.resize(kk);
  return ids;
}

namespace {

void check_k(int k, int item_count, const char* what) {
  if (k < 1 || k > item_count)
    throw std::invalid_argument(std::string(what) + ": k=" + std::to_string(k) +
                                " out of range for catalog of " + std::to_string(item_count));
}

void check_nonempty(const std::vector<RankedRecommendation>& recs, const char* what) {
  if (recs.empty()) throw std::invalid_argument(std::string(what) + ": empty recommendation set");
}

}  // namespace

double hit_ratio(const std::vector<RankedRecommendation>& recs, const std::vector<int>& truths,
                 int k, int item_count) {
  check_k(k, item_count, "hit_ratio");
  check_nonempty(recs, "hit_ratio");
  if (recs.size() != truths.size())
    throw std::invalid_argument("hit_ratio: " + std::to_string(recs.size()) + " lists vs " +
                                std::to_string(truths.size()) + " ground-truth actions");
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& items = recs[i].items;
    const auto end = items.begin() + std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(items.size()));
    if (std::find(items.begin(), end, truths[i]) != end) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(recs.size());
}

double ndcg(const std::vector<RankedRecommendation>& recs, const std::vector<int>& truths, int k,
            int item_count) {
  check_k(k, item_count, "ndcg");
  check_nonempty(recs, "ndcg");
  if (recs.size() != truths.size())
    throw std::invalid_argument("ndcg: list/truth count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& items = recs[i].items;
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), items.size());
    for (std::size_t rank = 0; rank < limit; ++rank) {
      if (items[rank] == truths[i]) {
        total += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
        break;
      }
    }
  }
  return total / static_cast<double>(recs.size());
}

ObservedRatingLookup ObservedRatingLookup::from_eval_split(const OfflineDataset& dataset) {
  ObservedRatingLookup lookup;
  for (std::size_t i = 0; i < dataset.transitions.size(); ++i) {
    if (dataset.split[i] != Split::eval) continue;
    const auto& t = dataset.transitions[i];
    lookup.ratings_[t.state].emplace(t.action, t.reward);  // first observation wins
  }
  return lookup;
}

double ObservedRatingLookup::rating(const StateKey& state, int item) const {
  const auto it = ratings_.find(state);
  if (it == ratings_.end()) return 0.0;
  const auto jt = it->second.find(item);
  return jt == it->second.end() ? 0.0 : jt->second;
}

double TrueRewardLookup::rating(const StateKey& state, int item) const {
  const int s = mdp_->state_of(state);
  if (s < 0 || item < 1 || item > mdp_->item_count) return 0.0;
  return mdp_->reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(item - 1)];
}

double cumulative_reward(const std::vector<RankedRecommendation>& recs,
                         const RatingLookup& lookup, int k) {
  check_nonempty(recs, "cumulative_reward");
  if (k < 1) throw std::invalid_argument("cumulative_reward: k must be positive");
  double total = 0.0;
  for (const auto& rec : recs) {
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), rec.items.size());
    for (std::size_t i = 0; i < limit; ++i) total += lookup.rating(rec.state, rec.items[i]);
  }
  return total;
}

namespace {

std::set<int> topk_union(const std::vector<RankedRecommendation>& recs, int k) {
  std::set<int> seen;
  for (const auto& rec : recs) {
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), rec.items.size());
    for (std::size_t i = 0; i < limit; ++i) seen.insert(rec.items[i]);
  }
  return seen;
}

}  // namespace

double coverage(const std::vector<RankedRecommendation>& recs, int item_count, int k) {
  check_k(k, item_count, "coverage");
  check_nonempty(recs, "coverage");
  return static_cast<double>(topk_union(recs, k).size()) / static_cast<double>(item_count);
}

double novel_coverage(const std::vector<RankedRecommendation>& recs,
                      const std::vector<int>& novel_set, int k) {
  check_nonempty(recs, "novel_coverage");
  if (novel_set.empty()) throw std::invalid_argument("novel_coverage: empty novel set");
  const auto covered = topk_union(recs, k);
  std::int64_t hit = 0;
  for (int id : novel_set) hit += covered.count(id) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(novel_set.size());
}

std::int64_t novel_count(const std::vector<RankedRecommendation>& recs,
                         const std::vector<int>& novel_set, int k) {
  check_nonempty(recs, "novel_count");
  const auto covered = topk_union(recs, k);
  std::int64_t hit = 0;
  for (int id : novel_set) hit += covered.count(id) ? 1 : 0;
  return hit;
}

double policy_entropy(const std::vector<std::vector<double>>& distributions) {
  if (distributions.empty()) throw std::invalid_argument("policy_entropy: no states");
  double total = 0.0;
  for (const auto& probs : distributions) {
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("policy_entropy: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("policy_entropy: distribution sums to " + std::to_string(sum));
    double h = 0.0;
    for (double p : probs)
      if (p > 0.0) h -= p * std::log(p);
    total += h;
  }
  return total / static_cast<double>(distributions.size());
}

MetricsReport evaluate_policy(const PolicyNetwork& policy, const OfflineDataset& dataset,
                              const ItemCatalog& catalog, const RatingLookup& lookup,
                              std::uint64_t seed) {
  const auto eval_idx = dataset.eval_indices();
  if (eval_idx.empty()) throw std::invalid_argument("evaluate_policy: empty evaluation split");

  std::vector<RankedRecommendation> recs;
  std::vector<std::vector<double>> dists;
  std::vector<int> truths;
  recs.reserve(eval_idx.size());
  // batched forward passes keep this fast on large eval splits
  const std::size_t chunk = 256;
  NoGradGuard ng;
  for (std::size_t begin = 0; begin < eval_idx.size(); begin += chunk) {
    const auto end = std::min(begin + chunk, eval_idx.size());
    WindowBatch windows;
    for (std::size_t i = begin; i < end; ++i)
      windows.push_back(dataset.transitions[eval_idx[i]].state);
    Tensor probs = policy.distribution(windows);
    const std::size_t width = probs.cols();
    for (std::size_t row = 0; row < windows.size(); ++row) {
      std::vector<double> p(probs.values().begin() + static_cast<std::ptrdiff_t>(row * width),
                            probs.values().begin() + static_cast<std::ptrdiff_t>((row + 1) * width));
      RankedRecommendation rec;
      rec.state = windows[row];
      rec.items = top_k_items(p, 20);
      recs.push_back(std::move(rec));
      dists.push_back(std::move(p));
      truths.push_back(dataset.transitions[eval_idx[begin + row]].action);
    }
  }

  const auto novel = popularity_split(catalog);
  // tiny catalogs clamp k so the @20 columns stay defined
  const auto k = [&](int want) { return std::min(want, catalog.item_count); };
  MetricsReport r;
  r.hr5 = hit_ratio(recs, truths, k(5), catalog.item_count);
  r.hr10 = hit_ratio(recs, truths, k(10), catalog.item_count);
  r.hr20 = hit_ratio(recs, truths, k(20), catalog.item_count);
  r.ndcg5 = ndcg(recs, truths, k(5), catalog.item_count);
  r.ndcg10 = ndcg(recs, truths, k(10), catalog.item_count);
  r.ndcg20 = ndcg(recs, truths, k(20), catalog.item_count);
  r.r5 = cumulative_reward(recs, lookup, k(5));
  r.r10 = cumulative_reward(recs, lookup, k(10));
  r.r20 = cumulative_reward(recs, lookup, k(20));
  r.cv10 = coverage(recs, catalog.item_count, k(10));
  r.cv20 = coverage(recs, catalog.item_count, k(20));
  r.ncv10 = novel_coverage(recs, novel, k(10));
  r.ncv20 = novel_coverage(recs, novel, k(20));
  r.nc1 = novel_count(recs, novel, 1);
  r.entropy = policy_entropy(dists);
  r.sample_count = static_cast<std::int64_t>(eval_idx.size());
  r.seed = seed;
  return r;
}

std::vector<std::pair<std::string, double>> report_fields(const MetricsReport& r) {
  return {{"HR@5", r.hr5},     {"HR@10", r.hr10},   {"HR@20", r.hr20},   {"NDCG@5", r.ndcg5},
          {"NDCG@10", r.ndcg10}, {"NDCG@20", r.ndcg20}, {"R@5", r.r5},   {"R@10", r.r10},
          {"R@20", r.r20},     {"CV@10", r.cv10},   {"CV@20", r.cv20},   {"NCV@10", r.ncv10},
          {"NCV@20", r.ncv20}, {"NC@1", static_cast<double>(r.nc1)}, {"entropy", r.entropy}};
}

void emit_report(const MetricsReport& report, const std::string& csv_path,
                 const std::string& text_path) {
  {
    std::FILE* out = std::fopen(csv_path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write report: " + csv_path);
    const auto fields = report_fields(report);
    for (std::size_t i = 0; i < fields.size(); ++i)
      std::fprintf(out, "%s%s", fields[i].first.c_str(), i + 1 < fields.size() ? "," : "");
    std::fprintf(out, ",sample_count,seed\n");
    for (std::size_t i = 0; i < fields.size(); ++i)
      std::fprintf(out, "%.17g%s", fields[i].second, i + 1 < fields.size() ? "," : "");
    std::fprintf(out, ",%lld,%llu\n", static_cast<long long>(report.sample_count),
                 static_cast<unsigned long long>(report.seed));
    if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + csv_path);
  }
  if (!text_path.empty()) {
    std::FILE* out = std::fopen(text_path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write report: " + text_path);
    for (const auto& [name, value] : report_fields(report))
      std::fprintf(out, "%s: %.17g\n", name.c_str(), value);
    std::fprintf(out, "sample_count: %lld\n", static_cast<long long>(report.sample_count));
    std::fprintf(out, "seed: %llu\n", static_cast<unsigned long long>(report.seed));
    if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + text_path);
  }
}

MetricsReport parse_report_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open report: " + csv_path);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw std::runtime_error("report csv is truncated: " + csv_path);
  std::vector<double> vals;
  std::istringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.size() != 17) throw std::runtime_error("report csv has unexpected column count");
  MetricsReport r;
  r.hr5 = vals[0]; r.hr10 = vals[1]; r.hr20 = vals[2];
  r.ndcg5 = vals[3]; r.ndcg10 = vals[4]; r.ndcg20 = vals[5];
  r.r5 = vals[6]; r.r10 = vals[7]; r.r20 = vals[8];
  r.cv10 = vals[9]; r.cv20 = vals[10];
  r.ncv10 = vals[11]; r.ncv20 = vals[12];
  r.nc1 = static_cast<std::int64_t>(vals[13]);
  r.entropy = vals[14];
  r.sample_count = static_cast<std::int64_t>(vals[15]);
  r.seed = static_cast<std::uint64_t>(vals[16]);
  return r;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write sweep csv: " + path);
  std::fprintf(out, "param,value,seed,metric,metric_value\n");
  for (const auto& row : rows)
    for (const auto& [name, value] : report_fields(row.report))
      std::fprintf(out, "%s,%.17g,%llu,%s,%.17g\n", row.param.c_str(), row.value,
                   static_cast<unsigned long long>(row.seed), name.c_str(), value);
  if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + path);
}

void write_sweep_summary_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write sweep summary: " + path);
  std::fprintf(out, "param,value,metric,mean,std\n");
  // group rows by value, preserving first-seen order
  std::vector<double> values;
  for (const auto& row : rows)
    if (std::find(values.begin(), values.end(), row.value) == values.end())
      values.push_back(row.value);
  for (double v : values) {
    std::vector<const SweepRow*> group;
    for (const auto& row : rows)
      if (row.value == v) group.push_back(&row);
    const auto names = report_fields(group.front()->report);
    for (std::size_t m = 0; m < names.size(); ++m) {
      double mean = 0.0;
      for (const auto* row : group) mean += report_fields(row->report)[m].second;
      mean /= static_cast<double>(group.size());
      double var = 0.0;
      for (const auto* row : group) {
        const double d = report_fields(row->report)[m].second - mean;
        var += d * d;
      }
      var /= static_cast<double>(group.size());
      std::fprintf(out, "%s,%.17g,%s,%.17g,%.17g\n", group.front()->param.c_str(), v,
                   names[m].first.c_str(), mean, std::sqrt(var));
    }
  }
  if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + path);
}

}  // namespace laac
