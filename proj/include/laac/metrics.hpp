#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "laac/dataset.hpp"
#include "laac/nets.hpp"
#include "laac/synthetic.hpp"

namespace laac {

// Top-k list for one evaluated state: descending probability, ties broken by
// ascending item id; the padding id never appears.
struct RankedRecommendation {
  StateKey state;
  std::vector<int> items;
};

// ids ranked from a probability vector indexed by item id (slot 0 = padding)
std::vector<int> top_k_items(const std::vector<double>& probs, int k);

struct MetricsReport {
  double hr5 = 0, hr10 = 0, hr20 = 0;
  double ndcg5 = 0, ndcg10 = 0, ndcg20 = 0;
  double r5 = 0, r10 = 0, r20 = 0;
  double cv10 = 0, cv20 = 0;
  double ncv10 = 0, ncv20 = 0;
  std::int64_t nc1 = 0;
  double entropy = 0;
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
};

double hit_ratio(const std::vector<RankedRecommendation>& recs, const std::vector<int>& truths,
                 int k, int item_count);
double ndcg(const std::vector<RankedRecommendation>& recs, const std::vector<int>& truths, int k,
            int item_count);

class RatingLookup {
 public:
  virtual ~RatingLookup() = default;
  virtual double rating(const StateKey& state, int item) const = 0;
};

// ratings observed in the evaluation split; unobserved pairs are worth 0
class ObservedRatingLookup : public RatingLookup {
 public:
  static ObservedRatingLookup from_eval_split(const OfflineDataset& dataset);
  double rating(const StateKey& state, int item) const override;

 private:
  std::unordered_map<StateKey, std::unordered_map<int, double>, StateKeyHash> ratings_;
};

// ground-truth rewards of a synthetic MDP
class TrueRewardLookup : public RatingLookup {
 public:
  explicit TrueRewardLookup(const SyntheticMDP& mdp) : mdp_(&mdp) {}
  double rating(const StateKey& state, int item) const override;

 private:
  const SyntheticMDP* mdp_;
};

// total resolvable rating mass over all top-k lists
double cumulative_reward(const std::vector<RankedRecommendation>& recs,
                         const RatingLookup& lookup, int k);

double coverage(const std::vector<RankedRecommendation>& recs, int item_count, int k);
double novel_coverage(const std::vector<RankedRecommendation>& recs,
                      const std::vector<int>& novel_set, int k);
std::int64_t novel_count(const std::vector<RankedRecommendation>& recs,
                         const std::vector<int>& novel_set, int k);

// mean over states of -sum_a p ln p (natural log, 0 ln 0 := 0); every vector
// must sum to 1 within 1e-6
double policy_entropy(const std::vector<std::vector<double>>& distributions);

// Full evaluation of a policy on the dataset's eval split.
MetricsReport evaluate_policy(const PolicyNetwork& policy, const OfflineDataset& dataset,
                              const ItemCatalog& catalog, const RatingLookup& lookup,
                              std::uint64_t seed);

// CSV row (fixed column order) plus a key: value text document.
void emit_report(const MetricsReport& report, const std::string& csv_path,
                 const std::string& text_path);
MetricsReport parse_report_csv(const std::string& csv_path);

// Long-format sweep output: one row per (param value, seed, metric).
struct SweepRow {
  std::string param;
  double value = 0;
  std::uint64_t seed = 0;
  MetricsReport report;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
// per-value mean and standard deviation for every metric
void write_sweep_summary_csv(const std::string& path, const std::vector<SweepRow>& rows);

// metric name -> value, in report column order
std::vector<std::pair<std::string, double>> report_fields(const MetricsReport& r);

}  // namespace laac
