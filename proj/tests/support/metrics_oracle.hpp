#pragma once

// Independently coded brute-force metric reference. Deliberately naive: full
// sorts, explicit loops, no shared helpers with the library implementation.
// States in an instance are distinct, so ratings key on the state index.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "laac/nets.hpp"

namespace laac::testing {

struct OracleInstance {
  int item_count = 0;
  std::vector<laac::StateKey> states;              // all distinct
  std::vector<std::vector<double>> probs;          // per state, indexed by id
  std::vector<int> truths;
  std::map<std::pair<int, int>, double> ratings;   // (state index, item) -> rating
  std::vector<int> novel;

  double rating_of(int state_index, int item) const {
    auto it = ratings.find({state_index, item});
    return it == ratings.end() ? 0.0 : it->second;
  }
};

inline std::vector<int> oracle_rank_all(const std::vector<double>& probs) {
  std::vector<int> ids;
  for (std::size_t id = 1; id < probs.size(); ++id) ids.push_back(static_cast<int>(id));
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (probs[static_cast<std::size_t>(a)] != probs[static_cast<std::size_t>(b)])
      return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    return a < b;
  });
  return ids;
}

inline double oracle_hr(const OracleInstance& inst, int k) {
  double hits = 0;
  for (std::size_t i = 0; i < inst.states.size(); ++i) {
    auto ranked = oracle_rank_all(inst.probs[i]);
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
      if (ranked[static_cast<std::size_t>(r)] == inst.truths[i]) {
        hits += 1;
        break;
      }
  }
  return hits / static_cast<double>(inst.states.size());
}

inline double oracle_ndcg(const OracleInstance& inst, int k) {
  double total = 0;
  for (std::size_t i = 0; i < inst.states.size(); ++i) {
    auto ranked = oracle_rank_all(inst.probs[i]);
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
      if (ranked[static_cast<std::size_t>(r)] == inst.truths[i]) {
        total += 1.0 / std::log2(r + 2.0);
        break;
      }
  }
  return total / static_cast<double>(inst.states.size());
}

inline double oracle_r(const OracleInstance& inst, int k) {
  double total = 0;
  for (std::size_t i = 0; i < inst.states.size(); ++i) {
    auto ranked = oracle_rank_all(inst.probs[i]);
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
      total += inst.rating_of(static_cast<int>(i), ranked[static_cast<std::size_t>(r)]);
  }
  return total;
}

inline std::set<int> oracle_union(const OracleInstance& inst, int k) {
  std::set<int> u;
  for (std::size_t i = 0; i < inst.states.size(); ++i) {
    auto ranked = oracle_rank_all(inst.probs[i]);
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
      u.insert(ranked[static_cast<std::size_t>(r)]);
  }
  return u;
}

inline double oracle_cv(const OracleInstance& inst, int k) {
  return static_cast<double>(oracle_union(inst, k).size()) /
         static_cast<double>(inst.item_count);
}

inline double oracle_ncv(const OracleInstance& inst, int k) {
  const auto u = oracle_union(inst, k);
  int n = 0;
  for (int id : inst.novel)
    if (u.count(id)) ++n;
  return static_cast<double>(n) / static_cast<double>(inst.novel.size());
}

inline long long oracle_nc(const OracleInstance& inst, int k) {
  const auto u = oracle_union(inst, k);
  long long n = 0;
  for (int id : inst.novel)
    if (u.count(id)) ++n;
  return n;
}

inline double oracle_entropy(const OracleInstance& inst) {
  double total = 0;
  for (const auto& probs : inst.probs) {
    double h = 0;
    for (double p : probs)
      if (p > 0) h -= p * std::log(p);
    total += h;
  }
  return total / static_cast<double>(inst.probs.size());
}

}  // namespace laac::testing
