#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "laac/catalog.hpp"
#include "laac/nets.hpp"

namespace laac {

struct Interaction {
  int user = 0;
  int item = 0;          // catalog id
  double rating = 0.0;   // in [1, 5]
  std::int64_t timestamp = 0;
};

// One offline sample. next_state is meaningful only when !terminal.
struct Transition {
  StateKey state;
  int action = 0;
  double reward = 0.0;
  StateKey next_state;
  bool terminal = false;
  int user = 0;
};

enum class Split : std::uint8_t { train = 0, eval = 1 };

struct OfflineDataset {
  std::vector<Transition> transitions;
  std::vector<Split> split;  // parallel to transitions
  std::vector<char> user_gender_by_id;  // sparse: index user id -> 'M'/'F'/0

  std::vector<std::size_t> train_indices() const;
  std::vector<std::size_t> eval_indices() const;
  char gender_of(int user) const;
};

struct UserSequence {
  int user = 0;
  std::vector<std::pair<int, double>> items;  // (item id, rating), chronological
};

// One transition per t in [5, L-1]; the last is terminal. Users shorter than
// six interactions contribute a single terminal transition with a left-padded
// window.
std::vector<Transition> build_transitions(const std::vector<UserSequence>& sequences);

// Per-user temporal split: the last fifth of each user's transitions (integer
// division) goes to evaluation.
std::vector<Split> temporal_split(const std::vector<Transition>& transitions,
                                  double eval_fraction = 0.2);

// action counts over the training partition, indexed by item id
std::vector<std::int64_t> train_action_counts(const OfflineDataset& dataset, int item_count);

struct IngestOptions {
  int min_item_interactions = 3;
  int min_user_interactions = 3;
  int user_subsample = 0;  // 0 = keep all users
  std::uint64_t subsample_seed = 1;
  double eval_fraction = 0.2;
};

struct IngestStats {
  std::int64_t malformed_lines = 0;
  std::int64_t raw_ratings = 0;
  std::int64_t users_kept = 0;
  std::int64_t items_kept = 0;
  std::int64_t transitions = 0;
  std::int64_t train_transitions = 0;
  std::int64_t eval_transitions = 0;
};

struct IngestResult {
  OfflineDataset dataset;
  ItemCatalog catalog;
  IngestStats stats;
};

// MovieLens-1M format: ratings lines "UserID::MovieID::Rating::Timestamp",
// movies lines "MovieID::Title::Genres", users lines "UserID::Gender::...".
// users_path may be empty (no demographics). Latin-1 bytes pass through.
IngestResult ingest_movielens(const std::string& ratings_path, const std::string& movies_path,
                              const std::string& users_path, const IngestOptions& opts = {});

// Keeps only training transitions whose user satisfies the predicate; the
// evaluation partition is untouched. Throws if the filter empties the train set.
OfflineDataset make_skewed_subset(const OfflineDataset& dataset,
                                  const std::function<bool(int user, char gender)>& predicate);

// Canonical transitions file: one record per line, tab-separated
//   w1 w2 w3 w4 w5 action reward n1 n2 n3 n4 n5 terminal split
// Rewards print with enough digits to round-trip bit-exactly. User ids and
// demographics are ingest-time state and are not persisted.
void save_transitions(const std::string& path, const OfflineDataset& dataset);
OfflineDataset load_transitions(const std::string& path);

}  // namespace laac
