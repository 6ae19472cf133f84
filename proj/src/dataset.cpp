#include "laac/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "laac/rng.hpp"

namespace laac {

std::vector<std::size_t> OfflineDataset::train_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (split[i] == Split::train) out.push_back(i);
  return out;
}

std::vector<std::size_t> OfflineDataset::eval_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (split[i] == Split::eval) out.push_back(i);
  return out;
}

char OfflineDataset::gender_of(int user) const {
  if (user < 0 || static_cast<std::size_t>(user) >= user_gender_by_id.size()) return 0;
  return user_gender_by_id[static_cast<std::size_t>(user)];
}

std::vector<Transition> build_transitions(const std::vector<UserSequence>& sequences) {
  std::vector<Transition> out;
  for (const auto& seq : sequences) {
    const auto L = static_cast<int>(seq.items.size());
    if (L < 2) continue;  // no history to predict from
    auto window_ending_before = [&](int t) {
      StateKey k{};
      for (int j = 0; j < kWindowSize; ++j) {
        const int src = t - kWindowSize + j;
        k.ids[static_cast<std::size_t>(j)] = src >= 0 ? seq.items[static_cast<std::size_t>(src)].first : kPaddingId;
      }
      return k;
    };
    const int t_begin = L >= kWindowSize + 1 ? kWindowSize : L - 1;
    for (int t = t_begin; t <= L - 1; ++t) {
      Transition tr;
      tr.user = seq.user;
      tr.state = window_ending_before(t);
      tr.action = seq.items[static_cast<std::size_t>(t)].first;
      tr.reward = seq.items[static_cast<std::size_t>(t)].second;
      tr.terminal = (t == L - 1);
      if (!tr.terminal) tr.next_state = window_ending_before(t + 1);
      out.push_back(tr);
    }
  }
  return out;
}

std::vector<Split> temporal_split(const std::vector<Transition>& transitions,
                                  double eval_fraction) {
  if (eval_fraction < 0.0 || eval_fraction >= 1.0)
    throw std::invalid_argument("temporal_split: eval_fraction must be in [0, 1)");
  // count per user, then mark each user's trailing share
  std::unordered_map<int, std::int64_t> total, seen;
  for (const auto& t : transitions) total[t.user]++;
  std::vector<Split> split(transitions.size(), Split::train);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const int u = transitions[i].user;
    const auto n_eval = static_cast<std::int64_t>(eval_fraction * static_cast<double>(total[u]));
    if (++seen[u] > total[u] - n_eval) split[i] = Split::eval;
  }
  return split;
}

std::vector<std::int64_t> train_action_counts(const OfflineDataset& dataset, int item_count) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(item_count) + 1, 0);
  for (std::size_t i = 0; i < dataset.transitions.size(); ++i)
    if (dataset.split[i] == Split::train)
      counts[static_cast<std::size_t>(dataset.transitions[i].action)]++;
  return counts;
}

// ---------------------------------------------------------------------------
// MovieLens ingestion

namespace {

struct RawRating {
  int user;
  int movie;
  double rating;
  std::int64_t timestamp;
  std::int64_t file_order;
};

bool split_double_colon(const std::string& line, std::vector<std::string>& fields) {
  fields.clear();
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find("::", pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 2;
  }
  return fields.size() >= 3;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

IngestResult ingest_movielens(const std::string& ratings_path, const std::string& movies_path,
                              const std::string& users_path, const IngestOptions& opts) {
  IngestResult result;
  auto& stats = result.stats;

  std::ifstream movies_in(movies_path, std::ios::binary);
  if (!movies_in) throw std::runtime_error("cannot open movies file: " + movies_path);
  std::unordered_map<int, std::string> movie_titles;
  {
    std::string line;
    std::vector<std::string> f;
    while (std::getline(movies_in, line)) {
      line = strip_cr(line);
      if (line.empty()) continue;
      if (!split_double_colon(line, f) || f.size() < 2) {
        stats.malformed_lines++;
        continue;
      }
      try {
        movie_titles[std::stoi(f[0])] = f[1];
      } catch (const std::exception&) {
        stats.malformed_lines++;
      }
    }
  }

  std::ifstream ratings_in(ratings_path, std::ios::binary);
  if (!ratings_in) throw std::runtime_error("cannot open ratings file: " + ratings_path);
  std::vector<RawRating> ratings;
  {
    std::string line;
    std::vector<std::string> f;
    std::int64_t order = 0;
    while (std::getline(ratings_in, line)) {
      line = strip_cr(line);
      if (line.empty()) continue;
      if (!split_double_colon(line, f) || f.size() < 4) {
        stats.malformed_lines++;
        continue;
      }
      try {
        RawRating r;
        r.user = std::stoi(f[0]);
        r.movie = std::stoi(f[1]);
        r.rating = std::stod(f[2]);
        r.timestamp = std::stoll(f[3]);
        r.file_order = order++;
        if (r.rating < 1.0 || r.rating > 5.0 || movie_titles.find(r.movie) == movie_titles.end()) {
          stats.malformed_lines++;
          continue;
        }
        ratings.push_back(r);
      } catch (const std::exception&) {
        stats.malformed_lines++;
      }
    }
  }
  stats.raw_ratings = static_cast<std::int64_t>(ratings.size());

  std::vector<char> gender_by_user;
  if (!users_path.empty()) {
    std::ifstream users_in(users_path, std::ios::binary);
    if (!users_in) throw std::runtime_error("cannot open users file: " + users_path);
    std::string line;
    std::vector<std::string> f;
    while (std::getline(users_in, line)) {
      line = strip_cr(line);
      if (line.empty()) continue;
      if (!split_double_colon(line, f) || f.size() < 2 || f[1].empty()) {
        stats.malformed_lines++;
        continue;
      }
      try {
        const int u = std::stoi(f[0]);
        if (u >= 0) {
          if (static_cast<std::size_t>(u) >= gender_by_user.size())
            gender_by_user.resize(static_cast<std::size_t>(u) + 1, 0);
          gender_by_user[static_cast<std::size_t>(u)] = f[1][0];
        }
      } catch (const std::exception&) {
        stats.malformed_lines++;
      }
    }
  }

  // item filter, then user filter on what remains
  std::unordered_map<int, std::int64_t> item_freq;
  for (const auto& r : ratings) item_freq[r.movie]++;
  std::unordered_set<int> kept_items;
  for (const auto& [movie, n] : item_freq)
    if (n >= opts.min_item_interactions) kept_items.insert(movie);

  std::unordered_map<int, std::int64_t> user_freq;
  for (const auto& r : ratings)
    if (kept_items.count(r.movie)) user_freq[r.user]++;
  std::unordered_set<int> kept_users;
  for (const auto& [user, n] : user_freq)
    if (n >= opts.min_user_interactions) kept_users.insert(user);

  if (opts.user_subsample > 0 &&
      static_cast<std::size_t>(opts.user_subsample) < kept_users.size()) {
    std::vector<int> users(kept_users.begin(), kept_users.end());
    std::sort(users.begin(), users.end());
    SeededRng rng(opts.subsample_seed);
    const auto pick = rng.sample_without_replacement(static_cast<int>(users.size()),
                                                     opts.user_subsample);
    std::unordered_set<int> chosen;
    for (int i : pick) chosen.insert(users[static_cast<std::size_t>(i)]);
    kept_users = std::move(chosen);
  }

  std::vector<RawRating> kept;
  for (const auto& r : ratings)
    if (kept_items.count(r.movie) && kept_users.count(r.user)) kept.push_back(r);
  if (kept.empty()) throw std::runtime_error("ingest produced an empty dataset");

  // dense catalog ids in ascending original movie id order
  std::vector<int> movie_ids(kept_items.begin(), kept_items.end());
  std::sort(movie_ids.begin(), movie_ids.end());
  std::unordered_map<int, int> movie_to_id;
  auto& cat = result.catalog;
  cat.titles.push_back("");
  cat.counts.push_back(0);
  for (int movie : movie_ids) {
    const int id = static_cast<int>(cat.titles.size());
    movie_to_id[movie] = id;
    cat.titles.push_back(movie_titles[movie]);
    cat.title_to_id.emplace(movie_titles[movie], id);
    cat.counts.push_back(0);
  }
  cat.item_count = static_cast<int>(cat.titles.size()) - 1;

  // chronological per-user sequences; timestamp ties keep file order
  std::stable_sort(kept.begin(), kept.end(), [](const RawRating& a, const RawRating& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.file_order < b.file_order;
  });
  std::vector<UserSequence> sequences;
  for (const auto& r : kept) {
    if (sequences.empty() || sequences.back().user != r.user)
      sequences.push_back(UserSequence{r.user, {}});
    sequences.back().items.emplace_back(movie_to_id[r.movie], r.rating);
  }

  auto& ds = result.dataset;
  ds.transitions = build_transitions(sequences);
  ds.split = temporal_split(ds.transitions, opts.eval_fraction);
  ds.user_gender_by_id = std::move(gender_by_user);
  cat.counts = train_action_counts(ds, cat.item_count);

  stats.users_kept = static_cast<std::int64_t>(sequences.size());
  stats.items_kept = cat.item_count;
  stats.transitions = static_cast<std::int64_t>(ds.transitions.size());
  for (auto s : ds.split)
    (s == Split::train ? stats.train_transitions : stats.eval_transitions)++;
  return result;
}

OfflineDataset make_skewed_subset(const OfflineDataset& dataset,
                                  const std::function<bool(int, char)>& predicate) {
  OfflineDataset out;
  out.user_gender_by_id = dataset.user_gender_by_id;
  for (std::size_t i = 0; i < dataset.transitions.size(); ++i) {
    const auto& t = dataset.transitions[i];
    if (dataset.split[i] == Split::train && !predicate(t.user, dataset.gender_of(t.user)))
      continue;
    out.transitions.push_back(t);
    out.split.push_back(dataset.split[i]);
  }
  bool has_train = false;
  for (auto s : out.split) has_train |= (s == Split::train);
  if (!has_train) throw std::runtime_error("skewed subset has an empty training partition");
  return out;
}

// ---------------------------------------------------------------------------
// transitions file

void save_transitions(const std::string& path, const OfflineDataset& dataset) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write transitions file: " + path);
  for (std::size_t i = 0; i < dataset.transitions.size(); ++i) {
    const auto& t = dataset.transitions[i];
    for (int id : t.state.ids) std::fprintf(out, "%d\t", id);
    std::fprintf(out, "%d\t%.17g\t", t.action, t.reward);
    for (int id : t.next_state.ids) std::fprintf(out, "%d\t", id);
    std::fprintf(out, "%d\t%d\n", t.terminal ? 1 : 0, dataset.split[i] == Split::eval ? 1 : 0);
  }
  if (std::fclose(out) != 0) throw std::runtime_error("write failed for " + path);
}

OfflineDataset load_transitions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transitions file: " + path);
  OfflineDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    Transition t;
    int terminal, split;
    for (auto& id : t.state.ids) ss >> id;
    ss >> t.action >> t.reward;
    for (auto& id : t.next_state.ids) ss >> id;
    ss >> terminal >> split;
    if (!ss)
      throw std::runtime_error("malformed transitions line " + std::to_string(lineno) + " in " +
                               path);
    t.terminal = terminal != 0;
    ds.transitions.push_back(t);
    ds.split.push_back(split != 0 ? Split::eval : Split::train);
  }
  if (ds.transitions.empty()) throw std::runtime_error("transitions file is empty: " + path);
  return ds;
}

}  // namespace laac
