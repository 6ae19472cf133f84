#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "laac/dataset.hpp"
#include "laac/synthetic.hpp"
#include "support/linear_solve.hpp"
#include "support/temp_dir.hpp"

using namespace laac;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// ten users, item popularity spread so the filters and counts are non-trivial
struct ToyCorpus {
  std::string ratings;
  std::string movies;
  std::string users;
  // (user, movie, rating, timestamp) kept in file order
  std::vector<std::tuple<int, int, double, long long>> rows;

  static ToyCorpus make() {
    ToyCorpus c;
    std::ostringstream movies;
    for (int m = 1; m <= 12; ++m) movies << m << "::Movie " << m << " (199" << m % 10 << ")::Drama\n";
    c.movies = movies.str();
    std::ostringstream users;
    for (int u = 1; u <= 10; ++u) users << u << "::" << (u <= 6 ? "M" : "F") << "::25::4::55455\n";
    c.users = users.str();

    // movie 11 appears once and movie 12 twice -> filtered at the <3 rule;
    // user 10 ends with 2 interactions after item filtering -> dropped
    std::vector<std::tuple<int, int, double, long long>> rows = {
        {1, 1, 5, 100}, {1, 2, 4, 200}, {1, 3, 3, 300}, {1, 4, 2, 400}, {1, 5, 1, 500},
        {1, 6, 5, 600}, {1, 7, 4, 700}, {1, 8, 3, 800},
        {2, 1, 4, 110}, {2, 2, 3, 210}, {2, 3, 5, 310}, {2, 4, 4, 410}, {2, 5, 2, 510},
        {2, 6, 1, 610},
        {3, 1, 3, 120}, {3, 2, 2, 220}, {3, 3, 4, 320}, {3, 4, 5, 420}, {3, 5, 3, 520},
        {4, 1, 5, 130}, {4, 2, 5, 230}, {4, 3, 5, 330}, {4, 6, 4, 430},
        {5, 1, 2, 140}, {5, 2, 3, 240}, {5, 7, 4, 340},
        {6, 3, 4, 150}, {6, 4, 4, 250}, {6, 8, 5, 350},
        {7, 1, 1, 160}, {7, 5, 2, 260}, {7, 6, 3, 360},
        {8, 2, 4, 170}, {8, 7, 5, 270}, {8, 8, 3, 370},
        {9, 4, 1, 180}, {9, 6, 2, 280}, {9, 7, 3, 380},
        {10, 11, 5, 190}, {10, 12, 4, 290}, {10, 12, 3, 390},
    };
    c.rows = rows;
    std::ostringstream ratings;
    for (const auto& [u, m, r, t] : rows)
      ratings << u << "::" << m << "::" << r << "::" << t << "\n";
    c.ratings = ratings.str();
    return c;
  }
};

}  // namespace

TEST_CASE("build_transitions: window and terminal bookkeeping") {
  // L = 8 -> exactly three transitions at t = 5, 6, 7
  UserSequence a{1, {{10, 5}, {11, 4}, {12, 3}, {13, 2}, {14, 1}, {15, 5}, {16, 4}, {17, 3}}};
  auto ts = build_transitions({a});
  REQUIRE(ts.size() == 3);
  CHECK(ts[0].state == StateKey{{10, 11, 12, 13, 14}});
  CHECK(ts[0].action == 15);
  CHECK(ts[0].reward == 5.0);
  CHECK_FALSE(ts[0].terminal);
  CHECK(ts[0].next_state == StateKey{{11, 12, 13, 14, 15}});
  CHECK(ts[1].state == StateKey{{11, 12, 13, 14, 15}});
  CHECK(ts[2].action == 17);
  CHECK(ts[2].terminal);

  // L = 6 -> a single terminal transition
  UserSequence b{2, {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 1}}};
  auto tb = build_transitions({b});
  REQUIRE(tb.size() == 1);
  CHECK(tb[0].state == StateKey{{1, 2, 3, 4, 5}});
  CHECK(tb[0].action == 6);
  CHECK(tb[0].terminal);

  // L = 3 -> one terminal transition with a left-padded window
  UserSequence c{3, {{7, 2}, {8, 3}, {9, 4}}};
  auto tc = build_transitions({c});
  REQUIRE(tc.size() == 1);
  CHECK(tc[0].state == StateKey{{0, 0, 0, 7, 8}});
  CHECK(tc[0].action == 9);
  CHECK(tc[0].terminal);
}

TEST_CASE("build_transitions: two-user corpus matches hand enumeration") {
  UserSequence u1{1, {{1, 5}, {2, 4}, {3, 3}, {4, 2}, {5, 1}, {6, 5}, {7, 4}}};
  UserSequence u2{2, {{3, 2}, {1, 3}, {4, 4}, {2, 5}, {5, 2}, {6, 3}}};
  auto ts = build_transitions({u1, u2});
  REQUIRE(ts.size() == 3);  // t = 5, 6 for u1; t = 5 for u2
  CHECK(ts[0].state == StateKey{{1, 2, 3, 4, 5}});
  CHECK(ts[0].action == 6);
  CHECK_FALSE(ts[0].terminal);
  CHECK(ts[1].state == StateKey{{2, 3, 4, 5, 6}});
  CHECK(ts[1].action == 7);
  CHECK(ts[1].terminal);
  CHECK(ts[2].user == 2);
  CHECK(ts[2].state == StateKey{{3, 1, 4, 2, 5}});
  CHECK(ts[2].action == 6);
  CHECK(ts[2].terminal);
}

TEST_CASE("transition chaining property") {
  SeededRng rng(9);
  std::vector<UserSequence> seqs;
  for (int u = 0; u < 20; ++u) {
    UserSequence s{u, {}};
    const int L = 2 + static_cast<int>(rng.uniform_int(15));
    for (int i = 0; i < L; ++i)
      s.items.emplace_back(1 + static_cast<int>(rng.uniform_int(30)), 1 + rng.uniform_int(5));
    seqs.push_back(s);
  }
  for (const auto& t : build_transitions(seqs)) {
    if (t.terminal) continue;
    StateKey expect;
    for (int j = 0; j < 4; ++j) expect.ids[static_cast<std::size_t>(j)] = t.state.ids[static_cast<std::size_t>(j) + 1];
    expect.ids[4] = t.action;
    CHECK(t.next_state == expect);
  }
}

TEST_CASE("ingest: toy corpus filters, counts and splits") {
  testing::TempDir tmp("ingest");
  auto corpus = ToyCorpus::make();
  write_file(tmp.file("ratings.dat"), corpus.ratings);
  write_file(tmp.file("movies.dat"), corpus.movies);
  write_file(tmp.file("users.dat"), corpus.users);

  auto result = ingest_movielens(tmp.file("ratings.dat"), tmp.file("movies.dat"),
                                 tmp.file("users.dat"));

  // independent recount: apply the filter rules directly to the raw rows
  std::map<int, int> item_freq;
  for (const auto& [u, m, r, t] : corpus.rows) item_freq[m]++;
  std::set<int> kept_items;
  for (const auto& [m, n] : item_freq)
    if (n >= 3) kept_items.insert(m);
  std::map<int, int> user_freq;
  for (const auto& [u, m, r, t] : corpus.rows)
    if (kept_items.count(m)) user_freq[u]++;
  std::set<int> kept_users;
  for (const auto& [u, n] : user_freq)
    if (n >= 3) kept_users.insert(u);
  std::map<int, int> expected_len;  // user -> kept interactions
  for (const auto& [u, m, r, t] : corpus.rows)
    if (kept_items.count(m) && kept_users.count(u)) expected_len[u]++;
  std::int64_t expected_transitions = 0;
  for (const auto& [u, L] : expected_len)
    expected_transitions += L >= 6 ? L - 5 : (L >= 2 ? 1 : 0);

  CHECK(result.catalog.item_count == static_cast<int>(kept_items.size()));
  CHECK(result.stats.users_kept == static_cast<std::int64_t>(kept_users.size()));
  CHECK(result.stats.transitions == expected_transitions);
  CHECK(result.stats.train_transitions + result.stats.eval_transitions ==
        result.stats.transitions);

  // movie 11 (one interaction) and movie 12 (two) must be gone
  CHECK(result.catalog.id_of("Movie 11 (1991)") == 0);
  CHECK(result.catalog.id_of("Movie 12 (1992)") == 0);
  CHECK(kept_items.count(11) == 0);

  // catalog counts equal a recount over training transitions
  auto recount = train_action_counts(result.dataset, result.catalog.item_count);
  CHECK(result.catalog.counts == recount);
  std::int64_t count_sum = 0, train_n = 0;
  for (auto c : result.catalog.counts) count_sum += c;
  for (auto s : result.dataset.split) train_n += s == Split::train ? 1 : 0;
  CHECK(count_sum == train_n);

  // demographics came through
  CHECK(result.dataset.gender_of(1) == 'M');
  CHECK(result.dataset.gender_of(7) == 'F');
}

TEST_CASE("ingest: malformed lines are skipped and counted, rerun is stable") {
  testing::TempDir tmp("ingest2");
  write_file(tmp.file("movies.dat"), "1::A (1990)::Drama\n2::B (1991)::Comedy\nbroken\n");
  write_file(tmp.file("ratings.dat"),
             "1::1::5::100\n1::2::4::200\n1::1::3::300\nnot a line\n1::2::9::350\n"
             "2::1::4::110\n2::2::3::210\n2::1::5::310\n"
             "3::1::2::120\n3::2::1::220\n3::1::4::320\n");
  auto r1 = ingest_movielens(tmp.file("ratings.dat"), tmp.file("movies.dat"), "");
  CHECK(r1.stats.malformed_lines == 3);  // "broken", "not a line", rating 9
  CHECK(r1.catalog.item_count == 2);

  auto r2 = ingest_movielens(tmp.file("ratings.dat"), tmp.file("movies.dat"), "");
  CHECK(r1.dataset.transitions.size() == r2.dataset.transitions.size());
  for (std::size_t i = 0; i < r1.dataset.transitions.size(); ++i) {
    CHECK(r1.dataset.transitions[i].state == r2.dataset.transitions[i].state);
    CHECK(r1.dataset.transitions[i].action == r2.dataset.transitions[i].action);
  }
  CHECK_THROWS_AS(ingest_movielens(tmp.file("missing.dat"), tmp.file("movies.dat"), ""),
                  std::runtime_error);
}

TEST_CASE("ingest: timestamp ties break by file order") {
  testing::TempDir tmp("ties");
  write_file(tmp.file("movies.dat"), "1::A (1990)::D\n2::B (1991)::D\n3::C (1992)::D\n");
  // same timestamp everywhere; order must be file order
  std::ostringstream ratings;
  for (int rep = 0; rep < 3; ++rep)
    for (int m = 1; m <= 3; ++m) ratings << rep + 1 << "::" << m << "::3::500\n";
  write_file(tmp.file("ratings.dat"), ratings.str());
  auto r = ingest_movielens(tmp.file("ratings.dat"), tmp.file("movies.dat"), "");
  for (const auto& t : r.dataset.transitions) {
    CHECK(t.state == StateKey{{0, 0, 0, 1, 2}});
    CHECK(t.action == 3);
  }
}

TEST_CASE("temporal split takes the last fifth per user") {
  std::vector<UserSequence> seqs;
  UserSequence u{1, {}};
  for (int i = 0; i < 15; ++i) u.items.emplace_back(1 + i % 7, 3);
  seqs.push_back(u);
  auto ts = build_transitions(seqs);  // L=15 -> 10 transitions
  REQUIRE(ts.size() == 10);
  auto split = temporal_split(ts, 0.2);
  int evals = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == Split::eval) {
      ++evals;
      CHECK(i >= 8);  // only the last two
    }
  }
  CHECK(evals == 2);
}

TEST_CASE("popularity_split: forced orders and ties") {
  ItemCatalog cat;
  cat.item_count = 6;
  cat.titles = {"", "a", "b", "c", "d", "e", "f"};
  cat.counts = {0, 10, 8, 6, 4, 2, 1};
  CHECK(popularity_split(cat) == std::vector<int>{4, 5, 6});

  cat.counts = {0, 3, 3, 3, 3, 3, 3};
  // all equal: ties break by id ascending, so the highest ids fall in the tail
  CHECK(popularity_split(cat) == std::vector<int>{4, 5, 6});

  cat.item_count = 7;
  cat.titles.push_back("g");
  cat.counts = {0, 1, 2, 3, 4, 5, 6, 7};
  auto novel = popularity_split(cat);
  CHECK(novel.size() == 3);  // floor(7/2)
  CHECK(novel == std::vector<int>{1, 2, 3});
}

TEST_CASE("make_skewed_subset filters train only") {
  testing::TempDir tmp("skew");
  auto corpus = ToyCorpus::make();
  write_file(tmp.file("ratings.dat"), corpus.ratings);
  write_file(tmp.file("movies.dat"), corpus.movies);
  write_file(tmp.file("users.dat"), corpus.users);
  auto result = ingest_movielens(tmp.file("ratings.dat"), tmp.file("movies.dat"),
                                 tmp.file("users.dat"));
  const auto& ds = result.dataset;

  auto male_only = make_skewed_subset(ds, [](int, char g) { return g == 'M'; });
  // hand filter: train transitions from male users + every eval transition
  std::size_t expected = 0;
  for (std::size_t i = 0; i < ds.transitions.size(); ++i) {
    if (ds.split[i] == Split::eval || ds.gender_of(ds.transitions[i].user) == 'M') ++expected;
  }
  CHECK(male_only.transitions.size() == expected);
  for (std::size_t i = 0; i < male_only.transitions.size(); ++i)
    if (male_only.split[i] == Split::train)
      CHECK(ds.gender_of(male_only.transitions[i].user) == 'M');
  // eval partition untouched
  CHECK(male_only.eval_indices().size() == ds.eval_indices().size());

  auto identity = make_skewed_subset(ds, [](int, char) { return true; });
  CHECK(identity.transitions.size() == ds.transitions.size());

  CHECK_THROWS_AS(make_skewed_subset(ds, [](int, char) { return false; }), std::runtime_error);
}

TEST_CASE("transitions file round-trips bit-exactly") {
  testing::TempDir tmp("txio");
  SeededRng rng(77);
  OfflineDataset ds;
  for (int i = 0; i < 200; ++i) {
    Transition t;
    for (auto& id : t.state.ids) id = static_cast<int>(rng.uniform_int(40));
    t.action = 1 + static_cast<int>(rng.uniform_int(39));
    t.reward = 1.0 + 4.0 * rng.uniform();  // fractional rewards stress the round-trip
    t.terminal = rng.uniform() < 0.2;
    if (!t.terminal)
      for (auto& id : t.next_state.ids) id = static_cast<int>(rng.uniform_int(40));
    ds.transitions.push_back(t);
    ds.split.push_back(rng.uniform() < 0.5 ? Split::train : Split::eval);
  }
  save_transitions(tmp.file("t.tsv"), ds);
  auto loaded = load_transitions(tmp.file("t.tsv"));
  REQUIRE(loaded.transitions.size() == ds.transitions.size());
  for (std::size_t i = 0; i < ds.transitions.size(); ++i) {
    CHECK(loaded.transitions[i].state == ds.transitions[i].state);
    CHECK(loaded.transitions[i].action == ds.transitions[i].action);
    CHECK(loaded.transitions[i].reward == ds.transitions[i].reward);  // bitwise
    CHECK(loaded.transitions[i].terminal == ds.transitions[i].terminal);
    CHECK(loaded.split[i] == ds.split[i]);
  }
  save_transitions(tmp.file("t2.tsv"), loaded);
  std::ifstream f1(tmp.file("t.tsv")), f2(tmp.file("t2.tsv"));
  std::string b1((std::istreambuf_iterator<char>(f1)), {});
  std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
}

// ---------------------------------------------------------------------------
// synthetic world

TEST_CASE("generate_synthetic: structure of the default bundle") {
  SyntheticConfig cfg;
  SeededRng rng(1);
  auto bundle = generate_synthetic(cfg, rng);

  // logged actions are popular items only
  for (const auto& t : bundle.dataset.transitions) {
    CHECK(t.action >= 1);
    CHECK(t.action <= cfg.popular_count);
    CHECK_FALSE(t.terminal);
    // rewards match the ground-truth table exactly
    const int s = bundle.mdp.state_of(t.state);
    REQUIRE(s >= 0);
    CHECK(t.reward == bundle.mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(t.action - 1)]);
  }

  // the reference table carries novel-good, novel-bad and logged suggestions
  CHECK(bundle.table.size() == static_cast<std::size_t>(cfg.state_count));
  for (int s = 0; s < cfg.state_count; ++s) {
    const auto* sugg = bundle.table.find(bundle.mdp.window_of(s));
    REQUIRE(sugg != nullptr);
    CHECK(sugg->size() == static_cast<std::size_t>(cfg.suggest_good + cfg.suggest_bad + cfg.suggest_logged));
    int good = 0, bad = 0, logged = 0;
    for (int id : *sugg) {
      if (id <= cfg.popular_count) ++logged;
      else if (id <= cfg.popular_count + cfg.novel_good_count) ++good;
      else if (id <= cfg.popular_count + cfg.novel_good_count + cfg.novel_bad_count) ++bad;
    }
    CHECK(good == cfg.suggest_good);
    CHECK(bad == cfg.suggest_bad);
    CHECK(logged == cfg.suggest_logged);
  }

  // behavior frequencies roughly match the logging policy
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cfg.item_count) + 1, 0);
  for (const auto& t : bundle.dataset.transitions) counts[static_cast<std::size_t>(t.action)]++;
  for (int a = 1; a <= cfg.popular_count; ++a) {
    const double expect = bundle.behavior[0][static_cast<std::size_t>(a - 1)] *
                          static_cast<double>(cfg.sample_count);
    const double sigma = std::sqrt(expect);
    CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(a)]) - expect) <=
          5.0 * sigma + 10.0);
  }
}

TEST_CASE("generate_synthetic: zero novel items keeps suggestions inside the log") {
  SyntheticConfig cfg;
  cfg.novel_good_count = 0;
  cfg.novel_bad_count = 0;
  cfg.suggest_good = 0;
  cfg.suggest_bad = 0;
  cfg.suggest_logged = 4;
  SeededRng rng(2);
  auto bundle = generate_synthetic(cfg, rng);
  for (const auto& [state, sugg] : bundle.table.entries())
    for (int id : sugg) CHECK(id <= cfg.popular_count);
}

TEST_CASE("generate_synthetic rejects inconsistent configs") {
  SyntheticConfig cfg;
  cfg.item_count = 20;
  cfg.popular_count = 15;
  cfg.novel_good_count = 4;
  cfg.novel_bad_count = 4;  // 15 + 4 + 4 > 20
  SeededRng rng(3);
  CHECK_THROWS_AS(generate_synthetic(cfg, rng), std::invalid_argument);

  SyntheticConfig zero_temp;
  zero_temp.behavior_temperature = 0.0;
  CHECK_THROWS_AS(generate_synthetic(zero_temp, rng), std::invalid_argument);
}

TEST_CASE("exact_q: geometric series and gamma = 0") {
  SyntheticMDP mdp;
  mdp.state_count = 1;
  mdp.item_count = 1;
  mdp.gamma = 0.5;
  mdp.transition = {{{1.0}}};
  mdp.reward = {{1.0}};
  mdp.initial = {1.0};
  TabularPolicy policy = {{1.0}};
  auto q = exact_q(mdp, policy);
  CHECK(q[0][0] == doctest::Approx(2.0).epsilon(1e-9));

  mdp.gamma = 0.0;
  mdp.reward = {{3.7}};
  CHECK(exact_q(mdp, policy)[0][0] == doctest::Approx(3.7).epsilon(1e-12));

  mdp.gamma = 1.0;
  CHECK_THROWS_AS(exact_q(mdp, policy), std::invalid_argument);
}

TEST_CASE("exact_q matches a direct linear solve on a random 5-state MDP") {
  SyntheticConfig cfg;
  cfg.state_count = 5;
  cfg.item_count = 5;
  cfg.popular_count = 5;
  cfg.novel_good_count = 0;
  cfg.novel_bad_count = 0;
  cfg.suggest_good = 0;
  cfg.suggest_bad = 0;
  cfg.suggest_logged = 2;
  cfg.sample_count = 10;
  cfg.gamma = 0.9;
  SeededRng rng(42);
  auto bundle = generate_synthetic(cfg, rng);
  const auto& mdp = bundle.mdp;
  const auto& policy = bundle.behavior;

  // oracle: V solves (I - gamma P_pi) V = r_pi, then Q = r + gamma P V
  const int S = mdp.state_count, A = mdp.item_count;
  std::vector<std::vector<double>> lhs(static_cast<std::size_t>(S),
                                       std::vector<double>(static_cast<std::size_t>(S), 0.0));
  std::vector<double> rhs(static_cast<std::size_t>(S), 0.0);
  for (int s = 0; s < S; ++s) {
    lhs[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] += 1.0;
    for (int a = 0; a < A; ++a) {
      const double pa = policy[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      rhs[static_cast<std::size_t>(s)] += pa * mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      for (int s2 = 0; s2 < S; ++s2)
        lhs[static_cast<std::size_t>(s)][static_cast<std::size_t>(s2)] -=
            mdp.gamma * pa * mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(s2)];
    }
  }
  const auto v = laac::testing::solve_dense(lhs, rhs);

  const auto q = exact_q(mdp, policy, 1e-12);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double expect = mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      for (int s2 = 0; s2 < S; ++s2)
        expect += mdp.gamma * mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(s2)] *
                  v[static_cast<std::size_t>(s2)];
      CHECK(std::abs(q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - expect) <= 1e-8);
    }

  // Bellman self-consistency of the iterated fixed point
  auto vq = exact_v(mdp, policy, 1e-12);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double rhs_q = mdp.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      for (int s2 = 0; s2 < S; ++s2)
        rhs_q += mdp.gamma * mdp.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(s2)] *
                 vq[static_cast<std::size_t>(s2)];
      CHECK(std::abs(q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - rhs_q) <= 1e-8);
    }
}

TEST_CASE("synthetic mdp file round-trip") {
  testing::TempDir tmp("mdp");
  SyntheticConfig cfg;
  cfg.state_count = 3;
  cfg.item_count = 8;
  cfg.popular_count = 4;
  cfg.novel_good_count = 2;
  cfg.novel_bad_count = 2;
  cfg.suggest_good = 1;
  cfg.suggest_bad = 1;
  cfg.suggest_logged = 1;
  cfg.sample_count = 50;
  SeededRng rng(5);
  auto bundle = generate_synthetic(cfg, rng);
  bundle.mdp.save(tmp.file("mdp.json"));
  auto loaded = SyntheticMDP::load(tmp.file("mdp.json"));
  CHECK(loaded.state_count == 3);
  CHECK(loaded.item_count == 8);
  CHECK(loaded.transition == bundle.mdp.transition);
  CHECK(loaded.reward == bundle.mdp.reward);
  CHECK(loaded.state_of(loaded.window_of(2)) == 2);
  CHECK(loaded.state_of(StateKey{{1, 2, 3, 4, 5}}) == -1);
}
