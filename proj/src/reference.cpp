#include "laac/reference.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

namespace laac {

using nlohmann::json;

std::string default_prompt_template() {
  return "You are a movie recommendation assistant.\n"
         "\n"
         "The user watched these five movies most recently, oldest first:\n"
         "{history}\n"
         "\n"
         "Choose only from this candidate list:\n"
         "{candidates}\n"
         "\n"
         "Recommend exactly {n_r} movies from the candidate list that the user is likely to "
         "enjoy next. Reply with one title per line, copied exactly from the candidate list, "
         "and nothing else.\n";
}

std::uint64_t template_hash(const std::string& template_text) {
  return fnv1a64(template_text);
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string build_prompt(const PromptSpec& spec, const std::string& template_text) {
  if (spec.history_titles.size() != static_cast<std::size_t>(kWindowSize))
    throw std::invalid_argument("build_prompt: need exactly 5 history titles, got " +
                                std::to_string(spec.history_titles.size()));
  for (const auto& t : spec.history_titles)
    if (t.empty()) throw std::invalid_argument("build_prompt: empty history title");
  if (spec.candidate_titles.empty())
    throw std::invalid_argument("build_prompt: empty candidate list");
  if (spec.n_r < 1) throw std::invalid_argument("build_prompt: n_r must be at least 1");

  std::ostringstream history, candidates;
  for (std::size_t i = 0; i < spec.history_titles.size(); ++i)
    history << (i + 1) << ". " << spec.history_titles[i] << (i + 1 < spec.history_titles.size() ? "\n" : "");
  for (std::size_t i = 0; i < spec.candidate_titles.size(); ++i)
    candidates << (i + 1) << ". " << spec.candidate_titles[i]
               << (i + 1 < spec.candidate_titles.size() ? "\n" : "");

  std::string out = template_text;
  replace_all(out, "{history}", history.str());
  replace_all(out, "{candidates}", candidates.str());
  replace_all(out, "{n_r}", std::to_string(spec.n_r));
  return out;
}

std::vector<int> sample_candidates(const ItemCatalog& catalog, int n_c, SeededRng& rng) {
  if (n_c < 1 || n_c > catalog.item_count)
    throw std::invalid_argument("sample_candidates: n_c=" + std::to_string(n_c) +
                                " out of range for catalog of " +
                                std::to_string(catalog.item_count));
  auto picks = rng.sample_without_replacement(catalog.item_count, n_c);
  for (auto& p : picks) p += 1;  // item ids are 1-based
  std::sort(picks.begin(), picks.end());
  return picks;
}

std::vector<int> candidates_for_state(const ItemCatalog& catalog, const StateKey& state, int n_c,
                                      std::uint64_t seed) {
  StateKeyHash h;
  SeededRng rng(splitmix64(static_cast<std::uint64_t>(h(state))) ^ splitmix64(seed));
  return sample_candidates(catalog, n_c, rng);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// strips "12.", "3)", "-", "*" style list markers
std::string strip_enumeration(std::string s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':' || s[i] == '-'))
    return s.substr(i + 1);
  if (!s.empty() && (s[0] == '-' || s[0] == '*')) return s.substr(1);
  return s;
}

std::string strip_wrapping(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) s.pop_back();
  return trim(s);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<int> parse_response(const std::string& raw, const std::vector<int>& candidate_ids,
                                const ItemCatalog& catalog, int n_r, ParseStats* stats) {
  if (raw.empty()) throw std::invalid_argument("parse_response: empty response text");
  std::unordered_map<std::string, int> exact, folded;
  for (int id : candidate_ids) {
    const auto& title = catalog.title_of(id);
    exact.emplace(title, id);
    folded.emplace(lower(title), id);
  }
  std::vector<int> out;
  std::unordered_set<int> seen;
  std::istringstream ss(raw);
  std::string line;
  while (std::getline(ss, line)) {
    std::string title = strip_wrapping(strip_enumeration(trim(line)));
    if (title.empty()) continue;
    int id = 0;
    if (auto it = exact.find(title); it != exact.end()) {
      id = it->second;
    } else if (auto it2 = folded.find(lower(title)); it2 != folded.end()) {
      id = it2->second;
    } else {
      if (stats) stats->unmatched_lines++;
      continue;
    }
    if (seen.insert(id).second) out.push_back(id);
  }
  if (static_cast<int>(out.size()) > n_r) out.resize(static_cast<std::size_t>(n_r));
  return out;
}

void ReferencePolicyTable::insert(const StateKey& state, std::vector<int> suggestion_ids) {
  if (suggestion_ids.empty())
    throw std::invalid_argument("ReferencePolicyTable: empty suggestion set");
  table_[state] = std::move(suggestion_ids);
}

const std::vector<int>* ReferencePolicyTable::find(const StateKey& state) const {
  auto it = table_.find(state);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<double> policy_vector(const ReferencePolicyTable& table, const StateKey& state,
                                  int item_count) {
  const auto* ids = table.find(state);
  if (!ids)
    throw std::invalid_argument("policy_vector: state " + state.to_string() +
                                " absent from reference table");
  std::vector<double> probs(static_cast<std::size_t>(item_count) + 1, 0.0);
  const double p = 1.0 / static_cast<double>(ids->size());
  for (int id : *ids) {
    if (id < 1 || id > item_count)
      throw std::invalid_argument("policy_vector: suggestion id " + std::to_string(id) +
                                  " outside catalog");
    probs[static_cast<std::size_t>(id)] = p;
  }
  return probs;
}

// ---------------------------------------------------------------------------
// providers

SuggestionProvider::Result StubProvider::suggest(const std::string&, const PromptSpec& spec) {
  Result r;
  r.ok = true;
  std::ostringstream out;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(spec.n_r),
                                       spec.candidate_titles.size());
  for (std::size_t i = 0; i < n; ++i) out << spec.candidate_titles[i] << "\n";
  r.text = out.str();
  return r;
}

EndpointConfig endpoint_from_env() {
  EndpointConfig cfg;
  if (const char* u = std::getenv("LAAC_LLM_ENDPOINT")) cfg.url = u;
  if (const char* m = std::getenv("LAAC_LLM_MODEL")) cfg.model = m;
  if (const char* k = std::getenv("LAAC_LLM_API_KEY")) cfg.api_key = k;
  return cfg;
}

struct LiveProvider::Impl {
  httplib::Client client;
  std::mutex rate_mutex;
  std::chrono::steady_clock::time_point last_request{};

  explicit Impl(const EndpointConfig& cfg) : client(cfg.url) {
    client.set_connection_timeout(cfg.timeout_s, 0);
    client.set_read_timeout(cfg.timeout_s, 0);
  }
};

LiveProvider::LiveProvider(EndpointConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.url.empty()) throw std::invalid_argument("LiveProvider: endpoint URL is empty");
  impl_ = std::make_unique<Impl>(cfg_);
}

LiveProvider::~LiveProvider() = default;

SuggestionProvider::Result LiveProvider::suggest(const std::string& prompt, const PromptSpec&) {
  json body = {{"model", cfg_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  Result result;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double backoff = cfg_.backoff_base_s * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    if (cfg_.min_interval_s > 0.0) {
      std::unique_lock lock(impl_->rate_mutex);
      const auto now = std::chrono::steady_clock::now();
      const auto wait = impl_->last_request +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(cfg_.min_interval_s)) -
                        now;
      if (wait.count() > 0) std::this_thread::sleep_for(wait);
      impl_->last_request = std::chrono::steady_clock::now();
    }
    auto res = impl_->client.Post("/v1/chat/completions", headers, body.dump(),
                                  "application/json");
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      result.error = "http status " + std::to_string(res->status);
      // retry 429/5xx, give up on other client errors
      if (res->status < 500 && res->status != 429) break;
      continue;
    }
    try {
      auto reply = json::parse(res->body);
      result.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      result.ok = true;
      result.error.clear();
      return result;
    } catch (const std::exception& e) {
      result.error = std::string("malformed provider reply: ") + e.what();
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// cache file

std::string cache_record_to_line(const ProviderRecord& record) {
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(record.template_hash));
  json j = {{"state_key", record.state.to_string()},
            {"candidate_ids", record.candidate_ids},
            {"parsed_ids", record.parsed_ids},
            {"provider", record.provider},
            {"template_hash", std::string(hash_hex)},
            {"raw_response", record.raw_response},
            {"timestamp", record.timestamp},
            {"failed", record.failed}};
  return j.dump();
}

ProviderRecord cache_record_from_line(const std::string& line) {
  const auto j = json::parse(line);
  ProviderRecord r;
  r.state = StateKey::parse(j.at("state_key").get<std::string>());
  r.candidate_ids = j.at("candidate_ids").get<std::vector<int>>();
  r.parsed_ids = j.at("parsed_ids").get<std::vector<int>>();
  r.provider = j.at("provider").get<std::string>();
  r.template_hash = std::stoull(j.at("template_hash").get<std::string>(), nullptr, 16);
  r.raw_response = j.at("raw_response").get<std::string>();
  r.timestamp = j.value("timestamp", std::int64_t{0});
  r.failed = j.value("failed", false);
  return r;
}

std::vector<ProviderRecord> load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cache file: " + path);
  std::vector<ProviderRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(cache_record_from_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("malformed cache line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return records;
}

ReferencePolicyTable table_from_records(const std::vector<ProviderRecord>& records,
                                        const ItemCatalog& catalog,
                                        std::uint64_t expected_template_hash,
                                        int* skipped_states) {
  ReferencePolicyTable table;
  int skipped = 0;
  std::uint64_t expect = expected_template_hash;
  for (const auto& r : records) {
    if (expect == 0) expect = r.template_hash;
    if (r.template_hash != expect)
      throw std::runtime_error("cache mixes prompt templates (hash mismatch for state " +
                               r.state.to_string() + ")");
    if (r.failed || r.parsed_ids.empty()) {
      ++skipped;
      continue;
    }
    for (int id : r.parsed_ids)
      if (!catalog.valid_id(id))
        throw std::runtime_error("cache record for state " + r.state.to_string() +
                                 " references unknown item id " + std::to_string(id));
    table.insert(r.state, r.parsed_ids);
  }
  if (skipped_states) *skipped_states = skipped;
  return table;
}

BuildCacheStats build_cache(const std::vector<StateKey>& states, const ItemCatalog& catalog,
                            SuggestionProvider& provider, const std::string& cache_path,
                            const BuildCacheOptions& opts) {
  BuildCacheStats stats;
  const std::string tmpl = opts.template_text.empty() ? default_prompt_template()
                                                      : opts.template_text;
  const std::uint64_t thash = template_hash(tmpl);

  std::unordered_set<StateKey, StateKeyHash> done;
  {
    std::ifstream probe(cache_path);
    if (probe) {
      for (const auto& r : load_cache(cache_path)) {
        if (r.template_hash != thash)
          throw std::runtime_error("existing cache was built with a different prompt template");
        if (!r.failed) done.insert(r.state);
      }
    }
  }

  std::vector<StateKey> todo;
  std::unordered_set<StateKey, StateKeyHash> queued;
  for (const auto& s : states) {
    if (done.count(s)) {
      if (queued.insert(s).second) stats.resumed++;
      continue;
    }
    if (queued.insert(s).second) todo.push_back(s);
  }
  stats.requested = static_cast<int>(states.size());

  std::ofstream out(cache_path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to cache file: " + cache_path);
  std::mutex io_mutex;

  auto process = [&](const StateKey& state) {
    PromptSpec spec;
    spec.n_r = opts.n_r;
    for (int id : state.ids)
      spec.history_titles.push_back(id == kPaddingId ? "(no earlier item)"
                                                     : catalog.title_of(id));
    const auto candidates = candidates_for_state(catalog, state, opts.n_c, opts.seed);
    for (int id : candidates) spec.candidate_titles.push_back(catalog.title_of(id));
    const std::string prompt = build_prompt(spec, tmpl);

    auto res = provider.suggest(prompt, spec);
    ProviderRecord record;
    record.state = state;
    record.candidate_ids = candidates;
    record.provider = provider.name();
    record.template_hash = thash;
    record.timestamp = static_cast<std::int64_t>(std::time(nullptr));
    if (res.ok) {
      ParseStats ps;
      record.raw_response = res.text;
      record.parsed_ids = parse_response(res.text, candidates, catalog, opts.n_r, &ps);
    } else {
      record.failed = true;
      record.raw_response = res.error;
    }
    {
      std::lock_guard lock(io_mutex);
      out << cache_record_to_line(record) << "\n";
      out.flush();
      if (record.failed)
        stats.failed++;
      else if (record.parsed_ids.empty())
        stats.unmatched++;
      else
        stats.fetched++;
    }
  };

  if (opts.concurrency <= 1) {
    for (const auto& s : todo) process(s);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= todo.size()) break;
        process(todo[i]);
      }
    };
    std::vector<std::thread> threads;
    const int n = std::min<int>(opts.concurrency, static_cast<int>(todo.size()));
    threads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return stats;
}

ReferencePolicyProvider::ReferencePolicyProvider(ReferencePolicyTable table,
                                                 const ItemCatalog& catalog, int n_c,
                                                 std::uint64_t seed)
    : table_(std::move(table)), catalog_(&catalog), n_c_(n_c), seed_(seed) {}

std::vector<double> ReferencePolicyProvider::probabilities(const StateKey& state) const {
  if (table_.find(state)) return policy_vector(table_, state, catalog_->item_count);
  const auto candidates = candidates_for_state(*catalog_, state, n_c_, seed_);
  std::vector<double> probs(static_cast<std::size_t>(catalog_->item_count) + 1, 0.0);
  const double p = 1.0 / static_cast<double>(candidates.size());
  for (int id : candidates) probs[static_cast<std::size_t>(id)] = p;
  return probs;
}

}  // namespace laac
