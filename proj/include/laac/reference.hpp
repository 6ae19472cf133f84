#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "laac/catalog.hpp"
#include "laac/nets.hpp"
#include "laac/rng.hpp"

namespace laac {

// Inputs for one suggestion request: the user's recent history, a candidate
// subset of the catalog, and how many titles to ask for.
struct PromptSpec {
  std::vector<std::string> history_titles;  // exactly 5
  std::vector<std::string> candidate_titles;
  int n_r = 10;
};

std::string default_prompt_template();
std::uint64_t template_hash(const std::string& template_text);

// Renders the template. Placeholders: {history}, {candidates}, {n_r}.
std::string build_prompt(const PromptSpec& spec, const std::string& template_text);

// uniform without-replacement candidate ids
std::vector<int> sample_candidates(const ItemCatalog& catalog, int n_c, SeededRng& rng);
// deterministic per state: the same state always sees the same candidates
std::vector<int> candidates_for_state(const ItemCatalog& catalog, const StateKey& state, int n_c,
                                      std::uint64_t seed);

struct ParseStats {
  int unmatched_lines = 0;
};

// Splits the raw response into lines, strips numbering and wrapping
// punctuation, and matches titles against the candidate set (exact first,
// then case-insensitive). Unmatched lines are dropped and counted; duplicates
// keep their first occurrence; the result is truncated to n_r.
std::vector<int> parse_response(const std::string& raw, const std::vector<int>& candidate_ids,
                                const ItemCatalog& catalog, int n_r, ParseStats* stats = nullptr);

// One persisted provider exchange.
struct ProviderRecord {
  StateKey state;
  std::vector<int> candidate_ids;
  std::vector<int> parsed_ids;
  std::string provider;
  std::uint64_t template_hash = 0;
  std::string raw_response;
  std::int64_t timestamp = 0;
  bool failed = false;
};

// Frozen per-state suggestion sets; the realization of the reference policy.
class ReferencePolicyTable {
 public:
  void insert(const StateKey& state, std::vector<int> suggestion_ids);
  const std::vector<int>* find(const StateKey& state) const;
  std::size_t size() const { return table_.size(); }
  bool operator==(const ReferencePolicyTable& o) const { return table_ == o.table_; }
  const std::unordered_map<StateKey, std::vector<int>, StateKeyHash>& entries() const {
    return table_;
  }

 private:
  std::unordered_map<StateKey, std::vector<int>, StateKeyHash> table_;
};

// probability 1/|A_r| on each suggested id, 0 elsewhere (length item_count+1);
// throws when the state is absent
std::vector<double> policy_vector(const ReferencePolicyTable& table, const StateKey& state,
                                  int item_count);

// ---------------------------------------------------------------------------
// providers

class SuggestionProvider {
 public:
  struct Result {
    bool ok = false;
    std::string text;
    std::string error;
  };
  virtual ~SuggestionProvider() = default;
  virtual std::string name() const = 0;
  virtual Result suggest(const std::string& prompt, const PromptSpec& spec) = 0;
};

// echoes the first n_r candidate titles, one per line
class StubProvider : public SuggestionProvider {
 public:
  std::string name() const override { return "stub"; }
  Result suggest(const std::string& prompt, const PromptSpec& spec) override;
};

struct EndpointConfig {
  std::string url;    // e.g. http://host:port
  std::string model;
  std::string api_key;
  int max_retries = 3;
  double backoff_base_s = 0.5;
  double min_interval_s = 0.0;  // rate limit between requests
  int timeout_s = 60;
};

// reads LAAC_LLM_ENDPOINT, LAAC_LLM_MODEL, LAAC_LLM_API_KEY
EndpointConfig endpoint_from_env();

// OpenAI-style chat completion client with bounded retries and exponential
// backoff. Transport failures after the retry budget surface as failed
// results; the caller records them and moves on.
class LiveProvider : public SuggestionProvider {
 public:
  explicit LiveProvider(EndpointConfig cfg);
  ~LiveProvider() override;
  std::string name() const override { return "live:" + cfg_.model; }
  Result suggest(const std::string& prompt, const PromptSpec& spec) override;

 private:
  EndpointConfig cfg_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// cache file: one JSON record per line

std::string cache_record_to_line(const ProviderRecord& record);
ProviderRecord cache_record_from_line(const std::string& line);
std::vector<ProviderRecord> load_cache(const std::string& path);

// Rebuilds the table from persisted records. Rejects records whose template
// hash differs from expected (pass 0 to adopt the first record's hash).
// States whose record failed or parsed to nothing are skipped and counted.
ReferencePolicyTable table_from_records(const std::vector<ProviderRecord>& records,
                                        const ItemCatalog& catalog,
                                        std::uint64_t expected_template_hash = 0,
                                        int* skipped_states = nullptr);

struct BuildCacheOptions {
  int n_c = 100;
  int n_r = 10;
  std::uint64_t seed = 1;
  std::string template_text;  // empty = default template
  int concurrency = 1;
};

struct BuildCacheStats {
  int requested = 0;
  int fetched = 0;
  int resumed = 0;   // states already present in the cache file
  int failed = 0;
  int unmatched = 0; // fetched but nothing parsed
};

// Fetches suggestions for every state not yet in the cache file and appends
// them, one record per exchange, flushing as it goes.
BuildCacheStats build_cache(const std::vector<StateKey>& states, const ItemCatalog& catalog,
                            SuggestionProvider& provider, const std::string& cache_path,
                            const BuildCacheOptions& opts);

// Training-time view: table lookups with a deterministic fallback (uniform
// over the state's candidate set) for states the table does not cover.
class ReferencePolicyProvider {
 public:
  ReferencePolicyProvider(ReferencePolicyTable table, const ItemCatalog& catalog, int n_c,
                          std::uint64_t seed);
  // length item_count+1, sums to 1, index 0 always 0
  std::vector<double> probabilities(const StateKey& state) const;
  const ReferencePolicyTable& table() const { return table_; }

 private:
  ReferencePolicyTable table_;
  const ItemCatalog* catalog_;
  int n_c_;
  std::uint64_t seed_;
};

}  // namespace laac
