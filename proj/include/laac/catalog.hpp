#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace laac {

// Dense item catalog. Valid item ids are 1..item_count; id 0 is reserved as
// the history padding id and never appears as an action.
struct ItemCatalog {
  int item_count = 0;
  std::vector<std::string> titles;       // indexed by id, titles[0] == ""
  std::vector<std::int64_t> counts;      // training-split interaction counts, indexed by id
  std::unordered_map<std::string, int> title_to_id;

  bool valid_id(int id) const { return id >= 1 && id <= item_count; }
  const std::string& title_of(int id) const;
  // returns 0 when the title is unknown
  int id_of(const std::string& title) const;

  // content hash over ids, titles and counts; identifies the catalog a
  // checkpoint or report was computed against
  std::uint64_t hash() const;

  void save(const std::string& path) const;
  static ItemCatalog load(const std::string& path);
};

// bottom half of the catalog by training popularity: items sorted by count
// descending (ties by id ascending), last floor(|A|/2) form the novel set
std::vector<int> popularity_split(const ItemCatalog& catalog);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t hash_file(const std::string& path);

}  // namespace laac
