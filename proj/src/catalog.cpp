#include "laac/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace laac {

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

const std::string& ItemCatalog::title_of(int id) const {
  if (!valid_id(id)) throw std::invalid_argument("title_of: invalid item id " + std::to_string(id));
  return titles[static_cast<std::size_t>(id)];
}

int ItemCatalog::id_of(const std::string& title) const {
  auto it = title_to_id.find(title);
  return it == title_to_id.end() ? 0 : it->second;
}

std::uint64_t ItemCatalog::hash() const {
  std::uint64_t h = fnv1a64(&item_count, sizeof(item_count));
  for (int id = 1; id <= item_count; ++id) {
    h = fnv1a64(titles[static_cast<std::size_t>(id)], h);
    const std::int64_t c = counts[static_cast<std::size_t>(id)];
    h = fnv1a64(&c, sizeof(c), h);
  }
  return h;
}

void ItemCatalog::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write catalog file: " + path);
  for (int id = 1; id <= item_count; ++id)
    out << id << '\t' << counts[static_cast<std::size_t>(id)] << '\t'
        << titles[static_cast<std::size_t>(id)] << '\n';
  if (!out) throw std::runtime_error("write failed for catalog file: " + path);
}

ItemCatalog ItemCatalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog file: " + path);
  ItemCatalog cat;
  cat.titles.push_back("");
  cat.counts.push_back(0);
  std::string line;
  int expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int id;
    std::int64_t count;
    std::string title;
    char tab;
    if (!(ss >> id >> std::noskipws >> tab >> std::skipws >> count))
      throw std::runtime_error("malformed catalog line: " + line);
    ss.get();  // the tab before the title
    std::getline(ss, title);
    if (id != expected)
      throw std::runtime_error("catalog ids must be dense ascending, got " + std::to_string(id) +
                               " expected " + std::to_string(expected));
    cat.titles.push_back(title);
    cat.counts.push_back(count);
    cat.title_to_id.emplace(title, id);
    ++expected;
  }
  cat.item_count = expected - 1;
  if (cat.item_count == 0) throw std::runtime_error("catalog file is empty: " + path);
  return cat;
}

std::vector<int> popularity_split(const ItemCatalog& catalog) {
  std::vector<int> ids(static_cast<std::size_t>(catalog.item_count));
  std::iota(ids.begin(), ids.end(), 1);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto ca = catalog.counts[static_cast<std::size_t>(a)];
    const auto cb = catalog.counts[static_cast<std::size_t>(b)];
    if (ca != cb) return ca > cb;
    return a < b;
  });
  const std::size_t novel_n = static_cast<std::size_t>(catalog.item_count) / 2;
  std::vector<int> novel(ids.end() - static_cast<std::ptrdiff_t>(novel_n), ids.end());
  std::sort(novel.begin(), novel.end());
  return novel;
}

}  // namespace laac
