#pragma once

#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "termscribe/common.hpp"
#include "termscribe/extract.hpp"

namespace termscribe {

struct DescriptionRecord {
  std::string term;
  std::string text;
  std::string url;
  Method method = Method::NLP;
  std::string trigger;
  double perplexity = 0.0;
  int cluster_id = 0;
  bool representative = false;
  std::string indexed_at;  // ISO-8601 UTC
};

std::string current_timestamp();

// JSON Lines database with an in-memory term index. Single writer, multiple
// readers; index_records replaces a term's records atomically.
class Database {
 public:
  static Database open(const std::string& path);  // creates an empty db

  // Upserts per term; within a batch a duplicate (term, url, text) is
  // rejected and reported. Returns the number of records inserted.
  std::size_t index_records(const std::vector<DescriptionRecord>& records,
                            Report* rep = nullptr);

  // Case-insensitive exact term lookup; representatives first, each group by
  // ascending perplexity.
  std::vector<DescriptionRecord> lookup(const std::string& term,
                                        bool representatives_only) const;

  std::vector<DescriptionRecord> all_records() const;
  std::vector<std::string> terms() const;
  const std::string& path() const { return path_; }

  Database(Database&& other) noexcept;
  Database& operator=(Database&&) = delete;

 private:
  Database() = default;
  void persist_compact() const;

  std::string path_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<DescriptionRecord>> by_term_;  // folded key
};

}  // namespace termscribe
