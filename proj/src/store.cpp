#include "termscribe/store.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace termscribe {

using nlohmann::json;

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

constexpr int kDbVersion = 1;
constexpr std::string_view kDbFormat = "term-scribe-db";

json to_json(const DescriptionRecord& r) {
  return json{{"term", r.term},
              {"text", r.text},
              {"url", r.url},
              {"method", method_name(r.method)},
              {"trigger", r.trigger},
              {"perplexity", r.perplexity},
              {"cluster_id", r.cluster_id},
              {"representative", r.representative},
              {"indexed_at", r.indexed_at}};
}

DescriptionRecord from_json(const json& j) {
  DescriptionRecord r;
  r.term = j.at("term").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.url = j.at("url").get<std::string>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.trigger = j.at("trigger").get<std::string>();
  r.perplexity = j.at("perplexity").get<double>();
  r.cluster_id = j.at("cluster_id").get<int>();
  r.representative = j.at("representative").get<bool>();
  r.indexed_at = j.at("indexed_at").get<std::string>();
  return r;
}

// One representative per cluster_id, and representatives must be exactly the
// records flagged as such.
void check_representative_invariant(const std::string& term,
                                    const std::vector<const DescriptionRecord*>& recs) {
  std::map<int, int> reps_per_cluster;
  std::map<int, int> members_per_cluster;
  for (const auto* r : recs) {
    ++members_per_cluster[r->cluster_id];
    if (r->representative) ++reps_per_cluster[r->cluster_id];
  }
  for (const auto& [cid, members] : members_per_cluster) {
    (void)members;
    auto it = reps_per_cluster.find(cid);
    int reps = it == reps_per_cluster.end() ? 0 : it->second;
    if (reps != 1)
      throw std::invalid_argument(
          "term '" + term + "': cluster " + std::to_string(cid) + " has " +
          std::to_string(reps) + " representatives (exactly one required)");
  }
}

}  // namespace

Database::Database(Database&& other) noexcept {
  path_ = std::move(other.path_);
  by_term_ = std::move(other.by_term_);
}

Database Database::open(const std::string& path) {
  Database db;
  db.path_ = path;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    // Fresh database: write just the header line.
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create database: " + path);
    out << json{{"format", kDbFormat}, {"version", kDbVersion}}.dump() << "\n";
    if (!out) throw IoError("cannot write database header: " + path);
    return db;
  }

  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      // A torn trailing line from an interrupted append is tolerated.
      if (in.peek() == EOF) break;
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": unparsable database line");
    }
    if (!header_seen) {
      if (!j.contains("format") || j["format"] != kDbFormat)
        throw FormatError(path + ":1: not a " + std::string(kDbFormat) +
                          " file");
      if (!j.contains("version") || j["version"] != kDbVersion)
        throw FormatError(path + ":1: unsupported database version");
      header_seen = true;
      continue;
    }
    try {
      DescriptionRecord r = from_json(j);
      db.by_term_[to_lower(r.term)].push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen && lineno > 0)
    throw FormatError(path + ":1: missing database header");
  return db;
}

void Database::persist_compact() const {
  namespace fs = std::filesystem;
  std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write database: " + tmp);
    out << json{{"format", kDbFormat}, {"version", kDbVersion}}.dump() << "\n";
    for (const auto& [key, recs] : by_term_) {
      (void)key;
      for (const auto& r : recs) out << to_json(r).dump() << "\n";
    }
    out.flush();
    if (!out) throw IoError("failed while writing database: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path_, ec);
  if (ec) throw IoError("cannot replace database " + path_ + ": " + ec.message());
}

std::size_t Database::index_records(const std::vector<DescriptionRecord>& records,
                                    Report* rep) {
  // Group by term, keeping batch order and rejecting in-batch duplicates.
  std::map<std::string, std::vector<const DescriptionRecord*>> batches;
  std::set<std::array<std::string, 3>> seen;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (!seen.insert({to_lower(r.term), r.url, r.text}).second) {
      report(rep, "duplicate (term, url, text) for '" + r.term +
                      "' rejected");
      continue;
    }
    std::string key = to_lower(r.term);
    if (!batches.count(key)) order.push_back(key);
    batches[key].push_back(&r);
  }
  for (const auto& [key, recs] : batches)
    check_representative_invariant(key, recs);

  std::unique_lock lock(mu_);
  std::size_t inserted = 0;
  for (const auto& key : order) {
    const auto& recs = batches[key];
    std::vector<DescriptionRecord> copy;
    copy.reserve(recs.size());
    for (const auto* r : recs) copy.push_back(*r);

    // Every commit rewrites the canonical term-sorted file so identical
    // database states are byte-identical regardless of commit history.
    bool replacing = by_term_.count(key) > 0;
    std::vector<DescriptionRecord> saved;
    if (replacing) saved = std::move(by_term_[key]);
    by_term_[key] = std::move(copy);
    try {
      persist_compact();
    } catch (...) {
      if (replacing)
        by_term_[key] = std::move(saved);
      else
        by_term_.erase(key);
      throw;
    }
    inserted += recs.size();
  }
  return inserted;
}

std::vector<DescriptionRecord> Database::lookup(const std::string& term,
                                                bool representatives_only) const {
  std::shared_lock lock(mu_);
  auto it = by_term_.find(to_lower(std::string(trim(term))));
  if (it == by_term_.end()) return {};
  std::vector<DescriptionRecord> out = it->second;
  std::stable_sort(out.begin(), out.end(),
                   [](const DescriptionRecord& a, const DescriptionRecord& b) {
                     if (a.representative != b.representative)
                       return a.representative;
                     if (a.perplexity != b.perplexity)
                       return a.perplexity < b.perplexity;
                     if (a.cluster_id != b.cluster_id)
                       return a.cluster_id < b.cluster_id;
                     if (a.url != b.url) return a.url < b.url;
                     return a.text < b.text;
                   });
  if (representatives_only) {
    std::erase_if(out, [](const DescriptionRecord& r) { return !r.representative; });
  }
  return out;
}

std::vector<DescriptionRecord> Database::all_records() const {
  std::shared_lock lock(mu_);
  std::vector<DescriptionRecord> out;
  for (const auto& [key, recs] : by_term_) {
    (void)key;
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

std::vector<std::string> Database::terms() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  out.reserve(by_term_.size());
  for (const auto& [key, recs] : by_term_) {
    (void)recs;
    out.push_back(key);
  }
  return out;
}

}  // namespace termscribe
