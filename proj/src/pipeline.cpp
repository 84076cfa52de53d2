#include "termscribe/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "termscribe/fetcher.hpp"
#include "termscribe/sha256.hpp"

namespace termscribe {

namespace fs = std::filesystem;

std::string_view build_status_name(BuildStatus s) {
  switch (s) {
    case BuildStatus::Ok: return "OK";
    case BuildStatus::NoPages: return "NO_PAGES";
    case BuildStatus::NoDescriptions: return "NO_DESCRIPTIONS";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config file.

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::set<std::string> parse_tag_list(std::string_view value) {
  std::set<std::string> tags;
  std::size_t start = 0;
  std::string v(value);
  v.push_back(',');
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != ',') continue;
    std::string_view item = trim(std::string_view(v).substr(start, i - start));
    if (!item.empty()) tags.insert(to_upper(item));
    start = i + 1;
  }
  return tags;
}

bool parse_bool(std::string_view value, const std::string& key) {
  std::string v = to_lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" +
                    std::string(value) + "'");
}

template <typename T>
T parse_number(std::string_view value, const std::string& key) {
  std::istringstream in{std::string(value)};
  T out;
  if (!(in >> out) || !(in >> std::ws).eof())
    throw ConfigError("config key '" + key + "': bad numeric value '" +
                      std::string(value) + "'");
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& content,
                            const std::string& origin) {
  PipelineConfig cfg;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ":" + std::to_string(ln + 1) +
                        ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));

    if (key == "source.kind") cfg.source.kind = parse_source_kind(value);
    else if (key == "source.location") cfg.source.location = value;
    else if (key == "source.max_pages")
      cfg.source.max_pages = parse_number<std::size_t>(value, key);
    else if (key == "source.rate_limit")
      cfg.source.rate_limit = parse_number<double>(value, key);
    else if (key == "source.timeout")
      cfg.source.timeout = std::chrono::milliseconds(
          static_cast<long>(parse_number<double>(value, key) * 1000.0));
    else if (key == "source.user_agent") cfg.source.user_agent = value;
    else if (key == "pattern_file") cfg.pattern_file = value;
    else if (key == "model_file") cfg.model_file = value;
    else if (key == "stopword_file") cfg.stopword_file = value;
    else if (key == "db_path") cfg.db_path = value;
    else if (key == "filter.threshold")
      cfg.filter.threshold = parse_number<double>(value, key);
    else if (key == "extraction.window_n")
      cfg.extraction.window_n = parse_number<int>(value, key);
    else if (key == "extraction.retained_tags")
      cfg.extraction.retained_tags = parse_tag_list(value);
    else if (key == "extraction.heading_tags")
      cfg.extraction.heading_tags = parse_tag_list(value);
    else if (key == "extraction.cross_page_anchors")
      cfg.extraction.cross_page_anchors = parse_bool(value, key);
    else if (key == "extraction.max_fragment_chars")
      cfg.extraction.max_fragment_chars = parse_number<std::size_t>(value, key);
    else if (key == "k_clusters") cfg.k_clusters = parse_number<int>(value, key);
    else if (key == "workers") cfg.workers = parse_number<int>(value, key);
    else if (key == "min_token_len")
      cfg.min_token_len = parse_number<std::size_t>(value, key);
    else
      throw ConfigError(origin + ":" + std::to_string(ln + 1) +
                        ": unknown config key '" + key + "'");
  }
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Pipeline.

namespace {

void validate_config(const PipelineConfig& cfg) {
  if (cfg.k_clusters < 1) throw ConfigError("k_clusters must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.source.max_pages < 1) throw ConfigError("max_pages must be >= 1");
  if (cfg.pattern_file.empty()) throw ConfigError("pattern_file is required");
  if (cfg.model_file.empty()) throw ConfigError("model_file is required");
  for (const std::string* p : {&cfg.pattern_file, &cfg.model_file}) {
    if (!fs::exists(*p)) throw ConfigError("file does not exist: " + *p);
  }
  if (!cfg.stopword_file.empty() && !fs::exists(cfg.stopword_file))
    throw ConfigError("file does not exist: " + cfg.stopword_file);
  if (cfg.source.kind != SourceKind::Fetcher &&
      !fs::exists(cfg.source.location))
    throw ConfigError("source location does not exist: " + cfg.source.location);
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  validate_config(cfg_);
  model_ = std::make_shared<const NgramModel>(NgramModel::load(cfg_.model_file));
  auto parsed = parse_pattern_file(read_text_file(cfg_.pattern_file));
  matchers_ = compile_patterns(parsed.patterns);
  if (!cfg_.stopword_file.empty())
    stopwords_ = load_stopwords(read_text_file(cfg_.stopword_file));
  if (cfg_.extraction.cross_page_anchors && !cfg_.extraction.fetch_page) {
    auto fetcher = std::make_shared<Fetcher>(
        cfg_.source.rate_limit, cfg_.source.timeout, cfg_.source.user_agent);
    cfg_.extraction.fetch_page =
        [fetcher](const std::string& url) { return fetcher->fetch(url); };
  }
}

std::vector<DescriptionRecord> records_from_candidates(
    const std::vector<Candidate>& kept, const std::set<std::string>& stopwords,
    std::size_t min_token_len, int k_clusters, Report* rep) {
  std::vector<Candidate> clusterable;
  std::vector<FeatureVector> vectors;
  for (const auto& cand : kept) {
    auto fv = vectorize(cand, stopwords, min_token_len);
    if (!fv) {
      report(rep, cand.url + ": description has no content tokens, dropped");
      continue;
    }
    clusterable.push_back(cand);
    vectors.push_back(std::move(*fv));
  }
  if (clusterable.empty()) return {};

  auto dendrogram = agglomerate(vectors);
  auto clusters = cut_and_represent(dendrogram, vectors, k_clusters);

  std::vector<int> cluster_of(clusterable.size(), 0);
  std::vector<bool> is_rep(clusterable.size(), false);
  for (std::size_t cid = 0; cid < clusters.size(); ++cid) {
    for (int member : clusters[cid].member_ids)
      cluster_of[static_cast<std::size_t>(member)] = static_cast<int>(cid);
    is_rep[static_cast<std::size_t>(clusters[cid].representative_id)] = true;
  }

  std::string stamp = current_timestamp();
  std::vector<DescriptionRecord> records;
  records.reserve(clusterable.size());
  for (std::size_t i = 0; i < clusterable.size(); ++i) {
    const Candidate& c = clusterable[i];
    DescriptionRecord r;
    r.term = c.term;
    r.text = c.text;
    r.url = c.url;
    r.method = c.method;
    r.trigger = c.trigger;
    r.perplexity = c.perplexity.value_or(0.0);
    r.cluster_id = cluster_of[i];
    r.representative = is_rep[i];
    r.indexed_at = stamp;
    records.push_back(std::move(r));
  }
  return records;
}

BuildResult Pipeline::build_term(const std::string& term) const {
  BuildResult result;
  auto pages = load_source(cfg_.source, term, &result.report);
  if (pages.empty()) {
    result.status = BuildStatus::NoPages;
    return result;
  }

  std::vector<Candidate> candidates;
  for (const auto& page : pages) {
    NormalizedDoc doc = normalize(page, cfg_.extraction.retained_tags);
    auto found = extract_all(doc, term, matchers_, cfg_.extraction,
                             &result.report);
    std::move(found.begin(), found.end(), std::back_inserter(candidates));
  }
  // Candidate order must not depend on page processing order.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.url != b.url) return a.url < b.url;
                     return a.span_begin < b.span_begin;
                   });

  auto kept = filter_candidates(candidates, *model_, cfg_.filter);
  result.records = records_from_candidates(kept, stopwords_, cfg_.min_token_len,
                                           cfg_.k_clusters, &result.report);
  if (result.records.empty()) result.status = BuildStatus::NoDescriptions;
  return result;
}

BackgroundSummary Pipeline::run_background(
    const std::vector<std::string>& lexicon, Database& db) const {
  if (lexicon.empty()) throw ConfigError("lexicon is empty");

  BackgroundSummary summary;
  summary.terms_processed = lexicon.size();

  std::vector<std::optional<BuildResult>> results(lexicon.size());
  std::vector<std::string> failures(lexicon.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= lexicon.size()) return;
      try {
        results[i] = build_term(lexicon[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg_.workers), lexicon.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  // Commit in lexicon order so the database is byte-stable across runs.
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    if (!results[i]) {
      summary.terms_failed += 1;
      summary.report.add(lexicon[i] + ": failed: " + failures[i]);
      continue;
    }
    BuildResult& r = *results[i];
    for (auto& note : r.report.notes)
      summary.report.add(lexicon[i] + ": " + note);
    if (r.status != BuildStatus::NoPages) summary.terms_with_pages += 1;
    if (!r.records.empty()) {
      summary.terms_with_descriptions += 1;
      db.index_records(r.records, &summary.report);
    } else {
      summary.report.add(lexicon[i] + ": " +
                         std::string(build_status_name(r.status)));
    }
  }
  return summary;
}

std::vector<DescriptionRecord> Pipeline::query(const std::string& term,
                                               Database& db, bool allow_dynamic,
                                               Report* rep) const {
  auto hits = db.lookup(term, /*representatives_only=*/true);
  if (!hits.empty() || !allow_dynamic) return hits;
  try {
    BuildResult result = build_term(term);
    if (rep)
      for (auto& note : result.report.notes) rep->add(note);
    if (result.records.empty()) {
      report(rep, term + ": " + std::string(build_status_name(result.status)));
      return {};
    }
    db.index_records(result.records, rep);
    return db.lookup(term, /*representatives_only=*/true);
  } catch (const std::exception& e) {
    report(rep, term + ": dynamic extraction failed: " + e.what());
    return {};
  }
}

// ---------------------------------------------------------------------------
// Evaluation.

Judgments parse_judgments(const std::string& content,
                          const std::string& origin) {
  Judgments out;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (fields.size() < 4) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.emplace_back(line.substr(start));
        break;
      }
      fields.emplace_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 4)
      throw FormatError(origin + ":" + std::to_string(ln + 1) +
                        ": expected term<TAB>url<TAB>sha256<TAB>{1|0}");
    std::string verdict(trim(fields[3]));
    if (verdict != "0" && verdict != "1")
      throw FormatError(origin + ":" + std::to_string(ln + 1) +
                        ": judgment must be 0 or 1, got '" + verdict + "'");
    std::string hash = to_lower(trim(fields[2]));
    if (hash.size() != 64 ||
        hash.find_first_not_of("0123456789abcdef") != std::string::npos)
      throw FormatError(origin + ":" + std::to_string(ln + 1) +
                        ": bad sha256 hex digest");
    JudgmentKey key{to_lower(trim(fields[0])), std::string(trim(fields[1])),
                    hash};
    out[key] = verdict == "1";
  }
  return out;
}

PageCounts parse_page_counts(const std::string& content,
                             const std::string& origin) {
  PageCounts out;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError(origin + ":" + std::to_string(ln + 1) +
                        ": expected term<TAB>count");
    std::string term = to_lower(trim(line.substr(0, tab)));
    try {
      out[term] = parse_number<std::uint64_t>(trim(line.substr(tab + 1)),
                                              "page count");
    } catch (const ConfigError&) {
      throw FormatError(origin + ":" + std::to_string(ln + 1) +
                        ": bad page count '" +
                        std::string(trim(line.substr(tab + 1))) + "'");
    }
  }
  return out;
}

double percentage(std::uint64_t part, std::uint64_t whole) {
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

EvalReport evaluate(const std::vector<DescriptionRecord>& records,
                    const Judgments& judgments, const PageCounts& page_counts) {
  struct Tally {
    std::string display;
    std::uint64_t pages = 0, correct = 0, total = 0, unjudged = 0;
  };
  std::map<std::string, Tally> rows;

  for (const auto& [term, pages] : page_counts) {
    rows[term].display = term;
    rows[term].pages = pages;
  }
  for (const auto& r : records) {
    std::string folded = to_lower(r.term);
    auto& row = rows[folded];
    if (row.display.empty()) row.display = folded;
    row.total += 1;
    JudgmentKey key{folded, r.url, sha256_hex(r.text)};
    auto it = judgments.find(key);
    if (it == judgments.end()) {
      row.unjudged += 1;  // counts toward total, flagged
    } else if (it->second) {
      row.correct += 1;
    }
  }

  EvalReport report;
  for (auto& [term, tally] : rows) {
    (void)term;
    EvalRow row;
    row.term = tally.display;
    row.pages = tally.pages;
    row.correct = tally.correct;
    row.total = tally.total;
    row.unjudged = tally.unjudged;
    if (row.total > 0) row.accuracy = percentage(row.correct, row.total);
    report.per_term.push_back(std::move(row));
    report.total_correct += tally.correct;
    report.total_extracted += tally.total;
    report.total_unjudged += tally.unjudged;
    if (tally.pages > 0) {
      report.terms_with_pages += 1;
      if (tally.total > 0) report.terms_with_descriptions += 1;
    }
  }
  if (report.total_extracted > 0)
    report.total_accuracy =
        percentage(report.total_correct, report.total_extracted);
  if (report.terms_with_pages > 0)
    report.coverage =
        percentage(report.terms_with_descriptions, report.terms_with_pages);
  return report;
}

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  auto pct = [](const std::optional<double>& v) -> std::string {
    if (!v) return "—";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", *v);
    return buf;
  };
  out << "term\tpages\t#C\t#T\tA\n";
  for (const auto& row : report.per_term) {
    out << row.term << "\t" << row.pages << "\t" << row.correct << "\t"
        << row.total << "\t" << pct(row.accuracy);
    if (row.unjudged > 0) out << "\t(" << row.unjudged << " unjudged)";
    out << "\n";
  }
  out << "total\t-\t" << report.total_correct << "\t" << report.total_extracted
      << "\t" << pct(report.total_accuracy) << "\n";
  if (report.total_unjudged > 0)
    out << "unjudged descriptions: " << report.total_unjudged << "\n";
  out << "coverage: " << report.terms_with_descriptions << "/"
      << report.terms_with_pages << " = " << pct(report.coverage) << "%\n";
  return out.str();
}

}  // namespace termscribe
