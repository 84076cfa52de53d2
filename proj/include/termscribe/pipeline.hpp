#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "termscribe/cluster.hpp"
#include "termscribe/common.hpp"
#include "termscribe/corpus.hpp"
#include "termscribe/extract.hpp"
#include "termscribe/langmodel.hpp"
#include "termscribe/patterns.hpp"
#include "termscribe/store.hpp"

namespace termscribe {

struct PipelineConfig {
  SourceSpec source;
  std::string pattern_file;
  std::string model_file;
  std::string stopword_file;  // optional; empty means no stopwords
  std::string db_path = "descriptions.jsonl";
  FilterConfig filter;
  ExtractionConfig extraction;
  int k_clusters = 3;
  int workers = 1;
  std::size_t min_token_len = 1;
};

// Key-value config file ("key = value", '#' comments). Unknown keys are
// fatal so typos never silently fall back to defaults.
PipelineConfig parse_config(const std::string& content,
                            const std::string& origin);
PipelineConfig load_config_file(const std::string& path);

enum class BuildStatus { Ok, NoPages, NoDescriptions };
std::string_view build_status_name(BuildStatus s);

struct BuildResult {
  BuildStatus status = BuildStatus::Ok;
  std::vector<DescriptionRecord> records;
  Report report;
};

struct BackgroundSummary {
  std::size_t terms_processed = 0;
  std::size_t terms_with_pages = 0;
  std::size_t terms_with_descriptions = 0;
  std::size_t terms_failed = 0;
  Report report;
};

// Loads the model, patterns and stopwords once; build_term is const and safe
// to call from several threads.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  BuildResult build_term(const std::string& term) const;

  // build_term over the whole lexicon; results are committed to the database
  // in lexicon order regardless of worker count.
  BackgroundSummary run_background(const std::vector<std::string>& lexicon,
                                   Database& db) const;

  // Representatives for the term; optionally falls back to a live build.
  std::vector<DescriptionRecord> query(const std::string& term, Database& db,
                                       bool allow_dynamic,
                                       Report* rep = nullptr) const;

  const PipelineConfig& config() const { return cfg_; }
  const NgramModel& model() const { return *model_; }

 private:
  PipelineConfig cfg_;
  std::shared_ptr<const NgramModel> model_;
  std::vector<CompiledMatcher> matchers_;
  std::set<std::string> stopwords_;
};

// Converts filtered candidates into records: clusters, marks representatives
// and stamps the index time. Exposed for tests and the dynamic query path.
std::vector<DescriptionRecord> records_from_candidates(
    const std::vector<Candidate>& kept, const std::set<std::string>& stopwords,
    std::size_t min_token_len, int k_clusters, Report* rep);

// --------------------------------------------------------------------------
// Evaluation harness.

struct JudgmentKey {
  std::string term;       // folded
  std::string url;
  std::string text_hash;  // sha256 hex of the description text

  auto operator<=>(const JudgmentKey&) const = default;
};

using Judgments = std::map<JudgmentKey, bool>;
using PageCounts = std::map<std::string, std::uint64_t>;  // folded term -> pages

// "term<TAB>url<TAB>sha256<TAB>{1|0}"; malformed lines are fatal.
Judgments parse_judgments(const std::string& content, const std::string& origin);
// "term<TAB>count"
PageCounts parse_page_counts(const std::string& content,
                             const std::string& origin);

struct EvalRow {
  std::string term;
  std::uint64_t pages = 0;
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  std::uint64_t unjudged = 0;
  std::optional<double> accuracy;  // percent; unset when total == 0
};

struct EvalReport {
  std::vector<EvalRow> per_term;  // ordered by term
  std::uint64_t total_correct = 0;
  std::uint64_t total_extracted = 0;
  std::uint64_t total_unjudged = 0;
  std::optional<double> total_accuracy;
  std::uint64_t terms_with_pages = 0;
  std::uint64_t terms_with_descriptions = 0;
  std::optional<double> coverage;  // percent
};

double percentage(std::uint64_t part, std::uint64_t whole);

EvalReport evaluate(const std::vector<DescriptionRecord>& records,
                    const Judgments& judgments, const PageCounts& page_counts);

std::string render_report(const EvalReport& report);

}  // namespace termscribe
