// termscribe: build and query a database of term descriptions extracted from
// HTML page collections.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "termscribe/pipeline.hpp"

namespace {

using namespace termscribe;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lexicon(const std::string& path) {
  std::vector<std::string> terms;
  for (const auto& raw : split_lines(slurp(path))) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    terms.emplace_back(line);
  }
  return terms;
}

void print_report(const Report& rep) {
  for (const auto& note : rep.notes) std::cerr << "note: " << note << "\n";
}

// Config-file keys plus per-flag overrides shared by build and query.
struct ConfigCli {
  std::string config_path;
  std::string source_kind, source_location, pattern_file, model_file,
      stopword_file, db_path, heading_tags;
  std::size_t max_pages = 0, max_fragment_chars = 0, min_token_len = 0;
  double rate_limit = -1.0, timeout_s = -1.0, threshold = -1.0;
  int window_n = 0, k_clusters = 0, workers = 0;
  bool cross_page_anchors = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key-value config file");
    cmd->add_option("--source-kind", source_kind,
                    "corpus-dir | url-list | fetcher");
    cmd->add_option("--source-location", source_location,
                    "directory, url list file or url template");
    cmd->add_option("--max-pages", max_pages, "page cap per term");
    cmd->add_option("--rate-limit", rate_limit, "requests per second");
    cmd->add_option("--timeout", timeout_s, "fetch timeout in seconds");
    cmd->add_option("--pattern-file", pattern_file, "description patterns");
    cmd->add_option("--model-file", model_file, "trained language model");
    cmd->add_option("--stopword-file", stopword_file, "stopword list");
    cmd->add_option("--db", db_path, "description database file");
    cmd->add_option("--threshold", threshold, "perplexity cutoff");
    cmd->add_option("--window-n", window_n, "sentence window size (odd)");
    cmd->add_option("--heading-tags", heading_tags,
                    "comma-separated heading tag names");
    cmd->add_flag("--cross-page-anchors", cross_page_anchors,
                  "follow anchors one hop to other pages");
    cmd->add_option("--max-fragment-chars", max_fragment_chars,
                    "candidate length cap");
    cmd->add_option("--k-clusters", k_clusters, "clusters per term");
    cmd->add_option("--workers", workers, "parallel term workers");
    cmd->add_option("--min-token-len", min_token_len,
                    "shortest token kept in feature vectors");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (!source_kind.empty()) cfg.source.kind = parse_source_kind(source_kind);
    if (!source_location.empty()) cfg.source.location = source_location;
    if (max_pages) cfg.source.max_pages = max_pages;
    if (rate_limit >= 0) cfg.source.rate_limit = rate_limit;
    if (timeout_s >= 0)
      cfg.source.timeout =
          std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));
    if (!pattern_file.empty()) cfg.pattern_file = pattern_file;
    if (!model_file.empty()) cfg.model_file = model_file;
    if (!stopword_file.empty()) cfg.stopword_file = stopword_file;
    if (!db_path.empty()) cfg.db_path = db_path;
    if (threshold >= 0) cfg.filter.threshold = threshold;
    if (window_n) cfg.extraction.window_n = window_n;
    if (!heading_tags.empty()) {
      cfg.extraction.heading_tags.clear();
      std::istringstream in(heading_tags);
      std::string tag;
      while (std::getline(in, tag, ','))
        if (!trim(tag).empty())
          cfg.extraction.heading_tags.insert(to_upper(trim(tag)));
    }
    if (cross_page_anchors) cfg.extraction.cross_page_anchors = true;
    if (max_fragment_chars) cfg.extraction.max_fragment_chars = max_fragment_chars;
    if (k_clusters) cfg.k_clusters = k_clusters;
    if (workers) cfg.workers = workers;
    if (min_token_len) cfg.min_token_len = min_token_len;
    return cfg;
  }
};

int cmd_mine_patterns(const std::string& entries_path,
                      const std::string& lexicon_path, std::size_t top_k,
                      const std::string& out_path) {
  std::vector<std::pair<std::string, std::string>> entries;
  auto lines = split_lines(slurp(entries_path));
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError(entries_path + ":" + std::to_string(ln + 1) +
                        ": expected headword<TAB>description");
    entries.emplace_back(std::string(trim(line.substr(0, tab))),
                         std::string(line.substr(tab + 1)));
  }
  std::set<std::string> lexicon;
  for (const auto& term : read_lexicon(lexicon_path)) lexicon.insert(term);

  auto result = mine_patterns(entries, lexicon, top_k);
  print_report(result.report);
  std::string formatted = format_candidate_file(result.candidates);
  if (out_path.empty()) {
    std::cout << formatted;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path);
    out << formatted;
  }
  std::cerr << result.candidates.size() << " candidate(s)\n";
  return result.report.empty() ? kExitOk : kExitPartial;
}

int cmd_train_lm(const std::string& corpus_path, const std::string& out_path,
                 int cutoff) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& line : split_lines(slurp(corpus_path))) {
    auto tokens = lm_tokenize(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  auto model = NgramModel::train(sentences, NgramModel::kOrder, cutoff);
  model.save(out_path);
  std::cerr << "trained order-" << NgramModel::kOrder << " model on "
            << sentences.size() << " sentence(s), vocabulary "
            << model.vocab_size() << ", written to " << out_path << "\n";
  return kExitOk;
}

int cmd_build(const ConfigCli& cli, const std::string& lexicon_path) {
  PipelineConfig cfg = cli.resolve();
  Pipeline pipeline(cfg);
  auto db = Database::open(cfg.db_path);
  auto lexicon = read_lexicon(lexicon_path);
  auto summary = pipeline.run_background(lexicon, db);
  print_report(summary.report);
  std::cout << "terms processed:         " << summary.terms_processed << "\n"
            << "terms with pages:        " << summary.terms_with_pages << "\n"
            << "terms with descriptions: " << summary.terms_with_descriptions
            << "\n"
            << "terms failed:            " << summary.terms_failed << "\n"
            << "database: " << cfg.db_path << "\n";
  return summary.terms_failed == 0 ? kExitOk : kExitPartial;
}

int cmd_query(const ConfigCli& cli, const std::string& term, bool dynamic,
              bool all) {
  PipelineConfig cfg = cli.resolve();
  auto db = Database::open(cfg.db_path);
  Report rep;
  std::vector<DescriptionRecord> records;
  if (all) {
    records = db.lookup(term, /*representatives_only=*/false);
    if (records.empty() && dynamic) {
      Pipeline pipeline(cfg);
      pipeline.query(term, db, true, &rep);
      records = db.lookup(term, false);
    }
  } else if (dynamic) {
    Pipeline pipeline(cfg);
    records = pipeline.query(term, db, true, &rep);
  } else {
    records = db.lookup(term, /*representatives_only=*/true);
  }
  print_report(rep);
  if (records.empty()) {
    std::cout << "no descriptions for '" << term << "'\n";
    return kExitPartial;
  }
  std::cout << term << ": " << records.size() << " description(s)\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::cout << "\n[" << i + 1 << "] " << r.url << "\n    (cluster "
              << r.cluster_id << (r.representative ? ", representative" : "")
              << ", perplexity " << r.perplexity << ", "
              << method_name(r.method) << "/" << r.trigger << ")\n    "
              << r.text << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& db_path, const std::string& judgments_path,
             const std::string& pages_path) {
  auto db = Database::open(db_path);
  auto judgments = parse_judgments(slurp(judgments_path), judgments_path);
  PageCounts pages;
  if (!pages_path.empty())
    pages = parse_page_counts(slurp(pages_path), pages_path);
  EvalReport report = evaluate(db.all_records(), judgments, pages);
  std::cout << render_report(report);
  return kExitOk;
}

int cmd_export(const std::string& db_path) {
  auto db = Database::open(db_path);
  for (const auto& r : db.all_records()) {
    nlohmann::json j{{"term", r.term},
                     {"text", r.text},
                     {"url", r.url},
                     {"method", method_name(r.method)},
                     {"trigger", r.trigger},
                     {"perplexity", r.perplexity},
                     {"cluster_id", r.cluster_id},
                     {"representative", r.representative},
                     {"indexed_at", r.indexed_at}};
    std::cout << j.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"term description extraction pipeline"};
  app.require_subcommand(1);

  auto* mine = app.add_subcommand(
      "mine-patterns", "rank phrase co-occurrences from encyclopedia entries");
  std::string entries_path, lexicon_path, out_path;
  std::size_t top_k = 100;
  mine->add_option("--entries", entries_path,
                   "headword<TAB>description entries")
      ->required();
  mine->add_option("--lexicon", lexicon_path, "terms, one per line")
      ->required();
  mine->add_option("--top-k", top_k, "candidates to keep");
  mine->add_option("--out", out_path, "candidate file (default stdout)");

  auto* train =
      app.add_subcommand("train-lm", "train the trigram language model");
  std::string corpus_path, model_out;
  int cutoff = 1;
  train->add_option("--corpus", corpus_path, "one sentence per line")
      ->required();
  train->add_option("--out", model_out, "model file to write")->required();
  train->add_option("--cutoff", cutoff, "minimum unigram count");

  auto* build = app.add_subcommand(
      "build", "extract and index descriptions for a lexicon");
  ConfigCli build_cli;
  std::string build_lexicon;
  build->add_option("--lexicon", build_lexicon, "terms, one per line")
      ->required();
  build_cli.attach(build);

  auto* query = app.add_subcommand("query", "look up descriptions for a term");
  ConfigCli query_cli;
  std::string query_term;
  bool dynamic = false, all = false;
  query->add_option("term", query_term, "term to look up")->required();
  query->add_flag("--dynamic", dynamic,
                  "extract live when the database has nothing");
  query->add_flag("--all", all, "print every record, not just representatives");
  query_cli.attach(query);

  auto* eval = app.add_subcommand("eval", "score a database against judgments");
  std::string eval_db, judgments_path, pages_path;
  eval->add_option("--db", eval_db, "database file")->required();
  eval->add_option("--judgments", judgments_path,
                   "term<TAB>url<TAB>sha256<TAB>{1|0}")
      ->required();
  eval->add_option("--pages", pages_path, "term<TAB>page-count");

  auto* exp =
      app.add_subcommand("export", "dump database records as JSON lines");
  std::string export_db;
  exp->add_option("--db", export_db, "database file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (mine->parsed())
      return cmd_mine_patterns(entries_path, lexicon_path, top_k, out_path);
    if (train->parsed()) return cmd_train_lm(corpus_path, model_out, cutoff);
    if (build->parsed()) return cmd_build(build_cli, build_lexicon);
    if (query->parsed()) return cmd_query(query_cli, query_term, dynamic, all);
    if (eval->parsed()) return cmd_eval(eval_db, judgments_path, pages_path);
    if (exp->parsed()) return cmd_export(export_db);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
