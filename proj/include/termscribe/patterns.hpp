#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "termscribe/common.hpp"
#include "termscribe/corpus.hpp"

namespace termscribe {

// A two-slot surface template: X binds the query term, Y binds free text.
struct DescriptionPattern {
  std::string id;
  std::string template_text;  // e.g. "X is Y."
  std::string language_tag;   // optional BCP-47-ish tag, e.g. "en", "ja"
  bool enabled = true;
};

struct PatternMatch {
  std::string pattern_id;
  std::size_t sentence_index = 0;
  std::size_t term_begin = 0;  // offsets into the parent document text
  std::size_t term_end = 0;
  std::string y_text;
};

struct PatternCandidate {
  std::string phrase_a;  // the phrase containing the X slot
  std::string phrase_b;
  std::uint64_t count = 0;
};

struct Phrase {
  std::string text;
  std::size_t begin_token = 0;
  std::size_t end_token = 0;  // exclusive
};

// Template compiled to literal segments around the two slots. Matching is
// case-insensitive, whitespace-flexible and never interprets the term or the
// literals as syntax, so metacharacters cannot inject anything.
class CompiledMatcher {
 public:
  static CompiledMatcher compile(const DescriptionPattern& pattern);

  std::optional<PatternMatch> match(const Sentence& sentence,
                                    std::size_t sentence_index,
                                    const std::string& term) const;

  const std::string& pattern_id() const { return id_; }
  bool enabled() const { return enabled_; }

 private:
  CompiledMatcher() = default;

  std::string id_;
  bool enabled_ = true;
  bool x_first_ = true;  // slot order in the template
  bool absorb_determiner_ = true;
  bool boundary_checks_ = true;
  // Literal segments with whitespace runs collapsed to single gap markers.
  std::string before_;   // before the first slot
  std::string between_;  // between the slots (never empty)
  std::string after_;    // after the second slot
};

struct PatternParseResult {
  std::vector<DescriptionPattern> patterns;
  Report report;
};

// Tab-separated "id<TAB>template[<TAB>language_tag]"; '#' comments.
// Throws ConfigError when no valid pattern survives.
PatternParseResult parse_pattern_file(const std::string& content);

std::vector<CompiledMatcher> compile_patterns(
    const std::vector<DescriptionPattern>& patterns);

// All matches across enabled matchers, at most one per matcher, in matcher
// (pattern-file) order.
std::vector<PatternMatch> match_term(const Sentence& sentence,
                                     std::size_t sentence_index,
                                     const std::string& term,
                                     const std::vector<CompiledMatcher>& matchers);

struct ChunkConfig {
  std::set<std::string> function_words;  // lower-case
  std::set<std::string> function_tags = {"DET",   "ADP",  "AUX", "CCONJ",
                                         "SCONJ", "PART", "PRON", "IN",
                                         "CC",    "TO",   "MD",  "DT"};
};

const ChunkConfig& default_chunk_config();

// Groups tokens into phrases: a maximal run of content tokens plus trailing
// function tokens; punctuation always stands alone.
std::vector<Phrase> chunk_phrases(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>* pos_tags,
                                  const ChunkConfig& cfg = default_chunk_config());

// Whitespace split with leading/trailing punctuation peeled into their own
// tokens; case and the X slot marker are preserved.
std::vector<std::string> mining_tokenize(std::string_view text);

struct MiningResult {
  std::vector<PatternCandidate> candidates;
  Report report;
};

// Counts co-sentential (X-phrase, other phrase) pairs over encyclopedia-style
// entries whose headword appears in the lexicon; top_k by count, ties by
// (phrase_a, phrase_b).
MiningResult mine_patterns(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::set<std::string>& lexicon, std::size_t top_k = 100,
    const ChunkConfig& chunk_cfg = default_chunk_config());

std::string format_candidate_file(const std::vector<PatternCandidate>& cands);

}  // namespace termscribe
