#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "termscribe/common.hpp"
#include "termscribe/corpus.hpp"
#include "termscribe/patterns.hpp"

namespace termscribe {

enum class Method { NLP, HTML };

std::string_view method_name(Method m);
Method parse_method(std::string_view s);  // throws FormatError

// HTML-method trigger names; NLP candidates carry the pattern id instead.
inline constexpr std::string_view kTriggerHeading = "HEADING";
inline constexpr std::string_view kTriggerAnchor = "ANCHOR";
inline constexpr std::string_view kTriggerDtdd = "DTDD";

struct Candidate {
  std::string term;
  std::string text;  // tag tokens stripped
  std::string url;
  Method method = Method::NLP;
  std::string trigger;
  std::size_t span_begin = 0;  // offsets into the source NormalizedDoc.text
  std::size_t span_end = 0;
  std::optional<double> perplexity;
};

struct ExtractionConfig {
  int window_n = 3;  // odd; sentence window for rule (3)
  std::set<std::string> retained_tags = default_retained_tags();
  std::set<std::string> heading_tags = {"H1", "H2", "H3", "H4",
                                        "H5", "H6", "B",  "DT"};
  bool cross_page_anchors = false;
  std::size_t max_fragment_chars = 2000;
  std::vector<std::string> terminators = default_terminators();
  // One-hop page fetch used only when cross_page_anchors is set.
  std::function<std::optional<RawPage>(const std::string& url)> fetch_page;
};

// Pattern-triggered extraction: each matched sentence yields one candidate,
// expanded to the enclosing <P>, else <UL>, else a window_n sentence window
// centered on the match.
std::vector<Candidate> extract_nlp(const NormalizedDoc& doc,
                                   const std::string& term,
                                   const std::vector<CompiledMatcher>& matchers,
                                   const ExtractionConfig& cfg,
                                   Report* rep = nullptr);

// Structure-triggered extraction: headings equal to the term, <DT>/<DD>
// definition lists and anchors named by the term.
std::vector<Candidate> extract_html(const NormalizedDoc& doc,
                                    const std::string& term,
                                    const ExtractionConfig& cfg,
                                    Report* rep = nullptr);

// Union of both methods with >50% span-overlap dedup (NLP wins), ordered by
// span start.
std::vector<Candidate> extract_all(const NormalizedDoc& doc,
                                   const std::string& term,
                                   const std::vector<CompiledMatcher>& matchers,
                                   const ExtractionConfig& cfg,
                                   Report* rep = nullptr);

}  // namespace termscribe
