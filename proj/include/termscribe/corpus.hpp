#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "termscribe/common.hpp"

namespace termscribe {

struct RawPage {
  std::string url;
  std::string content;  // decoded to UTF-8 at load time
  std::chrono::system_clock::time_point retrieved_at{};
};

enum class SourceKind { CorpusDir, UrlList, Fetcher };

SourceKind parse_source_kind(std::string_view s);  // throws ConfigError
std::string_view source_kind_name(SourceKind k);

struct SourceSpec {
  SourceKind kind = SourceKind::CorpusDir;
  std::string location;
  std::size_t max_pages = 1000;
  double rate_limit = 1.0;  // requests per second (fetcher / url-list)
  std::chrono::milliseconds timeout{10000};
  std::string user_agent = "termscribe/1.0";
};

// One retained tag occurrence in NormalizedDoc.text. Offsets index the
// canonical tokens ("<P>", "</P>", ...) in the normalized text; the content
// region is [open_end, close_begin). A tag that never closes has no close
// offsets, except <P>, which is closed at the next <P> open token when its
// </P> is missing.
struct TagSpan {
  std::string name;  // upper-case: P, UL, LI, H1..H6, B, DT, DD, A
  std::size_t open_begin = 0;
  std::size_t open_end = 0;
  std::optional<std::size_t> close_begin;
  std::optional<std::size_t> close_end;
  std::string href;  // A tags only; empty otherwise

  bool closed() const { return close_begin.has_value(); }
};

struct NormalizedDoc {
  std::string url;
  std::string text;
  std::vector<TagSpan> tag_spans;            // in open-token order
  std::map<std::string, std::size_t> anchors;  // A name/id -> target offset
};

struct Sentence {
  std::string text;
  std::size_t start = 0;  // offsets into the parent NormalizedDoc.text
  std::size_t end = 0;
};

const std::set<std::string>& default_retained_tags();
const std::vector<std::string>& default_terminators();  // ".", "!", "?", "。"

std::vector<RawPage> load_source(const SourceSpec& spec,
                                 const std::optional<std::string>& term,
                                 Report* rep = nullptr);

NormalizedDoc normalize(const RawPage& page,
                        const std::set<std::string>& retained_tags =
                            default_retained_tags());

std::vector<Sentence> segment_sentences(
    const NormalizedDoc& doc,
    const std::vector<std::string>& terminators = default_terminators());

// Plain-text flavor used where no markup exists (pattern mining input).
std::vector<std::pair<std::size_t, std::size_t>> split_sentences_plain(
    std::string_view text,
    const std::vector<std::string>& terminators = default_terminators());

// Removes canonical tag tokens (the only '<'-lexable material normalize can
// emit). `out_map`, when given, receives the source offset of every kept byte.
std::string strip_tag_tokens(std::string_view text,
                             std::vector<std::size_t>* out_map = nullptr);

// Length of the canonical tag token starting at `pos`, or 0 when the byte is
// ordinary text.
std::size_t tag_token_length(std::string_view text, std::size_t pos);

// Best-effort conversion of raw page bytes to UTF-8, honoring a declared
// charset (meta tag or caller hint) and falling back to lossy UTF-8.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint,
                           Report* rep, std::string_view origin);

}  // namespace termscribe
