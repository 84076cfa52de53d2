#include "termscribe/extract.hpp"

#include <algorithm>
#include <iterator>

namespace termscribe {

std::string_view method_name(Method m) {
  return m == Method::NLP ? "NLP" : "HTML";
}

Method parse_method(std::string_view s) {
  if (s == "NLP") return Method::NLP;
  if (s == "HTML") return Method::HTML;
  throw FormatError("unknown extraction method '" + std::string(s) + "'");
}

namespace {

struct Region {
  std::size_t begin = 0;
  std::size_t end = 0;
};

void validate(const ExtractionConfig& cfg) {
  if (cfg.window_n < 1 || cfg.window_n % 2 == 0)
    throw ConfigError("window_n must be a positive odd integer");
  if (cfg.max_fragment_chars < 1)
    throw ConfigError("max_fragment_chars must be >= 1");
}

// Content region of a span; an unclosed tag runs to the end of the text
// (<P> is already closed at the next <P> open token by the normalizer).
Region content_region(const NormalizedDoc& doc, const TagSpan& span) {
  return Region{span.open_end,
                span.closed() ? *span.close_begin : doc.text.size()};
}

std::string inner_text(const NormalizedDoc& doc, const TagSpan& span) {
  Region r = content_region(doc, span);
  return std::string(trim(strip_tag_tokens(
      std::string_view(doc.text).substr(r.begin, r.end - r.begin))));
}

// Innermost span of `name` whose content region contains [begin, end).
const TagSpan* innermost_enclosing(const NormalizedDoc& doc,
                                   std::string_view name, std::size_t begin,
                                   std::size_t end) {
  const TagSpan* best = nullptr;
  std::size_t best_begin = 0;
  for (const auto& span : doc.tag_spans) {
    if (span.name != name) continue;
    Region r = content_region(doc, span);
    if (r.begin <= begin && end <= r.end) {
      if (!best || r.begin >= best_begin) {
        best = &span;
        best_begin = r.begin;
      }
    }
  }
  return best;
}

// The span whose open token is the next thing after `pos`, skipping spaces
// and other tag tokens but stopping at any text character.
const TagSpan* immediately_following(const NormalizedDoc& doc,
                                     std::string_view name, std::size_t pos) {
  const std::string& text = doc.text;
  std::string open_token = "<" + std::string(name) + ">";
  std::size_t i = pos;
  while (i < text.size()) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t len = tag_token_length(text, i);
    if (len == 0) return nullptr;  // ordinary text stops the scan
    if (text.compare(i, len, open_token) == 0) {
      for (const auto& span : doc.tag_spans)
        if (span.open_begin == i) return &span;
      return nullptr;
    }
    i += len;
  }
  return nullptr;
}

// Builds a candidate from a raw text region: trims spaces, clips the span so
// the tag-stripped text stays within max_fragment_chars, strips tag tokens.
std::optional<Candidate> make_candidate(const NormalizedDoc& doc,
                                        const std::string& term, Method method,
                                        std::string_view trigger, Region region,
                                        const ExtractionConfig& cfg) {
  const std::string& text = doc.text;
  std::size_t a = std::min(region.begin, text.size());
  std::size_t b = std::min(region.end, text.size());
  while (a < b && text[a] == ' ') ++a;
  while (b > a && text[b - 1] == ' ') --b;

  // Clip: walk the region counting kept (non-token) bytes, stopping at the
  // budget without splitting a UTF-8 sequence.
  std::string stripped;
  std::vector<std::size_t> map;
  stripped = strip_tag_tokens(std::string_view(text).substr(a, b - a), &map);
  if (stripped.size() > cfg.max_fragment_chars) {
    std::size_t keep = cfg.max_fragment_chars;
    while (keep > 0 &&
           (static_cast<unsigned char>(stripped[keep]) & 0xC0) == 0x80)
      --keep;
    b = a + map[keep];  // end before the first dropped byte
    stripped.resize(keep);
  }
  while (b > a && text[b - 1] == ' ') --b;
  while (!stripped.empty() && stripped.back() == ' ') stripped.pop_back();

  if (trim(stripped).empty()) return std::nullopt;

  Candidate c;
  c.term = term;
  c.text = std::move(stripped);
  c.url = doc.url;
  c.method = method;
  c.trigger = std::string(trigger);
  c.span_begin = a;
  c.span_end = b;
  return c;
}

// Rule cascade for a position: enclosing-or-following <P>, else <UL>, else a
// window of sentences starting at the sentence containing `pos`.
std::optional<Region> cascade_at(const NormalizedDoc& doc,
                                 const std::vector<Sentence>& sentences,
                                 std::size_t pos, const ExtractionConfig& cfg) {
  for (std::string_view name : {"P", "UL"}) {
    if (const TagSpan* s = innermost_enclosing(doc, name, pos, pos))
      return content_region(doc, *s);
    if (const TagSpan* s = immediately_following(doc, name, pos))
      return content_region(doc, *s);
  }
  std::size_t j = sentences.size();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].end > pos) {
      j = i;
      break;
    }
  }
  if (j == sentences.size()) return std::nullopt;
  std::size_t last = std::min(sentences.size(),
                              j + static_cast<std::size_t>(cfg.window_n));
  // Only what follows pos belongs to the fragment, so a sentence containing
  // the heading contributes its remainder.
  return Region{std::max(pos, sentences[j].start), sentences[last - 1].end};
}

// Window of window_n sentences with the matched sentence as near center as
// possible; shifts at document edges, shrinks only when the document is
// shorter than the window.
Region centered_window(const std::vector<Sentence>& sentences,
                       std::size_t match_index, int window_n) {
  std::size_t n = sentences.size();
  std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(window_n));
  std::size_t half = w / 2;
  std::size_t start = match_index > half ? match_index - half : 0;
  start = std::min(start, n - w);
  return Region{sentences[start].start, sentences[start + w - 1].end};
}

bool spans_overlap_majority(const Candidate& a, const Candidate& b) {
  if (a.url != b.url) return false;
  std::size_t lo = std::max(a.span_begin, b.span_begin);
  std::size_t hi = std::min(a.span_end, b.span_end);
  if (hi <= lo) return false;
  std::size_t overlap = hi - lo;
  std::size_t shorter =
      std::min(a.span_end - a.span_begin, b.span_end - b.span_begin);
  return overlap * 2 > shorter;
}

}  // namespace

std::vector<Candidate> extract_nlp(const NormalizedDoc& doc,
                                   const std::string& term,
                                   const std::vector<CompiledMatcher>& matchers,
                                   const ExtractionConfig& cfg, Report* rep) {
  validate(cfg);
  (void)rep;
  auto sentences = segment_sentences(doc, cfg.terminators);
  std::vector<Candidate> out;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    auto matches = match_term(sentences[si], si, term, matchers);
    if (matches.empty()) continue;
    const PatternMatch& first = matches.front();

    Region region;
    if (const TagSpan* p = innermost_enclosing(doc, "P", sentences[si].start,
                                               sentences[si].end)) {
      region = content_region(doc, *p);
    } else if (const TagSpan* ul = innermost_enclosing(
                   doc, "UL", sentences[si].start, sentences[si].end)) {
      region = content_region(doc, *ul);
    } else {
      region = centered_window(sentences, si, cfg.window_n);
    }

    auto cand = make_candidate(doc, term, Method::NLP, first.pattern_id,
                               region, cfg);
    if (!cand) continue;
    bool duplicate = false;
    for (const auto& prev : out) {
      if (prev.span_begin == cand->span_begin &&
          prev.span_end == cand->span_end) {
        duplicate = true;  // first trigger kept
        break;
      }
    }
    if (!duplicate) out.push_back(std::move(*cand));
  }
  return out;
}

std::vector<Candidate> extract_html(const NormalizedDoc& doc,
                                    const std::string& term,
                                    const ExtractionConfig& cfg, Report* rep) {
  validate(cfg);
  auto sentences = segment_sentences(doc, cfg.terminators);
  std::string fterm = to_lower(std::string(trim(term)));
  std::vector<Candidate> out;

  auto push_unique = [&](std::optional<Candidate> cand) {
    if (!cand) return;
    for (const auto& prev : out) {
      if (prev.url == cand->url && prev.span_begin == cand->span_begin &&
          prev.span_end == cand->span_end)
        return;
    }
    out.push_back(std::move(*cand));
  };

  for (std::size_t idx = 0; idx < doc.tag_spans.size(); ++idx) {
    const TagSpan& span = doc.tag_spans[idx];

    if (span.name == "DT" && to_lower(inner_text(doc, span)) == fterm) {
      // <DT>term</DT> takes the next <DD> body when one exists.
      const TagSpan* dd = nullptr;
      for (std::size_t j = idx + 1; j < doc.tag_spans.size(); ++j) {
        if (doc.tag_spans[j].name == "DD") {
          dd = &doc.tag_spans[j];
          break;
        }
      }
      if (dd) {
        push_unique(make_candidate(doc, term, Method::HTML, kTriggerDtdd,
                                   content_region(doc, *dd), cfg));
        continue;
      }
      // fall through to the heading rule when no <DD> follows
    }

    if (cfg.heading_tags.count(span.name) && span.closed() &&
        to_lower(inner_text(doc, span)) == fterm) {
      if (auto region = cascade_at(doc, sentences, *span.close_end, cfg))
        push_unique(make_candidate(doc, term, Method::HTML, kTriggerHeading,
                                   *region, cfg));
      continue;
    }

    if (span.name == "A" && !span.href.empty() &&
        to_lower(inner_text(doc, span)) == fterm) {
      const std::string& href = span.href;
      if (href.front() == '#') {
        auto it = doc.anchors.find(href.substr(1));
        if (it == doc.anchors.end()) {
          report(rep, doc.url + ": dangling anchor '" + href + "', skipped");
          continue;
        }
        if (auto region = cascade_at(doc, sentences, it->second, cfg))
          push_unique(make_candidate(doc, term, Method::HTML, kTriggerAnchor,
                                     *region, cfg));
        continue;
      }
      if (!cfg.cross_page_anchors) continue;
      if (!cfg.fetch_page) {
        report(rep, doc.url + ": cross-page anchors enabled but no fetcher "
                             "wired, skipped");
        continue;
      }
      std::string target_url = href;
      std::string fragment;
      if (std::size_t hash = href.find('#'); hash != std::string::npos) {
        target_url = href.substr(0, hash);
        fragment = href.substr(hash + 1);
      }
      auto page = cfg.fetch_page(target_url);
      if (!page) {
        report(rep, doc.url + ": cross-page fetch failed for '" + target_url +
                        "', skipped");
        continue;
      }
      NormalizedDoc other = normalize(*page, cfg.retained_tags);
      auto other_sentences = segment_sentences(other, cfg.terminators);
      std::size_t pos = 0;
      if (!fragment.empty()) {
        auto it = other.anchors.find(fragment);
        if (it == other.anchors.end()) {
          report(rep, target_url + ": dangling anchor '#" + fragment +
                          "', extracting from document start");
        } else {
          pos = it->second;
        }
      }
      if (auto region = cascade_at(other, other_sentences, pos, cfg))
        push_unique(make_candidate(other, term, Method::HTML, kTriggerAnchor,
                                   *region, cfg));
    }
  }
  return out;
}

std::vector<Candidate> extract_all(const NormalizedDoc& doc,
                                   const std::string& term,
                                   const std::vector<CompiledMatcher>& matchers,
                                   const ExtractionConfig& cfg, Report* rep) {
  std::vector<Candidate> combined = extract_nlp(doc, term, matchers, cfg, rep);
  auto html = extract_html(doc, term, cfg, rep);
  std::move(html.begin(), html.end(), std::back_inserter(combined));

  // NLP candidates come first, so they win overlap ties against HTML ones;
  // within one method the earlier candidate wins.
  std::vector<Candidate> merged;
  for (auto& cand : combined) {
    bool drop = false;
    for (const auto& kept : merged) {
      if (spans_overlap_majority(kept, cand)) {
        drop = true;
        break;
      }
    }
    if (!drop) merged.push_back(std::move(cand));
  }
  std::sort(merged.begin(), merged.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.span_begin != b.span_begin) return a.span_begin < b.span_begin;
              if (a.url != b.url) return a.url < b.url;
              return a.method == Method::NLP && b.method == Method::HTML;
            });
  return merged;
}

}  // namespace termscribe
