#include "termscribe/patterns.hpp"

#include <algorithm>
#include <map>

namespace termscribe {

namespace {

bool ascii_punct(char c) {
  return static_cast<unsigned char>(c) < 0x80 && !ascii_alnum(c) &&
         !ascii_space(c);
}

bool pure_punct(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), ascii_punct);
}

// Languages written without word separators get neither determiner
// absorption nor word-boundary checks.
bool unsegmented_language(std::string_view tag) {
  std::string t = to_lower(tag);
  for (std::string_view p : {"ja", "zh", "th", "ko"})
    if (t.rfind(p, 0) == 0) return true;
  return false;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool space = false;
  for (char c : s) {
    if (ascii_space(c)) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  if (space) out.push_back(' ');  // keep one trailing gap if present
  if (!s.empty() && ascii_space(s.front())) out.insert(out.begin(), ' ');
  return out;
}

// Positions of standalone slot letters (not embedded in a word).
std::vector<std::size_t> slot_positions(std::string_view tpl, char slot) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] != slot) continue;
    bool left_ok = i == 0 || !word_byte(tpl[i - 1]);
    bool right_ok = i + 1 == tpl.size() || !word_byte(tpl[i + 1]);
    if (left_ok && right_ok) hits.push_back(i);
  }
  return hits;
}

// Matches a collapsed, folded literal starting at `pos`; a ' ' in the literal
// consumes one or more spaces. Returns the end position or npos.
std::size_t match_forward(std::string_view fold, std::string_view lit,
                          std::size_t pos) {
  std::size_t p = pos;
  for (char lc : lit) {
    if (lc == ' ') {
      if (p >= fold.size() || fold[p] != ' ') return std::string_view::npos;
      while (p < fold.size() && fold[p] == ' ') ++p;
    } else {
      if (p >= fold.size() || fold[p] != lc) return std::string_view::npos;
      ++p;
    }
  }
  return p;
}

// Matches a literal so that it ends exactly at `end`. Returns the start
// position or npos.
std::size_t match_backward(std::string_view fold, std::string_view lit,
                           std::size_t end) {
  std::size_t p = end;
  for (std::size_t k = lit.size(); k-- > 0;) {
    char lc = lit[k];
    if (lc == ' ') {
      if (p == 0 || fold[p - 1] != ' ') return std::string_view::npos;
      while (p > 0 && fold[p - 1] == ' ') --p;
    } else {
      if (p == 0 || fold[p - 1] != lc) return std::string_view::npos;
      --p;
    }
  }
  return p;
}

}  // namespace

CompiledMatcher CompiledMatcher::compile(const DescriptionPattern& pattern) {
  std::string tpl(trim(pattern.template_text));
  auto xs = slot_positions(tpl, 'X');
  auto ys = slot_positions(tpl, 'Y');
  if (xs.size() != 1 || ys.size() != 1)
    throw ConfigError("pattern '" + pattern.id +
                      "': template must contain exactly one standalone X and "
                      "one standalone Y");

  CompiledMatcher m;
  m.id_ = pattern.id;
  m.enabled_ = pattern.enabled;
  m.x_first_ = xs[0] < ys[0];
  bool segmented = !unsegmented_language(pattern.language_tag);
  m.absorb_determiner_ = segmented;
  m.boundary_checks_ = segmented;

  std::size_t first = std::min(xs[0], ys[0]);
  std::size_t second = std::max(xs[0], ys[0]);
  m.before_ = collapse_ws(to_lower(tpl.substr(0, first)));
  m.between_ = collapse_ws(to_lower(tpl.substr(first + 1, second - first - 1)));
  m.after_ = collapse_ws(to_lower(tpl.substr(second + 1)));

  std::string literal = m.before_ + m.between_ + m.after_;
  if (trim(literal).empty())
    throw ConfigError("pattern '" + pattern.id +
                      "': template has no literal text besides the slots");
  return m;
}

std::optional<PatternMatch> CompiledMatcher::match(
    const Sentence& sentence, std::size_t sentence_index,
    const std::string& term) const {
  std::vector<std::size_t> map;
  std::string stripped = strip_tag_tokens(sentence.text, &map);
  std::string fold = to_lower(stripped);
  std::string fterm = collapse_ws(to_lower(trim(term)));
  if (fterm.empty() || fold.size() < fterm.size()) return std::nullopt;

  auto boundary_ok = [&](std::size_t begin, std::size_t end) {
    if (!boundary_checks_) return true;
    if (word_byte(fterm.front()) && begin > 0 && word_byte(fold[begin - 1]))
      return false;
    if (word_byte(fterm.back()) && end < fold.size() && word_byte(fold[end]))
      return false;
    return true;
  };

  // Finds a determiner immediately before `pos`, returning its start.
  auto determiner_start = [&](std::size_t pos) -> std::optional<std::size_t> {
    if (!absorb_determiner_ || pos == 0 || fold[pos - 1] != ' ')
      return std::nullopt;
    std::size_t word_end = pos;
    while (word_end > 0 && fold[word_end - 1] == ' ') --word_end;
    for (std::string_view det : {"the", "an", "a"}) {
      if (word_end < det.size()) continue;
      std::size_t start = word_end - det.size();
      if (fold.compare(start, det.size(), det) != 0) continue;
      if (start > 0 && word_byte(fold[start - 1])) continue;
      return start;
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] != fterm[0]) continue;
    std::size_t term_end = match_forward(fold, fterm, i);
    if (term_end == std::string::npos) continue;
    if (!boundary_ok(i, term_end)) continue;

    std::vector<std::size_t> region_starts;
    if (auto det = determiner_start(i)) region_starts.push_back(*det);
    region_starts.push_back(i);

    for (std::size_t region_start : region_starts) {
      std::size_t y_begin = 0, y_end = 0;
      bool ok = false;
      if (x_first_) {
        if (!before_.empty() &&
            match_backward(fold, before_, region_start) == std::string::npos)
          continue;
        std::size_t e1 = match_forward(fold, between_, term_end);
        if (e1 == std::string::npos) continue;
        if (after_.empty()) {
          y_begin = e1;
          y_end = fold.size();
          ok = y_end > y_begin;
        } else {
          // Maximal Y: anchor the trailing literal at its last occurrence.
          for (std::size_t p = e1 + 1; p < fold.size(); ++p) {
            if (match_forward(fold, after_, p) != std::string::npos) {
              y_begin = e1;
              y_end = p;
              ok = true;
            }
          }
        }
      } else {
        std::size_t l1_start = match_backward(fold, between_, region_start);
        if (l1_start == std::string::npos) continue;
        if (!after_.empty() &&
            match_forward(fold, after_, term_end) == std::string::npos)
          continue;
        y_end = l1_start;
        if (before_.empty()) {
          y_begin = 0;
          ok = y_end > y_begin;
        } else {
          for (std::size_t p = 0; p + 1 <= y_end; ++p) {
            std::size_t e0 = match_forward(fold, before_, p);
            if (e0 != std::string::npos && e0 < y_end) {
              y_begin = e0;
              ok = true;
              break;  // earliest anchor gives the maximal Y
            }
          }
        }
      }
      if (!ok) continue;
      std::string y(trim(std::string_view(stripped).substr(y_begin, y_end - y_begin)));
      if (y.empty()) continue;

      PatternMatch pm;
      pm.pattern_id = id_;
      pm.sentence_index = sentence_index;
      pm.term_begin = sentence.start + map[i];
      pm.term_end = sentence.start + map[term_end - 1] + 1;
      pm.y_text = std::move(y);
      return pm;
    }
  }
  return std::nullopt;
}

PatternParseResult parse_pattern_file(const std::string& content) {
  PatternParseResult result;
  std::set<std::string> seen_templates;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    std::string_view raw = lines[ln];
    while (true) {
      std::size_t tab = raw.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.emplace_back(trim(raw.substr(start)));
        break;
      }
      fields.emplace_back(trim(raw.substr(start, tab - start)));
      start = tab + 1;
    }
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      result.report.add("line " + std::to_string(ln + 1) +
                        ": expected id<TAB>template[<TAB>language]");
      continue;
    }
    DescriptionPattern p;
    p.id = fields[0];
    p.template_text = fields[1];
    if (fields.size() > 2) p.language_tag = fields[2];
    try {
      CompiledMatcher::compile(p);
    } catch (const ConfigError& e) {
      result.report.add("line " + std::to_string(ln + 1) + ": " + e.what());
      continue;
    }
    if (!seen_templates.insert(p.template_text).second) {
      result.report.add("line " + std::to_string(ln + 1) +
                        ": duplicate template collapsed");
      continue;
    }
    result.patterns.push_back(std::move(p));
  }
  if (result.patterns.empty())
    throw ConfigError("pattern file contains no valid patterns");
  return result;
}

std::vector<CompiledMatcher> compile_patterns(
    const std::vector<DescriptionPattern>& patterns) {
  std::vector<CompiledMatcher> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) out.push_back(CompiledMatcher::compile(p));
  return out;
}

std::vector<PatternMatch> match_term(const Sentence& sentence,
                                     std::size_t sentence_index,
                                     const std::string& term,
                                     const std::vector<CompiledMatcher>& matchers) {
  std::vector<PatternMatch> matches;
  if (trim(term).empty()) throw ConfigError("match_term: empty term");
  for (const auto& m : matchers) {
    if (!m.enabled()) continue;
    if (auto hit = m.match(sentence, sentence_index, term))
      matches.push_back(std::move(*hit));
  }
  return matches;
}

const ChunkConfig& default_chunk_config() {
  static const ChunkConfig cfg = [] {
    ChunkConfig c;
    c.function_words = {"a",    "an",  "the",  "is",  "are", "was", "were",
                        "be",   "been", "being", "of",  "in",  "on",  "at",
                        "to",   "for",  "with", "by",  "from", "as",  "and",
                        "or",   "that", "which", "it",  "its", "this", "these",
                        "than", "into", "can",  "may", "will"};
    return c;
  }();
  return cfg;
}

std::vector<Phrase> chunk_phrases(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>* pos_tags,
                                  const ChunkConfig& cfg) {
  if (pos_tags && pos_tags->size() != tokens.size())
    throw ConfigError("chunk_phrases: pos_tags/token length mismatch");

  enum class Kind { Punct, Function, Content };
  auto classify = [&](std::size_t i) {
    if (pure_punct(tokens[i])) return Kind::Punct;
    if (pos_tags) {
      std::string tag = to_upper((*pos_tags)[i]);
      if (tag == "PUNCT") return Kind::Punct;
      return cfg.function_tags.count(tag) ? Kind::Function : Kind::Content;
    }
    return cfg.function_words.count(to_lower(tokens[i])) ? Kind::Function
                                                         : Kind::Content;
  };

  std::vector<Phrase> phrases;
  std::size_t begin = 0;
  bool open = false;
  bool in_tail = false;

  auto close = [&](std::size_t end) {
    if (!open) return;
    Phrase ph;
    ph.begin_token = begin;
    ph.end_token = end;
    for (std::size_t t = begin; t < end; ++t) {
      if (t > begin) ph.text.push_back(' ');
      ph.text += tokens[t];
    }
    phrases.push_back(std::move(ph));
    open = false;
    in_tail = false;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    switch (classify(i)) {
      case Kind::Punct:
        close(i);
        phrases.push_back(Phrase{tokens[i], i, i + 1});
        break;
      case Kind::Content:
        if (open && in_tail) close(i);
        if (!open) {
          begin = i;
          open = true;
        }
        break;
      case Kind::Function:
        if (!open) {
          begin = i;
          open = true;
        }
        in_tail = true;
        break;
    }
  }
  close(tokens.size());
  return phrases;
}

std::vector<std::string> mining_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (ascii_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !ascii_space(text[end])) ++end;
    std::string_view word = text.substr(i, end - i);
    std::size_t lead = 0;
    while (lead < word.size() && ascii_punct(word[lead])) ++lead;
    std::size_t tail = word.size();
    while (tail > lead && ascii_punct(word[tail - 1])) --tail;
    for (std::size_t k = 0; k < lead; ++k) tokens.emplace_back(1, word[k]);
    if (tail > lead) tokens.emplace_back(word.substr(lead, tail - lead));
    for (std::size_t k = tail; k < word.size(); ++k)
      tokens.emplace_back(1, word[k]);
    i = end;
  }
  return tokens;
}

namespace {

// Replaces standalone occurrences of `head` with "X" (case-insensitive).
std::string substitute_headword(const std::string& text,
                                const std::string& head) {
  std::string fold = to_lower(text);
  std::string fhead = to_lower(head);
  if (fhead.empty()) return text;
  std::string out;
  std::size_t last = 0;
  for (std::size_t i = fold.find(fhead); i != std::string::npos;
       i = fold.find(fhead, last)) {
    std::size_t end = i + fhead.size();
    bool left_ok = i == 0 || !word_byte(fold[i - 1]);
    bool right_ok = end == fold.size() || !word_byte(fold[end]);
    if (!left_ok || !right_ok) {
      out += text.substr(last, i + 1 - last);
      last = i + 1;
      continue;
    }
    out += text.substr(last, i - last);
    out += "X";
    last = end;
  }
  out += text.substr(last);
  return out;
}

}  // namespace

MiningResult mine_patterns(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::set<std::string>& lexicon, std::size_t top_k,
    const ChunkConfig& chunk_cfg) {
  if (top_k < 1) throw ConfigError("mine_patterns: top_k must be >= 1");
  MiningResult result;

  std::set<std::string> folded_lexicon;
  for (const auto& t : lexicon) folded_lexicon.insert(to_lower(std::string(trim(t))));

  std::map<std::pair<std::string, std::string>, std::uint64_t> counts;
  std::size_t kept = 0;
  for (const auto& [head, desc] : entries) {
    if (!folded_lexicon.count(to_lower(std::string(trim(head))))) continue;
    ++kept;
    std::string with_slot = substitute_headword(desc, std::string(trim(head)));
    for (auto [sb, se] : split_sentences_plain(with_slot)) {
      auto tokens = mining_tokenize(
          std::string_view(with_slot).substr(sb, se - sb));
      auto phrases = chunk_phrases(tokens, nullptr, chunk_cfg);
      std::vector<bool> has_x(phrases.size()), punct_only(phrases.size());
      for (std::size_t p = 0; p < phrases.size(); ++p) {
        bool x = false, all_punct = true;
        for (std::size_t t = phrases[p].begin_token; t < phrases[p].end_token;
             ++t) {
          if (tokens[t] == "X") x = true;
          if (!pure_punct(tokens[t])) all_punct = false;
        }
        has_x[p] = x;
        punct_only[p] = all_punct;
      }
      for (std::size_t a = 0; a < phrases.size(); ++a) {
        if (punct_only[a]) continue;
        for (std::size_t b = a + 1; b < phrases.size(); ++b) {
          if (punct_only[b]) continue;
          if (!has_x[a] && !has_x[b]) continue;
          std::pair<std::string, std::string> key;
          if (has_x[a] && has_x[b]) {
            key = std::minmax(phrases[a].text, phrases[b].text);
          } else if (has_x[a]) {
            key = {phrases[a].text, phrases[b].text};
          } else {
            key = {phrases[b].text, phrases[a].text};
          }
          ++counts[key];
        }
      }
    }
  }

  if (entries.empty()) {
    result.report.add("warning: no entries supplied");
    return result;
  }
  if (kept == 0) {
    result.report.add("warning: no entry headword matched the lexicon");
    return result;
  }

  result.candidates.reserve(counts.size());
  for (auto& [key, count] : counts)
    result.candidates.push_back(PatternCandidate{key.first, key.second, count});
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const PatternCandidate& a, const PatternCandidate& b) {
              if (a.count != b.count) return a.count > b.count;
              if (a.phrase_a != b.phrase_a) return a.phrase_a < b.phrase_a;
              return a.phrase_b < b.phrase_b;
            });
  if (result.candidates.size() > top_k) result.candidates.resize(top_k);
  return result;
}

std::string format_candidate_file(const std::vector<PatternCandidate>& cands) {
  std::string out;
  for (const auto& c : cands) {
    out += std::to_string(c.count);
    out += '\t';
    out += c.phrase_a;
    out += '\t';
    out += c.phrase_b;
    out += '\n';
  }
  return out;
}

}  // namespace termscribe
