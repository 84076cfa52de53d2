#include "termscribe/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "termscribe/fetcher.hpp"

namespace termscribe {

namespace fs = std::filesystem;

const std::set<std::string>& default_retained_tags() {
  static const std::set<std::string> tags = {"P",  "UL", "LI", "H1", "H2",
                                             "H3", "H4", "H5", "H6", "B",
                                             "DT", "DD", "A"};
  return tags;
}

const std::vector<std::string>& default_terminators() {
  static const std::vector<std::string> terms = {".", "!", "?", "\xE3\x80\x82"};
  return terms;
}

SourceKind parse_source_kind(std::string_view s) {
  if (s == "corpus-dir") return SourceKind::CorpusDir;
  if (s == "url-list") return SourceKind::UrlList;
  if (s == "fetcher") return SourceKind::Fetcher;
  throw ConfigError("unknown source kind '" + std::string(s) +
                    "' (expected corpus-dir, url-list or fetcher)");
}

std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::CorpusDir: return "corpus-dir";
    case SourceKind::UrlList: return "url-list";
    case SourceKind::Fetcher: return "fetcher";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Character entities.
//
// One parser serves both directions: decoding during normalization, and
// deciding whether a decoded '&' must be re-escaped so that normalize stays
// idempotent (a '&' that no longer parses as an entity is left alone).

namespace {

struct EntityHit {
  std::size_t length;   // bytes consumed, including '&' and ';'
  std::string decoded;  // UTF-8
};

std::string encode_utf8(std::uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::optional<EntityHit> try_parse_entity(std::string_view s) {
  if (s.size() < 3 || s[0] != '&') return std::nullopt;
  if (s[1] == '#') {
    bool hex = s.size() > 2 && (s[2] == 'x' || s[2] == 'X');
    std::size_t i = hex ? 3 : 2;
    std::uint32_t value = 0;
    std::size_t digits = 0;
    for (; i < s.size() && digits < 8; ++i, ++digits) {
      char c = s[i];
      std::uint32_t d;
      if (ascii_digit(c)) {
        d = static_cast<std::uint32_t>(c - '0');
      } else if (hex && c >= 'a' && c <= 'f') {
        d = static_cast<std::uint32_t>(c - 'a' + 10);
      } else if (hex && c >= 'A' && c <= 'F') {
        d = static_cast<std::uint32_t>(c - 'A' + 10);
      } else {
        break;
      }
      value = value * (hex ? 16u : 10u) + d;
    }
    if (digits == 0 || i >= s.size() || s[i] != ';') return std::nullopt;
    if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF))
      return std::nullopt;
    return EntityHit{i + 1, encode_utf8(value)};
  }
  static const std::pair<std::string_view, std::string_view> named[] = {
      {"amp", "&"}, {"lt", "<"},    {"gt", ">"},
      {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  for (const auto& [name, repl] : named) {
    if (s.size() > name.size() + 1 && s.compare(1, name.size(), name) == 0 &&
        s[name.size() + 1] == ';') {
      return EntityHit{name.size() + 2, std::string(repl)};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Charset decoding.

// Windows-1252 codepoints for bytes 0x80..0x9F (0 marks an undefined byte).
constexpr std::uint32_t kCp1252High[32] = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x2060};

std::string canonical_charset(std::string_view name) {
  std::string c = to_lower(trim(name));
  std::erase_if(c, [](char ch) { return ch == '_' || ch == '-' || ch == ' '; });
  return c;
}

std::string decode_latin(std::string_view bytes, bool cp1252) {
  std::string out;
  out.reserve(bytes.size());
  for (unsigned char b : bytes) {
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
    } else if (cp1252 && b < 0xA0) {
      std::uint32_t cp = kCp1252High[b - 0x80];
      out += encode_utf8(cp ? cp : 0xFFFD);
    } else {
      out += encode_utf8(b);
    }
  }
  return out;
}

std::string scrub_utf8(std::string_view bytes, std::size_t* replaced) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char b = bytes[i];
    std::size_t len = 0;
    if (b < 0x80) len = 1;
    else if ((b & 0xE0) == 0xC0 && b >= 0xC2) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    else if ((b & 0xF8) == 0xF0 && b <= 0xF4) len = 4;
    if (len == 0) {
      out += "\xEF\xBF\xBD";
      ++*replaced;
      ++i;
      continue;
    }
    bool ok = i + len <= bytes.size();
    for (std::size_t k = 1; ok && k < len; ++k)
      ok = (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
    if (!ok) {
      out += "\xEF\xBF\xBD";
      ++*replaced;
      ++i;
      continue;
    }
    out.append(bytes.substr(i, len));
    i += len;
  }
  return out;
}

// Looks for charset= inside the first couple KB (meta tags).
std::string sniff_charset(std::string_view bytes) {
  std::string head = to_lower(bytes.substr(0, std::min<std::size_t>(bytes.size(), 2048)));
  std::size_t pos = head.find("charset");
  if (pos == std::string::npos) return "";
  pos += 7;
  while (pos < head.size() && (head[pos] == '=' || head[pos] == ' ' ||
                               head[pos] == '"' || head[pos] == '\''))
    ++pos;
  std::size_t end = pos;
  while (end < head.size() &&
         (ascii_alnum(head[end]) || head[end] == '-' || head[end] == '_'))
    ++end;
  return head.substr(pos, end - pos);
}

}  // namespace

std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint,
                           Report* rep, std::string_view origin) {
  std::string charset = canonical_charset(
      charset_hint.empty() ? sniff_charset(bytes) : charset_hint);
  if (charset == "iso88591" || charset == "latin1" || charset == "l1") {
    return decode_latin(bytes, false);
  }
  if (charset == "windows1252" || charset == "cp1252") {
    return decode_latin(bytes, true);
  }
  bool known = charset.empty() || charset == "utf8" || charset == "usascii" ||
               charset == "ascii";
  std::size_t replaced = 0;
  std::string out = scrub_utf8(bytes, &replaced);
  if (!known) {
    report(rep, std::string(origin) + ": unsupported charset '" + charset +
                    "', decoded as lossy UTF-8");
  } else if (replaced > 0) {
    report(rep, std::string(origin) + ": " + std::to_string(replaced) +
                    " invalid UTF-8 byte(s) replaced");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalizer.

namespace {

struct Attr {
  std::string name;  // lower-case
  std::string value;
};

struct TagToken {
  bool closing = false;
  bool self_closing = false;
  std::string name;  // upper-case
  std::vector<Attr> attrs;
  std::size_t end = 0;  // position just past '>'
};

// Parses a tag at html[pos] == '<' with an alpha or '/' following.
// Returns nullopt when no terminating '>' exists (rest of input dropped).
std::optional<TagToken> lex_tag(std::string_view html, std::size_t pos) {
  TagToken tok;
  std::size_t i = pos + 1;
  if (i < html.size() && html[i] == '/') {
    tok.closing = true;
    ++i;
  }
  std::size_t name_start = i;
  while (i < html.size() && ascii_alnum(html[i])) ++i;
  tok.name = to_upper(html.substr(name_start, i - name_start));
  // Attribute scan; tolerates junk, respects quotes.
  while (i < html.size() && html[i] != '>') {
    if (ascii_space(html[i])) {
      ++i;
      continue;
    }
    if (html[i] == '/') {
      ++i;
      continue;
    }
    std::size_t astart = i;
    while (i < html.size() && html[i] != '=' && html[i] != '>' &&
           html[i] != '/' && !ascii_space(html[i]))
      ++i;
    Attr attr;
    attr.name = to_lower(html.substr(astart, i - astart));
    while (i < html.size() && ascii_space(html[i])) ++i;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && ascii_space(html[i])) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char q = html[i++];
        std::size_t vstart = i;
        while (i < html.size() && html[i] != q) ++i;
        attr.value = std::string(html.substr(vstart, i - vstart));
        if (i < html.size()) ++i;
      } else {
        std::size_t vstart = i;
        while (i < html.size() && html[i] != '>' && !ascii_space(html[i])) ++i;
        attr.value = std::string(html.substr(vstart, i - vstart));
      }
    }
    if (!attr.name.empty()) tok.attrs.push_back(std::move(attr));
  }
  if (i >= html.size()) return std::nullopt;
  // A '/' directly before '>' marks self-closing; we already skipped it, so
  // re-check the byte preceding '>'.
  std::size_t back = i;
  while (back > pos && ascii_space(html[back - 1])) --back;
  tok.self_closing = back > pos && html[back - 1] == '/';
  tok.end = i + 1;
  return tok;
}

const std::string* find_attr(const TagToken& tok, std::string_view name) {
  for (const auto& a : tok.attrs)
    if (a.name == name) return &a.value;
  return nullptr;
}

// A spot inside a buffered text run where an anchor target must land.
struct AnchorMark {
  std::size_t buffer_pos;
  std::string name;
};

class DocBuilder {
 public:
  explicit DocBuilder(NormalizedDoc& doc) : doc_(doc) {}

  // Appends decoded text, escaping anything that would re-lex as markup or
  // as an entity; this is what makes normalize idempotent. Anchor marks are
  // resolved to output offsets as the corresponding buffer position passes.
  void text_run(std::string_view decoded, const std::vector<AnchorMark>& marks) {
    std::size_t next_mark = 0;
    auto place_marks = [&](std::size_t upto) {
      while (next_mark < marks.size() && marks[next_mark].buffer_pos <= upto) {
        doc_.anchors.emplace(marks[next_mark].name, doc_.text.size());
        ++next_mark;
      }
    };
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      place_marks(i);
      char c = decoded[i];
      if (c == '&' && try_parse_entity(decoded.substr(i))) {
        for (char e : std::string_view("&amp;")) text_char(e);
      } else if (c == '<' && i + 1 < decoded.size() &&
                 (ascii_alpha(decoded[i + 1]) || decoded[i + 1] == '/' ||
                  decoded[i + 1] == '!' || decoded[i + 1] == '?')) {
        for (char e : std::string_view("&lt;")) text_char(e);
      } else {
        text_char(c);
      }
    }
    place_marks(decoded.size());
  }

  std::size_t token(std::string_view tok) {
    flush_space();
    std::size_t off = doc_.text.size();
    doc_.text.append(tok);
    return off;
  }

 private:
  void text_char(char c) {
    if (ascii_space(c)) {
      pending_space_ = true;
      return;
    }
    flush_space();
    doc_.text.push_back(c);
  }

  void flush_space() {
    if (pending_space_ && !doc_.text.empty()) doc_.text.push_back(' ');
    pending_space_ = false;
  }

  NormalizedDoc& doc_;
  bool pending_space_ = false;
};

}  // namespace

NormalizedDoc normalize(const RawPage& page,
                        const std::set<std::string>& retained_tags) {
  for (const auto& t : retained_tags) {
    if (!default_retained_tags().count(t))
      throw ConfigError("tag '" + t + "' is not in the supported retained set");
  }

  NormalizedDoc doc;
  doc.url = page.url;
  DocBuilder out(doc);
  std::vector<std::size_t> open_stack;  // indices into doc.tag_spans
  const std::string_view html = page.content;

  // Text accumulates across dropped markup (comments, scripts, non-retained
  // tags) because those leave adjacent characters adjacent in the output;
  // only an emitted token interrupts a text run.
  std::string text_buf;
  std::vector<AnchorMark> pending_marks;
  auto flush_text = [&] {
    out.text_run(text_buf, pending_marks);
    text_buf.clear();
    pending_marks.clear();
  };

  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '<' && i + 1 < html.size()) {
      char n = html[i + 1];
      if (n == '!') {
        if (html.compare(i, 4, "<!--") == 0) {
          std::size_t close = html.find("-->", i + 4);
          i = close == std::string_view::npos ? html.size() : close + 3;
        } else {
          std::size_t close = html.find('>', i);
          i = close == std::string_view::npos ? html.size() : close + 1;
        }
        continue;
      }
      if (n == '?') {
        std::size_t close = html.find('>', i);
        i = close == std::string_view::npos ? html.size() : close + 1;
        continue;
      }
      if (ascii_alpha(n) || n == '/') {
        auto tok = lex_tag(html, i);
        if (!tok) break;  // unterminated tag swallows the rest
        i = tok->end;

        // script/style bodies disappear entirely.
        if (!tok->closing && !tok->self_closing &&
            (tok->name == "SCRIPT" || tok->name == "STYLE")) {
          // Search case-insensitively without copying the whole document.
          std::string closer = "</" + to_lower(tok->name);
          std::size_t j = i;
          std::size_t found = std::string_view::npos;
          for (; j + closer.size() <= html.size(); ++j) {
            bool hit = true;
            for (std::size_t k = 0; hit && k < closer.size(); ++k)
              hit = ascii_lower(html[j + k]) == closer[k];
            if (hit) {
              found = j;
              break;
            }
          }
          if (found == std::string_view::npos) {
            i = html.size();
          } else {
            std::size_t gt = html.find('>', found);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
          }
          continue;
        }

        bool retained = retained_tags.count(tok->name) > 0;

        // Anchor targets are recorded even when <A> is not retained.
        const std::string* aname = nullptr;
        if (tok->name == "A" && !tok->closing) {
          aname = find_attr(*tok, "name");
          if (!aname) aname = find_attr(*tok, "id");
        }

        if (!retained) {
          if (aname && !aname->empty())
            pending_marks.push_back(AnchorMark{text_buf.size(), *aname});
          continue;
        }
        flush_text();

        if (tok->closing) {
          // Close the innermost matching open tag; anything opened after it
          // stays unclosed. A close with no matching open is dropped.
          auto it = std::find_if(open_stack.rbegin(), open_stack.rend(),
                                 [&](std::size_t idx) {
                                   return doc.tag_spans[idx].name == tok->name;
                                 });
          if (it == open_stack.rend()) continue;
          open_stack.erase(std::prev(it.base()), open_stack.end());
          std::size_t off = out.token("</" + tok->name + ">");
          doc.tag_spans[*it].close_begin = off;
          doc.tag_spans[*it].close_end = doc.text.size();
          continue;
        }

        std::size_t off = out.token("<" + tok->name + ">");
        if (tok->name == "P") {
          // <P>...<P> convention: a still-open P ends where the next opens.
          auto p = std::find_if(open_stack.rbegin(), open_stack.rend(),
                                [&](std::size_t idx) {
                                  return doc.tag_spans[idx].name == "P";
                                });
          if (p != open_stack.rend()) {
            doc.tag_spans[*p].close_begin = off;
            doc.tag_spans[*p].close_end = off;
            open_stack.erase(std::prev(p.base()));
          }
        }

        TagSpan span;
        span.name = tok->name;
        span.open_begin = off;
        span.open_end = doc.text.size();
        if (tok->name == "A") {
          if (const std::string* href = find_attr(*tok, "href"))
            span.href = *href;
          if (aname && !aname->empty())
            doc.anchors.emplace(*aname, span.open_begin);
        }
        if (tok->self_closing) {
          span.close_begin = span.open_end;
          span.close_end = span.open_end;
        }
        doc.tag_spans.push_back(std::move(span));
        if (!tok->self_closing) open_stack.push_back(doc.tag_spans.size() - 1);
        continue;
      }
      // '<' followed by anything else is literal text.
    }
    if (c == '&') {
      if (auto hit = try_parse_entity(html.substr(i))) {
        text_buf += hit->decoded;
        i += hit->length;
        continue;
      }
    }
    text_buf.push_back(c);
    ++i;
  }
  flush_text();
  return doc;
}

// ---------------------------------------------------------------------------
// Tag-token stripping and sentence segmentation.

// Canonical tokens are the only '<'-initiated sequences normalize emits:
// '<', optional '/', an upper-case alnum name starting with a letter, '>'.
std::size_t tag_token_length(std::string_view text, std::size_t pos) {
  if (pos >= text.size() || text[pos] != '<') return 0;
  std::size_t i = pos + 1;
  if (i < text.size() && text[i] == '/') ++i;
  std::size_t name_start = i;
  if (i >= text.size() || !(text[i] >= 'A' && text[i] <= 'Z')) return 0;
  while (i < text.size() &&
         ((text[i] >= 'A' && text[i] <= 'Z') || ascii_digit(text[i])))
    ++i;
  if (i == name_start || i >= text.size() || text[i] != '>') return 0;
  return i + 1 - pos;
}

std::string strip_tag_tokens(std::string_view text,
                             std::vector<std::size_t>* out_map) {
  std::string out;
  out.reserve(text.size());
  if (out_map) out_map->clear();
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::size_t len = tag_token_length(text, i)) {
      i += len;
      continue;
    }
    if (out_map) out_map->push_back(i);
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

namespace {

bool terminator_at(std::string_view text, std::size_t pos,
                   const std::vector<std::string>& terminators,
                   std::size_t* len) {
  for (const auto& t : terminators) {
    if (t.empty() || pos + t.size() > text.size()) continue;
    if (text.compare(pos, t.size(), t) != 0) continue;
    // An ASCII terminator glued to an alphanumeric does not end a sentence
    // ("e.g.", "3.14"); multi-byte terminators always do.
    if (t.size() == 1 && pos + 1 < text.size() && ascii_alnum(text[pos + 1]))
      continue;
    *len = t.size();
    return true;
  }
  return false;
}

template <typename TokenLenFn, typename EmitFn>
void scan_sentences(std::string_view text,
                    const std::vector<std::string>& terminators,
                    TokenLenFn token_len, EmitFn emit) {
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::size_t tl = token_len(i)) {
      i += tl;
      continue;
    }
    std::size_t term_len = 0;
    if (terminator_at(text, i, terminators, &term_len)) {
      emit(start, i + term_len);
      i += term_len;
      start = i;
      continue;
    }
    ++i;
  }
  if (start < text.size()) emit(start, text.size());
}

}  // namespace

std::vector<Sentence> segment_sentences(
    const NormalizedDoc& doc, const std::vector<std::string>& terminators) {
  if (terminators.empty()) throw ConfigError("sentence terminator set is empty");
  std::vector<Sentence> sentences;
  const std::string_view text = doc.text;
  auto emit = [&](std::size_t a, std::size_t b) {
    // Trim edge spaces and edge tag tokens so a sentence span starts and ends
    // on content; interior tokens stay.
    std::vector<std::size_t> map;
    std::string stripped = strip_tag_tokens(text.substr(a, b - a), &map);
    std::size_t first = stripped.find_first_not_of(' ');
    if (first == std::string::npos) return;
    std::size_t last = stripped.find_last_not_of(' ');
    std::size_t begin = a + map[first];
    std::size_t end = a + map[last] + 1;
    sentences.push_back(
        Sentence{std::string(text.substr(begin, end - begin)), begin, end});
  };
  scan_sentences(text, terminators,
                 [&](std::size_t pos) { return tag_token_length(text, pos); },
                 emit);
  return sentences;
}

std::vector<std::pair<std::size_t, std::size_t>> split_sentences_plain(
    std::string_view text, const std::vector<std::string>& terminators) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  auto emit = [&](std::size_t a, std::size_t b) {
    while (a < b && ascii_space(text[a])) ++a;
    while (b > a && ascii_space(text[b - 1])) --b;
    if (a < b) spans.emplace_back(a, b);
  };
  scan_sentences(text, terminators, [](std::size_t) { return std::size_t{0}; },
                 emit);
  return spans;
}

// ---------------------------------------------------------------------------
// Page sources.

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<RawPage> load_corpus_dir(const SourceSpec& spec, Report* rep) {
  fs::path root(spec.location);
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw IoError("corpus-dir location is not a readable directory: " +
                  spec.location);
  std::vector<std::string> paths;
  for (auto it = fs::recursive_directory_iterator(
           root, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file(ec)) continue;
    std::string ext = to_lower(it->path().extension().string());
    if (ext == ".html" || ext == ".htm") paths.push_back(it->path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RawPage> pages;
  for (const auto& p : paths) {
    if (pages.size() >= spec.max_pages) break;
    auto bytes = read_file(p);
    if (!bytes) {
      report(rep, p + ": unreadable, skipped");
      continue;
    }
    RawPage page;
    page.url = p;
    page.content = decode_to_utf8(*bytes, "", rep, p);
    page.retrieved_at = std::chrono::system_clock::now();
    pages.push_back(std::move(page));
  }
  return pages;
}

std::vector<RawPage> load_url_list(const SourceSpec& spec, Report* rep) {
  auto bytes = read_file(spec.location);
  if (!bytes) throw IoError("url-list file is not readable: " + spec.location);
  std::vector<std::string> urls;
  std::set<std::string> seen;
  for (const auto& raw : split_lines(*bytes)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!seen.insert(std::string(line)).second) {
      report(rep, std::string(line) + ": duplicate url in list, skipped");
      continue;
    }
    urls.emplace_back(line);
    if (urls.size() >= spec.max_pages) break;
  }
  Fetcher fetcher(spec.rate_limit, spec.timeout, spec.user_agent);
  std::vector<RawPage> pages;
  for (const auto& url : urls) {
    if (auto page = fetcher.fetch(url, rep)) pages.push_back(std::move(*page));
  }
  return pages;
}

std::vector<RawPage> load_fetch_template(const SourceSpec& spec,
                                         const std::optional<std::string>& term,
                                         Report* rep) {
  std::string url = spec.location;
  std::size_t slot = url.find("{term}");
  if (slot != std::string::npos) {
    if (!term)
      throw ConfigError("fetcher location contains {term} but no term given");
    url.replace(slot, 6, url_encode(*term));
  }
  Fetcher fetcher(spec.rate_limit, spec.timeout, spec.user_agent);
  std::vector<RawPage> pages;
  if (auto page = fetcher.fetch(url, rep)) pages.push_back(std::move(*page));
  return pages;
}

}  // namespace

std::vector<RawPage> load_source(const SourceSpec& spec,
                                 const std::optional<std::string>& term,
                                 Report* rep) {
  if (spec.max_pages < 1) throw ConfigError("max_pages must be >= 1");
  switch (spec.kind) {
    case SourceKind::CorpusDir: return load_corpus_dir(spec, rep);
    case SourceKind::UrlList: return load_url_list(spec, rep);
    case SourceKind::Fetcher: return load_fetch_template(spec, term, rep);
  }
  return {};
}

}  // namespace termscribe
