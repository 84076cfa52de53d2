#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "termscribe/extract.hpp"

using namespace termscribe;

namespace {

NormalizedDoc doc_from(std::string html, std::string url = "test://doc") {
  RawPage p;
  p.url = std::move(url);
  p.content = std::move(html);
  return normalize(p);
}

std::vector<CompiledMatcher> is_pattern() {
  DescriptionPattern p;
  p.id = "p1";
  p.template_text = "X is Y.";
  return compile_patterns({p});
}

bool span_matches_text(const NormalizedDoc& doc, const Candidate& c) {
  std::string sliced = strip_tag_tokens(
      std::string_view(doc.text).substr(c.span_begin, c.span_end - c.span_begin));
  return sliced == c.text;
}

}  // namespace

TEST_CASE("rule 1: the enclosing paragraph is the candidate") {
  NormalizedDoc doc =
      doc_from("<p>Foo. A thesaurus is a word list. Bar.</p>");
  auto cands = extract_nlp(doc, "thesaurus", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "Foo. A thesaurus is a word list. Bar.");
  CHECK(cands[0].method == Method::NLP);
  CHECK(cands[0].trigger == "p1");
  CHECK(span_matches_text(doc, cands[0]));
}

TEST_CASE("rule 1 applies the unclosed-P convention") {
  NormalizedDoc doc = doc_from(
      "<p>A widget is a control. More here.<p>Unrelated paragraph text.");
  auto cands = extract_nlp(doc, "widget", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A widget is a control. More here.");
}

TEST_CASE("rule 2: an itemization is used when no paragraph encloses") {
  NormalizedDoc doc = doc_from(
      "<ul>\n<li>A stack is a LIFO list.</li>\n<li>Second item.</li>\n</ul>");
  auto cands = extract_nlp(doc, "stack", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A stack is a LIFO list. Second item.");
}

TEST_CASE("rule order: paragraph beats itemization") {
  NormalizedDoc doc = doc_from(
      "<ul><li><p>A queue is a FIFO list.</p></li><li>Other.</li></ul>");
  auto cands = extract_nlp(doc, "queue", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A queue is a FIFO list.");
}

TEST_CASE("rule 3: sentence window centers on the match and shifts at edges") {
  NormalizedDoc doc =
      doc_from("S1 one. S2 two. S3 three. A parser is a reader. S5 five.");
  auto cands = extract_nlp(doc, "parser", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "S3 three. A parser is a reader. S5 five.");

  NormalizedDoc head =
      doc_from("A parser is a reader. S2 two. S3 three. S4 four. S5 five.");
  auto at_head = extract_nlp(head, "parser", is_pattern(), {});
  REQUIRE(at_head.size() == 1);
  CHECK(at_head[0].text == "A parser is a reader. S2 two. S3 three.");

  NormalizedDoc tail =
      doc_from("S1 one. S2 two. S3 three. S4 four. A parser is a reader.");
  auto at_tail = extract_nlp(tail, "parser", is_pattern(), {});
  REQUIRE(at_tail.size() == 1);
  CHECK(at_tail[0].text == "S3 three. S4 four. A parser is a reader.");
}

TEST_CASE("rule 3 shrinks only when the document is shorter than the window") {
  NormalizedDoc doc = doc_from("A lexer is a scanner. Short doc.");
  auto cands = extract_nlp(doc, "lexer", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A lexer is a scanner. Short doc.");
}

TEST_CASE("window_n of 1 returns exactly the matched sentence") {
  ExtractionConfig cfg;
  cfg.window_n = 1;
  NormalizedDoc doc = doc_from("Before words. A trie is a tree. After words.");
  auto cands = extract_nlp(doc, "trie", is_pattern(), cfg);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A trie is a tree.");
}

TEST_CASE("window_n must be odd and positive") {
  ExtractionConfig cfg;
  cfg.window_n = 2;
  NormalizedDoc doc = doc_from("x.");
  CHECK_THROWS_AS(extract_nlp(doc, "x", is_pattern(), cfg), ConfigError);
  cfg.window_n = -3;
  CHECK_THROWS_AS(extract_nlp(doc, "x", is_pattern(), cfg), ConfigError);
}

TEST_CASE("one candidate per matched sentence, identical spans deduplicated") {
  DescriptionPattern p1, p2;
  p1.id = "p1";
  p1.template_text = "X is Y.";
  p2.id = "p2";
  p2.template_text = "X is a Y.";
  auto matchers = compile_patterns({p1, p2});
  NormalizedDoc doc = doc_from("<p>A heap is a tree. A heap is a pile.</p>");
  auto cands = extract_nlp(doc, "heap", matchers, {});
  REQUIRE(cands.size() == 1);  // both sentences expand to the same paragraph
  CHECK(cands[0].trigger == "p1");
}

TEST_CASE("DT followed by DD extracts the definition body") {
  NormalizedDoc doc = doc_from(
      "<dt>thesaurus</dt><dd>A controlled vocabulary.</dd>"
      "<dt>other</dt><dd>Unrelated.</dd>");
  auto cands = extract_html(doc, "thesaurus", {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A controlled vocabulary.");
  CHECK(cands[0].method == Method::HTML);
  CHECK(cands[0].trigger == "DTDD");
  CHECK(span_matches_text(doc, cands[0]));
}

TEST_CASE("heading equal to the term extracts the following fragment") {
  NormalizedDoc doc = doc_from(
      "<h3>Thesaurus</h3><p>A thesaurus groups words by meaning.</p>");
  auto cands = extract_html(doc, "thesaurus", {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].trigger == "HEADING");
  CHECK(cands[0].text == "A thesaurus groups words by meaning.");
}

TEST_CASE("heading match requires equality, not containment") {
  NormalizedDoc doc = doc_from(
      "<h3>About the thesaurus project</h3><p>Not a definition.</p>");
  CHECK(extract_html(doc, "thesaurus", {}).empty());
}

TEST_CASE("heading without a following block takes a sentence window") {
  ExtractionConfig cfg;
  cfg.window_n = 3;
  NormalizedDoc doc = doc_from(
      "<b>compiler</b> a translator of programs. It emits code. More text.");
  auto cands = extract_html(doc, "compiler", cfg);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].trigger == "HEADING");
  CHECK(cands[0].text ==
        "a translator of programs. It emits code. More text.");
}

TEST_CASE("same-page anchors resolve through the anchors map") {
  NormalizedDoc doc = doc_from(
      "<a href='#t'>thesaurus</a> link list filler. "
      "<a name='t'></a><p>Def here.</p>");
  auto cands = extract_html(doc, "thesaurus", {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].trigger == "ANCHOR");
  CHECK(cands[0].text == "Def here.");
}

TEST_CASE("dangling anchors produce no candidate and a report entry") {
  NormalizedDoc doc = doc_from("<a href='#missing'>thesaurus</a> filler.");
  Report rep;
  CHECK(extract_html(doc, "thesaurus", {}, &rep).empty());
  REQUIRE(rep.size() == 1);
  CHECK(rep.notes[0].find("dangling") != std::string::npos);
}

TEST_CASE("cross-page anchors are off by default and fetch one hop when on") {
  NormalizedDoc doc = doc_from(
      "<a href='http://other/page#d'>grammar</a> filler text.");
  CHECK(extract_html(doc, "grammar", {}).empty());

  ExtractionConfig cfg;
  cfg.cross_page_anchors = true;
  int fetches = 0;
  cfg.fetch_page = [&](const std::string& url) -> std::optional<RawPage> {
    ++fetches;
    RawPage p;
    p.url = url;
    p.content = "<a name='d'></a><p>A grammar is a rule set.</p>";
    return p;
  };
  auto cands = extract_html(doc, "grammar", cfg);
  CHECK(fetches == 1);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text == "A grammar is a rule set.");
  CHECK(cands[0].url == "http://other/page");

  // fetch failure: no candidate, reported
  cfg.fetch_page = [](const std::string&) { return std::optional<RawPage>{}; };
  Report rep;
  CHECK(extract_html(doc, "grammar", cfg, &rep).empty());
  CHECK(rep.size() == 1);
}

TEST_CASE("extract_all dedups overlapping spans keeping the NLP candidate") {
  NormalizedDoc doc = doc_from(
      "<h3>parser</h3><p>A parser is a program that reads input.</p>");
  auto cands = extract_all(doc, "parser", is_pattern(), {});
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].method == Method::NLP);
  CHECK(cands[0].trigger == "p1");
}

TEST_CASE("extract_all keeps disjoint candidates ordered by span start") {
  NormalizedDoc doc = doc_from(
      "<dt>btree</dt><dd>An index structure.</dd>"
      "<p>Filler sentence only here.</p>"
      "<p>A btree is a balanced tree.</p>");
  auto cands = extract_all(doc, "btree", is_pattern(), {});
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].span_begin < cands[1].span_begin);
  CHECK(cands[0].trigger == "DTDD");
  CHECK(cands[1].method == Method::NLP);
}

TEST_CASE("extract_all without the term is empty") {
  NormalizedDoc doc = doc_from("<p>Nothing relevant here at all.</p>");
  CHECK(extract_all(doc, "zebra", is_pattern(), {}).empty());
}

TEST_CASE("no two extract_all candidates overlap by more than half") {
  NormalizedDoc doc = doc_from(
      "<b>crawler</b>: a crawler is a robot. A crawler is software. "
      "<p>The crawler is an agent that walks links.</p>"
      "<dt>crawler</dt><dd>A crawler is a fetch loop.</dd>");
  auto cands = extract_all(doc, "crawler", is_pattern(), {});
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      std::size_t lo = std::max(cands[i].span_begin, cands[j].span_begin);
      std::size_t hi = std::min(cands[i].span_end, cands[j].span_end);
      std::size_t overlap = hi > lo ? hi - lo : 0;
      std::size_t shorter = std::min(cands[i].span_end - cands[i].span_begin,
                                     cands[j].span_end - cands[j].span_begin);
      CHECK(overlap * 2 <= shorter);
    }
  }
}

TEST_CASE("candidate text is clipped to max_fragment_chars") {
  ExtractionConfig cfg;
  cfg.max_fragment_chars = 40;
  std::string body = "A parser is a reader of long inputs that go on";
  for (int i = 0; i < 20; ++i) body += " and on";
  NormalizedDoc doc = doc_from("<p>" + body + ".</p>");
  auto cands = extract_nlp(doc, "parser", is_pattern(), cfg);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].text.size() <= 40);
  CHECK(span_matches_text(doc, cands[0]));
}

TEST_CASE("every candidate satisfies span fidelity") {
  NormalizedDoc doc = doc_from(
      "<h2>index</h2><ul><li>An index is a lookup aid.</li></ul>"
      "<p>Some filler. An index is a map from keys. End.</p>"
      "<dt>index</dt><dd>See <b>above</b> for details.</dd>");
  for (const auto& c : extract_all(doc, "index", is_pattern(), {})) {
    CAPTURE(c.trigger);
    CHECK(span_matches_text(doc, c));
    CHECK_FALSE(c.text.empty());
  }
}

TEST_CASE("extraction is deterministic") {
  NormalizedDoc doc = doc_from(
      "<b>sorter</b>: a sorter is an arranger. <p>A sorter is a tool.</p>");
  auto a = extract_all(doc, "sorter", is_pattern(), {});
  auto b = extract_all(doc, "sorter", is_pattern(), {});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].span_begin == b[i].span_begin);
    CHECK(a[i].trigger == b[i].trigger);
  }
}
