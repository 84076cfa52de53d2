#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "termscribe/langmodel.hpp"

using namespace termscribe;

namespace {

std::vector<std::vector<std::string>> tokenized(
    std::initializer_list<const char*> sentences) {
  std::vector<std::vector<std::string>> out;
  for (const char* s : sentences) out.push_back(lm_tokenize(s));
  return out;
}

Candidate cand(std::string text) {
  Candidate c;
  c.term = "t";
  c.text = std::move(text);
  c.url = "u";
  c.trigger = "p";
  return c;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() /
          (std::string("termscribe_lm_") + std::to_string(::getpid()) + name))
      .string();
}

}  // namespace

TEST_CASE("lm_tokenize lowercases, isolates punctuation, classes digits") {
  CHECK(lm_tokenize("Data mining, now!") ==
        std::vector<std::string>{"data", "mining", ",", "now", "!"});
  CHECK(lm_tokenize("42 terms") == std::vector<std::string>{"NUM", "terms"});
  CHECK(lm_tokenize("") == std::vector<std::string>{});
  CHECK(lm_tokenize("x86 CPUs") ==
        std::vector<std::string>{"x", "NUM", "cpus"});
  CHECK(lm_tokenize("don't") == std::vector<std::string>{"don", "'", "t"});
}

TEST_CASE("hand-counted probabilities for the a-b corpus") {
  // Single sentence "a b a b a b", padded BOS BOS a b a b a b EOS.
  // Predicted events: a,b,a,b,a,b,EOS -> N=7; predictable set {a,b,UNK,EOS}.
  auto model = NgramModel::train({{"a", "b", "a", "b", "a", "b"}});
  // Unseen context backs all the way off to the add-one unigram: 4/11.
  CHECK(model.prob("a", "zz", "qq") == doctest::Approx(4.0 / 11.0).epsilon(1e-12));
  // p(a | a b) = 0.6 * 2/3 + 0.4 * (0.6 * 2/3 + 0.4 * 4/11) = 34/55.
  CHECK(model.prob("a", "a", "b") == doctest::Approx(34.0 / 55.0).epsilon(1e-12));

  oracles::WittenBellOracle oracle({{"a", "b", "a", "b", "a", "b"}}, 1);
  CHECK(oracle.prob("a", "zz", "qq") == doctest::Approx(4.0 / 11.0).epsilon(1e-12));
  CHECK(oracle.prob("a", "a", "b") == doctest::Approx(34.0 / 55.0).epsilon(1e-12));
}

TEST_CASE("model matches the brute-force oracle on a small corpus") {
  auto corpus = tokenized({"the cat sat", "the dog sat", "a cat ran here"});
  auto model = NgramModel::train(corpus);
  oracles::WittenBellOracle oracle(corpus, 1);

  std::vector<std::string> contexts = oracle.predictable();
  contexts.push_back("BOS");
  contexts.push_back("never-seen");
  for (const auto& u : contexts) {
    for (const auto& v : contexts) {
      for (const auto& w : oracle.predictable()) {
        CAPTURE(u);
        CAPTURE(v);
        CAPTURE(w);
        REQUIRE(model.prob(w, u, v) ==
                doctest::Approx(oracle.prob(w, u, v)).epsilon(1e-9));
      }
    }
  }
  auto query = lm_tokenize("the cat ran");
  CHECK(model.sequence_log_prob(query) ==
        doctest::Approx(oracle.sequence_log_prob(query)).epsilon(1e-9));
  CHECK(model.perplexity(query) ==
        doctest::Approx(oracle.perplexity(query)).epsilon(1e-9));
}

TEST_CASE("probabilities over the predictable set sum to one") {
  auto corpus = tokenized(
      {"one small step here", "a small step there", "steps add up fast",
       "one more time now"});
  auto model = NgramModel::train(corpus);
  auto predictable = model.predictable_tokens();

  std::mt19937 rng(42);
  std::vector<std::string> pool = predictable;
  pool.push_back("BOS");
  pool.push_back("zork");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string& u = pool[pick(rng)];
    const std::string& v = pool[pick(rng)];
    double sum = 0.0;
    for (const auto& w : predictable) sum += model.prob(w, u, v);
    CAPTURE(u);
    CAPTURE(v);
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("uniform corpus perplexity approaches the vocabulary size") {
  auto make_uniform = [](std::size_t tokens) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<std::vector<std::string>> corpus;
    std::vector<std::string> names = {"t0", "t1", "t2", "t3"};
    for (std::size_t i = 0; i < tokens / 20; ++i) {
      std::vector<std::string> sent;
      for (int k = 0; k < 20; ++k) sent.push_back(names[pick(rng)]);
      corpus.push_back(std::move(sent));
    }
    return corpus;
  };
  auto small = NgramModel::train(make_uniform(2000));
  auto large = NgramModel::train(make_uniform(40000));

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<std::string> names = {"t0", "t1", "t2", "t3"};
  std::vector<std::string> query;
  for (int i = 0; i < 200; ++i) query.push_back(names[pick(rng)]);

  double err_small = std::abs(small.perplexity(query) - 4.0);
  double err_large = std::abs(large.perplexity(query) - 4.0);
  CHECK(err_large < err_small);
  CHECK(err_large < 0.4);
}

TEST_CASE("a single-token vocabulary gives near-zero log prob per token") {
  std::vector<std::vector<std::string>> corpus(
      5, std::vector<std::string>(20, "w"));
  auto model = NgramModel::train(corpus);
  CHECK(std::log(model.prob("w", "w", "w")) > -0.1);
  CHECK(std::log(model.prob("w", "w", "w")) < 0.0);
  // Over a long sequence the one EOS event amortizes away.
  CHECK(model.perplexity(std::vector<std::string>(50, "w")) < 1.5);
}

TEST_CASE("every factor is in (0, 1) so prefix log prob strictly decreases") {
  auto corpus = tokenized({"alpha beta gamma delta", "beta gamma alpha",
                           "gamma delta beta alpha"});
  auto model = NgramModel::train(corpus);
  std::string c1 = "BOS", c2 = "BOS";
  double running = 0.0;
  for (const char* tok : {"alpha", "beta", "zzz", "gamma", "alpha"}) {
    double p = model.prob(tok, c1, c2);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    double next = running + std::log(p);
    CHECK(next < running);
    running = next;
    c1 = c2;
    c2 = model.in_vocab(tok) ? tok : "UNK";
  }
  CHECK(std::isfinite(model.sequence_log_prob(
      {"alpha", "beta", "zzz", "gamma", "alpha"})));
}

TEST_CASE("cutoff folds rare tokens into UNK") {
  auto corpus = tokenized({"common common common rare", "common common again"});
  auto model = NgramModel::train(corpus, 3, /*cutoff=*/2);
  CHECK(model.in_vocab("common"));
  CHECK_FALSE(model.in_vocab("rare"));
  CHECK_FALSE(model.in_vocab("never"));
  // Both unseen-at-cutoff and never-seen tokens score as UNK.
  CHECK(model.prob("rare", "common", "common") ==
        model.prob("never", "common", "common"));
}

TEST_CASE("training requires a usable corpus") {
  CHECK_THROWS_AS(NgramModel::train({}), ConfigError);
  CHECK_THROWS_AS(NgramModel::train({{"a", "b"}}), ConfigError);
  CHECK_THROWS_AS(NgramModel::train({{"a", "b", "c"}}, 2), ConfigError);
}

TEST_CASE("empty query scores the EOS event only") {
  auto model = NgramModel::train(tokenized({"a b c d e"}));
  double lp = model.sequence_log_prob({});
  CHECK(std::isfinite(lp));
  CHECK(lp < 0.0);
  CHECK(model.perplexity({}) >= 1.0);
}

TEST_CASE("perplexity is deterministic bit for bit") {
  auto model = NgramModel::train(tokenized({"a b c a b c", "c b a"}));
  auto toks = lm_tokenize("a b c c b zzz a");
  double first = model.perplexity(toks);
  for (int i = 0; i < 10; ++i) CHECK(model.perplexity(toks) == first);
}

TEST_CASE("save and load round-trip answers identically") {
  auto corpus = tokenized({"the cat sat on the mat", "a dog sat here",
                           "the mat sat still, honest!"});
  auto model = NgramModel::train(corpus, 3, 1);
  std::string path = temp_path("roundtrip.lm");
  model.save(path);
  auto loaded = NgramModel::load(path);

  auto q = lm_tokenize("the dog sat on a mat!");
  CHECK(model.sequence_log_prob(q) ==
        doctest::Approx(loaded.sequence_log_prob(q)).epsilon(1e-12));
  CHECK(model.prob("sat", "the", "cat") ==
        doctest::Approx(loaded.prob("sat", "the", "cat")).epsilon(1e-12));
  CHECK(model.vocab_size() == loaded.vocab_size());
  CHECK(model.cutoff() == loaded.cutoff());
  std::filesystem::remove(path);
}

TEST_CASE("loading a truncated model file fails with diagnostics") {
  auto model = NgramModel::train(tokenized({"a b c d e f g"}));
  std::string path = temp_path("truncated.lm");
  model.save(path);
  auto bytes = [&] {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  }();
  std::ofstream(path, std::ios::binary | std::ios::trunc)
      << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(NgramModel::load(path), FormatError);
  try {
    NgramModel::load(path);
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading a model of the wrong order fails") {
  std::string path = temp_path("order2.lm");
  std::ofstream(path) << "termscribe-ngram 1\norder 2\ncutoff 1\n";
  CHECK_THROWS_AS(NgramModel::load(path), FormatError);
  std::ofstream(path, std::ios::trunc) << "not a model\n";
  CHECK_THROWS_AS(NgramModel::load(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("filter keeps strictly-below-threshold candidates in order") {
  auto model = NgramModel::train(
      tokenized({"good words flow well together", "words flow well",
                 "good words here"}));
  std::vector<Candidate> cands = {cand("good words flow well"),
                                  cand("zq xv jk wp"),
                                  cand("words flow")};
  FilterConfig cfg;
  cfg.threshold = 1e12;  // vacuous: everything kept, order preserved
  auto all = filter_candidates(cands, model, cfg);
  REQUIRE(all.size() == 3);
  for (std::size_t i = 0; i < all.size(); ++i) {
    REQUIRE(all[i].perplexity.has_value());
    CHECK(all[i].text == cands[i].text);
  }

  // Boundary: a candidate whose perplexity equals the threshold is discarded.
  double boundary = *all[1].perplexity;
  cfg.threshold = boundary;
  auto kept = filter_candidates(cands, model, cfg);
  for (const auto& c : kept) CHECK(*c.perplexity < boundary);
  CHECK(kept.size() < all.size());

  std::vector<Candidate> none;
  CHECK(filter_candidates(none, model, cfg).empty());
}

TEST_CASE("filter is monotone in the threshold") {
  auto model = NgramModel::train(
      tokenized({"alpha beta gamma", "beta gamma delta", "gamma delta alpha"}));
  std::mt19937 rng(5);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "zork", "!", "NUM"};
  std::uniform_int_distribution<int> wl(1, 8), wp(0, 6);
  std::uniform_real_distribution<double> th(1.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Candidate> cands;
    for (int i = 0; i < 8; ++i) {
      std::string text;
      int n = wl(rng);
      for (int k = 0; k < n; ++k) {
        if (k) text += ' ';
        text += words[wp(rng)];
      }
      cands.push_back(cand(text));
    }
    double t1 = th(rng), t2 = th(rng);
    if (t1 > t2) std::swap(t1, t2);
    auto kept1 = filter_candidates(cands, model, FilterConfig{t1});
    auto kept2 = filter_candidates(cands, model, FilterConfig{t2});
    CHECK(kept1.size() <= kept2.size());
    // kept(t1) is a subset of kept(t2), both subsequences of the input
    std::size_t j = 0;
    for (const auto& c : kept1) {
      while (j < kept2.size() && kept2[j].text != c.text) ++j;
      REQUIRE(j < kept2.size());
    }
  }
}

TEST_CASE("templated text scores below its own shuffles") {
  oracles::TemplatedText gen(2024);
  auto model = NgramModel::train(gen.corpus(12000));

  std::vector<std::vector<std::string>> held_out;
  for (int i = 0; i < 100; ++i) held_out.push_back(gen.sentence());
  std::vector<double> original_pp;
  for (const auto& s : held_out) original_pp.push_back(model.perplexity(s));
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  double med_orig = median(original_pp);

  int wins = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::mt19937 shuffle_rng(9000 + t);
    std::vector<double> shuffled_pp;
    for (auto s : held_out) {
      std::shuffle(s.begin(), s.end(), shuffle_rng);
      shuffled_pp.push_back(model.perplexity(s));
    }
    if (med_orig < median(shuffled_pp)) ++wins;
  }
  CHECK(wins >= 95);
}
