#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "termscribe/cluster.hpp"

using namespace termscribe;

namespace {

Candidate cand(std::string text) {
  Candidate c;
  c.term = "t";
  c.text = std::move(text);
  c.url = "u";
  c.trigger = "p";
  return c;
}

FeatureVector fv(std::initializer_list<std::pair<const char*, int>> weights) {
  FeatureVector v;
  for (const auto& [tok, w] : weights) v.weights[tok] = w;
  return v;
}

void check_merges_match(const Dendrogram& d,
                        const std::vector<FeatureVector>& vectors) {
  auto oracle = oracles::brute_force_agglomerate(
      vectors.size(), [&](std::size_t i, std::size_t j) {
        return cosine(vectors[i], vectors[j]);
      });
  REQUIRE(d.merges.size() == oracle.size());
  for (std::size_t m = 0; m < oracle.size(); ++m) {
    CAPTURE(m);
    CHECK(d.merges[m].left == oracle[m].left);
    CHECK(d.merges[m].right == oracle[m].right);
    CHECK(d.merges[m].similarity == oracle[m].similarity);
  }
}

std::vector<FeatureVector> random_vectors(std::mt19937& rng, std::size_t n) {
  const char* tokens[] = {"aa", "bb", "cc", "dd", "ee", "ff"};
  std::uniform_int_distribution<int> ntok(1, 4), weight(1, 3), pick(0, 5);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector v;
    int k = ntok(rng);
    for (int t = 0; t < k; ++t) v.weights[tokens[pick(rng)]] = weight(rng);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("vectorize counts case-folded content words") {
  auto v = vectorize(cand("data mining finds patterns in data"), {"in"});
  REQUIRE(v.has_value());
  CHECK(v->weights ==
        std::map<std::string, int>{

            {"data", 2}, {"mining", 1}, {"finds", 1}, {"patterns", 1}});

  auto folded = vectorize(cand("Data data"), {});
  REQUIRE(folded.has_value());
  CHECK(folded->weights == std::map<std::string, int>{{"data", 2}});
}

TEST_CASE("vectorize filters punctuation, numbers, stopwords, short tokens") {
  CHECK_FALSE(vectorize(cand("!!!"), {}).has_value());
  CHECK_FALSE(vectorize(cand("42 17"), {}).has_value());
  CHECK_FALSE(vectorize(cand("the of and"), {"the", "of", "and"}).has_value());
  auto v = vectorize(cand("a bb ccc"), {}, 2);
  REQUIRE(v.has_value());
  CHECK(v->weights == std::map<std::string, int>{{"bb", 1}, {"ccc", 1}});
}

TEST_CASE("cosine on identical, disjoint and simple vectors") {
  auto u = fv({{"a", 1}, {"b", 1}});
  CHECK(cosine(u, u) == doctest::Approx(1.0));
  CHECK(cosine(fv({{"a", 2}}), fv({{"b", 3}})) == doctest::Approx(0.0));
  CHECK(cosine(fv({{"a", 1}, {"b", 1}}), fv({{"a", 1}})) ==
        doctest::Approx(0.70710678).epsilon(1e-4));
  // proportional vectors are identical directions
  CHECK(cosine(fv({{"a", 2}, {"b", 4}}), fv({{"a", 1}, {"b", 2}})) ==
        doctest::Approx(1.0));
}

TEST_CASE("first merge joins the identical pair at similarity 1") {
  std::vector<FeatureVector> vectors = {fv({{"a", 1}, {"b", 1}}),
                                        fv({{"a", 1}, {"b", 1}}),
                                        fv({{"z", 5}})};
  auto d = agglomerate(vectors);
  REQUIRE(d.merges.size() == 2);
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[0].similarity == doctest::Approx(1.0));
}

TEST_CASE("single vector yields an empty merge list") {
  auto d = agglomerate({fv({{"a", 1}})});
  CHECK(d.leaves == 1);
  CHECK(d.merges.empty());
  auto clusters = cut_and_represent(d, {fv({{"a", 1}})}, 3);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].representative_id == 0);
}

TEST_CASE("two-sense fixture separates senses in the final subtrees") {
  // Four vectors share sense-1 vocabulary, two share a disjoint sense-2.
  std::vector<FeatureVector> vectors = {
      fv({{"word", 2}, {"list", 1}}),  fv({{"word", 1}, {"list", 2}}),
      fv({{"word", 1}, {"group", 1}, {"list", 1}}), fv({{"list", 3}}),
      fv({{"机", 2}, {"位置", 1}}),    fv({{"位置", 2}, {"机", 1}})};
  auto d = agglomerate(vectors);
  check_merges_match(d, vectors);
  // The last merge joins the two senses: cut at k=2 must split them exactly.
  auto clusters = cut_and_represent(d, vectors, 2);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].member_ids == std::vector<int>{0, 1, 2, 3});
  CHECK(clusters[1].member_ids == std::vector<int>{4, 5});
}

TEST_CASE("merge sequences match the brute-force oracle on random inputs") {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  for (int trial = 0; trial < 120; ++trial) {
    auto vectors = random_vectors(rng, size(rng));
    CAPTURE(trial);
    check_merges_match(agglomerate(vectors), vectors);
  }
}

TEST_CASE("fewer than k+1 items become singletons") {
  std::vector<FeatureVector> three = {fv({{"a", 1}}), fv({{"a", 1}}),
                                      fv({{"b", 1}})};
  auto clusters = cut_and_represent(agglomerate(three), three, 3);
  REQUIRE(clusters.size() == 3);
  for (const auto& c : clusters) {
    CHECK(c.member_ids.size() == 1);
    CHECK(c.representative_id == c.member_ids[0]);
  }
}

TEST_CASE("cut produces exactly k clusters when enough items exist") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto vectors = random_vectors(rng, 8);
    auto d = agglomerate(vectors);
    for (int k = 1; k <= 8; ++k) {
      auto clusters = cut_and_represent(d, vectors, k);
      std::size_t expected = vectors.size() < static_cast<std::size_t>(k) + 1
                                 ? vectors.size()
                                 : static_cast<std::size_t>(k);
      CHECK(clusters.size() == expected);
      // partition property
      std::set<int> seen;
      for (const auto& c : clusters) {
        CHECK(std::find(c.member_ids.begin(), c.member_ids.end(),
                        c.representative_id) != c.member_ids.end());
        for (int m : c.member_ids) CHECK(seen.insert(m).second);
      }
      CHECK(seen.size() == vectors.size());
    }
  }
}

TEST_CASE("representative is the medoid with smallest-id tie break") {
  // v0 == v1, v2 similar: summed similarities are v0: 1+c, v1: 1+c, v2: 2c
  // with c = cos(v0, v2) < 1, so v0 wins by the tie break.
  std::vector<FeatureVector> vectors = {fv({{"a", 1}, {"b", 1}}),
                                        fv({{"a", 1}, {"b", 1}}),
                                        fv({{"a", 1}})};
  auto clusters = cut_and_represent(agglomerate(vectors), vectors, 1);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].representative_id == 0);
}

TEST_CASE("clustering is deterministic and permutation-equivariant") {
  std::mt19937 rng(123);
  auto vectors = random_vectors(rng, 6);
  auto d1 = agglomerate(vectors);
  auto d2 = agglomerate(vectors);
  REQUIRE(d1.merges.size() == d2.merges.size());
  for (std::size_t i = 0; i < d1.merges.size(); ++i) {
    CHECK(d1.merges[i].left == d2.merges[i].left);
    CHECK(d1.merges[i].right == d2.merges[i].right);
  }

  // Permute the input; memberships must follow the items.
  std::vector<std::size_t> perm = {3, 1, 5, 0, 4, 2};
  std::vector<FeatureVector> permuted;
  for (std::size_t p : perm) permuted.push_back(vectors[p]);
  auto orig = cut_and_represent(agglomerate(vectors), vectors, 2);
  auto perm_clusters = cut_and_represent(agglomerate(permuted), permuted, 2);

  auto as_item_sets = [&](const std::vector<Cluster>& clusters,
                          const std::vector<std::size_t>* mapping) {
    std::set<std::set<std::size_t>> sets;
    for (const auto& c : clusters) {
      std::set<std::size_t> items;
      for (int m : c.member_ids)
        items.insert(mapping ? (*mapping)[static_cast<std::size_t>(m)]
                             : static_cast<std::size_t>(m));
      sets.insert(std::move(items));
    }
    return sets;
  };
  CHECK(as_item_sets(orig, nullptr) == as_item_sets(perm_clusters, &perm));
}

TEST_CASE("disjoint vocabularies at k=2 have purity 1") {
  std::mt19937 rng(7);
  const char* sense_a[] = {"alpha", "beta", "gamma"};
  const char* sense_b[] = {"uno", "dos", "tres"};
  std::uniform_int_distribution<int> weight(1, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<FeatureVector> vectors;
    std::vector<int> truth;
    std::uniform_int_distribution<std::size_t> na(2, 5), nb(2, 5);
    std::size_t ca = na(rng), cb = nb(rng);
    for (std::size_t i = 0; i < ca; ++i) {
      FeatureVector v;
      for (const char* t : sense_a) v.weights[t] = weight(rng);
      vectors.push_back(v);
      truth.push_back(0);
    }
    for (std::size_t i = 0; i < cb; ++i) {
      FeatureVector v;
      for (const char* t : sense_b) v.weights[t] = weight(rng);
      vectors.push_back(v);
      truth.push_back(1);
    }
    auto clusters = cut_and_represent(agglomerate(vectors), vectors, 2);
    REQUIRE(clusters.size() == 2);
    std::size_t pure = 0;
    for (const auto& c : clusters) {
      std::map<int, std::size_t> votes;
      for (int m : c.member_ids) ++votes[truth[static_cast<std::size_t>(m)]];
      pure += std::max(votes[0], votes[1]);
    }
    CHECK(pure == vectors.size());  // purity 1.0
  }
}

TEST_CASE("cut_and_represent validates its inputs") {
  std::vector<FeatureVector> vectors = {fv({{"a", 1}})};
  auto d = agglomerate(vectors);
  CHECK_THROWS_AS(cut_and_represent(d, vectors, 0), ConfigError);
  CHECK_THROWS_AS(cut_and_represent(d, {}, 2), ConfigError);
  CHECK_THROWS_AS(agglomerate({}), ConfigError);
}

TEST_CASE("stopword files are folded line sets") {
  auto words = load_stopwords("# comment\nThe\n\nof\n  and  \n");
  CHECK(words == std::set<std::string>{"the", "of", "and"});
}
