#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "termscribe/common.hpp"
#include "termscribe/extract.hpp"

namespace termscribe {

// Sparse content-word frequency vector; never empty.
struct FeatureVector {
  std::map<std::string, int> weights;
};

// Tokenizes the candidate text and counts surviving content tokens.
// Returns nullopt when everything gets filtered (the description cannot be
// clustered and is reported by the caller).
std::optional<FeatureVector> vectorize(const Candidate& candidate,
                                       const std::set<std::string>& stopwords,
                                       std::size_t min_token_len = 1);

double cosine(const FeatureVector& u, const FeatureVector& v);

struct Merge {
  int left = 0;
  int right = 0;
  double similarity = 0.0;
};

// Leaves are 0..n-1; each merge creates id n, n+1, ... in order.
struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

// Bottom-up group-average agglomeration over cosine similarity. Ties merge
// the pair with the lexicographically smallest (min id, max id).
Dendrogram agglomerate(const std::vector<FeatureVector>& vectors);

struct Cluster {
  std::vector<int> member_ids;  // sorted leaf indices
  int representative_id = 0;    // medoid by summed cosine similarity
};

// Splits the hierarchy into k clusters (every item is a singleton when
// n < k + 1) and picks each cluster's representative. Clusters are ordered
// by smallest member id.
std::vector<Cluster> cut_and_represent(const Dendrogram& dendrogram,
                                       const std::vector<FeatureVector>& vectors,
                                       int k);

std::set<std::string> load_stopwords(const std::string& content);

}  // namespace termscribe
