#include "termscribe/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "termscribe/langmodel.hpp"

namespace termscribe {

namespace {

bool punct_only_token(std::string_view token) {
  for (char c : token) {
    if (word_byte(c)) return false;
  }
  return !token.empty();
}

}  // namespace

std::optional<FeatureVector> vectorize(const Candidate& candidate,
                                       const std::set<std::string>& stopwords,
                                       std::size_t min_token_len) {
  FeatureVector fv;
  for (const auto& tok : lm_tokenize(candidate.text)) {
    if (tok == kNum) continue;
    if (punct_only_token(tok)) continue;
    if (tok.size() < min_token_len) continue;
    if (stopwords.count(tok)) continue;
    ++fv.weights[tok];
  }
  if (fv.weights.empty()) return std::nullopt;
  return fv;
}

double cosine(const FeatureVector& u, const FeatureVector& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (const auto& [tok, w] : u.weights) {
    nu += static_cast<double>(w) * w;
    auto it = v.weights.find(tok);
    if (it != v.weights.end()) dot += static_cast<double>(w) * it->second;
  }
  for (const auto& [tok, w] : v.weights) nv += static_cast<double>(w) * w;
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("cosine over an empty feature vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace {

struct ActiveCluster {
  int id = 0;
  std::vector<int> leaves;  // sorted
};

// Group-average linkage summed in canonical (sorted leaf) order so the
// result is bit-reproducible.
double linkage(const std::vector<std::vector<double>>& sim,
               const ActiveCluster& a, const ActiveCluster& b) {
  double sum = 0.0;
  for (int i : a.leaves)
    for (int j : b.leaves) sum += sim[i][j];
  return sum / (static_cast<double>(a.leaves.size()) *
                static_cast<double>(b.leaves.size()));
}

std::vector<std::vector<double>> similarity_matrix(
    const std::vector<FeatureVector>& vectors) {
  std::size_t n = vectors.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sim[i][j] = sim[j][i] = cosine(vectors[i], vectors[j]);
  return sim;
}

}  // namespace

Dendrogram agglomerate(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw ConfigError("agglomerate: no vectors");
  Dendrogram d;
  d.leaves = vectors.size();
  if (vectors.size() == 1) return d;

  auto sim = similarity_matrix(vectors);
  std::vector<ActiveCluster> active;
  active.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    active.push_back(ActiveCluster{static_cast<int>(i), {static_cast<int>(i)}});

  int next_id = static_cast<int>(vectors.size());
  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best_sim = -1.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        double s = linkage(sim, active[a], active[b]);
        int lo = std::min(active[a].id, active[b].id);
        int hi = std::max(active[a].id, active[b].id);
        int cur_lo = std::min(active[best_a].id, active[best_b].id);
        int cur_hi = std::max(active[best_a].id, active[best_b].id);
        if (s > best_sim ||
            (s == best_sim && (lo < cur_lo || (lo == cur_lo && hi < cur_hi)))) {
          best_sim = s;
          best_a = a;
          best_b = b;
        }
      }
    }
    ActiveCluster merged;
    merged.id = next_id++;
    merged.leaves = active[best_a].leaves;
    merged.leaves.insert(merged.leaves.end(), active[best_b].leaves.begin(),
                         active[best_b].leaves.end());
    std::sort(merged.leaves.begin(), merged.leaves.end());
    d.merges.push_back(Merge{active[best_a].id, active[best_b].id, best_sim});
    // Erase the higher index first to keep the lower one valid.
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
    active.push_back(std::move(merged));
  }
  return d;
}

std::vector<Cluster> cut_and_represent(const Dendrogram& dendrogram,
                                       const std::vector<FeatureVector>& vectors,
                                       int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (vectors.size() != dendrogram.leaves)
    throw ConfigError("cut_and_represent: vector/dendrogram size mismatch");
  std::size_t n = dendrogram.leaves;
  if (n == 0) return {};

  // Rebuild membership, replaying merges. With n < k+1 every item stays a
  // singleton; otherwise the last k-1 merges are undone.
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i)
    groups[static_cast<int>(i)] = {static_cast<int>(i)};
  std::size_t replay = 0;
  if (n >= static_cast<std::size_t>(k) + 1) {
    replay = dendrogram.merges.size() - static_cast<std::size_t>(k - 1);
  } else {
    replay = 0;
  }
  int next_id = static_cast<int>(n);
  for (std::size_t m = 0; m < replay; ++m) {
    const Merge& mg = dendrogram.merges[m];
    auto a = groups.find(mg.left);
    auto b = groups.find(mg.right);
    if (a == groups.end() || b == groups.end())
      throw ConfigError("cut_and_represent: inconsistent dendrogram ids");
    std::vector<int> merged = a->second;
    merged.insert(merged.end(), b->second.begin(), b->second.end());
    std::sort(merged.begin(), merged.end());
    groups.erase(a);
    groups.erase(b);
    groups[next_id + static_cast<int>(m)] = std::move(merged);
  }
  (void)next_id;

  auto sim = similarity_matrix(vectors);
  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (auto& [id, members] : groups) {
    Cluster c;
    c.member_ids = members;
    double best_sum = -1.0;
    int best = members.front();
    for (int i : members) {
      double sum = 0.0;
      for (int j : members)
        if (j != i) sum += sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (sum > best_sum) {
        best_sum = sum;
        best = i;  // ties keep the smallest id: members are ascending
      }
    }
    c.representative_id = best;
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              return a.member_ids.front() < b.member_ids.front();
            });
  return clusters;
}

std::set<std::string> load_stopwords(const std::string& content) {
  std::set<std::string> words;
  for (const auto& raw : split_lines(content)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    words.insert(to_lower(line));
  }
  return words;
}

}  // namespace termscribe
