#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "termscribe/common.hpp"
#include "termscribe/extract.hpp"

namespace termscribe {

// Reserved token spellings. lm_tokenize lower-cases everything, so the
// upper-case names can never collide with corpus tokens.
inline constexpr std::string_view kUnk = "UNK";
inline constexpr std::string_view kBos = "BOS";
inline constexpr std::string_view kEos = "EOS";
inline constexpr std::string_view kNum = "NUM";

// Lower-cases, splits on whitespace, isolates each punctuation character and
// maps digit runs to the NUM class token.
std::vector<std::string> lm_tokenize(std::string_view text);

struct FilterConfig {
  double threshold = 1000.0;  // keep perplexity strictly below this
};

// Order-3 language model with interpolated Witten-Bell smoothing, grounded in
// an add-one unigram. BOS is context-only; predicted events are the sentence
// tokens plus EOS.
class NgramModel {
 public:
  static constexpr int kOrder = 3;

  // `sentences` are token lists; tokens whose corpus-wide count is below
  // `cutoff` train as UNK.
  static NgramModel train(const std::vector<std::vector<std::string>>& sentences,
                          int order = kOrder, int cutoff = 1);

  // p(word | c1 c2); unknown strings map to UNK. Querying BOS as the
  // predicted word is a contract violation.
  double prob(const std::string& word, const std::string& c1,
              const std::string& c2) const;

  // Sum of ln p over the BOS-padded sequence including the EOS event.
  double sequence_log_prob(const std::vector<std::string>& tokens) const;

  // exp(-log_prob / M) with M = tokens.size() + 1 predicted events.
  double perplexity(const std::vector<std::string>& tokens) const;

  void save(const std::string& path) const;
  static NgramModel load(const std::string& path);

  int cutoff() const { return cutoff_; }
  std::size_t vocab_size() const { return id_to_token_.size(); }
  // All predictable tokens: the trained vocabulary plus UNK and EOS, no BOS.
  std::vector<std::string> predictable_tokens() const;
  bool in_vocab(const std::string& token) const;

 private:
  NgramModel() = default;
  void finalize();  // builds context tables from the raw counts

  std::uint32_t map(const std::string& token) const;
  double p1(std::uint32_t w) const;
  double p2(std::uint32_t w, std::uint32_t c2) const;
  double p3(std::uint32_t w, std::uint32_t c1, std::uint32_t c2) const;

  static constexpr std::uint32_t kUnkId = 0;
  static constexpr std::uint32_t kBosId = 1;
  static constexpr std::uint32_t kEosId = 2;

  struct ContextStat {
    std::uint64_t total = 0;
    std::uint32_t distinct = 0;
  };

  int cutoff_ = 1;
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, std::uint32_t> token_to_id_;
  std::unordered_map<std::uint32_t, std::uint64_t> unigrams_;
  std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;
  std::unordered_map<std::uint64_t, std::uint64_t> trigrams_;
  std::unordered_map<std::uint32_t, ContextStat> ctx1_;
  std::unordered_map<std::uint64_t, ContextStat> ctx2_;
  std::uint64_t total_events_ = 0;  // N: all predicted positions
};

// Scores every candidate (perplexity set in place) and returns those strictly
// below cfg.threshold, preserving input order.
std::vector<Candidate> filter_candidates(std::vector<Candidate>& cands,
                                         const NgramModel& model,
                                         const FilterConfig& cfg);

}  // namespace termscribe
