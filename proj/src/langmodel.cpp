#include "termscribe/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace termscribe {

std::vector<std::string> lm_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (ascii_space(c)) {
      ++i;
      continue;
    }
    if (ascii_digit(c)) {
      while (i < text.size() && ascii_digit(text[i])) ++i;
      tokens.emplace_back(kNum);
      continue;
    }
    if (word_byte(c)) {
      std::size_t start = i;
      while (i < text.size() && word_byte(text[i]) && !ascii_digit(text[i]))
        ++i;
      tokens.push_back(to_lower(text.substr(start, i - start)));
      continue;
    }
    tokens.emplace_back(1, c);  // each punctuation character stands alone
    ++i;
  }
  return tokens;
}

namespace {

constexpr std::uint32_t kIdBits = 21;  // fits vocabularies up to 2M types
constexpr std::uint64_t kIdMask = (1ull << kIdBits) - 1;

std::uint64_t pack2(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << kIdBits) | b;
}

std::uint64_t pack3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return (pack2(a, b) << kIdBits) | c;
}

}  // namespace

NgramModel NgramModel::train(
    const std::vector<std::vector<std::string>>& sentences, int order,
    int cutoff) {
  if (order != kOrder)
    throw ConfigError("only order-" + std::to_string(kOrder) +
                      " models are supported");
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");

  std::uint64_t raw_tokens = 0;
  std::unordered_map<std::string, std::uint64_t> raw_counts;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      ++raw_counts[tok];
      ++raw_tokens;
    }
  }
  if (raw_tokens < static_cast<std::uint64_t>(order))
    throw ConfigError("training corpus has fewer than " +
                      std::to_string(order) + " tokens");

  NgramModel m;
  m.cutoff_ = cutoff;
  m.id_to_token_ = {std::string(kUnk), std::string(kBos), std::string(kEos)};
  for (std::size_t id = 0; id < m.id_to_token_.size(); ++id)
    m.token_to_id_.emplace(m.id_to_token_[id], id);

  auto intern = [&](const std::string& tok) -> std::uint32_t {
    auto it = m.token_to_id_.find(tok);
    if (it != m.token_to_id_.end()) return it->second;
    if (raw_counts[tok] < static_cast<std::uint64_t>(cutoff)) return kUnkId;
    std::uint32_t id = static_cast<std::uint32_t>(m.id_to_token_.size());
    if (id > kIdMask) throw ConfigError("vocabulary exceeds 2^21 types");
    m.id_to_token_.push_back(tok);
    m.token_to_id_.emplace(tok, id);
    return id;
  };

  for (const auto& sent : sentences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(sent.size() + 3);
    ids.push_back(kBosId);
    ids.push_back(kBosId);
    for (const auto& tok : sent) ids.push_back(intern(tok));
    ids.push_back(kEosId);
    for (std::size_t i = 2; i < ids.size(); ++i) {
      ++m.unigrams_[ids[i]];
      ++m.bigrams_[pack2(ids[i - 1], ids[i])];
      ++m.trigrams_[pack3(ids[i - 2], ids[i - 1], ids[i])];
      ++m.total_events_;
    }
  }
  m.finalize();
  return m;
}

void NgramModel::finalize() {
  ctx1_.clear();
  ctx2_.clear();
  for (const auto& [key, count] : bigrams_) {
    auto& stat = ctx1_[static_cast<std::uint32_t>(key >> kIdBits)];
    stat.total += count;
    ++stat.distinct;
  }
  for (const auto& [key, count] : trigrams_) {
    auto& stat = ctx2_[key >> kIdBits];
    stat.total += count;
    ++stat.distinct;
  }
}

std::uint32_t NgramModel::map(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

bool NgramModel::in_vocab(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

std::vector<std::string> NgramModel::predictable_tokens() const {
  std::vector<std::string> out;
  out.reserve(id_to_token_.size() - 1);
  for (std::size_t id = 0; id < id_to_token_.size(); ++id)
    if (id != kBosId) out.push_back(id_to_token_[id]);
  return out;
}

double NgramModel::p1(std::uint32_t w) const {
  // Add-one over the predictable set: every id except BOS.
  double vocab = static_cast<double>(id_to_token_.size() - 1);
  auto it = unigrams_.find(w);
  double count = it == unigrams_.end() ? 0.0 : static_cast<double>(it->second);
  return (count + 1.0) / (static_cast<double>(total_events_) + vocab);
}

double NgramModel::p2(std::uint32_t w, std::uint32_t c2) const {
  auto ctx = ctx1_.find(c2);
  if (ctx == ctx1_.end()) return p1(w);
  double total = static_cast<double>(ctx->second.total);
  double distinct = static_cast<double>(ctx->second.distinct);
  double lambda = total / (total + distinct);
  auto it = bigrams_.find(pack2(c2, w));
  double count = it == bigrams_.end() ? 0.0 : static_cast<double>(it->second);
  return lambda * (count / total) + (1.0 - lambda) * p1(w);
}

double NgramModel::p3(std::uint32_t w, std::uint32_t c1, std::uint32_t c2) const {
  auto ctx = ctx2_.find(pack2(c1, c2));
  if (ctx == ctx2_.end()) return p2(w, c2);
  double total = static_cast<double>(ctx->second.total);
  double distinct = static_cast<double>(ctx->second.distinct);
  double lambda = total / (total + distinct);
  auto it = trigrams_.find(pack3(c1, c2, w));
  double count = it == trigrams_.end() ? 0.0 : static_cast<double>(it->second);
  return lambda * (count / total) + (1.0 - lambda) * p2(w, c2);
}

double NgramModel::prob(const std::string& word, const std::string& c1,
                        const std::string& c2) const {
  std::uint32_t w = map(word);
  if (w == kBosId)
    throw std::invalid_argument("BOS is never a predicted token");
  return p3(w, map(c1), map(c2));
}

double NgramModel::sequence_log_prob(
    const std::vector<std::string>& tokens) const {
  std::uint32_t c1 = kBosId, c2 = kBosId;
  double total = 0.0;
  for (const auto& tok : tokens) {
    std::uint32_t w = map(tok);
    if (w == kBosId) w = kUnkId;  // literal "BOS" text scores as unknown
    total += std::log(p3(w, c1, c2));
    c1 = c2;
    c2 = w;
  }
  total += std::log(p3(kEosId, c1, c2));
  return total;
}

double NgramModel::perplexity(const std::vector<std::string>& tokens) const {
  double m = static_cast<double>(tokens.size() + 1);
  return std::exp(-sequence_log_prob(tokens) / m);
}

// ---------------------------------------------------------------------------
// Model file: versioned structured text, deterministic for a given model.

namespace {

constexpr std::string_view kMagic = "termscribe-ngram 1";

[[noreturn]] void corrupt(const std::string& path, std::size_t line,
                          const std::string& what) {
  throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void NgramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file: " + path);
  out << kMagic << "\n";
  out << "order " << kOrder << "\n";
  out << "cutoff " << cutoff_ << "\n";
  out << "smoothing witten-bell-interpolated\n";
  out << "vocab " << id_to_token_.size() << "\n";
  for (const auto& tok : id_to_token_) out << tok << "\n";

  auto dump = [&out](const char* label, const auto& table, int arity) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(table.begin(),
                                                              table.end());
    std::sort(rows.begin(), rows.end());
    out << label << " " << rows.size() << "\n";
    for (const auto& [key, count] : rows) {
      for (int k = arity - 1; k >= 0; --k)
        out << ((key >> (kIdBits * k)) & kIdMask) << (k ? " " : "");
      out << " " << count << "\n";
    }
  };
  {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
    rows.reserve(unigrams_.size());
    for (const auto& [id, count] : unigrams_) rows.emplace_back(id, count);
    std::sort(rows.begin(), rows.end());
    out << "unigrams " << rows.size() << "\n";
    for (const auto& [id, count] : rows) out << id << " " << count << "\n";
  }
  dump("bigrams", bigrams_, 2);
  dump("trigrams", trigrams_, 3);
  out << "end\n";
  if (!out) throw IoError("short write while saving model: " + path);
}

NgramModel NgramModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model file: " + path);
  std::size_t lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) corrupt(path, lineno + 1, "unexpected end of file");
    ++lineno;
    return line;
  };

  if (next_line() != kMagic)
    corrupt(path, lineno, "not a termscribe ngram model (bad magic)");

  NgramModel m;
  long order = 0;
  {
    std::istringstream hdr(next_line());
    std::string key;
    if (!(hdr >> key >> order) || key != "order")
      corrupt(path, lineno, "expected 'order N'");
    if (order != kOrder)
      corrupt(path, lineno, "model order " + std::to_string(order) +
                                " but order-" + std::to_string(kOrder) +
                                " expected");
  }
  {
    std::istringstream hdr(next_line());
    std::string key;
    if (!(hdr >> key >> m.cutoff_) || key != "cutoff" || m.cutoff_ < 1)
      corrupt(path, lineno, "expected 'cutoff N'");
  }
  if (next_line() != "smoothing witten-bell-interpolated")
    corrupt(path, lineno, "unsupported smoothing method");
  std::size_t vocab = 0;
  {
    std::istringstream hdr(next_line());
    std::string key;
    if (!(hdr >> key >> vocab) || key != "vocab" || vocab < 3)
      corrupt(path, lineno, "expected 'vocab N'");
  }
  m.id_to_token_.reserve(vocab);
  for (std::size_t i = 0; i < vocab; ++i) {
    m.id_to_token_.push_back(next_line());
    if (!m.token_to_id_.emplace(m.id_to_token_.back(), i).second)
      corrupt(path, lineno, "duplicate vocabulary entry");
  }
  if (m.id_to_token_[kUnkId] != kUnk || m.id_to_token_[kBosId] != kBos ||
      m.id_to_token_[kEosId] != kEos)
    corrupt(path, lineno, "reserved tokens missing or misplaced");

  auto read_section = [&](const std::string& label, int arity,
                          auto&& insert) {
    std::istringstream hdr(next_line());
    std::string key;
    std::size_t rows = 0;
    if (!(hdr >> key >> rows) || key != label)
      corrupt(path, lineno, "expected '" + label + " N'");
    for (std::size_t r = 0; r < rows; ++r) {
      std::istringstream row(next_line());
      std::uint64_t ids[3] = {0, 0, 0};
      std::uint64_t count = 0;
      for (int k = 0; k < arity; ++k) {
        if (!(row >> ids[k]) || ids[k] >= m.id_to_token_.size())
          corrupt(path, lineno, "bad token id in " + label);
      }
      if (!(row >> count) || count == 0)
        corrupt(path, lineno, "bad count in " + label);
      std::uint64_t packed = 0;
      for (int k = 0; k < arity; ++k)
        packed = (packed << kIdBits) | ids[k];
      insert(packed, count);
    }
  };

  read_section("unigrams", 1, [&](std::uint64_t key, std::uint64_t c) {
    m.unigrams_[static_cast<std::uint32_t>(key)] = c;
    m.total_events_ += c;
  });
  read_section("bigrams", 2,
               [&](std::uint64_t key, std::uint64_t c) { m.bigrams_[key] = c; });
  read_section("trigrams", 3, [&](std::uint64_t key, std::uint64_t c) {
    m.trigrams_[key] = c;
  });
  if (next_line() != "end") corrupt(path, lineno, "missing end marker");
  m.finalize();
  return m;
}

std::vector<Candidate> filter_candidates(std::vector<Candidate>& cands,
                                         const NgramModel& model,
                                         const FilterConfig& cfg) {
  if (cfg.threshold <= 0) throw ConfigError("filter threshold must be > 0");
  std::vector<Candidate> kept;
  for (auto& cand : cands) {
    cand.perplexity = model.perplexity(lm_tokenize(cand.text));
    if (*cand.perplexity < cfg.threshold) kept.push_back(cand);
  }
  return kept;
}

}  // namespace termscribe
