#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace termscribe {

// Fatal problems: bad configuration, unusable input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Corrupt or mismatched on-disk formats (model files, database, judgments).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects non-fatal skip/recovery notes (pages skipped, lines rejected,
// dangling anchors, ...). Callers that don't care pass nullptr.
struct Report {
  std::vector<std::string> notes;

  void add(std::string note) { notes.push_back(std::move(note)); }
  bool empty() const { return notes.empty(); }
  std::size_t size() const { return notes.size(); }
};

inline void report(Report* rep, std::string note) {
  if (rep) rep->add(std::move(note));
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline char ascii_upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

inline bool ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline bool ascii_alnum(char c) { return ascii_alpha(c) || ascii_digit(c); }

inline bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Bytes >= 0x80 belong to multi-byte sequences and are treated as word
// material so case folding and boundary checks never split them.
inline bool word_byte(char c) {
  return ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_upper(c);
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  return true;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

}  // namespace termscribe
