#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "botspot/errors.hpp"

namespace botspot {

using TokenSeq = std::vector<std::string>;

namespace detail {

// Decodes one UTF-8 sequence starting at i and advances i past it. Malformed
// bytes are consumed one at a time and reported as out-of-range codepoints so
// they pass through the tokenizer untouched.
inline std::uint32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  std::uint32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    value = b0 & 0x07;
  } else {
    ++i;
    return 0x110000u + b0;  // stray continuation or invalid lead byte
  }
  if (i + extra >= s.size()) {
    ++i;
    return 0x110000u + b0;
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0x110000u + b0;
    }
    value = (value << 6) | (b & 0x3F);
  }
  i += extra + 1;
  return value;
}

inline bool is_space(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline bool is_ascii_punct(std::uint32_t cp) {
  return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
         (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
}

}  // namespace detail

// Lowercases (ASCII), splits on Unicode whitespace, and detaches leading and
// trailing punctuation of each chunk into standalone tokens. Interior
// punctuation (apostrophes, hyphens, ...) stays inside the token, so
// contractions like "won't" survive as single units.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::vector<std::pair<std::uint32_t, std::string>> chunk;

  auto flush = [&] {
    if (chunk.empty()) return;
    std::size_t lo = 0;
    std::size_t hi = chunk.size();
    while (lo < hi && detail::is_ascii_punct(chunk[lo].first)) {
      out.push_back(chunk[lo].second);
      ++lo;
    }
    std::size_t core_end = hi;
    while (core_end > lo && detail::is_ascii_punct(chunk[core_end - 1].first)) {
      --core_end;
    }
    if (core_end > lo) {
      std::string word;
      for (std::size_t k = lo; k < core_end; ++k) word += chunk[k].second;
      out.push_back(std::move(word));
    }
    for (std::size_t k = core_end; k < hi; ++k) out.push_back(chunk[k].second);
    chunk.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = detail::next_codepoint(text, i);
    if (detail::is_space(cp)) {
      flush();
      continue;
    }
    std::string bytes(text.substr(start, i - start));
    if (cp >= 'A' && cp <= 'Z') bytes[0] = static_cast<char>(cp - 'A' + 'a');
    chunk.emplace_back(cp, std::move(bytes));
  }
  flush();
  return out;
}

// Token-index map with the special markers always present at fixed slots.
class Vocabulary {
 public:
  static constexpr int kUnkId = 0;
  static constexpr int kBosId = 1;
  static constexpr int kSepId = 2;
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kBos = "<bos>";
  static constexpr std::string_view kSep = "<sep>";

  Vocabulary() {
    add(std::string(kUnk));
    add(std::string(kBos));
    add(std::string(kSep));
  }

  // Restores a vocabulary from its serialized token list.
  explicit Vocabulary(const std::vector<std::string>& tokens) {
    if (tokens.size() < 3 || tokens[0] != kUnk || tokens[1] != kBos ||
        tokens[2] != kSep) {
      throw ParseError("vocabulary must start with the special markers");
    }
    for (const auto& t : tokens) add(t);
  }

  int id_or_unk(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
  }

  bool contains(const std::string& token) const {
    return index_.count(token) > 0;
  }

  const std::string& token(int id) const { return tokens_.at(id); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Number of predictable symbols: every token except BOS, which only ever
  // appears as context padding.
  int event_count() const { return size() - 1; }

  void add(const std::string& token) {
    if (index_.count(token)) {
      throw DuplicateIdError("duplicate vocabulary token: " + token);
    }
    index_.emplace(token, static_cast<int>(tokens_.size()));
    tokens_.push_back(token);
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Tokens seen at least min_count times get indices in frequency-descending,
// then lexicographic order, after the three special markers. Anything else
// maps to UNK at lookup time.
inline Vocabulary build_vocab(const std::vector<TokenSeq>& corpus,
                              long long min_count = 1) {
  if (corpus.empty()) throw EmptyCorpusError("corpus is empty");
  if (min_count < 1) {
    throw InvalidArgumentError("min_count must be a positive integer");
  }

  std::unordered_map<std::string, long long> freq;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) ++freq[tok];
  }

  std::vector<std::pair<std::string, long long>> kept;
  kept.reserve(freq.size());
  for (auto& [tok, count] : freq) {
    if (count >= min_count) kept.emplace_back(tok, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  for (const auto& [tok, count] : kept) {
    if (!vocab.contains(tok)) vocab.add(tok);
  }
  return vocab;
}

}  // namespace botspot
