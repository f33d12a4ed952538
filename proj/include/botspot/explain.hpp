#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "botspot/errors.hpp"
#include "botspot/text.hpp"

namespace botspot {

// Any classifier exposing P(AI | text).
using ProbaFn = std::function<double(const std::string&)>;

struct Explanation {
  std::string id;
  TokenSeq tokens;
  std::vector<double> phi;      // one per token, probability units
  double base_value = 0.0;      // v(empty set)
  double fx = 0.0;              // v(all tokens)
  std::string method;           // "exact" or "sampled"
  std::vector<double> stderr_;  // sampled only
  std::uint64_t seed = 0;       // sampled only
  std::uint64_t permutations = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["tokens"] = tokens;
    j["phi"] = phi;
    j["base_value"] = base_value;
    j["fx"] = fx;
    j["method"] = method;
    if (method == "sampled") {
      j["stderr"] = stderr_;
      j["seed"] = seed;
      j["permutations"] = permutations;
    }
    return j;
  }

  static Explanation from_json(const nlohmann::json& j) {
    try {
      Explanation e;
      e.id = j.at("id").get<std::string>();
      e.tokens = j.at("tokens").get<TokenSeq>();
      e.phi = j.at("phi").get<std::vector<double>>();
      e.base_value = j.at("base_value").get<double>();
      e.fx = j.at("fx").get<double>();
      e.method = j.at("method").get<std::string>();
      if (j.contains("stderr")) {
        e.stderr_ = j.at("stderr").get<std::vector<double>>();
      }
      if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("permutations")) {
        e.permutations = j.at("permutations").get<std::uint64_t>();
      }
      if (e.phi.size() != e.tokens.size()) {
        throw ParseError("phi/token length mismatch");
      }
      return e;
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("bad explanation: ") + ex.what());
    }
  }
};

namespace detail {

inline std::string join_masked(const TokenSeq& tokens, std::uint32_t mask) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!(mask & (1u << i))) continue;
    if (!text.empty()) text += ' ';
    text += tokens[i];
  }
  return text;
}

inline std::string join_kept(const TokenSeq& tokens,
                             const std::vector<bool>& kept) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!kept[i]) continue;
    if (!text.empty()) text += ' ';
    text += tokens[i];
  }
  return text;
}

}  // namespace detail

// Classifier output on the text formed by keeping only the subset tokens, in
// their original order. The empty subset scores the empty string.
inline double value_function(const ProbaFn& model, const TokenSeq& tokens,
                             const std::vector<std::size_t>& subset) {
  std::vector<bool> kept(tokens.size(), false);
  for (const std::size_t i : subset) {
    if (i >= tokens.size()) {
      throw InvalidArgumentError("subset index out of range");
    }
    kept[i] = true;
  }
  return model(detail::join_kept(tokens, kept));
}

inline constexpr std::size_t kDefaultShapleyCap = 15;

// Exact Shapley values over all 2^m coalitions with a memoized value table.
// Weights use factorials up to 15!, which doubles represent exactly.
inline Explanation shapley_exact(const ProbaFn& model, const TokenSeq& tokens,
                                 std::size_t cap = kDefaultShapleyCap) {
  const std::size_t m = tokens.size();
  if (m == 0) throw EmptyTextError("nothing to explain");
  if (m > cap) {
    throw TooManyTokensError("exact mode handles at most " +
                             std::to_string(cap) + " tokens, got " +
                             std::to_string(m));
  }

  const std::uint32_t full = (m == 32) ? 0xffffffffu : ((1u << m) - 1u);
  std::vector<double> v(static_cast<std::size_t>(full) + 1);
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    v[mask] = model(detail::join_masked(tokens, mask));
  }

  std::vector<double> fact(m + 1, 1.0);
  for (std::size_t k = 1; k <= m; ++k) {
    fact[k] = fact[k - 1] * static_cast<double>(k);
  }

  Explanation e;
  e.tokens = tokens;
  e.phi.assign(m, 0.0);
  e.base_value = v[0];
  e.fx = v[full];
  e.method = "exact";
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      const double w = fact[s] * fact[m - s - 1] / fact[m];
      e.phi[i] += w * (v[mask | bit] - v[mask]);
    }
  }
  return e;
}

// Monte Carlo estimate: average marginal contribution over sampled token
// permutations. The shuffle is hand-rolled so results are identical across
// standard libraries for a given seed.
inline Explanation shapley_sampled(const ProbaFn& model, const TokenSeq& tokens,
                                   std::uint64_t permutations,
                                   std::uint64_t seed) {
  const std::size_t m = tokens.size();
  if (m == 0) throw EmptyTextError("nothing to explain");
  if (permutations < 1) {
    throw InvalidArgumentError("permutations must be >= 1");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(m);
  std::vector<bool> kept(m);
  std::vector<double> sum(m, 0.0);
  std::vector<double> sumsq(m, 0.0);

  const double v_empty = model("");
  const double fx = model(detail::join_kept(tokens, std::vector<bool>(m, true)));

  for (std::uint64_t p = 0; p < permutations; ++p) {
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t i = m; i > 1; --i) {
      const std::size_t j = rng() % i;
      std::swap(order[i - 1], order[j]);
    }
    std::fill(kept.begin(), kept.end(), false);
    double prev = v_empty;
    for (std::size_t step = 0; step < m; ++step) {
      kept[order[step]] = true;
      const double cur = step + 1 == m
                             ? fx
                             : model(detail::join_kept(tokens, kept));
      const double marginal = cur - prev;
      sum[order[step]] += marginal;
      sumsq[order[step]] += marginal * marginal;
      prev = cur;
    }
  }

  Explanation e;
  e.tokens = tokens;
  e.phi.assign(m, 0.0);
  e.stderr_.assign(m, 0.0);
  e.base_value = v_empty;
  e.fx = fx;
  e.method = "sampled";
  e.seed = seed;
  e.permutations = permutations;
  const auto n = static_cast<double>(permutations);
  for (std::size_t i = 0; i < m; ++i) {
    e.phi[i] = sum[i] / n;
    if (permutations > 1) {
      const double var =
          std::max(0.0, (sumsq[i] - sum[i] * sum[i] / n) / (n - 1.0));
      e.stderr_[i] = std::sqrt(var / n);
    }
  }
  return e;
}

inline Explanation shapley_exact_text(const ProbaFn& model,
                                      std::string_view text,
                                      std::size_t cap = kDefaultShapleyCap) {
  return shapley_exact(model, tokenize(text), cap);
}

inline Explanation shapley_sampled_text(const ProbaFn& model,
                                        std::string_view text,
                                        std::uint64_t permutations,
                                        std::uint64_t seed) {
  return shapley_sampled(model, tokenize(text), permutations, seed);
}

struct TopFeature {
  std::size_t position = 0;
  std::string token;
  double phi = 0.0;
};

// Tokens ranked by |phi| descending; equal magnitudes keep text order.
inline std::vector<TopFeature> top_features(const Explanation& e,
                                            std::size_t k) {
  std::vector<std::size_t> idx(e.tokens.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.phi[a]) > std::abs(e.phi[b]);
  });
  std::vector<TopFeature> top;
  for (std::size_t i = 0; i < idx.size() && i < k; ++i) {
    top.push_back({idx[i], e.tokens[idx[i]], e.phi[idx[i]]});
  }
  return top;
}

}  // namespace botspot
