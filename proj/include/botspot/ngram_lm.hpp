#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "botspot/errors.hpp"
#include "botspot/text.hpp"

namespace botspot {

struct LmConfig {
  int order = 2;
  double alpha = 1.0;
  std::vector<double> lambdas;  // one per order, low to high; empty = uniform
  std::size_t min_count = 1;

  void validate() const {
    if (order < 1) throw InvalidArgumentError("order must be >= 1");
    if (!(alpha > 0.0)) throw InvalidArgumentError("alpha must be > 0");
    if (!lambdas.empty()) {
      if (lambdas.size() != static_cast<std::size_t>(order)) {
        throw InvalidArgumentError("need one lambda per order");
      }
      double sum = 0.0;
      for (const double l : lambdas) {
        if (l < 0.0) throw InvalidArgumentError("lambdas must be >= 0");
        sum += l;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidArgumentError("lambdas must sum to 1");
      }
    }
  }

  std::vector<double> effective_lambdas() const {
    if (!lambdas.empty()) return lambdas;
    return std::vector<double>(static_cast<std::size_t>(order),
                               1.0 / static_cast<double>(order));
  }
};

// Interpolated n-gram model with additive smoothing at every order:
//   p(w|h) = sum_k lambda_k * (c_k(h_k, w) + alpha) / (c_k(h_k) + alpha * V)
// where h_k is the length k-1 suffix of the history and V counts every vocab
// entry except <bos>, which can never be predicted.
class NGramLM {
 public:
  using Context = std::vector<std::int32_t>;

  struct ContextCounts {
    std::int64_t total = 0;
    std::map<std::int32_t, std::int64_t> events;
  };

  NGramLM(Vocabulary vocab, LmConfig config)
      : vocab_(std::move(vocab)), config_(std::move(config)) {
    config_.validate();
    lambdas_ = config_.effective_lambdas();
    counts_.resize(static_cast<std::size_t>(config_.order));
  }

  static NGramLM train(const std::vector<TokenSeq>& corpus, LmConfig config) {
    config.validate();
    NGramLM lm(build_vocab(corpus, config.min_count), config);
    for (const auto& tokens : corpus) lm.observe(tokens);
    return lm;
  }

  const Vocabulary& vocab() const { return vocab_; }
  const LmConfig& config() const { return config_; }

  // Probability of the next token id given the full padded history.
  double prob(std::int32_t word, const Context& history) const {
    const auto vsize = static_cast<double>(vocab_.event_count());
    double p = 0.0;
    for (int k = 1; k <= config_.order; ++k) {
      const auto need = static_cast<std::size_t>(k - 1);
      Context ctx(history.end() - static_cast<std::ptrdiff_t>(
                                      std::min(need, history.size())),
                  history.end());
      double total = 0.0;
      double count = 0.0;
      const auto& table = counts_[static_cast<std::size_t>(k - 1)];
      const auto it = table.find(ctx);
      if (it != table.end()) {
        total = static_cast<double>(it->second.total);
        const auto ev = it->second.events.find(word);
        if (ev != it->second.events.end()) {
          count = static_cast<double>(ev->second);
        }
      }
      p += lambdas_[static_cast<std::size_t>(k - 1)] * (count + config_.alpha) /
           (total + config_.alpha * vsize);
    }
    return p;
  }

  // Natural-log probability of the token sequence including the end marker.
  double log_prob(const TokenSeq& tokens) const {
    const auto ids = padded_ids(tokens);
    const auto start = static_cast<std::size_t>(config_.order - 1);
    double lp = 0.0;
    for (std::size_t i = start; i < ids.size(); ++i) {
      const Context history(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(i));
      lp += std::log(prob(ids[i], history));
    }
    return lp;
  }

  // The model predicts every token plus the end marker.
  static std::size_t predicted_count(const TokenSeq& tokens) {
    return tokens.size() + 1;
  }

  double perplexity(const TokenSeq& tokens) const {
    return std::exp(-log_prob(tokens) /
                    static_cast<double>(predicted_count(tokens)));
  }

  double perplexity_text(std::string_view text) const {
    return perplexity(tokenize(text));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = "ngram_lm";
    j["order"] = config_.order;
    j["alpha"] = config_.alpha;
    j["lambdas"] = lambdas_;
    j["vocab"] = vocab_.tokens();
    nlohmann::ordered_json tables = nlohmann::ordered_json::array();
    for (const auto& table : counts_) {
      nlohmann::ordered_json entries = nlohmann::ordered_json::array();
      for (const auto& [ctx, cc] : table) {
        nlohmann::ordered_json entry;
        entry["ctx"] = ctx;
        entry["total"] = cc.total;
        nlohmann::ordered_json events = nlohmann::ordered_json::array();
        for (const auto& [word, count] : cc.events) {
          events.push_back({word, count});
        }
        entry["events"] = std::move(events);
        entries.push_back(std::move(entry));
      }
      tables.push_back(std::move(entries));
    }
    j["counts"] = std::move(tables);
    return j;
  }

  static NGramLM from_json(const nlohmann::json& j) {
    try {
      if (!j.is_object() || j.value("kind", "") != "ngram_lm") {
        throw ParseError("not an ngram_lm model file");
      }
      if (j.value("format_version", 0) != 1) {
        throw ParseError("unsupported ngram_lm format_version");
      }
      LmConfig config;
      config.order = j.at("order").get<int>();
      config.alpha = j.at("alpha").get<double>();
      config.lambdas = j.at("lambdas").get<std::vector<double>>();
      Vocabulary vocab(j.at("vocab").get<std::vector<std::string>>());
      NGramLM lm(std::move(vocab), std::move(config));
      const auto& tables = j.at("counts");
      if (!tables.is_array() ||
          tables.size() != lm.counts_.size()) {
        throw ParseError("counts must hold one table per order");
      }
      for (std::size_t k = 0; k < lm.counts_.size(); ++k) {
        for (const auto& entry : tables[k]) {
          ContextCounts cc;
          cc.total = entry.at("total").get<std::int64_t>();
          for (const auto& ev : entry.at("events")) {
            cc.events[ev.at(0).get<std::int32_t>()] =
                ev.at(1).get<std::int64_t>();
          }
          const auto ctx = entry.at("ctx").get<Context>();
          if (ctx.size() != k) {
            throw ParseError("context length does not match its order");
          }
          lm.counts_[k].emplace(ctx, std::move(cc));
        }
      }
      return lm;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad ngram_lm model: ") + e.what());
    }
  }

  const std::vector<std::map<Context, ContextCounts>>& counts() const {
    return counts_;
  }

 private:
  std::vector<std::int32_t> padded_ids(const TokenSeq& tokens) const {
    std::vector<std::int32_t> ids(static_cast<std::size_t>(config_.order - 1),
                                  Vocabulary::kBosId);
    ids.reserve(ids.size() + tokens.size() + 1);
    for (const auto& t : tokens) ids.push_back(vocab_.id_or_unk(t));
    ids.push_back(Vocabulary::kSepId);
    return ids;
  }

  void observe(const TokenSeq& tokens) {
    const auto ids = padded_ids(tokens);
    const auto start = static_cast<std::size_t>(config_.order - 1);
    for (std::size_t i = start; i < ids.size(); ++i) {
      for (int k = 1; k <= config_.order; ++k) {
        const auto need = static_cast<std::size_t>(k - 1);
        const Context ctx(ids.begin() + static_cast<std::ptrdiff_t>(i - need),
                          ids.begin() + static_cast<std::ptrdiff_t>(i));
        auto& cc = counts_[static_cast<std::size_t>(k - 1)][ctx];
        cc.total += 1;
        cc.events[ids[i]] += 1;
      }
    }
  }

  Vocabulary vocab_;
  LmConfig config_;
  std::vector<double> lambdas_;
  std::vector<std::map<Context, ContextCounts>> counts_;
};

}  // namespace botspot
