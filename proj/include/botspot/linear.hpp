#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"
#include "botspot/text.hpp"

namespace botspot {

// (index, weight) pairs with strictly increasing indices.
struct SparseVector {
  std::vector<std::pair<std::int32_t, double>> entries;

  double dot(const std::vector<double>& dense) const {
    double sum = 0.0;
    for (const auto& [i, w] : entries) {
      sum += w * dense[static_cast<std::size_t>(i)];
    }
    return sum;
  }

  double norm() const {
    double sq = 0.0;
    for (const auto& [i, w] : entries) sq += w * w;
    return std::sqrt(sq);
  }
};

// Unigram/bigram vocabulary with smoothed idf:
//   idf(f) = ln((1+D) / (1+df(f))) + 1
// which stays strictly positive even for features in every document.
class FeatureVocab {
 public:
  FeatureVocab() = default;

  FeatureVocab(std::vector<int> orders, std::int64_t documents,
               std::vector<std::string> features, std::vector<std::int64_t> df)
      : orders_(std::move(orders)),
        documents_(documents),
        features_(std::move(features)),
        df_(std::move(df)) {
    validate_orders(orders_);
    if (df_.size() != features_.size()) {
      throw ParseError("feature/df length mismatch");
    }
    idf_.reserve(df_.size());
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (!index_.emplace(features_[i], static_cast<std::int32_t>(i)).second) {
        throw ParseError("duplicate feature: " + features_[i]);
      }
      idf_.push_back(std::log((1.0 + static_cast<double>(documents_)) /
                              (1.0 + static_cast<double>(df_[i]))) +
                     1.0);
    }
  }

  static void validate_orders(const std::vector<int>& orders) {
    if (orders.empty()) throw InvalidArgumentError("need at least one ngram order");
    for (const int n : orders) {
      if (n != 1 && n != 2) {
        throw InvalidArgumentError("ngram orders must be 1 and/or 2");
      }
    }
  }

  static std::vector<std::string> extract_ngrams(const TokenSeq& tokens,
                                                 const std::vector<int>& orders) {
    std::vector<std::string> grams;
    for (const int n : orders) {
      if (tokens.size() + 1 < static_cast<std::size_t>(n) + 1) continue;
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size();
           ++i) {
        std::string g = tokens[i];
        for (int k = 1; k < n; ++k) {
          g += ' ';
          g += tokens[i + static_cast<std::size_t>(k)];
        }
        grams.push_back(std::move(g));
      }
    }
    return grams;
  }

  static FeatureVocab build(const Dataset& train,
                            std::vector<int> orders = {1, 2}) {
    validate_orders(orders);
    if (train.empty()) throw EmptyDatasetError("no documents to featurize");
    std::map<std::string, std::int64_t> df;
    for (const auto& s : train) {
      auto grams = extract_ngrams(tokenize(s.text), orders);
      std::sort(grams.begin(), grams.end());
      grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
      for (const auto& g : grams) ++df[g];
    }
    std::vector<std::pair<std::string, std::int64_t>> ranked(df.begin(),
                                                             df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<std::string> features;
    std::vector<std::int64_t> dfs;
    for (auto& [f, c] : ranked) {
      features.push_back(std::move(f));
      dfs.push_back(c);
    }
    return FeatureVocab(std::move(orders), static_cast<std::int64_t>(train.size()),
                        std::move(features), std::move(dfs));
  }

  std::size_t size() const { return features_.size(); }
  std::int64_t documents() const { return documents_; }
  const std::vector<int>& orders() const { return orders_; }
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<std::int64_t>& df() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }

  std::int32_t index_of(const std::string& feature) const {
    const auto it = index_.find(feature);
    return it == index_.end() ? -1 : it->second;
  }

  // Term counts scaled by idf, no normalization; unseen n-grams drop out.
  SparseVector featurize_raw(const TokenSeq& tokens) const {
    std::map<std::int32_t, double> counts;
    for (const auto& g : extract_ngrams(tokens, orders_)) {
      const auto idx = index_of(g);
      if (idx >= 0) counts[idx] += 1.0;
    }
    SparseVector v;
    v.entries.reserve(counts.size());
    for (const auto& [idx, count] : counts) {
      v.entries.emplace_back(idx, count * idf_[static_cast<std::size_t>(idx)]);
    }
    return v;
  }

  SparseVector featurize(const TokenSeq& tokens) const {
    SparseVector v = featurize_raw(tokens);
    const double norm = v.norm();
    if (norm > 0.0) {
      for (auto& [idx, w] : v.entries) w /= norm;
    }
    return v;
  }

  SparseVector featurize(std::string_view text) const {
    return featurize(tokenize(text));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["orders"] = orders_;
    j["documents"] = documents_;
    j["features"] = features_;
    j["df"] = df_;
    j["idf"] = idf_;
    return j;
  }

  static FeatureVocab from_json(const nlohmann::json& j) {
    try {
      return FeatureVocab(j.at("orders").get<std::vector<int>>(),
                          j.at("documents").get<std::int64_t>(),
                          j.at("features").get<std::vector<std::string>>(),
                          j.at("df").get<std::vector<std::int64_t>>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad feature vocab: ") + e.what());
    }
  }

 private:
  std::vector<int> orders_;
  std::int64_t documents_ = 0;
  std::vector<std::string> features_;
  std::vector<std::int64_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::int32_t> index_;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct TrainConfig {
  double lr = 0.5;
  int epochs = 200;
  double lambda = 1e-4;  // L2 strength; the bias is not penalized
  std::vector<int> ngram_orders = {1, 2};

  void validate() const {
    if (!(lr > 0.0)) throw InvalidArgumentError("lr must be > 0");
    if (epochs < 0) throw InvalidArgumentError("epochs must be >= 0");
    if (lambda < 0.0) throw InvalidArgumentError("lambda must be >= 0");
    FeatureVocab::validate_orders(ngram_orders);
  }
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

class LinearModel {
 public:
  LinearModel() = default;

  LinearModel(FeatureVocab vocab, TrainConfig config)
      : vocab_(std::move(vocab)),
        config_(std::move(config)),
        weights_(vocab_.size(), 0.0) {}

  // Mean binary cross-entropy plus lambda/2 * |w|^2, with its exact gradient.
  // Uses the logit form of BCE so saturated probabilities cannot produce inf.
  LossGrad loss_and_gradient(
      const std::vector<std::pair<SparseVector, double>>& batch) const {
    if (batch.empty()) throw EmptyInputError("empty training batch");
    LossGrad out;
    out.grad_w.assign(weights_.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const auto& [x, y] : batch) {
      const double z = x.dot(weights_) + bias_;
      out.loss += inv_n * (std::max(z, 0.0) - y * z +
                           std::log1p(std::exp(-std::abs(z))));
      const double delta = inv_n * (sigmoid(z) - y);
      for (const auto& [i, w] : x.entries) {
        out.grad_w[static_cast<std::size_t>(i)] += delta * w;
      }
      out.grad_b += delta;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      sq += weights_[i] * weights_[i];
      out.grad_w[i] += config_.lambda * weights_[i];
    }
    out.loss += 0.5 * config_.lambda * sq;
    return out;
  }

  static LinearModel train(const Dataset& data, TrainConfig config = {}) {
    config.validate();
    LinearModel model(FeatureVocab::build(data, config.ngram_orders), config);
    std::vector<std::pair<SparseVector, double>> batch;
    bool has_human = false;
    bool has_ai = false;
    batch.reserve(data.size());
    for (const auto& s : data) {
      if (s.label == Label::Unlabeled) {
        throw InvalidArgumentError("training sample has no label: " + s.id);
      }
      has_human |= s.label == Label::Human;
      has_ai |= s.label == Label::AI;
      batch.emplace_back(model.vocab_.featurize(s.text),
                         s.label == Label::AI ? 1.0 : 0.0);
    }
    if (!has_human || !has_ai) {
      throw InsufficientClassesError("training needs both classes");
    }
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      const auto lg = model.loss_and_gradient(batch);
      for (std::size_t i = 0; i < model.weights_.size(); ++i) {
        model.weights_[i] -= config.lr * lg.grad_w[i];
      }
      model.bias_ -= config.lr * lg.grad_b;
    }
    model.final_loss_ = model.loss_and_gradient(batch).loss;
    return model;
  }

  double predict_proba(std::string_view text) const {
    return sigmoid(vocab_.featurize(text).dot(weights_) + bias_);
  }

  Label predict(std::string_view text) const {
    return predict_proba(text) >= 0.5 ? Label::AI : Label::Human;
  }

  const FeatureVocab& vocab() const { return vocab_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double final_loss() const { return final_loss_; }

  void set_parameters(std::vector<double> weights, double bias) {
    if (weights.size() != vocab_.size()) {
      throw BadWeightsError("weight count does not match feature count");
    }
    weights_ = std::move(weights);
    bias_ = bias;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = "linear";
    j["weights"] = weights_;
    j["bias"] = bias_;
    j["feature_vocab"] = vocab_.to_json();
    j["config"] = {{"lr", config_.lr},
                   {"epochs", config_.epochs},
                   {"lambda", config_.lambda},
                   {"ngram_orders", config_.ngram_orders}};
    j["final_loss"] = final_loss_;
    return j;
  }

  static LinearModel from_json(const nlohmann::json& j) {
    try {
      if (!j.is_object() || j.value("kind", "") != "linear") {
        throw ParseError("not a linear model file");
      }
      if (j.value("format_version", 0) != 1) {
        throw ParseError("unsupported linear format_version");
      }
      TrainConfig config;
      const auto& jc = j.at("config");
      config.lr = jc.at("lr").get<double>();
      config.epochs = jc.at("epochs").get<int>();
      config.lambda = jc.at("lambda").get<double>();
      config.ngram_orders = jc.at("ngram_orders").get<std::vector<int>>();
      LinearModel model(FeatureVocab::from_json(j.at("feature_vocab")),
                        std::move(config));
      model.weights_ = j.at("weights").get<std::vector<double>>();
      model.bias_ = j.at("bias").get<double>();
      model.final_loss_ = j.at("final_loss").get<double>();
      if (model.weights_.size() != model.vocab_.size()) {
        throw BadWeightsError("weight count does not match feature count");
      }
      return model;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad linear model: ") + e.what());
    }
  }

 private:
  FeatureVocab vocab_;
  TrainConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  double final_loss_ = 0.0;
};

}  // namespace botspot
