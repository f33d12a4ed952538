#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"
#include "botspot/eval.hpp"
#include "botspot/linear.hpp"
#include "botspot/ngram_lm.hpp"
#include "botspot/threshold.hpp"

namespace botspot {

enum class Route { Perplexity, Classifier, Both };

inline Route parse_route(std::string_view name) {
  if (name == "perplexity") return Route::Perplexity;
  if (name == "classifier") return Route::Classifier;
  if (name == "both") return Route::Both;
  throw InvalidArgumentError("unknown route: " + std::string(name));
}

enum class LmTraining { HumanOnly, All };

inline LmTraining parse_lm_training(std::string_view name) {
  if (name == "human") return LmTraining::HumanOnly;
  if (name == "all") return LmTraining::All;
  throw InvalidArgumentError("unknown lm training mode: " + std::string(name));
}

struct ExperimentConfig {
  SplitSpec split;
  Route route = Route::Both;
  LmConfig lm;
  LmTraining lm_training = LmTraining::HumanOnly;  // reference distribution
  ThresholdObjective objective = ThresholdObjective::F1AI;
  TrainConfig train;
};

struct PerplexityRoute {
  NGramLM lm;
  ThresholdClassifier classifier;
  double training_objective = 0.0;
  std::vector<ScoreRecord> train_scores;
  std::vector<ScoreRecord> test_scores;
  ConfusionMatrix test_confusion;
  BoxStats human_box;  // over test-split scores
  BoxStats ai_box;
};

struct ClassifierRoute {
  LinearModel model;
  ConfusionMatrix test_confusion;
};

struct ExperimentResult {
  SplitResult split;
  std::optional<PerplexityRoute> perplexity;
  std::optional<ClassifierRoute> classifier;
};

namespace detail {

inline std::vector<ScoreRecord> score_dataset(const NGramLM& lm,
                                              const Dataset& ds) {
  std::vector<ScoreRecord> scores;
  scores.reserve(ds.size());
  for (const auto& s : ds) {
    scores.push_back({s.id, lm.perplexity_text(s.text), s.label});
  }
  return scores;
}

}  // namespace detail

// The two detection routes over one labeled corpus: calibrate a perplexity
// cutoff, train the linear classifier, evaluate both on the held-out split.
inline ExperimentResult run_experiment(const Dataset& data,
                                       const ExperimentConfig& config) {
  if (data.count(Label::Human) == 0 || data.count(Label::AI) == 0) {
    throw InsufficientClassesError("experiment needs both classes");
  }
  ExperimentResult result;
  result.split = split(data, config.split);

  if (config.route != Route::Classifier) {
    std::vector<TokenSeq> lm_corpus;
    for (const auto& s : result.split.train) {
      if (config.lm_training == LmTraining::All || s.label == Label::Human) {
        lm_corpus.push_back(tokenize(s.text));
      }
    }
    if (lm_corpus.empty()) {
      throw InsufficientClassesError("no texts to train the language model");
    }
    NGramLM lm = NGramLM::train(lm_corpus, config.lm);
    auto train_scores = detail::score_dataset(lm, result.split.train);
    auto test_scores = detail::score_dataset(lm, result.split.test);
    auto fit = fit_threshold(train_scores, config.objective);

    PerplexityRoute route{std::move(lm),
                          fit.classifier,
                          fit.objective_value,
                          std::move(train_scores),
                          std::move(test_scores),
                          {},
                          {},
                          {}};
    std::vector<double> human_scores;
    std::vector<double> ai_scores;
    for (const auto& rec : route.test_scores) {
      route.test_confusion.add(rec.label, fit.classifier.classify(rec.score));
      (rec.label == Label::AI ? ai_scores : human_scores).push_back(rec.score);
    }
    route.human_box = box_stats(std::move(human_scores));
    route.ai_box = box_stats(std::move(ai_scores));
    result.perplexity = std::move(route);
  }

  if (config.route != Route::Perplexity) {
    ClassifierRoute route{LinearModel::train(result.split.train, config.train),
                          {}};
    for (const auto& s : result.split.test) {
      route.test_confusion.add(s.label, route.model.predict(s.text));
    }
    result.classifier = std::move(route);
  }
  return result;
}

inline nlohmann::ordered_json experiment_report(const ExperimentResult& r,
                                                const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["split"] = {{"train", r.split.train.size()},
                {"test", r.split.test.size()},
                {"test_fraction", c.split.test_fraction},
                {"seed", c.split.seed},
                {"stratified", c.split.stratified}};
  nlohmann::ordered_json routes;
  if (r.perplexity) {
    const auto& p = *r.perplexity;
    nlohmann::ordered_json route = eval_report(p.test_confusion);
    route["th"] = p.classifier.th;
    route["training_f1"] = p.classifier.training_f1;
    route["lm"] = {{"order", c.lm.order},
                   {"alpha", c.lm.alpha},
                   {"training", c.lm_training == LmTraining::All ? "all"
                                                                 : "human"}};
    route["test_perplexity"] = {{"human", box_stats_json(p.human_box)},
                                {"ai", box_stats_json(p.ai_box)}};
    routes["perplexity"] = std::move(route);
  }
  if (r.classifier) {
    nlohmann::ordered_json route = eval_report(r.classifier->test_confusion);
    route["final_loss"] = r.classifier->model.final_loss();
    route["features"] = r.classifier->model.vocab().size();
    routes["classifier"] = std::move(route);
  }
  j["routes"] = std::move(routes);
  return j;
}

}  // namespace botspot
