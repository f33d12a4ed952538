#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"
#include "botspot/eval.hpp"

namespace botspot {

struct ScoreRecord {
  std::string id;
  double score = 0.0;
  Label label = Label::Unlabeled;
};

inline std::vector<ScoreRecord> load_scores(std::istream& in,
                                            const std::string& name) {
  std::vector<ScoreRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trimmed(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name + ": row " + std::to_string(row) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("score") || !obj["score"].is_number()) {
      throw ParseError(name + ": row " + std::to_string(row) +
                       ": expected {\"id\": string, \"score\": number}");
    }
    ScoreRecord rec;
    rec.id = obj["id"].get<std::string>();
    rec.score = obj["score"].get<double>();
    if (!std::isfinite(rec.score) || rec.score <= 0.0) {
      throw NonPositiveScoreError(name + ": row " + std::to_string(row) +
                                  ": scores must be finite and positive");
    }
    if (!seen.insert(rec.id).second) {
      throw DuplicateIdError(name + ": row " + std::to_string(row) +
                             ": duplicate score id: " + rec.id);
    }
    std::string label_value;
    if (obj.contains("label")) {
      if (!obj["label"].is_string()) {
        throw ParseError(name + ": row " + std::to_string(row) +
                         ": \"label\" must be a string");
      }
      label_value = obj["label"].get<std::string>();
    }
    const auto label = parse_label(label_value);
    if (!label) {
      throw UnknownLabelError(name + ": row " + std::to_string(row) +
                              ": unknown label \"" + label_value + "\"");
    }
    rec.label = *label;
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<ScoreRecord> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_scores(in, path.filename().string());
}

inline void save_scores(const std::vector<ScoreRecord>& records,
                        std::ostream& out) {
  for (const auto& rec : records) {
    nlohmann::ordered_json obj;
    obj["id"] = rec.id;
    obj["score"] = rec.score;
    if (rec.label != Label::Unlabeled) obj["label"] = label_name(rec.label);
    out << obj.dump() << '\n';
  }
}

inline void save_scores(const std::vector<ScoreRecord>& records,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_scores(records, out);
}

enum class ThresholdObjective { F1AI, MacroF1 };

inline std::string_view objective_name(ThresholdObjective obj) {
  return obj == ThresholdObjective::F1AI ? "f1_ai" : "macro_f1";
}

inline ThresholdObjective parse_objective(std::string_view name) {
  if (name == "f1_ai") return ThresholdObjective::F1AI;
  if (name == "macro_f1") return ThresholdObjective::MacroF1;
  throw InvalidArgumentError("unknown objective: " + std::string(name));
}

// Perplexity rule: a score strictly above the threshold reads as Human, a
// score at or below it as AI.
struct ThresholdClassifier {
  double th = 0.0;
  double training_f1 = 0.0;

  Label classify(double score) const {
    return score > th ? Label::Human : Label::AI;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = "threshold";
    j["th"] = th;
    j["training_f1"] = training_f1;
    return j;
  }

  static ThresholdClassifier from_json(const nlohmann::json& j) {
    try {
      if (!j.is_object() || j.value("kind", "") != "threshold") {
        throw ParseError("not a threshold model file");
      }
      if (j.value("format_version", 0) != 1) {
        throw ParseError("unsupported threshold format_version");
      }
      ThresholdClassifier clf;
      clf.th = j.at("th").get<double>();
      clf.training_f1 = j.at("training_f1").get<double>();
      return clf;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad threshold model: ") + e.what());
    }
  }
};

// Candidate cuts: midpoints between consecutive distinct scores plus one
// sentinel below the minimum (min/2) and one above the maximum (2*max), so a
// candidate exists on each side of every observed score.
inline std::vector<double> threshold_candidates(std::vector<double> scores) {
  if (scores.empty()) throw EmptyInputError("no scores to fit");
  for (const double s : scores) {
    if (!std::isfinite(s) || s <= 0.0) {
      throw NonPositiveScoreError("scores must be finite and positive");
    }
  }
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> candidates;
  candidates.push_back(scores.front() / 2.0);
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    candidates.push_back(0.5 * (scores[i] + scores[i + 1]));
  }
  candidates.push_back(scores.back() * 2.0);
  return candidates;
}

struct ThresholdFit {
  ThresholdClassifier classifier;
  double objective_value = 0.0;
  ThresholdObjective objective = ThresholdObjective::F1AI;
  std::size_t candidates = 0;
  ConfusionMatrix confusion;
};

inline ThresholdFit fit_threshold(
    const std::vector<ScoreRecord>& records,
    ThresholdObjective objective = ThresholdObjective::F1AI) {
  if (records.empty()) throw EmptyInputError("no scores to fit");
  std::vector<double> scores;
  bool has_human = false;
  bool has_ai = false;
  for (const auto& rec : records) {
    if (rec.label == Label::Unlabeled) {
      throw InvalidArgumentError("threshold fitting needs labeled scores");
    }
    has_human |= rec.label == Label::Human;
    has_ai |= rec.label == Label::AI;
    scores.push_back(rec.score);
  }
  if (!has_human || !has_ai) {
    throw InsufficientClassesError("threshold fitting needs both classes");
  }

  const auto candidates = threshold_candidates(scores);
  ThresholdFit best;
  best.objective = objective;
  best.candidates = candidates.size();
  bool first = true;
  for (const double th : candidates) {
    ThresholdClassifier clf;
    clf.th = th;
    ConfusionMatrix cm;
    for (const auto& rec : records) cm.add(rec.label, clf.classify(rec.score));
    const double value = objective == ThresholdObjective::F1AI
                             ? cm.metrics(Label::AI).f1
                             : cm.macro_f1();
    // candidates ascend, so ties keep the smallest cut
    if (first || value > best.objective_value) {
      best.classifier = clf;
      best.objective_value = value;
      best.confusion = cm;
      first = false;
    }
  }
  best.classifier.training_f1 = best.objective_value;
  return best;
}

}  // namespace botspot
