#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"

namespace botspot {

inline double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio had an empty denominator
};

// Binary confusion counts with AI as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  void add(Label truth, Label predicted) {
    if (truth == Label::Unlabeled || predicted == Label::Unlabeled) {
      throw InvalidArgumentError("confusion matrix needs labeled pairs");
    }
    const bool t = truth == Label::AI;
    const bool p = predicted == Label::AI;
    if (t && p) ++tp;
    else if (!t && p) ++fp;
    else if (t && !p) ++fn;
    else ++tn;
  }

  std::uint64_t total() const { return tp + fp + tn + fn; }

  double accuracy() const {
    if (total() == 0) throw EmptyInputError("empty confusion matrix");
    return static_cast<double>(tp + tn) / static_cast<double>(total());
  }

  ClassMetrics metrics(Label which) const {
    // Treat "which" as positive; 0/0 ratios collapse to 0 and set the flag.
    const double tp_ = static_cast<double>(which == Label::AI ? tp : tn);
    const double fp_ = static_cast<double>(which == Label::AI ? fp : fn);
    const double fn_ = static_cast<double>(which == Label::AI ? fn : fp);
    ClassMetrics m;
    if (tp_ + fp_ == 0.0) {
      m.degenerate = true;
    } else {
      m.precision = tp_ / (tp_ + fp_);
    }
    if (tp_ + fn_ == 0.0) {
      m.degenerate = true;
    } else {
      m.recall = tp_ / (tp_ + fn_);
    }
    m.f1 = f1_score(m.precision, m.recall);
    return m;
  }

  double macro_f1() const {
    return 0.5 * (metrics(Label::AI).f1 + metrics(Label::Human).f1);
  }
};

inline ConfusionMatrix confusion(const std::vector<Label>& predicted,
                                 const std::vector<Label>& truth) {
  if (predicted.size() != truth.size()) {
    throw LengthMismatchError("prediction/truth length mismatch");
  }
  if (predicted.empty()) throw EmptyInputError("nothing to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

inline nlohmann::ordered_json eval_report(const ConfusionMatrix& cm) {
  const auto ai = cm.metrics(Label::AI);
  const auto human = cm.metrics(Label::Human);
  nlohmann::ordered_json j;
  j["classes"] = {{"human",
                   {{"precision", human.precision},
                    {"recall", human.recall},
                    {"f1", human.f1}}},
                  {"ai",
                   {{"precision", ai.precision},
                    {"recall", ai.recall},
                    {"f1", ai.f1}}}};
  j["accuracy"] = cm.accuracy();
  j["counts"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
  j["macro_f1"] = cm.macro_f1();
  j["degenerate"] = ai.degenerate || human.degenerate;
  return j;
}

// Quantile of a sorted vector via linear interpolation at rank h = (n-1)*q.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw EmptyInputError("quantile of empty data");
  if (q < 0.0 || q > 1.0) throw InvalidArgumentError("quantile must be in [0,1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - std::floor(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
};

// Five-number summary plus the mean; whiskers sit at the observed extremes.
inline BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("box stats of empty data");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  return s;
}

inline nlohmann::ordered_json box_stats_json(const BoxStats& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["min"] = s.min;
  j["q1"] = s.q1;
  j["median"] = s.median;
  j["q3"] = s.q3;
  j["max"] = s.max;
  j["mean"] = s.mean;
  return j;
}

}  // namespace botspot
