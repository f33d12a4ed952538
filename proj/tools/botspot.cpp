#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"
#include "botspot/eval.hpp"
#include "botspot/experiment.hpp"
#include "botspot/explain.hpp"
#include "botspot/linear.hpp"
#include "botspot/ngram_lm.hpp"
#include "botspot/svg.hpp"
#include "botspot/synthgen.hpp"
#include "botspot/threshold.hpp"

namespace fs = std::filesystem;
using namespace botspot;

namespace {

FileFormat parse_format(const std::string& name) {
  if (name == "csv") return FileFormat::Csv;
  if (name == "jsonl") return FileFormat::Jsonl;
  throw UsageError("unknown format: " + name);
}

FileFormat format_for(const fs::path& path, const std::string& flag) {
  if (!flag.empty()) return parse_format(flag);
  return path.extension() == ".csv" ? FileFormat::Csv : FileFormat::Jsonl;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad number in list: " + item);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (const double v : parse_double_list(csv)) {
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  }
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (const char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

struct PrepArgs {
  std::string input;
  std::string format;
  std::string label_field = "label";
  std::size_t min_words = 11;
  bool dedup = false;
  std::string out;
  std::string hist;
  std::size_t bins = 20;
};

int cmd_prep(const PrepArgs& a) {
  const auto ds =
      load_dataset(a.input, format_for(a.input, a.format), a.label_field);
  std::cout << "loaded " << ds.size() << " samples\n";
  auto kept = filter_min_words(ds, a.min_words);
  std::cout << "removed " << ds.size() - kept.size()
            << " samples under " << a.min_words << " words\n";
  if (a.dedup) {
    auto res = dedup_cross_class(kept);
    std::cout << "removed " << res.removed << " cross-class duplicates\n";
    kept = std::move(res.dataset);
  }
  if (kept.empty()) throw EmptyDatasetError("no samples left after filtering");
  if (fs::path(a.out).has_parent_path()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  save_jsonl(kept, fs::path(a.out));
  std::cout << "wrote " << kept.size() << " samples to " << a.out << "\n";
  if (!a.hist.empty()) {
    const auto h = length_histogram(kept, a.bins);
    write_file(a.hist, histogram_svg(h, "sample length (words)"));
    std::cout << "wrote histogram to " << a.hist << "\n";
  }
  return 0;
}

struct LmTrainArgs {
  std::string input;
  std::string format;
  int order = 2;
  double alpha = 1.0;
  std::string lambdas;
  std::size_t min_count = 1;
  std::string cls = "all";
  std::string out;
};

int cmd_lm_train(const LmTrainArgs& a) {
  LmConfig config;
  config.order = a.order;
  config.alpha = a.alpha;
  config.min_count = a.min_count;
  if (!a.lambdas.empty()) config.lambdas = parse_double_list(a.lambdas);
  config.validate();
  const auto ds = load_dataset(a.input, format_for(a.input, a.format));
  std::vector<TokenSeq> corpus;
  for (const auto& s : ds) {
    if (a.cls == "all" || label_name(s.label) == a.cls) {
      corpus.push_back(tokenize(s.text));
    }
  }
  const auto lm = NGramLM::train(corpus, config);
  write_json(a.out, lm.to_json());
  std::cout << "trained ngram_lm order=" << a.order << " on " << corpus.size()
            << " texts, vocab " << lm.vocab().size() << "\n";
  return 0;
}

struct ScoreArgs {
  std::string model;
  std::string input;
  std::string format;
  std::string out;
};

int cmd_score(const ScoreArgs& a) {
  const auto lm = NGramLM::from_json(read_json(a.model));
  const auto ds = load_dataset(a.input, format_for(a.input, a.format));
  std::vector<ScoreRecord> scores;
  scores.reserve(ds.size());
  for (const auto& s : ds) {
    scores.push_back({s.id, lm.perplexity_text(s.text), s.label});
  }
  if (fs::path(a.out).has_parent_path()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  save_scores(scores, fs::path(a.out));
  std::cout << "scored " << scores.size() << " samples\n";
  return 0;
}

struct ImportScoresArgs {
  std::string input;
  std::string labels;
  std::string format;
  std::string out;
};

int cmd_import_scores(const ImportScoresArgs& a) {
  auto scores = load_scores(fs::path(a.input));
  if (!a.labels.empty()) {
    const auto ds = load_dataset(a.labels, format_for(a.labels, a.format));
    std::unordered_map<std::string, Label> by_id;
    for (const auto& s : ds) by_id.emplace(s.id, s.label);
    for (auto& rec : scores) {
      const auto it = by_id.find(rec.id);
      if (it != by_id.end() && rec.label == Label::Unlabeled) {
        rec.label = it->second;
      }
    }
  }
  if (fs::path(a.out).has_parent_path()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  save_scores(scores, fs::path(a.out));
  std::cout << "imported " << scores.size() << " scores\n";
  return 0;
}

struct FitThresholdArgs {
  std::string scores;
  std::string objective = "f1_ai";
  std::string out;
};

int cmd_fit_threshold(const FitThresholdArgs& a) {
  const auto scores = load_scores(fs::path(a.scores));
  const auto fit = fit_threshold(scores, parse_objective(a.objective));
  write_json(a.out, fit.classifier.to_json());
  std::cout << "th=" << fit.classifier.th
            << " training_f1=" << fit.classifier.training_f1 << " (from "
            << fit.candidates << " candidates)\n";
  return 0;
}

struct TrainArgs {
  std::string input;
  std::string format;
  double lr = 0.5;
  int epochs = 200;
  double lambda = 1e-4;
  std::string orders = "1,2";
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const auto ds = load_dataset(a.input, format_for(a.input, a.format));
  TrainConfig config;
  config.lr = a.lr;
  config.epochs = a.epochs;
  config.lambda = a.lambda;
  config.ngram_orders = parse_int_list(a.orders);
  const auto model = LinearModel::train(ds, config);
  write_json(a.out, model.to_json());
  std::cout << "trained linear model: " << model.vocab().size()
            << " features, final loss " << model.final_loss() << "\n";
  return 0;
}

struct ExperimentArgs {
  std::string human;
  std::string ai;
  std::string format;
  std::string route = "both";
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool no_stratify = false;
  std::size_t min_words = 0;
  bool dedup = false;
  int order = 2;
  double alpha = 1.0;
  std::string lambdas;
  std::string lm_training = "human";
  std::string objective = "f1_ai";
  double lr = 0.5;
  int epochs = 200;
  double lambda = 1e-4;
  std::string orders = "1,2";
  std::string out = "out";
  bool charts = false;
};

Dataset load_role(const std::string& path, const std::string& format,
                  Label role) {
  const auto raw = load_dataset(path, format_for(path, format));
  Dataset out(raw.name());
  for (auto s : raw) {
    s.label = role;
    out.add(std::move(s));
  }
  return out;
}

int cmd_experiment(const ExperimentArgs& a) {
  Dataset merged("experiment");
  for (const auto& s : load_role(a.human, a.format, Label::Human)) {
    merged.add(s);
  }
  for (const auto& s : load_role(a.ai, a.format, Label::AI)) merged.add(s);
  if (a.min_words > 0) merged = filter_min_words(merged, a.min_words);
  if (a.dedup) merged = dedup_cross_class(merged).dataset;
  if (merged.count(Label::Human) == 0 || merged.count(Label::AI) == 0) {
    throw InsufficientClassesError("need non-empty human and ai corpora");
  }

  ExperimentConfig config;
  config.split = {a.test_fraction, a.seed, !a.no_stratify};
  config.route = parse_route(a.route);
  config.lm.order = a.order;
  config.lm.alpha = a.alpha;
  if (!a.lambdas.empty()) config.lm.lambdas = parse_double_list(a.lambdas);
  config.lm_training = parse_lm_training(a.lm_training);
  config.objective = parse_objective(a.objective);
  config.train.lr = a.lr;
  config.train.epochs = a.epochs;
  config.train.lambda = a.lambda;
  config.train.ngram_orders = parse_int_list(a.orders);

  const auto result = run_experiment(merged, config);

  const fs::path out(a.out);
  fs::create_directories(out / "prep");
  fs::create_directories(out / "models");
  fs::create_directories(out / "scores");
  fs::create_directories(out / "reports");
  save_jsonl(result.split.train, out / "prep" / "train.jsonl");
  save_jsonl(result.split.test, out / "prep" / "test.jsonl");
  if (result.perplexity) {
    const auto& p = *result.perplexity;
    write_json(out / "models" / "lm.json", p.lm.to_json());
    write_json(out / "models" / "threshold.json", p.classifier.to_json());
    save_scores(p.train_scores, out / "scores" / "train.jsonl");
    save_scores(p.test_scores, out / "scores" / "test.jsonl");
    if (a.charts) {
      write_file(out / "reports" / "perplexity_box.svg",
                 box_plot_svg({{"human", p.human_box}, {"ai", p.ai_box}},
                              "test perplexity by class"));
    }
  }
  if (result.classifier) {
    write_json(out / "models" / "linear.json",
               result.classifier->model.to_json());
  }
  write_json(out / "reports" / "experiment.json",
             experiment_report(result, config));

  if (result.perplexity) {
    std::cout << "perplexity route: accuracy "
              << result.perplexity->test_confusion.accuracy() << " (th "
              << result.perplexity->classifier.th << ")\n";
  }
  if (result.classifier) {
    std::cout << "classifier route: accuracy "
              << result.classifier->test_confusion.accuracy() << "\n";
  }
  std::cout << "report written to "
            << (out / "reports" / "experiment.json").string() << "\n";
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string scores;
  std::string input;
  std::string format;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  const auto j = read_json(a.model);
  const std::string kind = j.is_object() ? j.value("kind", "") : "";
  ConfusionMatrix cm;
  if (kind == "threshold") {
    if (a.scores.empty()) {
      throw UsageError("threshold eval needs --scores");
    }
    const auto clf = ThresholdClassifier::from_json(j);
    for (const auto& rec : load_scores(fs::path(a.scores))) {
      cm.add(rec.label, clf.classify(rec.score));
    }
  } else if (kind == "linear") {
    if (a.input.empty()) {
      throw UsageError("linear eval needs --input");
    }
    const auto model = LinearModel::from_json(j);
    const auto ds = load_dataset(a.input, format_for(a.input, a.format));
    for (const auto& s : ds) cm.add(s.label, model.predict(s.text));
  } else {
    throw ParseError("model kind must be threshold or linear");
  }
  const auto report = eval_report(cm);
  write_json(a.out, report);
  std::cout << "accuracy " << cm.accuracy() << " over " << cm.total()
            << " samples\n";
  return 0;
}

struct ExplainArgs {
  std::string model;
  std::string text;
  std::string input;
  std::string format;
  std::string method = "auto";
  std::size_t cap = kDefaultShapleyCap;
  std::uint64_t permutations = 200;
  std::uint64_t seed = 0;
  std::string out;
  bool svg = false;
};

int cmd_explain(const ExplainArgs& a) {
  const auto model = LinearModel::from_json(read_json(a.model));
  const ProbaFn proba = [&](const std::string& text) {
    return model.predict_proba(text);
  };

  std::vector<std::pair<std::string, std::string>> inputs;  // id, text
  if (!a.text.empty()) {
    inputs.emplace_back("text", a.text);
  } else if (!a.input.empty()) {
    const auto ds = load_dataset(a.input, format_for(a.input, a.format));
    for (const auto& s : ds) inputs.emplace_back(s.id, s.text);
  } else {
    throw UsageError("explain needs --text or --input");
  }

  const fs::path out(a.out);
  fs::create_directories(out);
  std::unordered_set<std::string> used_names;
  for (const auto& [id, text] : inputs) {
    const auto tokens = tokenize(text);
    Explanation e;
    if (a.method == "exact") {
      e = shapley_exact(proba, tokens, a.cap);
    } else if (a.method == "sampled") {
      e = shapley_sampled(proba, tokens, a.permutations, a.seed);
    } else if (a.method == "auto") {
      e = tokens.size() <= a.cap
              ? shapley_exact(proba, tokens, a.cap)
              : shapley_sampled(proba, tokens, a.permutations, a.seed);
    } else {
      throw UsageError("method must be exact, sampled, or auto");
    }
    e.id = id;
    std::string name = sanitize_id(id);
    while (!used_names.insert(name).second) name += "_";
    write_json(out / (name + ".json"), e.to_json());
    if (a.svg) write_file(out / (name + ".svg"), explanation_svg(e));
  }
  std::cout << "explained " << inputs.size() << " sample"
            << (inputs.size() == 1 ? "" : "s") << " to " << a.out << "\n";
  return 0;
}

struct SynthArgs {
  double overlap = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 500;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  StyleConfig config;
  config.overlap = a.overlap;
  config.seed = a.seed;
  config.samples_per_class = a.samples;
  const auto ds = generate(config);
  if (fs::path(a.out).has_parent_path()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  save_jsonl(ds, fs::path(a.out));
  std::cout << "generated " << ds.size() << " samples (overlap " << a.overlap
            << ", seed " << a.seed << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"human-vs-AI text detection toolkit"};
  app.require_subcommand(1);

  PrepArgs prep;
  auto* sc_prep = app.add_subcommand("prep", "load, filter and dedup a corpus");
  sc_prep->add_option("--input", prep.input, "dataset file")->required();
  sc_prep->add_option("--format", prep.format, "csv or jsonl");
  sc_prep->add_option("--label-field", prep.label_field, "label column name");
  sc_prep->add_option("--min-words", prep.min_words, "minimum words to keep");
  sc_prep->add_flag("--dedup", prep.dedup, "drop AI copies of human texts");
  sc_prep->add_option("--out", prep.out, "output JSONL")->required();
  sc_prep->add_option("--hist", prep.hist, "also write a length histogram SVG");
  sc_prep->add_option("--bins", prep.bins, "histogram bins");

  LmTrainArgs lmt;
  auto* sc_lmt = app.add_subcommand("lm-train", "train the n-gram LM");
  sc_lmt->add_option("--input", lmt.input, "dataset file")->required();
  sc_lmt->add_option("--format", lmt.format, "csv or jsonl");
  sc_lmt->add_option("--order", lmt.order, "n-gram order");
  sc_lmt->add_option("--alpha", lmt.alpha, "additive smoothing");
  sc_lmt->add_option("--lambdas", lmt.lambdas, "interpolation weights, comma list");
  sc_lmt->add_option("--min-count", lmt.min_count, "vocabulary count cutoff");
  sc_lmt->add_option("--class", lmt.cls, "train on: human, ai, or all");
  sc_lmt->add_option("--out", lmt.out, "model JSON")->required();

  ScoreArgs score;
  auto* sc_score = app.add_subcommand("score", "perplexity-score a dataset");
  sc_score->add_option("--model", score.model, "ngram_lm model JSON")->required();
  sc_score->add_option("--input", score.input, "dataset file")->required();
  sc_score->add_option("--format", score.format, "csv or jsonl");
  sc_score->add_option("--out", score.out, "scores JSONL")->required();

  ImportScoresArgs imp;
  auto* sc_imp = app.add_subcommand("import-scores",
                                    "validate externally computed scores");
  sc_imp->add_option("--input", imp.input, "scores JSONL")->required();
  sc_imp->add_option("--labels", imp.labels, "dataset to join labels from");
  sc_imp->add_option("--format", imp.format, "label dataset format");
  sc_imp->add_option("--out", imp.out, "normalized scores JSONL")->required();

  FitThresholdArgs fit;
  auto* sc_fit = app.add_subcommand("fit-threshold",
                                    "calibrate the perplexity cutoff");
  sc_fit->add_option("--scores", fit.scores, "labeled scores JSONL")->required();
  sc_fit->add_option("--objective", fit.objective, "f1_ai or macro_f1");
  sc_fit->add_option("--out", fit.out, "model JSON")->required();

  TrainArgs train;
  auto* sc_train = app.add_subcommand("train", "train the linear classifier");
  sc_train->add_option("--input", train.input, "labeled dataset")->required();
  sc_train->add_option("--format", train.format, "csv or jsonl");
  sc_train->add_option("--lr", train.lr, "learning rate");
  sc_train->add_option("--epochs", train.epochs, "gradient descent epochs");
  sc_train->add_option("--lambda", train.lambda, "L2 strength");
  sc_train->add_option("--orders", train.orders, "feature n-gram orders");
  sc_train->add_option("--out", train.out, "model JSON")->required();

  ExperimentArgs exp;
  auto* sc_exp = app.add_subcommand("experiment",
                                    "run the two-route detection experiment");
  sc_exp->add_option("--human", exp.human, "human-written corpus")->required();
  sc_exp->add_option("--ai", exp.ai, "AI-generated corpus")->required();
  sc_exp->add_option("--format", exp.format, "csv or jsonl");
  sc_exp->add_option("--route", exp.route, "perplexity, classifier, or both");
  sc_exp->add_option("--test-fraction", exp.test_fraction, "held-out share");
  sc_exp->add_option("--seed", exp.seed, "split seed");
  sc_exp->add_flag("--no-stratify", exp.no_stratify, "plain random split");
  sc_exp->add_option("--min-words", exp.min_words, "pre-filter word minimum");
  sc_exp->add_flag("--dedup", exp.dedup, "drop AI copies of human texts");
  sc_exp->add_option("--order", exp.order, "LM n-gram order");
  sc_exp->add_option("--alpha", exp.alpha, "LM additive smoothing");
  sc_exp->add_option("--lambdas", exp.lambdas, "LM interpolation weights");
  sc_exp->add_option("--lm-training", exp.lm_training,
                     "LM reference texts: human or all");
  sc_exp->add_option("--objective", exp.objective, "threshold objective");
  sc_exp->add_option("--lr", exp.lr, "classifier learning rate");
  sc_exp->add_option("--epochs", exp.epochs, "classifier epochs");
  sc_exp->add_option("--lambda", exp.lambda, "classifier L2 strength");
  sc_exp->add_option("--orders", exp.orders, "classifier feature orders");
  sc_exp->add_option("--out", exp.out, "output directory");
  sc_exp->add_flag("--charts", exp.charts, "emit SVG charts");

  EvalArgs ev;
  auto* sc_eval = app.add_subcommand("eval", "evaluate a model file");
  sc_eval->add_option("--model", ev.model, "threshold or linear model JSON")
      ->required();
  sc_eval->add_option("--scores", ev.scores, "labeled scores (threshold)");
  sc_eval->add_option("--input", ev.input, "labeled dataset (linear)");
  sc_eval->add_option("--format", ev.format, "csv or jsonl");
  sc_eval->add_option("--out", ev.out, "report JSON")->required();

  ExplainArgs expl;
  auto* sc_expl = app.add_subcommand("explain",
                                     "per-token Shapley attributions");
  sc_expl->add_option("--model", expl.model, "linear model JSON")->required();
  sc_expl->add_option("--text", expl.text, "inline text to explain");
  sc_expl->add_option("--input", expl.input, "dataset to explain");
  sc_expl->add_option("--format", expl.format, "csv or jsonl");
  sc_expl->add_option("--method", expl.method, "exact, sampled, or auto");
  sc_expl->add_option("--cap", expl.cap, "max tokens for exact mode");
  sc_expl->add_option("--permutations", expl.permutations,
                      "sampled-mode permutations");
  sc_expl->add_option("--seed", expl.seed, "sampled-mode seed");
  sc_expl->add_option("--out", expl.out, "output directory")->required();
  sc_expl->add_flag("--svg", expl.svg, "also render SVG bar charts");

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "generate a synthetic corpus");
  sc_synth->add_option("--overlap", synth.overlap, "style overlap in [0,1]");
  sc_synth->add_option("--seed", synth.seed, "generator seed");
  sc_synth->add_option("--samples", synth.samples, "samples per class");
  sc_synth->add_option("--out", synth.out, "output JSONL")->required();

  try {
    app.parse(argc, argv);
    if (sc_prep->parsed()) return cmd_prep(prep);
    if (sc_lmt->parsed()) return cmd_lm_train(lmt);
    if (sc_score->parsed()) return cmd_score(score);
    if (sc_imp->parsed()) return cmd_import_scores(imp);
    if (sc_fit->parsed()) return cmd_fit_threshold(fit);
    if (sc_train->parsed()) return cmd_train(train);
    if (sc_exp->parsed()) return cmd_experiment(exp);
    if (sc_eval->parsed()) return cmd_eval(ev);
    if (sc_expl->parsed()) return cmd_explain(expl);
    if (sc_synth->parsed()) return cmd_synth(synth);
    throw UsageError("no subcommand given");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error:" << e.kind() << ": " << e.what() << "\n";
    return (e.kind() == "io" || e.kind() == "usage") ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 1;
  }
}
