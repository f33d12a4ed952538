#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "botspot/errors.hpp"
#include "botspot/text.hpp"

namespace botspot {

enum class Label { Human, AI, Unlabeled };

// Case-insensitive mapping to {human, ai}; empty means Unlabeled; anything
// else is rejected by the caller.
inline std::optional<Label> parse_label(std::string_view value) {
  std::string low(value);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low.empty()) return Label::Unlabeled;
  if (low == "human") return Label::Human;
  if (low == "ai") return Label::AI;
  return std::nullopt;
}

inline std::string_view label_name(Label label) {
  switch (label) {
    case Label::Human: return "human";
    case Label::AI: return "ai";
    default: return "";
  }
}

struct TextSample {
  std::string id;
  std::string text;
  Label label = Label::Unlabeled;
  std::string source;
};

// Ordered, id-unique collection of samples. Insertion order is the iteration
// order; values are treated as immutable once built.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::string name) : name_(std::move(name)) {}

  void add(TextSample sample) {
    if (ids_.count(sample.id)) {
      throw DuplicateIdError("duplicate sample id: " + sample.id);
    }
    ids_.insert(sample.id);
    samples_.push_back(std::move(sample));
  }

  const std::string& name() const { return name_; }
  const std::vector<TextSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const TextSample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  std::size_t count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(samples_.begin(), samples_.end(),
                      [&](const TextSample& s) { return s.label == label; }));
  }

 private:
  std::string name_;
  std::vector<TextSample> samples_;
  std::unordered_set<std::string> ids_;
};

// Whitespace-separated chunks of the raw text, the unit used by the minimum
// length filter and the length histogram.
inline std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  std::size_t i = 0;
  bool in_word = false;
  while (i < text.size()) {
    const bool space = detail::is_space(detail::next_codepoint(text, i));
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

enum class FileFormat { Csv, Jsonl };

namespace detail {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t row = 0;  // 1-based; the header is row 1
};

// Comma-delimited with double-quote escaping; quoted fields may span lines.
inline std::vector<CsvRecord> read_csv(std::istream& in,
                                       const std::string& where) {
  std::vector<CsvRecord> records;
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::size_t i = 0;
  std::size_t row = 1;
  while (i < data.size()) {
    CsvRecord rec;
    rec.row = row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (;; ++i) {
      if (i >= data.size()) {
        if (quoted) {
          throw ParseError(where + ": row " + std::to_string(row) +
                           ": unterminated quoted field");
        }
        rec.fields.push_back(field);
        break;
      }
      const char c = data[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < data.size() && data[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
        continue;
      }
      if (c == '"' && field.empty() && !any) {
        quoted = true;
        any = true;
      } else if (c == ',') {
        rec.fields.push_back(field);
        field.clear();
        any = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
        ++i;
        rec.fields.push_back(field);
        break;
      } else {
        field += c;
        any = true;
      }
    }
    // skip records that are entirely empty (e.g. a trailing newline)
    if (!(rec.fields.size() == 1 && rec.fields[0].empty())) {
      records.push_back(std::move(rec));
    }
    ++row;
  }
  return records;
}

inline std::string trimmed(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline Label parse_label_or_throw(std::string_view value,
                                  const std::string& where, std::size_t row) {
  const auto label = parse_label(value);
  if (!label) {
    throw UnknownLabelError(where + ": row " + std::to_string(row) +
                            ": unknown label \"" + std::string(value) + "\"");
  }
  return *label;
}

}  // namespace detail

inline Dataset load_dataset(std::istream& in, FileFormat format,
                            const std::string& name,
                            const std::string& label_field = "label") {
  Dataset ds(name);
  auto add_checked = [&](TextSample sample, std::size_t row) {
    if (detail::trimmed(sample.text).empty()) {
      throw ParseError(name + ": row " + std::to_string(row) +
                       ": text is empty");
    }
    if (sample.id.empty()) {
      sample.id = name + ":" + std::to_string(row);
    }
    try {
      ds.add(std::move(sample));
    } catch (const DuplicateIdError& e) {
      throw ParseError(name + ": row " + std::to_string(row) + ": " +
                       e.what());
    }
  };

  if (format == FileFormat::Csv) {
    const auto records = detail::read_csv(in, name);
    if (records.empty()) {
      throw ParseError(name + ": missing header row");
    }
    const auto& header = records.front().fields;
    auto column = [&](const std::string& key) -> std::optional<std::size_t> {
      const auto it = std::find(header.begin(), header.end(), key);
      if (it == header.end()) return std::nullopt;
      return static_cast<std::size_t>(it - header.begin());
    };
    const auto text_col = column("text");
    if (!text_col) {
      throw ParseError(name + ": row 1: header has no \"text\" column");
    }
    const auto label_col = column(label_field);
    const auto id_col = column("id");
    const auto source_col = column("source");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      auto field = [&](std::optional<std::size_t> col) -> std::string {
        if (!col || *col >= rec.fields.size()) return "";
        return rec.fields[*col];
      };
      if (*text_col >= rec.fields.size()) {
        throw ParseError(name + ": row " + std::to_string(rec.row) +
                         ": missing text column");
      }
      TextSample sample;
      sample.text = rec.fields[*text_col];
      sample.id = field(id_col);
      sample.source = field(source_col);
      sample.label =
          detail::parse_label_or_throw(field(label_col), name, rec.row);
      add_checked(std::move(sample), rec.row);
    }
    return ds;
  }

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trimmed(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name + ": row " + std::to_string(row) + ": " +
                       e.what());
    }
    if (!obj.is_object() || !obj.contains("text") ||
        !obj["text"].is_string()) {
      throw ParseError(name + ": row " + std::to_string(row) +
                       ": expected an object with a string \"text\" field");
    }
    TextSample sample;
    sample.text = obj["text"].get<std::string>();
    if (obj.contains("id")) {
      if (!obj["id"].is_string()) {
        throw ParseError(name + ": row " + std::to_string(row) +
                         ": \"id\" must be a string");
      }
      sample.id = obj["id"].get<std::string>();
    }
    if (obj.contains("source") && obj["source"].is_string()) {
      sample.source = obj["source"].get<std::string>();
    }
    std::string label_value;
    if (obj.contains(label_field)) {
      if (!obj[label_field].is_string()) {
        throw ParseError(name + ": row " + std::to_string(row) + ": \"" +
                         label_field + "\" must be a string");
      }
      label_value = obj[label_field].get<std::string>();
    }
    sample.label = detail::parse_label_or_throw(label_value, name, row);
    add_checked(std::move(sample), row);
  }
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path,
                            FileFormat format,
                            const std::string& label_field = "label") {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return load_dataset(in, format, path.filename().string(), label_field);
}

inline void save_jsonl(const Dataset& ds, std::ostream& out) {
  for (const auto& s : ds) {
    nlohmann::ordered_json obj;
    obj["id"] = s.id;
    obj["text"] = s.text;
    if (s.label != Label::Unlabeled) obj["label"] = label_name(s.label);
    if (!s.source.empty()) obj["source"] = s.source;
    out << obj.dump() << '\n';
  }
}

inline void save_jsonl(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_jsonl(ds, out);
}

// Keeps samples with at least min_words whitespace-separated words.
inline Dataset filter_min_words(const Dataset& ds, std::size_t min_words) {
  if (min_words < 1) {
    throw InvalidArgumentError("min_words must be a positive integer");
  }
  Dataset out(ds.name());
  for (const auto& s : ds) {
    if (word_count(s.text) >= min_words) out.add(s);
  }
  return out;
}

// Normal form used to spot cross-class copies: lowercased, whitespace
// collapsed, terminal .?! stripped.
inline std::string normalize_for_dedup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  bool pending_space = false;
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = detail::next_codepoint(text, i);
    if (detail::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    std::string bytes(text.substr(start, i - start));
    if (cp >= 'A' && cp <= 'Z') bytes[0] = static_cast<char>(cp - 'A' + 'a');
    out += bytes;
  }
  while (!out.empty() && (out.back() == '.' || out.back() == '?' ||
                          out.back() == '!' || out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

struct DedupResult {
  Dataset dataset;
  std::size_t removed = 0;
};

// Removes AI-labeled samples whose normalized text matches any Human-labeled
// sample. Human samples are never removed; near-duplicates are kept.
inline DedupResult dedup_cross_class(const Dataset& ds) {
  std::unordered_set<std::string> human_norms;
  for (const auto& s : ds) {
    if (s.label == Label::Human) human_norms.insert(normalize_for_dedup(s.text));
  }
  DedupResult result;
  result.dataset = Dataset(ds.name());
  for (const auto& s : ds) {
    if (s.label == Label::AI &&
        human_norms.count(normalize_for_dedup(s.text))) {
      ++result.removed;
      continue;
    }
    result.dataset.add(s);
  }
  return result;
}

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct SplitResult {
  Dataset train;
  Dataset test;
};

namespace detail {

inline void shuffle_indices(std::vector<std::size_t>& idx,
                            std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace detail

// Deterministic seeded split; test size is round(test_fraction * n). The
// stratified mode allocates per-class test counts by largest remainder, which
// keeps every class within one sample of its exact quota.
inline SplitResult split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.test_fraction <= 0.0 || spec.test_fraction >= 1.0) {
    throw InvalidArgumentError("test_fraction must be in (0,1)");
  }
  const std::size_t n = ds.size();
  if (n < 2) {
    throw InsufficientSamplesError("need at least 2 samples to split");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(spec.test_fraction * static_cast<double>(n)));

  std::mt19937_64 rng(spec.seed);
  std::vector<bool> in_test(n, false);

  if (!spec.stratified) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    detail::shuffle_indices(idx, rng);
    for (std::size_t i = 0; i < n_test; ++i) in_test[idx[i]] = true;
  } else {
    constexpr Label kOrder[] = {Label::Human, Label::AI, Label::Unlabeled};
    std::vector<std::vector<std::size_t>> groups;
    for (const Label label : kOrder) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (ds[i].label == label) idx.push_back(i);
      }
      if (idx.empty()) continue;
      if (idx.size() < 2) {
        throw InsufficientSamplesError(
            "stratified split needs at least 2 samples per class");
      }
      groups.push_back(std::move(idx));
    }
    // Largest-remainder allocation of the class test counts.
    std::vector<std::size_t> take(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double quota =
          spec.test_fraction * static_cast<double>(groups[g].size());
      take[g] = static_cast<std::size_t>(std::floor(quota));
      assigned += take[g];
      remainders.emplace_back(quota - std::floor(quota), g);
    }
    std::sort(remainders.begin(), remainders.end(), [](auto a, auto b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < n_test && k < remainders.size(); ++k) {
      const std::size_t g = remainders[k].second;
      if (take[g] < groups[g].size()) {
        ++take[g];
        ++assigned;
      }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      detail::shuffle_indices(groups[g], rng);
      for (std::size_t i = 0; i < take[g]; ++i) in_test[groups[g][i]] = true;
    }
  }

  SplitResult result{Dataset(ds.name() + "/train"), Dataset(ds.name() + "/test")};
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? result.test : result.train).add(ds[i]);
  }
  return result;
}

struct Histogram {
  std::vector<double> edges;           // bins + 1 entries
  std::vector<std::uint64_t> counts;   // one per bin
};

// Equal-width bins over [min word count, max word count]. A degenerate range
// collapses to a single bin holding everything.
inline Histogram length_histogram(const Dataset& ds, std::size_t bins) {
  if (ds.empty()) throw EmptyDatasetError("cannot bin an empty dataset");
  if (bins < 1) throw InvalidArgumentError("bins must be a positive integer");

  std::vector<double> lengths;
  lengths.reserve(ds.size());
  for (const auto& s : ds) {
    lengths.push_back(static_cast<double>(word_count(s.text)));
  }
  const auto [lo_it, hi_it] = std::minmax_element(lengths.begin(), lengths.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  Histogram h;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.counts = {static_cast<std::uint64_t>(lengths.size())};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(lo + width * static_cast<double>(i));
  }
  h.counts.assign(bins, 0);
  for (const double v : lengths) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;  // right edge belongs to the last bin
    ++h.counts[idx];
  }
  return h;
}

}  // namespace botspot
