#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "botspot/errors.hpp"
#include "botspot/ngram_lm.hpp"

using namespace botspot;
using Catch::Approx;

namespace {

LmConfig unigram_config(double alpha = 1.0) {
  LmConfig c;
  c.order = 1;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST_CASE("unigram additive smoothing matches the hand count") {
  // events are a, b and <sep>; vocab {<unk>, <sep>, a, b} counts 4 symbols
  const auto lm = NGramLM::train({{"a", "b"}}, unigram_config());
  const auto a = lm.vocab().id_or_unk("a");
  CHECK(lm.prob(a, {}) == Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(lm.prob(Vocabulary::kUnkId, {}) == Approx(1.0 / 7.0).epsilon(1e-12));

  // all three predicted events have probability 2/7
  CHECK(lm.log_prob({"a", "b"}) == Approx(3.0 * std::log(2.0 / 7.0)));
  CHECK(lm.perplexity({"a", "b"}) == Approx(3.5).epsilon(1e-12));
}

TEST_CASE("interpolated bigram matches the hand-computed mixture") {
  LmConfig c;
  c.order = 2;
  c.alpha = 1.0;
  c.lambdas = {0.4, 0.6};
  const auto lm = NGramLM::train({{"a", "b", "a", "b"}}, c);
  const auto a = lm.vocab().id_or_unk("a");
  const auto b = lm.vocab().id_or_unk("b");
  // unigram part: (2+1)/(5+4); bigram part after "a": (2+1)/(2+4)
  CHECK(lm.prob(b, {a}) ==
        Approx(0.4 * (3.0 / 9.0) + 0.6 * (3.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("pure bigram tends to the maximum-likelihood ratio as alpha -> 0") {
  LmConfig c;
  c.order = 2;
  c.alpha = 1e-12;
  c.lambdas = {0.0, 1.0};
  const auto lm = NGramLM::train({{"a", "b", "a", "b"}}, c);
  const auto a = lm.vocab().id_or_unk("a");
  const auto b = lm.vocab().id_or_unk("b");
  CHECK(lm.prob(b, {a}) == Approx(1.0).margin(1e-6));
}

TEST_CASE("per-context probabilities normalize to one") {
  LmConfig c;
  c.order = 2;
  c.alpha = 0.5;
  const auto lm = NGramLM::train({{"a", "b", "a"}, {"b", "c"}}, c);
  REQUIRE(lm.vocab().event_count() <= 10);

  const auto sum_over_events = [&](const NGramLM::Context& history) {
    double sum = 0.0;
    for (int id = 0; id < lm.vocab().size(); ++id) {
      if (id == Vocabulary::kBosId) continue;
      sum += lm.prob(id, history);
    }
    return sum;
  };

  CHECK(sum_over_events({}) == Approx(1.0).margin(1e-9));
  CHECK(sum_over_events({lm.vocab().id_or_unk("a")}) ==
        Approx(1.0).margin(1e-9));
  CHECK(sum_over_events({lm.vocab().id_or_unk("c")}) ==
        Approx(1.0).margin(1e-9));
  // unseen history still normalizes (falls back to pure smoothing)
  CHECK(sum_over_events({Vocabulary::kUnkId}) == Approx(1.0).margin(1e-9));
}

TEST_CASE("a count-free model is uniform over its event set") {
  std::vector<std::string> tokens = {"<unk>", "<bos>", "<sep>"};
  for (int i = 0; i < 48; ++i) tokens.push_back("t" + std::to_string(i));
  const NGramLM lm(Vocabulary(tokens), unigram_config());
  REQUIRE(lm.vocab().event_count() == 50);
  CHECK(lm.perplexity({"hello", "world"}) == Approx(50.0).margin(1e-9));
  CHECK(lm.perplexity({"t0", "t1", "t2", "t3", "t4"}) ==
        Approx(50.0).margin(1e-9));
}

TEST_CASE("out-of-vocabulary tokens score through <unk>") {
  const auto lm = NGramLM::train({{"a", "b"}}, unigram_config());
  CHECK(lm.log_prob({"zzz"}) == Approx(lm.log_prob({"qqq"})));
  CHECK(lm.perplexity({"zzz", "qqq"}) > 0.0);
}

TEST_CASE("predicted count includes the end marker") {
  CHECK(NGramLM::predicted_count({}) == 1);
  CHECK(NGramLM::predicted_count({"a", "b", "c"}) == 4);
  const auto lm = NGramLM::train({{"a", "b"}}, unigram_config());
  CHECK(std::isfinite(lm.perplexity({})));
}

TEST_CASE("model files round-trip byte-identically") {
  LmConfig c;
  c.order = 3;
  c.alpha = 0.25;
  const auto lm = NGramLM::train({{"a", "b", "c"}, {"a", "b"}}, c);
  const auto j = lm.to_json();
  const auto restored = NGramLM::from_json(j);
  CHECK(restored.to_json().dump() == j.dump());
  CHECK(restored.perplexity({"a", "b", "x"}) ==
        Approx(lm.perplexity({"a", "b", "x"})).epsilon(1e-15));
  CHECK(j["kind"] == "ngram_lm");
  CHECK(j["format_version"] == 1);
}

TEST_CASE("model files reject wrong kinds and versions") {
  nlohmann::json j;
  j["kind"] = "linear";
  CHECK_THROWS_AS(NGramLM::from_json(j), ParseError);
  j["kind"] = "ngram_lm";
  j["format_version"] = 2;
  CHECK_THROWS_AS(NGramLM::from_json(j), ParseError);
}

TEST_CASE("config validation rejects bad hyperparameters") {
  LmConfig bad;
  bad.order = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = {};
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = {};
  bad.lambdas = {0.3};  // one weight for order 2
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = {};
  bad.lambdas = {0.3, 0.3};  // does not sum to 1
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = {};
  bad.lambdas = {-0.5, 1.5};
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);

  CHECK_THROWS_AS(NGramLM::train({}, unigram_config()), EmptyCorpusError);
}

TEST_CASE("higher-order models keep exact probabilities after reload") {
  LmConfig c;
  c.order = 2;
  c.alpha = 1.0;
  const auto lm =
      NGramLM::train({{"the", "food", "was", "good"},
                      {"the", "service", "was", "slow"}},
                     c);
  const auto copy = NGramLM::from_json(lm.to_json());
  const TokenSeq probe = {"the", "food", "was", "slow"};
  CHECK(copy.log_prob(probe) == lm.log_prob(probe));  // bit-exact
}
