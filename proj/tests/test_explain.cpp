#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "botspot/explain.hpp"
#include "botspot/linear.hpp"

using namespace botspot;
using Catch::Approx;

namespace {

// deterministic pseudo-model: probability derived from an FNV hash of the text
ProbaFn hash_model(std::uint64_t salt) {
  return [salt](const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL ^ salt;
    for (const unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return static_cast<double>(h % 100000) / 100000.0;
  };
}

double phi_sum(const Explanation& e) {
  return std::accumulate(e.phi.begin(), e.phi.end(), 0.0);
}

Dataset docs(const std::vector<std::string>& texts) {
  Dataset ds("docs");
  int i = 0;
  for (const auto& t : texts) {
    ds.add({"d" + std::to_string(i++), t, Label::Unlabeled, ""});
  }
  return ds;
}

LinearModel toy_model() {
  TrainConfig c;
  c.epochs = 0;
  c.ngram_orders = {1};
  LinearModel m(FeatureVocab::build(docs({"x y", "x z"}), {1}), c);
  m.set_parameters({1.0, -2.0, 0.5}, 0.1);  // features x, y, z
  return m;
}

}  // namespace

TEST_CASE("the value function keeps subset tokens in original order") {
  const auto model = toy_model();
  const ProbaFn proba = [&](const std::string& t) {
    return model.predict_proba(t);
  };
  const auto tokens = tokenize("x! y z");

  CHECK(value_function(proba, tokens, {0, 1, 2, 3}) ==
        model.predict_proba("x! y z"));
  CHECK(value_function(proba, tokens, {}) == Approx(sigmoid(0.1)));

  // keeping only "y": featurization is the unit vector on y
  CHECK(value_function(proba, tokens, {2}) == Approx(sigmoid(-2.0 + 0.1)));
  CHECK_THROWS_AS(value_function(proba, tokens, {9}), InvalidArgumentError);
}

TEST_CASE("a constant model gets zero attributions") {
  const ProbaFn constant = [](const std::string&) { return 0.42; };
  const auto e = shapley_exact(constant, {"a", "b", "c"});
  for (const double p : e.phi) CHECK(p == 0.0);
  CHECK(e.base_value == 0.42);
  CHECK(e.fx == 0.42);
  CHECK(e.method == "exact");

  const auto s = shapley_sampled(constant, {"a", "b", "c"}, 50, 3);
  for (const double p : s.phi) CHECK(p == 0.0);
  for (const double se : s.stderr_) CHECK(se == 0.0);
}

TEST_CASE("a single player receives the full lift") {
  const ProbaFn step = [](const std::string& t) {
    return t.empty() ? 0.5 : 0.9;
  };
  const auto e = shapley_exact(step, {"tok"});
  REQUIRE(e.phi.size() == 1);
  CHECK(e.phi[0] == Approx(0.4).margin(1e-15));
}

TEST_CASE("exact values equal the permutation-average definition at m=3") {
  const auto model = hash_model(17);
  const TokenSeq tokens = {"a", "b", "c"};
  const auto e = shapley_exact(model, tokens);

  // brute-force: average marginal contribution over all 3! orders
  std::vector<double> phi(3, 0.0);
  std::vector<std::size_t> perm = {0, 1, 2};
  int count = 0;
  do {
    std::vector<std::size_t> kept;
    double prev = value_function(model, tokens, kept);
    for (const std::size_t p : perm) {
      kept.push_back(p);
      const double cur = value_function(model, tokens, kept);
      phi[p] += cur - prev;
      prev = cur;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  REQUIRE(count == 6);

  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(e.phi[i] == Approx(phi[i] / 6.0).margin(1e-12));
  }
}

TEST_CASE("efficiency holds on every input up to the cap") {
  const auto model = hash_model(23);
  TokenSeq tokens;
  for (int m = 1; m <= 12; ++m) {
    tokens.push_back("t" + std::to_string(m));
    const auto e = shapley_exact(model, tokens);
    CAPTURE(m);
    CHECK(phi_sum(e) == Approx(e.fx - e.base_value).margin(1e-9));
  }
}

TEST_CASE("identical tokens receive identical attributions") {
  const auto model = toy_model();
  const ProbaFn proba = [&](const std::string& t) {
    return model.predict_proba(t);
  };
  const auto e = shapley_exact(proba, {"x", "x", "y"});
  CHECK(e.phi[0] == Approx(e.phi[1]).margin(1e-9));
}

TEST_CASE("a token without features is a dummy") {
  const auto model = toy_model();
  const ProbaFn proba = [&](const std::string& t) {
    return model.predict_proba(t);
  };
  const auto e = shapley_exact(proba, {"x", "qqq", "y"});
  CHECK(std::abs(e.phi[1]) <= 1e-9);
  CHECK(phi_sum(e) == Approx(e.fx - e.base_value).margin(1e-9));
}

TEST_CASE("attributions are linear in the value function") {
  const auto v1 = hash_model(5);
  const auto v2 = hash_model(31);
  const double a = 0.3;
  const double b = 0.7;
  const ProbaFn mix = [&](const std::string& t) {
    return a * v1(t) + b * v2(t);
  };
  const TokenSeq tokens = {"p", "q", "r", "s"};
  const auto em = shapley_exact(mix, tokens);
  const auto e1 = shapley_exact(v1, tokens);
  const auto e2 = shapley_exact(v2, tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    CHECK(em.phi[i] == Approx(a * e1.phi[i] + b * e2.phi[i]).margin(1e-9));
  }
}

TEST_CASE("exact mode enforces its token cap") {
  const auto model = hash_model(1);
  TokenSeq many;
  for (int i = 0; i < 16; ++i) many.push_back("t" + std::to_string(i));
  CHECK_THROWS_AS(shapley_exact(model, many), TooManyTokensError);
  CHECK_THROWS_AS(shapley_exact(model, {}), EmptyTextError);
  CHECK_THROWS_AS(shapley_sampled(model, {}, 10, 0), EmptyTextError);
  CHECK_THROWS_AS(shapley_sampled(model, {"a"}, 0, 0), InvalidArgumentError);
}

TEST_CASE("sampling is deterministic and telescopes to efficiency") {
  const auto model = hash_model(77);
  const TokenSeq tokens = {"a", "b", "c", "d", "e"};
  const auto s1 = shapley_sampled(model, tokens, 200, 9);
  const auto s2 = shapley_sampled(model, tokens, 200, 9);
  CHECK(s1.phi == s2.phi);
  CHECK(s1.stderr_ == s2.stderr_);
  CHECK(s1.method == "sampled");
  CHECK(s1.seed == 9);
  CHECK(s1.permutations == 200);
  CHECK(phi_sum(s1) == Approx(s1.fx - s1.base_value).margin(1e-9));
}

TEST_CASE("sampled estimates converge to the exact values") {
  const auto model = hash_model(13);
  TokenSeq tokens;
  for (int i = 0; i < 8; ++i) tokens.push_back("w" + std::to_string(i));
  const auto exact = shapley_exact(model, tokens);

  const auto sampled = shapley_sampled(model, tokens, 2000, 7);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double bound = std::max(3.0 * sampled.stderr_[i], 0.02);
    CAPTURE(i, sampled.phi[i], exact.phi[i], sampled.stderr_[i]);
    CHECK(std::abs(sampled.phi[i] - exact.phi[i]) <= bound);
  }

  const auto coarse = shapley_sampled(model, tokens, 100, 7);
  const auto fine = shapley_sampled(model, tokens, 10000, 7);
  double err_coarse = 0.0;
  double err_fine = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    err_coarse = std::max(err_coarse, std::abs(coarse.phi[i] - exact.phi[i]));
    err_fine = std::max(err_fine, std::abs(fine.phi[i] - exact.phi[i]));
  }
  CHECK(err_fine < err_coarse);
}

TEST_CASE("top features rank by magnitude with position tie-breaks") {
  Explanation e;
  e.tokens = {"a", "b", "c"};
  e.phi = {0.3, -0.5, 0.1};
  auto top = top_features(e, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].position == 1);
  CHECK(top[1].position == 0);

  top = top_features(e, 10);
  CHECK(top.size() == 3);

  e.phi = {0.2, -0.1, -0.2};  // tie between positions 0 and 2
  top = top_features(e, 3);
  CHECK(top[0].position == 0);
  CHECK(top[1].position == 2);
}

TEST_CASE("explanation json carries sampling fields only when sampled") {
  const auto model = hash_model(3);
  auto exact = shapley_exact(model, {"a", "b"});
  exact.id = "sample-1";
  const auto je = exact.to_json();
  CHECK(je.contains("phi"));
  CHECK_FALSE(je.contains("stderr"));
  CHECK_FALSE(je.contains("seed"));

  auto sampled = shapley_sampled(model, {"a", "b"}, 25, 4);
  sampled.id = "sample-2";
  const auto js = sampled.to_json();
  CHECK(js.contains("stderr"));
  CHECK(js["seed"] == 4);
  CHECK(js["permutations"] == 25);

  const auto back = Explanation::from_json(js);
  CHECK(back.phi == sampled.phi);
  CHECK(back.stderr_ == sampled.stderr_);
  CHECK(back.method == "sampled");
}
