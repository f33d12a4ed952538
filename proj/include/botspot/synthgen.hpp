#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "botspot/corpus.hpp"
#include "botspot/errors.hpp"

namespace botspot {

struct StyleConfig {
  double overlap = 0.0;  // chance an AI sentence borrows the human pool
  std::uint64_t seed = 0;
  std::size_t samples_per_class = 500;

  void validate() const {
    if (overlap < 0.0 || overlap > 1.0) {
      throw InvalidArgumentError("overlap must be in [0,1]");
    }
    if (samples_per_class < 1) {
      throw InvalidArgumentError("samples_per_class must be >= 1");
    }
  }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& pool,
                      std::mt19937_64& rng) {
  return pool[rng() % N];
}

// Colloquial, first-person fragments: many alternatives per slot so human
// samples rarely repeat.
inline std::string human_sentence(std::mt19937_64& rng) {
  static const std::array<std::string_view, 12> openers = {
      "honestly", "ok so", "man", "look", "real talk", "no joke",
      "i swear", "listen", "so yeah", "oh boy", "heads up", "fun story"};
  static const std::array<std::string_view, 12> subjects = {
      "i", "we", "my wife and i", "me and my buddy", "my sister and i",
      "our whole table", "my mom", "the two of us", "my roommate",
      "my kids", "my date and i", "everyone in our group"};
  static const std::array<std::string_view, 10> verbs = {
      "grabbed", "tried", "ordered", "split", "devoured",
      "shared", "demolished", "sampled", "went for", "fought over"};
  static const std::array<std::string_view, 16> dishes = {
      "the carbonara", "their famous tacos", "a massive burger",
      "the pad thai", "some dumplings", "the brisket", "the tiramisu",
      "a margherita pizza", "the clam chowder", "their lamb shawarma",
      "the fish and chips", "a huge plate of wings", "the mushroom risotto",
      "their weekend brunch", "the pork belly bao", "a spicy ramen bowl"};
  static const std::array<std::string_view, 12> feelings = {
      "and i absolutely loved it", "and we were blown away",
      "and i couldn't stop smiling", "and honestly my heart sang",
      "and i nearly cried it was so good", "and we laughed the whole time",
      "but i was kinda disappointed", "but it left me a bit cold",
      "and i'm still dreaming about it", "and wow, just wow",
      "and it hit the spot big time", "but the portion felt stingy"};
  static const std::array<std::string_view, 12> gripes = {
      "the wait was brutal though", "parking was a total nightmare",
      "our server vanished for ages", "the music was way too loud",
      "my soda stayed empty forever", "the table wobbled like crazy",
      "the booth smelled faintly of bleach", "the menu font was comically tiny",
      "someone's kid screamed nonstop", "the ac was arctic",
      "we got seated next to the kitchen door", "the bill took forever"};
  static const std::array<std::string_view, 10> verdicts = {
      "i'd crawl back tomorrow", "we're definitely coming back",
      "not sure i'd bother again", "i already miss it",
      "my buddy is still raving about it", "i texted everyone about this place",
      "it's my new happy place", "i might dream about that sauce",
      "we'll drag our friends here next week", "i want it again right now"};

  std::string s;
  switch (rng() % 4) {
    case 0:
      s = std::string(pick(openers, rng)) + ", " +
          std::string(pick(subjects, rng)) + " " +
          std::string(pick(verbs, rng)) + " " +
          std::string(pick(dishes, rng)) + " " +
          std::string(pick(feelings, rng));
      break;
    case 1:
      s = std::string(pick(subjects, rng)) + " " +
          std::string(pick(verbs, rng)) + " " +
          std::string(pick(dishes, rng)) + " " +
          std::string(pick(feelings, rng));
      break;
    case 2:
      s = std::string(pick(openers, rng)) + ", " +
          std::string(pick(gripes, rng)) + " but " +
          std::string(pick(verdicts, rng));
      break;
    default:
      s = std::string(pick(subjects, rng)) + " " +
          std::string(pick(verbs, rng)) + " " +
          std::string(pick(dishes, rng)) + " and " +
          std::string(pick(verdicts, rng));
      break;
  }
  return s;
}

// Formal, impersonal fragments: a deliberately small pool so AI samples
// sound templated and repeat n-grams heavily.
inline std::string ai_sentence(std::mt19937_64& rng) {
  static const std::array<std::string_view, 4> subjects = {
      "the establishment", "the restaurant", "this dining venue",
      "the location"};
  static const std::array<std::string_view, 4> verbs = {
      "offers", "provides", "maintains", "delivers"};
  static const std::array<std::string_view, 6> objects = {
      "a diverse menu of expertly prepared dishes",
      "a welcoming and professional atmosphere",
      "consistently high culinary standards",
      "an extensive selection of quality ingredients",
      "attentive and courteous service at every visit",
      "a refined yet accessible dining experience"};
  static const std::array<std::string_view, 4> closers = {
      "overall, it is a commendable choice for any occasion",
      "patrons are certain to appreciate the meticulous attention to detail",
      "the waitstaff is incredibly polite and accommodating throughout",
      "it is highly recommended for those seeking quality cuisine"};

  if (rng() % 4 == 0) return std::string(pick(closers, rng));
  return std::string(pick(subjects, rng)) + " " +
         std::string(pick(verbs, rng)) + " " +
         std::string(pick(objects, rng));
}

}  // namespace detail

// Deterministic style-contrasted corpus: human-style samples are colloquial
// and varied, AI-style samples formal and repetitive. overlap is the chance
// that any one AI sentence is drawn from the human pool instead, narrowing
// the stylistic gap the way a rephrase attack does.
inline Dataset generate(const StyleConfig& config) {
  config.validate();
  Dataset ds("synth-" + std::to_string(config.seed));
  for (int cls = 0; cls < 2; ++cls) {
    const bool ai = cls == 1;
    for (std::size_t i = 0; i < config.samples_per_class; ++i) {
      std::mt19937_64 rng(detail::mix64(
          detail::mix64(config.seed, static_cast<std::uint64_t>(cls)), i));
      const std::size_t sentences = 2 + rng() % 2;
      std::string text;
      std::size_t emitted = 0;
      while (emitted < sentences || word_count(text) < 11) {
        std::string sentence;
        if (ai && detail::unit_double(rng) >= config.overlap) {
          sentence = detail::ai_sentence(rng);
        } else {
          sentence = detail::human_sentence(rng);
        }
        sentence[0] = static_cast<char>(
            std::toupper(static_cast<unsigned char>(sentence[0])));
        if (!text.empty()) text += ' ';
        text += sentence + ".";
        ++emitted;
      }
      TextSample sample;
      sample.id = "synth-" + std::to_string(config.seed) + "-" +
                  (ai ? "ai" : "human") + "-" + std::to_string(i);
      sample.text = std::move(text);
      sample.label = ai ? Label::AI : Label::Human;
      sample.source = "synth";
      ds.add(std::move(sample));
    }
  }
  return ds;
}

}  // namespace botspot
