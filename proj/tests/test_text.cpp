#include <catch2/catch_amalgamated.hpp>

#include "botspot/errors.hpp"
#include "botspot/text.hpp"

using namespace botspot;

TEST_CASE("tokenize lowercases and detaches edge punctuation") {
  CHECK(tokenize("Hello, World!") == TokenSeq{"hello", ",", "world", "!"});
  CHECK(tokenize("(good)") == TokenSeq{"(", "good", ")"});
  CHECK(tokenize("!!ok??") == TokenSeq{"!", "!", "ok", "?", "?"});
  CHECK(tokenize("...") == TokenSeq{".", ".", "."});
  CHECK(tokenize("Great FOOD") == TokenSeq{"great", "food"});
}

TEST_CASE("tokenize keeps interior punctuation inside the token") {
  CHECK(tokenize("don't stop") == TokenSeq{"don't", "stop"});
  CHECK(tokenize("well-known spot") == TokenSeq{"well-known", "spot"});
  CHECK(tokenize("'em") == TokenSeq{"'", "em"});
  CHECK(tokenize("a--b") == TokenSeq{"a--b"});
  CHECK(tokenize("--a--") == TokenSeq{"-", "-", "a", "-", "-"});
}

TEST_CASE("tokenize splits on unicode whitespace") {
  CHECK(tokenize("a\xc2\xa0w") == TokenSeq{"a", "w"});          // NBSP
  CHECK(tokenize("a\xe3\x80\x80w") == TokenSeq{"a", "w"});      // ideographic
  CHECK(tokenize("a\xe2\x80\x89w") == TokenSeq{"a", "w"});      // thin space
  CHECK(tokenize("a\t\r\n w") == TokenSeq{"a", "w"});
  CHECK(tokenize("") == TokenSeq{});
  CHECK(tokenize("  \t\n ") == TokenSeq{});
}

TEST_CASE("tokenize leaves non-ascii and malformed bytes untouched") {
  CHECK(tokenize("CAF\xc3\x89") == TokenSeq{"caf\xc3\x89"});  // É not folded
  CHECK(tokenize("caf\xc3\xa9!") == TokenSeq{"caf\xc3\xa9", "!"});
  CHECK(tokenize("a\xffz") == TokenSeq{"a\xffz"});  // stray byte passes through
  CHECK(tokenize("\xff") == TokenSeq{"\xff"});
}

TEST_CASE("tokenize is stable under rejoining with spaces") {
  const std::vector<std::string> texts = {
      "Hello, World!",
      "don't  (ever) say--that...",
      "The waitstaff was incredibly polite.",
      "uh... okay?! 'sup",
      "a\xc2\xa0mix of\tspaces\nand lines",
      "numbers 12,000.50 and 3.14!",
  };
  for (const auto& t : texts) {
    const auto tokens = tokenize(t);
    std::string joined;
    for (const auto& tok : tokens) {
      if (!joined.empty()) joined += ' ';
      joined += tok;
    }
    CAPTURE(t, joined);
    CHECK(tokenize(joined) == tokens);
  }
}

TEST_CASE("vocabulary pins the special markers to fixed ids") {
  Vocabulary v;
  CHECK(v.size() == 3);
  CHECK(v.token(Vocabulary::kUnkId) == "<unk>");
  CHECK(v.token(Vocabulary::kBosId) == "<bos>");
  CHECK(v.token(Vocabulary::kSepId) == "<sep>");
  CHECK(v.id_or_unk("missing") == Vocabulary::kUnkId);
  v.add("word");
  CHECK(v.id_or_unk("word") == 3);
  CHECK(v.event_count() == 3);  // everything but <bos>
  CHECK_THROWS_AS(v.add("word"), DuplicateIdError);
}

TEST_CASE("vocabulary restores from its serialized token list") {
  Vocabulary v(std::vector<std::string>{"<unk>", "<bos>", "<sep>", "b", "a"});
  CHECK(v.id_or_unk("b") == 3);
  CHECK(v.id_or_unk("a") == 4);
  CHECK_THROWS_AS(Vocabulary(std::vector<std::string>{"a", "b", "c"}),
                  ParseError);
  CHECK_THROWS_AS(Vocabulary(std::vector<std::string>{"<unk>", "<bos>"}),
                  ParseError);
}

TEST_CASE("build_vocab orders by frequency then lexicographically") {
  const std::vector<TokenSeq> corpus = {{"b", "a", "b"}, {"a", "c", "b"}};
  const auto v = build_vocab(corpus);
  CHECK(v.id_or_unk("b") == 3);  // count 3
  CHECK(v.id_or_unk("a") == 4);  // count 2
  CHECK(v.id_or_unk("c") == 5);  // count 1
  CHECK(v.size() == 6);

  const auto cut = build_vocab(corpus, 2);
  CHECK(cut.contains("a"));
  CHECK(cut.contains("b"));
  CHECK_FALSE(cut.contains("c"));
}

TEST_CASE("build_vocab rejects bad input") {
  CHECK_THROWS_AS(build_vocab({}), EmptyCorpusError);
  CHECK_THROWS_AS(build_vocab({{"a"}}, 0), InvalidArgumentError);
}
