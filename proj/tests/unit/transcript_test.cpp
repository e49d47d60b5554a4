#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "support.hpp"

namespace clid {
namespace {

using test::error_code_of;
using Tokens = std::vector<std::string>;

TEST(Tokenize, CaseFoldAndPunctuation) {
  EXPECT_EQ(tokenize("The cat, the CAT."), (Tokens{"the", "cat", "the", "cat"}));
}

TEST(Tokenize, DropsAnnotations) {
  EXPECT_EQ(tokenize("[laughs] okay"), Tokens{"okay"});
  EXPECT_EQ(tokenize("<inaudible> so"), Tokens{"so"});
}

TEST(Tokenize, ApostrophesAndHyphens) {
  EXPECT_EQ(tokenize("didn't 'quoted' mm-hmm -- well"),
            (Tokens{"didn't", "quoted", "mm", "hmm", "well"}));
  EXPECT_EQ(tokenize("It’s"), Tokens{"it's"});
  EXPECT_TRUE(tokenize("... !!").empty());
}

TEST(Tokenize, StopWords) {
  TokenizerConfig cfg;
  cfg.stop_words = {"the", "a"};
  EXPECT_EQ(tokenize("The cat and a dog", cfg), (Tokens{"cat", "and", "dog"}));
}

TEST(Tokenize, ToyCorpusMatchesHandReference) {
  const auto corpus_text = test::slurp(test::data_dir() / "toy_corpus.jsonl");
  std::istringstream ref(test::slurp(test::data_dir() / "toy_tokens.txt"));
  std::istringstream lines(corpus_text);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::string expected;
    ASSERT_TRUE(std::getline(ref, expected));
    std::istringstream ws(expected);
    Tokens want;
    for (std::string w; ws >> w;) want.push_back(w);
    const auto text = nlohmann::json::parse(line).at("text").get<std::string>();
    EXPECT_EQ(tokenize(text), want) << "utterance " << count + 1 << ": " << text;
    ++count;
  }
  EXPECT_EQ(count, 40u);
}

TEST(BuildSession, MergesRuns) {
  const auto s = test::script({"A:hi", "A:there", "B:hello"});
  ASSERT_EQ(s.turns_a.size(), 1u);
  EXPECT_EQ(s.turns_a[0].tokens, (Tokens{"hi", "there"}));
  EXPECT_EQ(s.turns_b[0].tokens, Tokens{"hello"});
  EXPECT_EQ(s.n_pairs(), 1u);
}

TEST(BuildSession, BMayOpen) {
  const auto s = test::script({"B:hi", "A:yes"});
  ASSERT_EQ(s.turns.size(), 2u);
  EXPECT_EQ(s.turns[0].speaker_role, Role::B);
  EXPECT_EQ(s.turns_a[0].tokens, Tokens{"yes"});
  EXPECT_EQ(s.turns_a[0].turn_index, 1u);
}

TEST(BuildSession, EmptyUtterancesDoNotSplitRuns) {
  const auto s = test::script({"A:one", "B:[laughs]", "A:two", "B:ok"});
  ASSERT_EQ(s.turns_a.size(), 1u);
  EXPECT_EQ(s.turns_a[0].tokens, (Tokens{"one", "two"}));
}

TEST(BuildSession, Errors) {
  EXPECT_EQ(error_code_of([] { (void)test::script({"A:hi", "C:what"}); }), Errc::UnknownSpeaker);
  EXPECT_EQ(error_code_of([] { (void)test::script({"A:[pause]", "B:..."}); }), Errc::EmptySession);
  EXPECT_EQ(error_code_of([] {
              (void)build_session({test::utt("x", "A", "hi"), test::utt("y", "B", "yo", 1)}, "A", "B");
            }),
            Errc::InvalidArgument);
  EXPECT_EQ(error_code_of([] {
              (void)build_session({test::utt("x", "A", "hi", 3), test::utt("x", "B", "yo", 2)}, "A", "B");
            }),
            Errc::MalformedTranscript);
}

TEST(BuildSession, ToyCorpusPairCounts) {
  const auto corpus = load_corpus(test::data_dir() / "toy_corpus.jsonl");
  ASSERT_EQ(corpus.size(), 3u);
  std::vector<std::size_t> n;
  for (const auto& [id, utts] : corpus) n.push_back(build_session(utts, "therapist", "client").n_pairs());
  EXPECT_EQ(n, (std::vector<std::size_t>{4, 6, 5}));
}

TEST(BuildBag, Counting) {
  const auto store = test::axis_store();
  const Tokens turn{"the", "cat", "the"};
  const auto bag = build_bag(turn, store);
  EXPECT_EQ(bag.words, (Tokens{"the", "cat"}));
  EXPECT_EQ(bag.counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_DOUBLE_EQ(bag.weights[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(bag.weights[1], 1.0 / 3.0);
}

TEST(BuildBag, AllOov) {
  const Tokens turn{"zzzqx"};
  const auto bag = build_bag(turn, test::axis_store());
  EXPECT_TRUE(bag.empty());
  EXPECT_EQ(bag.oov_dropped, 1u);
}

TEST(BuildBag, ToyCorpusMatchesGolden) {
  const auto store = load_text(test::data_dir() / "toy_embeddings.txt");
  const auto golden = nlohmann::json::parse(test::slurp(test::data_dir() / "toy_bags.json"));
  const auto corpus = load_corpus(test::data_dir() / "toy_corpus.jsonl");
  for (const auto& [id, utts] : corpus) {
    const auto s = build_session(utts, "therapist", "client");
    for (Role r : {Role::A, Role::B}) {
      const auto& want = golden.at(id).at(std::string(1, role_name(r)));
      ASSERT_EQ(want.size(), s.turns_of(r).size());
      for (std::size_t t = 0; t < want.size(); ++t) {
        const auto bag = build_bag(s.turns_of(r)[t], store);
        EXPECT_EQ(bag.words, want[t].at("words").get<Tokens>()) << id << " turn " << t;
        EXPECT_EQ(bag.counts, want[t].at("counts").get<std::vector<std::size_t>>());
        EXPECT_EQ(bag.oov_dropped, want[t].at("oov_dropped").get<std::size_t>());
        const auto w = want[t].at("weights").get<std::vector<double>>();
        for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(bag.weights[k], w[k], 1e-12);
      }
    }
  }
}

TEST(Corpus, CsvAndJsonlAgree) {
  const auto jsonl = parse_corpus_jsonl(
      "{\"session_id\":\"s\",\"speaker\":\"A\",\"text\":\"hi, \\\"you\\\"\"}\n"
      "{\"session_id\":\"s\",\"speaker\":\"B\",\"text\":\"yo\"}\n");
  const auto csv = parse_corpus_csv("speaker,session_id,text\nA,s,\"hi, \"\"you\"\"\"\nB,s,yo\n");
  ASSERT_EQ(jsonl.at("s").size(), 2u);
  ASSERT_EQ(csv.at("s").size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(jsonl.at("s")[i].text, csv.at("s")[i].text);
    EXPECT_EQ(jsonl.at("s")[i].speaker, csv.at("s")[i].speaker);
  }
}

TEST(Corpus, MalformedLinesCarryLineNumbers) {
  try {
    (void)parse_corpus_jsonl("{\"session_id\":\"s\",\"speaker\":\"A\",\"text\":\"hi\"}\n{oops\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedTranscript);
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_EQ(error_code_of([] { (void)parse_corpus_csv("session_id,text\ns,hi\n"); }),
            Errc::MalformedTranscript);
}

TEST(Corpus, RoleMapAndStopWords) {
  test::TempDir dir;
  test::spit(dir / "roles.csv", "session_id,speaker_a,speaker_b\ns1,T,C\n");
  test::spit(dir / "stop.txt", "# comment\nThe\n\nof\n");
  const auto roles = load_role_map(dir / "roles.csv");
  EXPECT_EQ(roles.at("s1").speaker_b, "C");
  const auto stop = load_stop_words(dir / "stop.txt");
  EXPECT_EQ(stop, (std::unordered_set<std::string>{"the", "of"}));
}

}  // namespace
}  // namespace clid
