#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "clid/report.hpp"
#include "support.hpp"

namespace clid {
namespace {

using test::error_code_of;

MeasureConfig toy_config() {
  MeasureConfig cfg;
  cfg.corpus = test::data_dir() / "toy_corpus.jsonl";
  cfg.embeddings = test::data_dir() / "toy_embeddings.txt";
  cfg.speaker_a = "therapist";
  cfg.speaker_b = "client";
  return cfg;
}

TEST(Report, ToyMatchesGoldenAtAnyWorkerCount) {
  const auto golden = test::slurp(test::data_dir() / "toy_report.csv");
  for (std::size_t workers : {1u, 2u, 4u}) {
    auto cfg = toy_config();
    cfg.workers = workers;
    EXPECT_EQ(render_csv(run_measure(cfg)), golden) << "workers=" << workers;
  }
}

TEST(Report, CsvReadBack) {
  const auto table = ReportTable::parse_csv(render_csv(run_measure(toy_config())));
  const auto uclid = table.column("a-to-b", "uclid");
  ASSERT_EQ(uclid.size(), 3u);
  EXPECT_DOUBLE_EQ(uclid.at("s1"), 2.7608810200611185);
  const auto sym = table.column("symmetric", "uclid");
  EXPECT_DOUBLE_EQ(sym.at("s1"), (2.7608810200611185 + 2.2112044890882445) / 2);
}

TEST(Report, JsonCarriesNullsAndReadsBack) {
  auto cfg = toy_config();
  cfg.context_length = 1;
  const auto run = run_measure(cfg);
  const auto text = render_json(run);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("metadata").at("context_length"), "1");
  EXPECT_EQ(j.at("rows").size(), 6u);
  const auto back = ReportTable::parse_json(text).column("a-to-b", "uclid");
  const auto csv = ReportTable::parse_csv(render_csv(run)).column("a-to-b", "uclid");
  EXPECT_EQ(back, csv);
}

TEST(Report, SymmetricAndSingleDirection) {
  auto cfg = toy_config();
  cfg.direction = DirectionSelector::Symmetric;
  const auto sym = ReportTable::parse_csv(render_csv(run_measure(cfg)));
  cfg.direction = DirectionSelector::Both;
  const auto both = ReportTable::parse_csv(render_csv(run_measure(cfg)));
  EXPECT_EQ(sym.column("symmetric", "uclid"), both.column("symmetric", "uclid"));
  cfg.direction = DirectionSelector::BToA;
  const auto b = ReportTable::parse_csv(render_csv(run_measure(cfg)));
  EXPECT_TRUE(b.column("a-to-b", "uclid").empty());
  EXPECT_EQ(b.column("b-to-a", "uclid"), both.column("b-to-a", "uclid"));
}

TEST(Report, CohesionNeedsDatabase) {
  auto cfg = toy_config();
  cfg.measures = parse_measures("uclid,cohesion");
  EXPECT_EQ(error_code_of([&] { (void)run_measure(cfg); }), Errc::DatabaseUnavailable);
  cfg.synsets = test::data_dir() / "toy_synsets.tsv";
  cfg.hypernyms = test::data_dir() / "toy_hypernyms.tsv";
  const auto csv = render_csv(run_measure(cfg));
  EXPECT_NE(csv.find(",cohesion\n"), std::string::npos);
  EXPECT_NE(csv.find("lexicon_sha256="), std::string::npos);
}

TEST(Report, InputErrors) {
  auto cfg = toy_config();
  cfg.embeddings = "/nonexistent/e.txt";
  EXPECT_EQ(error_code_of([&] { (void)run_measure(cfg); }), Errc::Io);
  cfg = toy_config();
  cfg.speaker_a.clear();
  EXPECT_EQ(error_code_of([&] { (void)run_measure(cfg); }), Errc::InvalidArgument);
  test::TempDir dir;
  test::spit(dir / "empty.jsonl", "");
  cfg = toy_config();
  cfg.corpus = dir / "empty.jsonl";
  EXPECT_EQ(error_code_of([&] { (void)run_measure(cfg); }), Errc::NoSessions);
  EXPECT_EQ(error_code_of([] { (void)parse_measures("uclid,bogus"); }), Errc::InvalidArgument);
  EXPECT_EQ(error_code_of([] { (void)parse_direction("sideways"); }), Errc::InvalidArgument);
}

TEST(Report, FailedSessionIsRecorded) {
  auto cfg = toy_config();
  Corpus corpus = load_corpus(cfg.corpus);
  corpus["s4"] = {test::utt("s4", "therapist", "hello"), test::utt("s4", "stranger", "hi", 1)};
  const auto run = measure_corpus(corpus, load_text(cfg.embeddings), cfg, nullptr);
  EXPECT_EQ(run.failed(), 1u);
  EXPECT_EQ(run.sessions.back().session_id, "s4");
  EXPECT_NE(run.sessions.back().error.find("UnknownSpeaker"), std::string::npos);
  EXPECT_EQ(render_csv(run).find("s4,"), std::string::npos);
}

TEST(Report, RoleMapOverridesSpeakers) {
  Corpus corpus;
  corpus["x"] = {test::utt("x", "T", "hi there"), test::utt("x", "C", "hello there", 1)};
  MeasureConfig cfg;
  const auto store = test::make_store({{"hi", {1, 0}}, {"there", {0, 1}}, {"hello", {1, 1}}});
  const auto run = measure_corpus(corpus, store, cfg, nullptr, {{"x", {"C", "T"}}});
  ASSERT_EQ(run.failed(), 0u);
  EXPECT_EQ(run.sessions[0].speaker_a, "C");
}

TEST(Report, ColumnRefs) {
  auto r = parse_column_ref("symmetric_uclid", "a-to-b");
  EXPECT_EQ(r.direction, "symmetric");
  EXPECT_EQ(r.measure, "uclid");
  r = parse_column_ref("b-to-a:nclid", "a-to-b");
  EXPECT_EQ(r.direction, "b-to-a");
  r = parse_column_ref("tfidf", "a-to-b");
  EXPECT_EQ(r.direction, "a-to-b");
}

TEST(Report, CorrelateAndPairedJoins) {
  const std::map<std::string, double> m{{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}};
  std::map<std::string, double> neg;
  for (const auto& [k, v] : m) neg[k] = -v;
  EXPECT_EQ(correlate(m, m).result.rho, 1.0);
  EXPECT_EQ(correlate(m, neg).result.rho, -1.0);
  EXPECT_EQ(error_code_of([&] { (void)correlate(m, {{"z", 1.0}}); }), Errc::NoOverlap);
  EXPECT_EQ(paired_test(m, m).result.p_value, 1.0);
  EXPECT_EQ(error_code_of([&] { (void)paired_test(m, {{"z", 1.0}}); }), Errc::NoPairs);
}

TEST(Report, RatingsFile) {
  test::TempDir dir;
  test::spit(dir / "r.csv", "session_id,score\na,1.5\nb,2\n");
  EXPECT_EQ(load_ratings(dir / "r.csv", "score").at("a"), 1.5);
  EXPECT_EQ(error_code_of([&] { (void)load_ratings(dir / "r.csv", "rating"); }), Errc::MissingColumn);
  test::spit(dir / "bad.csv", "session_id,rating\na,high\n");
  EXPECT_EQ(error_code_of([&] { (void)load_ratings(dir / "bad.csv"); }), Errc::NonNumericRating);
}

TEST(Report, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace clid
