#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "clid/report.hpp"

#include "support.hpp"

namespace clid {
namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CLID_EXE) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string toy_measure(const std::string& extra = "") {
  const auto d = test::data_dir().string();
  return "measure --corpus " + d + "/toy_corpus.jsonl --embeddings " + d +
         "/toy_embeddings.txt --speaker-a therapist --speaker-b client " + extra;
}

double field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
  }
  throw std::runtime_error("missing " + key);
}

TEST(Cli, MeasureMatchesGolden) {
  const auto r = run(toy_measure("-j 4"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, test::slurp(test::data_dir() / "toy_report.csv"));
}

TEST(Cli, KOneUclidIsMeanOfAdjacentPairs) {
  test::TempDir dir;
  ASSERT_EQ(run(toy_measure("-k 1 -o " + (dir / "k1.csv").string())).status, 0);
  const auto text = test::slurp(dir / "k1.csv");
  EXPECT_NE(text.find("# context_length=1"), std::string::npos);
  const auto oracle = nlohmann::json::parse(test::slurp(test::data_dir() / "toy_oracle.json"));
  const auto table = ReportTable::parse_csv(text);
  for (const char* dir_name : {"a-to-b", "b-to-a"}) {
    const auto got = table.column(dir_name, "uclid");
    for (const auto& [id, value] : got) {
      const auto& want = oracle.at(id).at("k1").at(dir_name);
      double mean = 0;
      std::size_t n = 0;
      for (const auto& d : want.at("local")) {
        if (d.is_null()) continue;
        mean += d.get<double>();
        ++n;
      }
      EXPECT_NEAR(value, mean / static_cast<double>(n), 1e-12) << id;
    }
  }
}

TEST(Cli, EmptyCorpusExitCode) {
  test::TempDir dir;
  test::spit(dir / "empty.jsonl", "");
  const auto d = test::data_dir().string();
  const auto r = run("measure --corpus " + (dir / "empty.jsonl").string() + " --embeddings " + d +
                     "/toy_embeddings.txt --speaker-a a --speaker-b b");
  EXPECT_EQ(r.status, 3);
}

TEST(Cli, MissingEmbeddingsIsInputError) {
  const auto d = test::data_dir().string();
  const auto r = run("measure --corpus " + d + "/toy_corpus.jsonl --embeddings /nonexistent.txt "
                     "--speaker-a therapist --speaker-b client");
  EXPECT_EQ(r.status, 1);
}

class CliReports : public ::testing::Test {
 protected:
  void SetUp() override {
    pre_ = dir_ / "pre.csv";
    std::string csv = "session_id,direction,uclid\n";
    std::string post = csv;
    std::string ratings = "session_id,rating\n";
    std::string neg = ratings;
    for (int i = 1; i <= 6; ++i) {
      const double v = 1.0 + 0.37 * i * i;
      const std::string id = "c" + std::to_string(i);
      csv += id + ",symmetric," + std::to_string(v) + "\n";
      post += id + ",symmetric," + std::to_string(0.9 * v) + "\n";
      ratings += id + "," + std::to_string(v) + "\n";
      neg += id + "," + std::to_string(-v) + "\n";
    }
    test::spit(pre_, csv);
    test::spit(dir_ / "post.csv", post);
    test::spit(dir_ / "ratings.csv", ratings);
    test::spit(dir_ / "neg.csv", neg);
    test::spit(dir_ / "other.csv", "session_id,direction,uclid\nz1,symmetric,1.0\n");
  }
  std::string path(const std::string& n) const { return (dir_ / n).string(); }
  test::TempDir dir_;
  std::filesystem::path pre_;
};

TEST_F(CliReports, CorrelateSelfAndNegated) {
  auto r = run("correlate --report " + path("pre.csv") + " --ratings " + path("ratings.csv") +
               " --measure symmetric_uclid");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(field(r.out, "rho"), 1.0);
  r = run("correlate --report " + path("pre.csv") + " --ratings " + path("neg.csv") +
          " --measure symmetric_uclid");
  EXPECT_EQ(field(r.out, "rho"), -1.0);
}

TEST_F(CliReports, PairedTest) {
  auto r = run("paired-test --pre " + path("pre.csv") + " --post " + path("pre.csv"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(field(r.out, "p_value"), 1.0);
  r = run("paired-test --pre " + path("pre.csv") + " --post " + path("post.csv"));
  EXPECT_EQ(field(r.out, "p_value"), 0.03125);
  EXPECT_EQ(field(r.out, "W"), 0.0);
  r = run("paired-test --pre " + path("pre.csv") + " --post " + path("other.csv"));
  EXPECT_EQ(r.status, 1);
}

TEST(Cli, SyntheticCorpusCorrelatesNegatively) {
  test::TempDir dir;
  ASSERT_EQ(run("generate --out-dir " + dir.path().string() + " --sessions 10 --seed 3").status, 0);
  const auto report = (dir / "report.csv").string();
  ASSERT_EQ(run("measure --corpus " + (dir / "corpus.jsonl").string() + " --embeddings " +
                (dir / "embeddings.txt").string() + " --speaker-a A --speaker-b B -o " + report)
                .status,
            0);
  const auto r = run("correlate --report " + report + " --ratings " +
                     (dir / "ratings.csv").string() + " --measure nclid");
  ASSERT_EQ(r.status, 0);
  EXPECT_LE(field(r.out, "rho"), -0.9);
  EXPECT_EQ(field(r.out, "n"), 50.0);
}

TEST(Cli, BinaryEmbeddingsGiveSameReport) {
  test::TempDir dir;
  ASSERT_EQ(run("generate --out-dir " + (dir / "t").string() + " --sessions 2").status, 0);
  ASSERT_EQ(run("generate --out-dir " + (dir / "b").string() + " --sessions 2 --embedding-format binary").status, 0);
  auto m = [&](const std::string& sub, const std::string& emb, const std::string& fmt) {
    return run("measure --corpus " + (dir / sub / "corpus.jsonl").string() + " --embeddings " +
               (dir / sub / emb).string() + " --embedding-format " + fmt +
               " --speaker-a A --speaker-b B --measures uclid,nclid");
  };
  const auto t = m("t", "embeddings.txt", "text");
  const auto b = m("b", "embeddings.bin", "binary");
  ASSERT_EQ(t.status, 0);
  ASSERT_EQ(b.status, 0);
  auto body = [](const std::string& s) { return s.substr(s.find("session_id,")); };
  EXPECT_EQ(body(t.out), body(b.out));
}

}  // namespace
}  // namespace clid
