#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "clid/error.hpp"
#include "clid/report.hpp"
#include "clid/synthetic.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kPartialFailure = 2,
  kNoSessions = 3,
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw clid::Error(clid::Errc::Io, "cannot write " + path);
  out << contents;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct MeasureArgs {
  clid::MeasureConfig config;
  std::string embedding_format = "text";
  std::vector<std::string> measures{"uclid", "nclid", "global-wmd", "tfidf"};
  std::string direction = "both";
  std::string format = "csv";
  std::string output = "-";
  std::string role_map;
  std::string stop_words;
  std::string synsets;
  std::string hypernyms;
};

int run_measure(MeasureArgs& args) {
  auto& c = args.config;
  c.embedding_format =
      args.embedding_format == "binary" ? clid::EmbeddingFormat::Binary : clid::EmbeddingFormat::Text;
  c.measures = clid::parse_measures(join(args.measures));
  c.direction = clid::parse_direction(args.direction);
  c.format = args.format == "json" ? clid::ReportFormat::Json : clid::ReportFormat::Csv;
  if (!args.role_map.empty()) c.role_map = args.role_map;
  if (!args.stop_words.empty()) c.stop_words = args.stop_words;
  if (!args.synsets.empty()) c.synsets = args.synsets;
  if (!args.hypernyms.empty()) c.hypernyms = args.hypernyms;

  clid::MeasureRun run;
  try {
    run = clid::run_measure(c);
  } catch (const clid::Error& e) {
    std::cerr << "clid measure: " << e.what() << '\n';
    return e.code() == clid::Errc::NoSessions ? kNoSessions : kInputError;
  }
  for (const auto& s : run.sessions) {
    if (!s.error.empty()) std::cerr << "session " << s.session_id << ": " << s.error << '\n';
  }
  if (run.failed() == run.sessions.size()) {
    std::cerr << "clid measure: NoSessions: no session could be measured\n";
    return kNoSessions;
  }
  write_output(args.output, clid::render(run, c.format));
  return run.failed() > 0 ? kPartialFailure : kOk;
}

struct CorrelateArgs {
  std::string report;
  std::string ratings;
  std::string measure = "nclid";
  std::string rating_column = "rating";
  std::string direction = "a-to-b";
  bool json = false;
};

int run_correlate(const CorrelateArgs& args) {
  const auto ref = clid::parse_column_ref(args.measure, args.direction);
  std::size_t missing = 0;
  const auto values = clid::ReportTable::load(args.report).column(ref.direction, ref.measure, &missing);
  const auto ratings = clid::load_ratings(args.ratings, args.rating_column);
  const auto outcome = clid::correlate(values, ratings);
  const std::size_t dropped = outcome.dropped + missing;
  if (dropped > 0) std::cerr << "warning: " << dropped << " session(s) dropped from the join\n";
  const auto& r = outcome.result;
  if (args.json) {
    nlohmann::ordered_json j;
    j["measure"] = ref.direction + ":" + ref.measure;
    j["rho"] = r.rho;
    j["p_value"] = r.p_value;
    j["n"] = r.n;
    j["method"] = std::string(clid::to_string(r.method));
    j["dropped"] = dropped;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "measure: " << ref.direction << ":" << ref.measure << '\n'
              << "rho: " << fmt(r.rho) << '\n'
              << "p_value: " << fmt(r.p_value) << (r.p_value < 0.05 ? " *" : "") << '\n'
              << "n: " << r.n << '\n'
              << "method: " << clid::to_string(r.method) << '\n';
  }
  return kOk;
}

struct PairedArgs {
  std::string pre;
  std::string post;
  std::string measure = "symmetric_uclid";
  std::string alternative = "two-sided";
  bool json = false;
};

int run_paired(const PairedArgs& args) {
  const auto ref = clid::parse_column_ref(args.measure, "symmetric");
  std::size_t missing = 0;
  const auto pre = clid::ReportTable::load(args.pre).column(ref.direction, ref.measure, &missing);
  const auto post = clid::ReportTable::load(args.post).column(ref.direction, ref.measure, &missing);
  clid::Alternative alt = clid::Alternative::TwoSided;
  if (args.alternative == "less") alt = clid::Alternative::Less;
  if (args.alternative == "greater") alt = clid::Alternative::Greater;
  const auto outcome = clid::paired_test(pre, post, alt);
  if (outcome.unpaired + missing > 0) {
    std::cerr << "warning: " << outcome.unpaired + missing << " identifier(s) without a pair\n";
  }
  const auto& r = outcome.result;
  if (args.json) {
    nlohmann::ordered_json j;
    j["measure"] = ref.direction + ":" + ref.measure;
    j["W"] = r.statistic;
    j["p_value"] = r.p_value;
    j["n_effective"] = r.n_effective;
    j["method"] = std::string(clid::to_string(r.method));
    j["alternative"] = std::string(clid::to_string(alt));
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "measure: " << ref.direction << ":" << ref.measure << '\n'
              << "W: " << fmt(r.statistic) << '\n'
              << "p_value: " << fmt(r.p_value) << (r.p_value < 0.05 ? " *" : "") << '\n'
              << "n_effective: " << r.n_effective << '\n'
              << "method: " << clid::to_string(r.method) << '\n'
              << "alternative: " << clid::to_string(alt) << '\n';
  }
  return kOk;
}

struct GenerateArgs {
  std::string out_dir;
  std::uint64_t seed = 1;
  std::size_t sessions = 50;
  std::size_t turns = 40;
  std::size_t vocabulary = 200;
  std::size_t dimension = 10;
  std::vector<double> echo_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string embedding_format = "text";
};

// Writes corpus.jsonl, embeddings, ratings.csv (rating = 1 + 6p) and a
// random taxonomy. Session ids encode the echo level.
int run_generate(const GenerateArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  clid::synthetic::Rng rng(args.seed);
  std::ofstream corpus(dir / "corpus.jsonl", std::ios::binary);
  std::ofstream ratings(dir / "ratings.csv", std::ios::binary);
  ratings << "session_id,rating\n";
  for (std::size_t level = 0; level < args.echo_levels.size(); ++level) {
    const double p = args.echo_levels[level];
    for (std::size_t s = 0; s < args.sessions; ++s) {
      std::ostringstream id;
      id << "p" << level << "_s" << s;
      clid::synthetic::EchoConfig cfg;
      cfg.vocabulary_size = args.vocabulary;
      cfg.turns = args.turns;
      cfg.echo_probability = p;
      for (const auto& u : clid::synthetic::echo_utterances(id.str(), cfg, rng)) {
        nlohmann::ordered_json line;
        line["session_id"] = u.session_id;
        line["speaker"] = u.speaker;
        line["text"] = u.text;
        corpus << line.dump() << '\n';
      }
      ratings << id.str() << ',' << fmt(1.0 + 6.0 * p) << '\n';
    }
  }

  const auto store = clid::synthetic::float32_embeddings(args.vocabulary, args.dimension, args.seed);
  if (args.embedding_format == "binary") {
    clid::write_binary(store, dir / "embeddings.bin");
  } else {
    clid::write_text(store, dir / "embeddings.txt");
  }

  // Same construction as synthetic::taxonomy, written out as files.
  clid::synthetic::Rng tax(args.seed + 1);
  std::ofstream syn(dir / "synsets.tsv", std::ios::binary);
  std::ofstream hyp(dir / "hypernyms.tsv", std::ios::binary);
  const std::size_t branches = std::max<std::size_t>(1, args.vocabulary / 10);
  std::vector<std::string> internal{"root"};
  for (std::size_t b = 0; b < branches; ++b) {
    const std::string name = "c" + std::to_string(b);
    hyp << name << '\t' << internal[tax.below(internal.size())] << '\n';
    internal.push_back(name);
  }
  for (const auto& word : clid::synthetic::vocabulary(args.vocabulary)) {
    syn << word << "\ts_" << word << '\n';
    hyp << "s_" << word << '\t' << internal[1 + tax.below(branches)] << '\n';
  }
  std::cerr << "wrote synthetic corpus to " << dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clid: conversational linguistic distance from Word Mover's Distance"};
  app.set_version_flag("--version", std::string(clid::kVersion));
  app.require_subcommand(1);

  MeasureArgs measure;
  measure.config.workers = std::max(1u, std::thread::hardware_concurrency());
  auto* m = app.add_subcommand("measure", "Compute uCLiD/nCLiD and baselines for every session");
  m->add_option("--corpus", measure.config.corpus, "Transcript corpus (.jsonl or .csv)")->required();
  m->add_option("--embeddings", measure.config.embeddings, "Embedding file")->required();
  m->add_option("--embedding-format", measure.embedding_format)
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  m->add_option("--context-length,-k", measure.config.context_length, "Responder turns per window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  m->add_option("--speaker-a", measure.config.speaker_a, "Speaker label taking role A");
  m->add_option("--speaker-b", measure.config.speaker_b, "Speaker label taking role B");
  m->add_option("--role-map", measure.role_map, "CSV session_id,speaker_a,speaker_b");
  m->add_option("--stopwords", measure.stop_words, "Words to remove before measuring");
  m->add_option("--synsets", measure.synsets, "Lexical database: word<TAB>concept");
  m->add_option("--hypernyms", measure.hypernyms, "Lexical database: child<TAB>parent");
  m->add_option("--measures", measure.measures, "uclid,nclid,global-wmd,tfidf,cohesion")
      ->delimiter(',')
      ->capture_default_str();
  m->add_option("--direction", measure.direction)
      ->check(CLI::IsMember({"a-to-b", "b-to-a", "both", "symmetric"}))
      ->capture_default_str();
  m->add_option("--output,-o", measure.output, "Report path, '-' for stdout")->capture_default_str();
  m->add_option("--format", measure.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  m->add_flag_callback("--json", [&] { measure.format = "json"; }, "Shorthand for --format json");
  m->add_option("--workers,-j", measure.config.workers, "Session-level worker threads")
      ->check(CLI::PositiveNumber);

  CorrelateArgs correlate;
  auto* c = app.add_subcommand("correlate", "Spearman correlation of a report column with ratings");
  c->add_option("--report", correlate.report)->required()->check(CLI::ExistingFile);
  c->add_option("--ratings", correlate.ratings, "CSV with session_id,rating")->required()->check(CLI::ExistingFile);
  c->add_option("--measure", correlate.measure, "Column, e.g. nclid, symmetric_uclid, b-to-a:uclid")
      ->capture_default_str();
  c->add_option("--rating-column", correlate.rating_column)->capture_default_str();
  c->add_option("--direction", correlate.direction)
      ->check(CLI::IsMember({"a-to-b", "b-to-a", "symmetric"}))
      ->capture_default_str();
  c->add_flag("--json", correlate.json);

  PairedArgs paired;
  auto* p = app.add_subcommand("paired-test", "Wilcoxon signed-rank test between two reports");
  p->add_option("--pre", paired.pre)->required()->check(CLI::ExistingFile);
  p->add_option("--post", paired.post)->required()->check(CLI::ExistingFile);
  p->add_option("--measure", paired.measure)->capture_default_str();
  p->add_option("--alternative", paired.alternative)
      ->check(CLI::IsMember({"two-sided", "less", "greater"}))
      ->capture_default_str();
  p->add_flag("--json", paired.json);

  GenerateArgs generate;
  auto* g = app.add_subcommand("generate", "Write a synthetic echo corpus with embeddings and ratings");
  g->add_option("--out-dir", generate.out_dir)->required();
  g->add_option("--seed", generate.seed)->capture_default_str();
  g->add_option("--sessions", generate.sessions, "Sessions per echo level")->capture_default_str();
  g->add_option("--turns", generate.turns)->capture_default_str();
  g->add_option("--vocab", generate.vocabulary)->capture_default_str();
  g->add_option("--dim", generate.dimension)->capture_default_str();
  g->add_option("--echo-levels", generate.echo_levels)->delimiter(',');
  g->add_option("--embedding-format", generate.embedding_format)
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*m) return run_measure(measure);
    if (*c) return run_correlate(correlate);
    if (*p) return run_paired(paired);
    if (*g) return run_generate(generate);
  } catch (const clid::Error& e) {
    std::cerr << "clid: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
