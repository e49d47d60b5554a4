#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clid/baselines.hpp"
#include "clid/coordination.hpp"
#include "clid/embedding_store.hpp"
#include "clid/stats.hpp"

namespace clid {

inline constexpr std::string_view kVersion = "0.1.0";

enum class DirectionSelector { AToB, BToA, Both, Symmetric };
enum class ReportFormat { Csv, Json };

[[nodiscard]] std::string_view to_string(DirectionSelector d) noexcept;
[[nodiscard]] DirectionSelector parse_direction(std::string_view text);

struct MeasureSelection {
  bool uclid = true;
  bool nclid = true;
  bool global_wmd = true;
  bool tfidf = true;
  bool cohesion = false;
};

/// Comma-separated subset of uclid,nclid,global-wmd,tfidf,cohesion.
[[nodiscard]] MeasureSelection parse_measures(std::string_view text);

struct MeasureConfig {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  EmbeddingFormat embedding_format = EmbeddingFormat::Text;
  std::size_t context_length = kDefaultContextLength;
  std::string speaker_a;
  std::string speaker_b;
  std::optional<std::filesystem::path> role_map;
  std::optional<std::filesystem::path> stop_words;
  std::optional<std::filesystem::path> synsets;
  std::optional<std::filesystem::path> hypernyms;
  MeasureSelection measures;
  DirectionSelector direction = DirectionSelector::Both;
  ReportFormat format = ReportFormat::Csv;
  std::size_t workers = 1;  // affects speed only, never output
};

struct SessionOutcome {
  std::string session_id;
  std::string speaker_a;
  std::string speaker_b;
  std::optional<SessionMeasures> measures;
  DirectionalScore tfidf;
  DirectionalScore cohesion;
  std::string error;  // set when the session could not be measured
};

struct MeasureRun {
  std::map<std::string, std::string> metadata;  // ordered for stable output
  MeasureSelection measures;
  DirectionSelector direction = DirectionSelector::Both;
  std::vector<SessionOutcome> sessions;  // sorted by session_id

  [[nodiscard]] std::size_t failed() const;
};

/// Loads every input, validates paths before any work, measures sessions on
/// `workers` threads and merges by session_id. Throws for unreadable inputs
/// or NoSessions; per-session failures are recorded in the outcome.
[[nodiscard]] MeasureRun run_measure(const MeasureConfig& config);

/// Same pipeline on in-memory inputs.
[[nodiscard]] MeasureRun measure_corpus(const Corpus& corpus, const EmbeddingStore& store,
                                        const MeasureConfig& config,
                                        const LexicalDatabase* lexicon,
                                        const std::map<std::string, SpeakerRoles>& roles = {});

[[nodiscard]] std::string render_csv(const MeasureRun& run);
[[nodiscard]] std::string render_json(const MeasureRun& run);
[[nodiscard]] std::string render(const MeasureRun& run, ReportFormat format);

/// Lowercase hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

// ---- reading reports back --------------------------------------------------------

/// Column-addressable view over a CSV or JSON report.
class ReportTable {
 public:
  static ReportTable load(const std::filesystem::path& path);
  static ReportTable parse_csv(std::string_view contents);
  static ReportTable parse_json(std::string_view contents);

  /// session_id -> value for one direction and column; "NA"/null are skipped
  /// and counted in `missing`.
  [[nodiscard]] std::map<std::string, double> column(std::string_view direction,
                                                     std::string_view measure,
                                                     std::size_t* missing = nullptr) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// "symmetric_uclid" -> (symmetric, uclid); "a-to-b:nclid" -> (a-to-b, nclid);
/// a bare name keeps `default_direction`.
struct ColumnRef {
  std::string direction;
  std::string measure;
};
[[nodiscard]] ColumnRef parse_column_ref(std::string_view text, std::string_view default_direction);

struct CorrelateOutcome {
  CorrelationResult result;
  std::size_t dropped = 0;  // sessions present on only one side or without a value
};

/// Ratings CSV: header with session_id and a numeric rating column.
[[nodiscard]] std::map<std::string, double> load_ratings(const std::filesystem::path& path,
                                                         std::string_view rating_column = "rating");

/// Joins on session_id and computes Spearman. Throws NoOverlap.
[[nodiscard]] CorrelateOutcome correlate(const std::map<std::string, double>& measure,
                                         const std::map<std::string, double>& ratings);

struct PairedOutcome {
  PairedTestResult result;
  std::size_t unpaired = 0;
};

/// Pairs on session_id and runs the signed-rank test. Throws NoPairs.
[[nodiscard]] PairedOutcome paired_test(const std::map<std::string, double>& pre,
                                        const std::map<std::string, double>& post,
                                        Alternative alternative = Alternative::TwoSided);

}  // namespace clid
