#include "clid/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "clid/error.hpp"
#include "csv.hpp"
#include "io_util.hpp"

namespace clid {

std::string_view to_string(DirectionSelector d) noexcept {
  switch (d) {
    case DirectionSelector::AToB: return "a-to-b";
    case DirectionSelector::BToA: return "b-to-a";
    case DirectionSelector::Both: return "both";
    case DirectionSelector::Symmetric: return "symmetric";
  }
  return "both";
}

DirectionSelector parse_direction(std::string_view text) {
  if (text == "a-to-b") return DirectionSelector::AToB;
  if (text == "b-to-a") return DirectionSelector::BToA;
  if (text == "both") return DirectionSelector::Both;
  if (text == "symmetric") return DirectionSelector::Symmetric;
  throw Error(Errc::InvalidArgument, "unknown direction '" + std::string(text) + "'");
}

MeasureSelection parse_measures(std::string_view text) {
  MeasureSelection s{false, false, false, false, false};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    if (item == "uclid") {
      s.uclid = true;
    } else if (item == "nclid") {
      s.nclid = true;
    } else if (item == "global-wmd") {
      s.global_wmd = true;
    } else if (item == "tfidf") {
      s.tfidf = true;
    } else if (item == "cohesion") {
      s.cohesion = true;
    } else if (!item.empty()) {
      throw Error(Errc::InvalidArgument, "unknown measure '" + std::string(item) + "'");
    }
    pos = end + 1;
  }
  if (!(s.uclid || s.nclid || s.global_wmd || s.tfidf || s.cohesion)) {
    throw Error(Errc::InvalidArgument, "no measures selected");
  }
  return s;
}

namespace {

std::string measures_string(const MeasureSelection& s) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(s.uclid, "uclid");
  add(s.nclid, "nclid");
  add(s.global_wmd, "global-wmd");
  add(s.tfidf, "tfidf");
  add(s.cohesion, "cohesion");
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::Io, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::size_t MeasureRun::failed() const {
  return static_cast<std::size_t>(
      std::count_if(sessions.begin(), sessions.end(), [](const auto& s) { return !s.error.empty(); }));
}

MeasureRun measure_corpus(const Corpus& corpus, const EmbeddingStore& store,
                          const MeasureConfig& config, const LexicalDatabase* lexicon,
                          const std::map<std::string, SpeakerRoles>& roles) {
  if (config.context_length == 0) throw Error(Errc::InvalidArgument, "context length must be >= 1");
  if (corpus.empty()) throw Error(Errc::NoSessions, "corpus contains no sessions");
  if (config.measures.cohesion && lexicon == nullptr) {
    throw Error(Errc::DatabaseUnavailable, "cohesion requires --synsets and --hypernyms");
  }

  TokenizerConfig tokenizer;
  if (config.stop_words) tokenizer.stop_words = load_stop_words(*config.stop_words);

  std::vector<const std::vector<Utterance>*> work;
  MeasureRun run;
  run.measures = config.measures;
  run.direction = config.direction;
  for (const auto& [id, utterances] : corpus) {
    SessionOutcome outcome;
    outcome.session_id = id;
    run.sessions.push_back(std::move(outcome));
    work.push_back(&utterances);
  }

  const MeasureSelection& sel = config.measures;
  const bool coordination = sel.uclid || sel.nclid || sel.global_wmd;
  auto measure_one = [&](std::size_t index) {
    SessionOutcome& out = run.sessions[index];
    try {
      SpeakerRoles r{config.speaker_a, config.speaker_b};
      if (!roles.empty()) {
        auto it = roles.find(out.session_id);
        if (it == roles.end()) {
          throw Error(Errc::UnknownSpeaker, "no role mapping for session '" + out.session_id + "'");
        }
        r = it->second;
      }
      out.speaker_a = r.speaker_a;
      out.speaker_b = r.speaker_b;
      const Session session = build_session(*work[index], r.speaker_a, r.speaker_b, tokenizer);
      if (coordination) {
        MeasureOptions options;
        options.with_alpha = sel.nclid;
        options.with_global = sel.global_wmd;
        out.measures = measure_session(session, store, config.context_length, options);
      }
      if (sel.tfidf) out.tfidf = tfidf_session_similarity(session, config.context_length);
      if (sel.cohesion) {
        out.cohesion = lexical_cohesion_distance(session, lexicon, config.context_length);
      }
    } catch (const Error& e) {
      out.error = e.what();
      out.measures.reset();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, work.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < work.size(); ++i) measure_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) measure_one(i);
      });
    }
  }

  run.metadata["tool"] = "clid " + std::string(kVersion);
  run.metadata["context_length"] = std::to_string(config.context_length);
  run.metadata["direction"] = std::string(to_string(config.direction));
  run.metadata["measures"] = measures_string(config.measures);
  run.metadata["sessions"] = std::to_string(run.sessions.size());
  run.metadata["failed_sessions"] = std::to_string(run.failed());
  return run;
}

MeasureRun run_measure(const MeasureConfig& config) {
  auto require = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::is_regular_file(p)) {
      throw Error(Errc::Io, std::string(what) + " not readable: " + p.string());
    }
  };
  require(config.corpus, "corpus");
  require(config.embeddings, "embeddings");
  if (config.role_map) require(*config.role_map, "role map");
  if (config.stop_words) require(*config.stop_words, "stop-word list");
  if (config.measures.cohesion) {
    if (!config.synsets || !config.hypernyms) {
      throw Error(Errc::DatabaseUnavailable, "cohesion requires --synsets and --hypernyms");
    }
  }
  if (config.synsets) require(*config.synsets, "synset file");
  if (config.hypernyms) require(*config.hypernyms, "hypernym file");
  if (!config.role_map && (config.speaker_a.empty() || config.speaker_b.empty())) {
    throw Error(Errc::InvalidArgument, "give --speaker-a and --speaker-b, or --role-map");
  }

  const std::string embedding_bytes = detail::read_file(config.embeddings);
  const EmbeddingStore store = config.embedding_format == EmbeddingFormat::Binary
                                   ? parse_binary(embedding_bytes)
                                   : parse_text(embedding_bytes);
  const std::string corpus_bytes = detail::read_file(config.corpus);
  const Corpus corpus = config.corpus.extension() == ".csv" ? parse_corpus_csv(corpus_bytes)
                                                            : parse_corpus_jsonl(corpus_bytes);

  std::map<std::string, SpeakerRoles> roles;
  if (config.role_map) roles = load_role_map(*config.role_map);

  std::optional<LexicalDatabase> lexicon;
  if (config.synsets && config.hypernyms) {
    lexicon = LexicalDatabase::load(*config.synsets, *config.hypernyms);
  }

  MeasureRun run =
      measure_corpus(corpus, store, config, lexicon ? &*lexicon : nullptr, roles);

  run.metadata["embeddings_sha256"] = sha256_hex(embedding_bytes);
  run.metadata["embedding_format"] =
      config.embedding_format == EmbeddingFormat::Binary ? "binary" : "text";
  run.metadata["corpus_sha256"] = sha256_hex(corpus_bytes);
  run.metadata["speakers"] =
      config.role_map ? "role-map:" + sha256_hex(detail::read_file(*config.role_map))
                      : "a=" + config.speaker_a + ";b=" + config.speaker_b;
  run.metadata["stopwords"] =
      config.stop_words ? sha256_hex(detail::read_file(*config.stop_words)) : "none";
  if (lexicon) {
    run.metadata["lexicon_sha256"] = sha256_hex(detail::read_file(*config.synsets) +
                                                detail::read_file(*config.hypernyms));
  }
  return run;
}

// ---- rendering ---------------------------------------------------------------------

namespace {

struct Row {
  std::string session_id;
  std::string direction;
  std::string anchor;
  std::string responder;
  std::size_t context_length = 0;
  std::optional<std::size_t> n_pairs;
  std::optional<std::size_t> defined_anchors;
  std::optional<std::size_t> skipped_pairs;
  std::optional<double> uclid;
  std::optional<double> alpha;
  std::optional<double> nclid;
  std::optional<double> global_wmd;
  std::optional<double> tfidf;
  std::optional<double> cohesion;
};

std::optional<double> mean_of(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return (*a + *b) / 2.0;
}

std::vector<Row> build_rows(const MeasureRun& run) {
  const std::size_t k = std::stoul(run.metadata.at("context_length"));
  std::vector<Row> rows;
  for (const auto& s : run.sessions) {
    if (!s.error.empty()) continue;
    auto directional = [&](Role anchor) {
      Row row;
      row.session_id = s.session_id;
      row.direction = anchor == Role::A ? "a-to-b" : "b-to-a";
      row.anchor = anchor == Role::A ? s.speaker_a : s.speaker_b;
      row.responder = anchor == Role::A ? s.speaker_b : s.speaker_a;
      row.context_length = k;
      if (s.measures) {
        const auto& d = s.measures->direction(anchor);
        row.n_pairs = s.measures->n_pairs;
        row.defined_anchors = d.series.defined_count;
        row.skipped_pairs = d.series.skipped_pairs;
        row.uclid = d.uclid;
        row.alpha = d.alpha;
        row.nclid = d.nclid;
        row.global_wmd = s.measures->global_wmd;
      }
      row.tfidf = s.tfidf.get(anchor);
      row.cohesion = s.cohesion.get(anchor);
      rows.push_back(std::move(row));
    };
    if (run.direction == DirectionSelector::AToB || run.direction == DirectionSelector::Both) {
      directional(Role::A);
    }
    if (run.direction == DirectionSelector::BToA || run.direction == DirectionSelector::Both) {
      directional(Role::B);
    }
    if (run.direction == DirectionSelector::Symmetric) {
      Row row;
      row.session_id = s.session_id;
      row.direction = "symmetric";
      row.anchor = s.speaker_a;
      row.responder = s.speaker_b;
      row.context_length = k;
      if (s.measures) {
        row.n_pairs = s.measures->n_pairs;
        row.skipped_pairs = s.measures->skipped_pairs;
        row.uclid = s.measures->symmetric_uclid;
        row.nclid = s.measures->symmetric_nclid;
        row.global_wmd = s.measures->global_wmd;
      }
      row.tfidf = mean_of(s.tfidf.a_to_b, s.tfidf.b_to_a);
      row.cohesion = mean_of(s.cohesion.a_to_b, s.cohesion.b_to_a);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<std::string> measure_columns(const MeasureSelection& sel) {
  std::vector<std::string> cols;
  if (sel.uclid) cols.emplace_back("uclid");
  if (sel.nclid) {
    cols.emplace_back("alpha");
    cols.emplace_back("nclid");
  }
  if (sel.global_wmd) cols.emplace_back("global_wmd");
  if (sel.tfidf) cols.emplace_back("tfidf");
  if (sel.cohesion) cols.emplace_back("cohesion");
  return cols;
}

std::optional<double> row_value(const Row& row, std::string_view column) {
  if (column == "uclid") return row.uclid;
  if (column == "alpha") return row.alpha;
  if (column == "nclid") return row.nclid;
  if (column == "global_wmd") return row.global_wmd;
  if (column == "tfidf") return row.tfidf;
  return row.cohesion;
}

}  // namespace

std::string render_csv(const MeasureRun& run) {
  std::string out;
  for (const auto& [key, value] : run.metadata) out += "# " + key + "=" + value + "\n";
  const auto cols = measure_columns(run.measures);
  out += "session_id,direction,anchor_speaker,responder_speaker,context_length,n_pairs,"
         "defined_anchors,skipped_pairs";
  for (const auto& c : cols) out += "," + c;
  out += '\n';
  auto count = [](std::optional<std::size_t> v) { return v ? std::to_string(*v) : "NA"; };
  for (const Row& row : build_rows(run)) {
    out += detail::csv_escape(row.session_id) + "," + row.direction + "," +
           detail::csv_escape(row.anchor) + "," + detail::csv_escape(row.responder) + "," +
           std::to_string(row.context_length) + "," + count(row.n_pairs) + "," +
           count(row.defined_anchors) + "," + count(row.skipped_pairs);
    for (const auto& c : cols) {
      const auto v = row_value(row, c);
      out += ',';
      out += v ? detail::format_double(*v) : "NA";
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const MeasureRun& run) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : run.metadata) doc["metadata"][key] = value;
  const auto cols = measure_columns(run.measures);
  doc["rows"] = nlohmann::ordered_json::array();
  auto count = [](std::optional<std::size_t> v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  for (const Row& row : build_rows(run)) {
    nlohmann::ordered_json r;
    r["session_id"] = row.session_id;
    r["direction"] = row.direction;
    r["anchor_speaker"] = row.anchor;
    r["responder_speaker"] = row.responder;
    r["context_length"] = row.context_length;
    r["n_pairs"] = count(row.n_pairs);
    r["defined_anchors"] = count(row.defined_anchors);
    r["skipped_pairs"] = count(row.skipped_pairs);
    for (const auto& c : cols) {
      const auto v = row_value(row, c);
      r[c] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

std::string render(const MeasureRun& run, ReportFormat format) {
  return format == ReportFormat::Json ? render_json(run) : render_csv(run);
}

// ---- reading reports back --------------------------------------------------------

ReportTable ReportTable::load(const std::filesystem::path& path) {
  const std::string contents = detail::read_file(path);
  if (path.extension() == ".json") return parse_json(contents);
  return parse_csv(contents);
}

ReportTable ReportTable::parse_csv(std::string_view contents) {
  auto rows = detail::parse_csv(contents, '#');
  ReportTable table;
  if (rows.empty()) return table;
  table.header_ = std::move(rows.front().fields);
  for (std::size_t r = 1; r < rows.size(); ++r) table.rows_.push_back(std::move(rows[r].fields));
  return table;
}

ReportTable ReportTable::parse_json(std::string_view contents) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(contents);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidArgument, std::string("report is not valid JSON: ") + e.what());
  }
  ReportTable table;
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(Errc::MissingColumn, "JSON report has no 'rows' array");
  }
  std::set<std::string> keys;
  for (const auto& row : doc["rows"]) {
    for (const auto& [key, value] : row.items()) keys.insert(key);
  }
  table.header_.assign(keys.begin(), keys.end());
  for (const auto& row : doc["rows"]) {
    std::vector<std::string> fields;
    for (const auto& key : table.header_) {
      if (!row.contains(key) || row[key].is_null()) {
        fields.emplace_back("NA");
      } else if (row[key].is_string()) {
        fields.push_back(row[key].get<std::string>());
      } else if (row[key].is_number_float()) {
        fields.push_back(detail::format_double(row[key].get<double>()));
      } else {
        fields.push_back(row[key].dump());
      }
    }
    table.rows_.push_back(std::move(fields));
  }
  return table;
}

namespace {

bool parse_number(std::string_view text, double& out) {
  while (!text.empty() && detail::is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && detail::is_space(text.back())) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

std::map<std::string, double> ReportTable::column(std::string_view direction,
                                                  std::string_view measure,
                                                  std::size_t* missing) const {
  const long sid = detail::column_index(header_, "session_id");
  const long dir = detail::column_index(header_, "direction");
  const long val = detail::column_index(header_, measure);
  if (sid < 0 || dir < 0) throw Error(Errc::MissingColumn, "report lacks session_id/direction");
  if (val < 0) {
    throw Error(Errc::MissingColumn, "report has no column '" + std::string(measure) + "'");
  }

  auto collect = [&](std::string_view want, std::size_t* miss) {
    std::map<std::string, double> out;
    for (const auto& row : rows_) {
      if (row.size() <= static_cast<std::size_t>(std::max({sid, dir, val}))) continue;
      if (row[dir] != want) continue;
      double v = 0.0;
      if (parse_number(row[val], v)) {
        out[row[sid]] = v;
      } else if (miss != nullptr) {
        ++*miss;
      }
    }
    return out;
  };

  auto values = collect(direction, missing);
  if (values.empty() && direction == "symmetric") {
    // Derive the symmetric value from the two directional rows.
    std::size_t miss_ab = 0;
    std::size_t miss_ba = 0;
    const auto ab = collect("a-to-b", &miss_ab);
    const auto ba = collect("b-to-a", &miss_ba);
    std::set<std::string> ids;
    for (const auto& [id, v] : ab) ids.insert(id);
    for (const auto& [id, v] : ba) ids.insert(id);
    std::size_t dropped = std::max(miss_ab, miss_ba);
    for (const auto& id : ids) {
      auto ia = ab.find(id);
      auto ib = ba.find(id);
      if (ia != ab.end() && ib != ba.end()) {
        values[id] = (ia->second + ib->second) / 2.0;
      } else {
        ++dropped;
      }
    }
    if (missing != nullptr) *missing += dropped;
  }
  return values;
}

ColumnRef parse_column_ref(std::string_view text, std::string_view default_direction) {
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    return {std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
  }
  static constexpr std::string_view kSymmetric = "symmetric_";
  if (text.substr(0, kSymmetric.size()) == kSymmetric) {
    return {"symmetric", std::string(text.substr(kSymmetric.size()))};
  }
  return {std::string(default_direction), std::string(text)};
}

std::map<std::string, double> load_ratings(const std::filesystem::path& path,
                                           std::string_view rating_column) {
  const auto rows = detail::parse_csv(detail::read_file(path));
  if (rows.empty()) throw Error(Errc::MissingColumn, "ratings file is empty");
  const long sid = detail::column_index(rows.front().fields, "session_id");
  const long val = detail::column_index(rows.front().fields, rating_column);
  if (sid < 0 || val < 0) {
    throw Error(Errc::MissingColumn,
                "ratings header must name session_id and " + std::string(rating_column), 1);
  }
  std::map<std::string, double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() <= static_cast<std::size_t>(std::max(sid, val))) {
      throw Error(Errc::NonNumericRating, "missing rating", rows[r].line);
    }
    double v = 0.0;
    if (!parse_number(f[val], v)) {
      throw Error(Errc::NonNumericRating, "rating '" + f[val] + "' is not a number", rows[r].line,
                  f[sid]);
    }
    out[f[sid]] = v;
  }
  return out;
}

namespace {

template <typename Fn>
std::size_t join(const std::map<std::string, double>& left,
                 const std::map<std::string, double>& right, Fn&& on_pair) {
  std::size_t unmatched = 0;
  for (const auto& [id, v] : left) {
    auto it = right.find(id);
    if (it == right.end()) {
      ++unmatched;
    } else {
      on_pair(v, it->second);
    }
  }
  for (const auto& [id, v] : right) {
    if (!left.contains(id)) ++unmatched;
  }
  return unmatched;
}

}  // namespace

CorrelateOutcome correlate(const std::map<std::string, double>& measure,
                           const std::map<std::string, double>& ratings) {
  std::vector<double> x;
  std::vector<double> y;
  CorrelateOutcome out;
  out.dropped = join(measure, ratings, [&](double m, double r) {
    x.push_back(m);
    y.push_back(r);
  });
  if (x.empty()) throw Error(Errc::NoOverlap, "no session has both a measure and a rating");
  out.result = spearman(x, y);
  return out;
}

PairedOutcome paired_test(const std::map<std::string, double>& pre,
                          const std::map<std::string, double>& post, Alternative alternative) {
  std::vector<double> a;
  std::vector<double> b;
  PairedOutcome out;
  out.unpaired = join(pre, post, [&](double x, double y) {
    a.push_back(x);
    b.push_back(y);
  });
  if (a.empty()) throw Error(Errc::NoPairs, "no identifier appears in both reports");
  out.result = wilcoxon_signed_rank(a, b, alternative);
  return out;
}

}  // namespace clid
