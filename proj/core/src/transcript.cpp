#include "clid/transcript.hpp"

#include <nlohmann/json.hpp>

#include "clid/error.hpp"
#include "csv.hpp"
#include "io_util.hpp"

namespace clid {

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Right single quotation mark (U+2019) is folded to an ASCII apostrophe so
// "don’t" and "don't" tokenize alike.
std::string fold_apostrophes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      out += '\'';
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

// Blanks out [..] and <..> spans. An opener without a closer is left alone
// and later stripped as punctuation.
void drop_annotations(std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char open = text[i];
    if (open != '[' && open != '<') continue;
    const char close = open == '[' ? ']' : '>';
    const std::size_t end = text.find(close, i + 1);
    if (end == std::string::npos) continue;
    for (std::size_t j = i; j <= end; ++j) text[j] = ' ';
    i = end;
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw, const TokenizerConfig& config) {
  std::string text = fold_apostrophes(raw);
  drop_annotations(text);

  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (detail::is_space(text[pos]) || text[pos] == '-')) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !detail::is_space(text[end]) && text[end] != '-') ++end;
    std::size_t first = pos;
    std::size_t last = end;
    while (first < last && is_ascii_punct(text[first])) ++first;
    while (last > first && is_ascii_punct(text[last - 1])) --last;
    if (last > first) {
      std::string token;
      token.reserve(last - first);
      for (std::size_t i = first; i < last; ++i) token += ascii_lower(text[i]);
      if (!config.stop_words.contains(token)) tokens.push_back(std::move(token));
    }
    pos = end;
  }
  return tokens;
}

std::unordered_set<std::string> load_stop_words(const std::filesystem::path& path) {
  const std::string contents = detail::read_file(path);
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    pos = end + 1;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto& token : tokenize(line)) words.insert(std::move(token));
  }
  return words;
}

Session build_session(const std::vector<Utterance>& utterances, const std::string& speaker_a,
                      const std::string& speaker_b, const TokenizerConfig& config) {
  if (speaker_a == speaker_b) {
    throw Error(Errc::InvalidArgument, "speaker A and speaker B labels must differ");
  }
  Session session;
  session.speaker_a = speaker_a;
  session.speaker_b = speaker_b;
  if (!utterances.empty()) session.session_id = utterances.front().session_id;

  for (std::size_t u = 0; u < utterances.size(); ++u) {
    const Utterance& utt = utterances[u];
    if (utt.session_id != session.session_id) {
      throw Error(Errc::InvalidArgument, "utterances span sessions '" + session.session_id +
                                             "' and '" + utt.session_id + "'");
    }
    if (u > 0 && utt.order_index <= utterances[u - 1].order_index) {
      throw Error(Errc::MalformedTranscript,
                  "order_index not increasing in session '" + session.session_id + "'");
    }
    Role role;
    if (utt.speaker == speaker_a) {
      role = Role::A;
    } else if (utt.speaker == speaker_b) {
      role = Role::B;
    } else {
      throw Error(Errc::UnknownSpeaker,
                  "speaker '" + utt.speaker + "' in session '" + session.session_id +
                      "' is neither '" + speaker_a + "' nor '" + speaker_b + "'",
                  std::nullopt, utt.speaker);
    }
    auto tokens = tokenize(utt.text, config);
    if (tokens.empty()) continue;
    if (!session.turns.empty() && session.turns.back().speaker_role == role) {
      auto& merged = session.turns.back().tokens;
      merged.insert(merged.end(), std::make_move_iterator(tokens.begin()),
                    std::make_move_iterator(tokens.end()));
    } else {
      session.turns.push_back(Turn{role, std::move(tokens), 0});
    }
  }
  if (session.turns.empty()) {
    throw Error(Errc::EmptySession, "session '" + session.session_id + "' has no nonempty turns",
                std::nullopt, session.session_id);
  }
  for (auto& turn : session.turns) {
    auto& own = turn.speaker_role == Role::A ? session.turns_a : session.turns_b;
    turn.turn_index = own.size() + 1;
    own.push_back(turn);
  }
  return session;
}

WordBag build_bag(std::span<const std::string> tokens, const EmbeddingStore& store) {
  WordBag bag;
  std::unordered_map<std::string_view, std::size_t> slot;
  std::size_t total = 0;
  for (const auto& token : tokens) {
    if (!store.contains(token)) {
      ++bag.oov_dropped;
      continue;
    }
    auto [it, inserted] = slot.emplace(token, bag.words.size());
    if (inserted) {
      bag.words.push_back(token);
      bag.counts.push_back(0);
    }
    ++bag.counts[it->second];
    ++total;
  }
  bag.weights.reserve(bag.counts.size());
  for (std::size_t c : bag.counts) {
    bag.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  return bag;
}

namespace {

void add_utterance(Corpus& corpus, std::string session_id, std::string speaker, std::string text) {
  auto& list = corpus[session_id];
  const std::size_t order = list.size();
  list.push_back(Utterance{std::move(session_id), std::move(speaker), order, std::move(text)});
}

std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

}  // namespace

Corpus parse_corpus_jsonl(std::string_view contents) {
  contents = strip_bom(contents);
  Corpus corpus;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::MalformedTranscript, e.what(), line_no);
    }
    auto field = [&](const char* name) -> std::string {
      auto it = obj.find(name);
      if (!obj.is_object() || it == obj.end() || !it->is_string()) {
        throw Error(Errc::MalformedTranscript, std::string("missing string field '") + name + "'",
                    line_no);
      }
      return it->get<std::string>();
    };
    add_utterance(corpus, field("session_id"), field("speaker"), field("text"));
  }
  return corpus;
}

Corpus parse_corpus_csv(std::string_view contents) {
  const auto rows = detail::parse_csv(strip_bom(contents));
  Corpus corpus;
  if (rows.empty()) return corpus;
  const auto& header = rows.front().fields;
  const long sid = detail::column_index(header, "session_id");
  const long spk = detail::column_index(header, "speaker");
  const long txt = detail::column_index(header, "text");
  if (sid < 0 || spk < 0 || txt < 0) {
    throw Error(Errc::MalformedTranscript, "CSV header must name session_id, speaker, text", 1);
  }
  const auto width = static_cast<std::size_t>(std::max({sid, spk, txt})) + 1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() < width) {
      throw Error(Errc::MalformedTranscript, "too few columns", rows[r].line);
    }
    add_utterance(corpus, f[sid], f[spk], f[txt]);
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  const std::string contents = detail::read_file(path);
  if (path.extension() == ".csv") return parse_corpus_csv(contents);
  return parse_corpus_jsonl(contents);
}

std::map<std::string, SpeakerRoles> load_role_map(const std::filesystem::path& path) {
  const auto rows = detail::parse_csv(strip_bom(detail::read_file(path)));
  std::map<std::string, SpeakerRoles> out;
  if (rows.empty()) return out;
  const auto& header = rows.front().fields;
  const long sid = detail::column_index(header, "session_id");
  const long a = detail::column_index(header, "speaker_a");
  const long b = detail::column_index(header, "speaker_b");
  if (sid < 0 || a < 0 || b < 0) {
    throw Error(Errc::MalformedTranscript,
                "role map header must name session_id, speaker_a, speaker_b", 1);
  }
  const auto width = static_cast<std::size_t>(std::max({sid, a, b})) + 1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() < width) throw Error(Errc::MalformedTranscript, "too few columns", rows[r].line);
    out[f[sid]] = SpeakerRoles{f[a], f[b]};
  }
  return out;
}

}  // namespace clid
