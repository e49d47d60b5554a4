#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clid/embedding_store.hpp"

namespace clid {

struct Utterance {
  std::string session_id;
  std::string speaker;
  std::size_t order_index = 0;
  std::string text;
};

enum class Role { A, B };

[[nodiscard]] constexpr Role other(Role r) noexcept { return r == Role::A ? Role::B : Role::A; }
[[nodiscard]] constexpr char role_name(Role r) noexcept { return r == Role::A ? 'A' : 'B'; }

struct Turn {
  Role speaker_role = Role::A;
  std::vector<std::string> tokens;
  std::size_t turn_index = 0;  // 1-based within the speaker's own sequence
};

/// Alternating two-speaker turn sequence. `turns` holds the merged turns in
/// temporal order; `turns_a`/`turns_b` are the per-role projections.
struct Session {
  std::string session_id;
  std::string speaker_a;
  std::string speaker_b;
  std::vector<Turn> turns;
  std::vector<Turn> turns_a;
  std::vector<Turn> turns_b;

  /// Number of index-paired turns, min(|turns_a|, |turns_b|).
  [[nodiscard]] std::size_t n_pairs() const noexcept {
    return std::min(turns_a.size(), turns_b.size());
  }
  [[nodiscard]] const std::vector<Turn>& turns_of(Role r) const noexcept {
    return r == Role::A ? turns_a : turns_b;
  }
  [[nodiscard]] const std::string& label_of(Role r) const noexcept {
    return r == Role::A ? speaker_a : speaker_b;
  }
};

struct TokenizerConfig {
  /// Tokens removed after normalization; empty keeps every word.
  std::unordered_set<std::string> stop_words;
};

/// Lowercases (ASCII), drops bracketed annotations, splits on whitespace and
/// hyphens, strips edge punctuation. Within-word apostrophes survive.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text,
                                                const TokenizerConfig& config = {});

/// One word per line; blank lines and '#' comments ignored. Words are
/// normalized through the tokenizer.
[[nodiscard]] std::unordered_set<std::string> load_stop_words(const std::filesystem::path& path);

/// Merges consecutive same-speaker utterances into turns. Throws UnknownSpeaker
/// or EmptySession.
[[nodiscard]] Session build_session(const std::vector<Utterance>& utterances,
                                    const std::string& speaker_a, const std::string& speaker_b,
                                    const TokenizerConfig& config = {});

/// Normalized bag of words over the unique in-vocabulary tokens of a turn,
/// in first-occurrence order.
struct WordBag {
  std::vector<std::string> words;
  std::vector<std::size_t> counts;
  std::vector<double> weights;
  std::size_t oov_dropped = 0;

  [[nodiscard]] bool empty() const noexcept { return words.empty(); }
};

[[nodiscard]] WordBag build_bag(std::span<const std::string> tokens, const EmbeddingStore& store);
[[nodiscard]] inline WordBag build_bag(const Turn& turn, const EmbeddingStore& store) {
  return build_bag(turn.tokens, store);
}

// ---- corpus files ----------------------------------------------------------

/// Utterances grouped by session, file order preserved within a session.
using Corpus = std::map<std::string, std::vector<Utterance>>;

/// JSON-lines: one object per line with session_id, speaker, text.
[[nodiscard]] Corpus parse_corpus_jsonl(std::string_view contents);
/// CSV with header naming session_id, speaker, text (any column order).
[[nodiscard]] Corpus parse_corpus_csv(std::string_view contents);
/// Picks the parser by extension (.csv -> CSV, otherwise JSON-lines).
[[nodiscard]] Corpus load_corpus(const std::filesystem::path& path);

struct SpeakerRoles {
  std::string speaker_a;
  std::string speaker_b;
};

/// CSV with header session_id,speaker_a,speaker_b.
[[nodiscard]] std::map<std::string, SpeakerRoles> load_role_map(const std::filesystem::path& path);

}  // namespace clid
