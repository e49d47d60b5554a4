#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clid/transcript.hpp"

namespace clid {

/// A per-direction baseline score; `a_to_b` uses A's turns as anchors.
struct DirectionalScore {
  std::optional<double> a_to_b;
  std::optional<double> b_to_a;

  [[nodiscard]] std::optional<double> get(Role anchor) const noexcept {
    return anchor == Role::A ? a_to_b : b_to_a;
  }
};

// ---- TF-IDF ------------------------------------------------------------------

/// Sparse vector sorted by token.
using SparseVector = std::vector<std::pair<std::string, double>>;

/// IDF over the session's own turns: idf(w) = log(T / T_w), where T counts
/// all merged turns and T_w those containing w.
class TfIdfModel {
 public:
  explicit TfIdfModel(const Session& session);

  [[nodiscard]] double idf(std::string_view token) const;
  /// Raw term counts weighted by idf.
  [[nodiscard]] SparseVector vectorize(const std::vector<std::string>& tokens) const;

 private:
  std::unordered_map<std::string, double> idf_;
};

/// Cosine in [0, 1]; zero when either vector has zero norm, exactly 1 when
/// the vectors are identical.
[[nodiscard]] double cosine_similarity(const SparseVector& a, const SparseVector& b);

/// Per anchor, the best cosine over the same k-window used for local
/// distances; averaged over anchors. A similarity, not a distance.
[[nodiscard]] DirectionalScore tfidf_session_similarity(const Session& session,
                                                        std::size_t k);

// ---- lexical taxonomy cohesion --------------------------------------------------

/// Word -> concept membership plus a hypernym DAG. Depth of a root concept
/// is 1; otherwise one more than the deepest parent.
class LexicalDatabase {
 public:
  LexicalDatabase() = default;

  /// Throws CyclicTaxonomy.
  LexicalDatabase(std::vector<std::pair<std::string, std::string>> memberships,
                  std::vector<std::pair<std::string, std::string>> hypernym_edges);

  /// "word<TAB>concept" and "child<TAB>parent" lines. Throws DatabaseUnavailable
  /// when either file cannot be read.
  static LexicalDatabase load(const std::filesystem::path& synsets,
                              const std::filesystem::path& hypernyms);

  [[nodiscard]] bool contains(std::string_view word) const;
  [[nodiscard]] std::size_t depth(std::string_view concept_id) const;

  /// Best Wu-Palmer similarity over all concept pairs of the two words;
  /// nullopt when either word is unknown.
  [[nodiscard]] std::optional<double> wu_palmer(std::string_view a, std::string_view b) const;

 private:
  std::size_t concept_id(const std::string& name);
  double concept_similarity(std::size_t a, std::size_t b) const;

  std::vector<std::string> concepts_;
  std::unordered_map<std::string, std::size_t> concept_index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<std::size_t>> ancestors_;  // sorted, includes self
  std::map<std::string, std::vector<std::size_t>, std::less<>> senses_;
};

/// A common English function-word list used to pick content words.
[[nodiscard]] const std::unordered_set<std::string>& default_stop_words();

/// 1 - mean over anchors of the mean best Wu-Palmer similarity between each
/// anchor content word and the responder content words in the k-window.
/// Throws DatabaseUnavailable when `db` is null.
[[nodiscard]] DirectionalScore lexical_cohesion_distance(
    const Session& session, const LexicalDatabase* db, std::size_t k,
    const std::unordered_set<std::string>& stop_words = default_stop_words());

}  // namespace clid
