#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clid {

/// Immutable word -> vector table. Components are held in 64-bit precision
/// regardless of the on-disk format; lookups return views into one
/// contiguous buffer.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  /// Builds a store from parallel token/vector lists. Throws
  /// DuplicateToken, WrongComponentCount or NonFiniteComponent.
  EmbeddingStore(std::size_t dimension, std::vector<std::string> tokens,
                 std::vector<double> components);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t vocabulary_size() const noexcept { return tokens_.size(); }
  [[nodiscard]] bool contains(std::string_view token) const;

  /// Throws OutOfVocabulary when the token is absent.
  [[nodiscard]] std::span<const double> lookup(std::string_view token) const;
  [[nodiscard]] std::span<const double> vector_at(std::size_t index) const;
  [[nodiscard]] const std::string& token_at(std::size_t index) const { return tokens_.at(index); }

  /// Index of `token`, or npos.
  [[nodiscard]] std::size_t index_of(std::string_view token) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Returns a copy with every component multiplied by `gamma`.
  [[nodiscard]] EmbeddingStore scaled(double gamma) const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dimension_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> components_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

/// Euclidean distance between two stored words. Throws OutOfVocabulary.
[[nodiscard]] double word_distance(const EmbeddingStore& store, std::string_view w_i,
                                   std::string_view w_j);

[[nodiscard]] double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct BinaryLoadOptions {
  std::size_t max_token_bytes = 1000;
};

/// Text format: header "V D", then V lines of `token c_1 ... c_D`.
[[nodiscard]] EmbeddingStore load_text(const std::filesystem::path& path);
[[nodiscard]] EmbeddingStore parse_text(std::string_view contents);

/// word2vec binary format: ASCII header "V D\n", then per entry the token
/// bytes, one 0x20, D little-endian float32, optional 0x0A.
[[nodiscard]] EmbeddingStore load_binary(const std::filesystem::path& path,
                                         const BinaryLoadOptions& options = {});
[[nodiscard]] EmbeddingStore parse_binary(std::string_view bytes,
                                          const BinaryLoadOptions& options = {});

enum class EmbeddingFormat { Text, Binary };

[[nodiscard]] EmbeddingStore load_embeddings(const std::filesystem::path& path,
                                             EmbeddingFormat format);

/// Components are written with shortest round-trip formatting.
void write_text(const EmbeddingStore& store, const std::filesystem::path& path);

/// Narrows components to float32; exact only for stores that came from float32.
void write_binary(const EmbeddingStore& store, const std::filesystem::path& path);

}  // namespace clid
