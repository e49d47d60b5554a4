#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "clid/baselines.hpp"
#include "clid/embedding_store.hpp"
#include "clid/transcript.hpp"

namespace clid::synthetic {

/// Seeded generator whose draws do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// "w000", "w001", ...
[[nodiscard]] std::vector<std::string> vocabulary(std::size_t size);

/// Gaussian components for every vocabulary word.
[[nodiscard]] EmbeddingStore embeddings(std::size_t vocabulary_size, std::size_t dimension,
                                        std::uint64_t seed);

/// Gaussian components rounded to float32, so the binary format round-trips
/// every component exactly.
[[nodiscard]] EmbeddingStore float32_embeddings(std::size_t vocabulary_size,
                                                std::size_t dimension, std::uint64_t seed);

struct EchoConfig {
  std::size_t vocabulary_size = 200;
  std::size_t turns = 40;  // merged alternating turns, A first
  double echo_probability = 0.0;
  std::size_t min_turn_length = 5;
  std::size_t max_turn_length = 12;
};

/// Speaker "A" draws each turn uniformly from the vocabulary; speaker "B"
/// answers each A turn token-for-token, copying the token with probability
/// `echo_probability` and drawing a fresh one otherwise.
[[nodiscard]] std::vector<Utterance> echo_utterances(const std::string& session_id,
                                                     const EchoConfig& config, Rng& rng);

[[nodiscard]] Session echo_session(const std::string& session_id, const EchoConfig& config,
                                   Rng& rng);

/// Random taxonomy over the vocabulary: a root, `branches` internal
/// concepts under it (some nested), and one leaf concept per word.
[[nodiscard]] LexicalDatabase taxonomy(std::size_t vocabulary_size, std::size_t branches,
                                       std::uint64_t seed);

}  // namespace clid::synthetic
