#include "clid/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "clid/error.hpp"

namespace clid::synthetic {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::InvalidArgument, "empty range");
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::string> vocabulary(std::size_t size) {
  std::vector<std::string> words;
  words.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::string digits = std::to_string(i);
    if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
    words.push_back("w" + digits);
  }
  return words;
}

EmbeddingStore embeddings(std::size_t vocabulary_size, std::size_t dimension, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> components(vocabulary_size * dimension);
  for (double& c : components) c = rng.normal();
  return EmbeddingStore(dimension, vocabulary(vocabulary_size), std::move(components));
}

EmbeddingStore float32_embeddings(std::size_t vocabulary_size, std::size_t dimension,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> components(vocabulary_size * dimension);
  for (double& c : components) c = static_cast<double>(static_cast<float>(rng.normal()));
  return EmbeddingStore(dimension, vocabulary(vocabulary_size), std::move(components));
}

std::vector<Utterance> echo_utterances(const std::string& session_id, const EchoConfig& config,
                                       Rng& rng) {
  if (config.min_turn_length == 0 || config.max_turn_length < config.min_turn_length) {
    throw Error(Errc::InvalidArgument, "bad turn length range");
  }
  const auto words = vocabulary(config.vocabulary_size);
  std::vector<Utterance> out;
  std::vector<std::size_t> anchor;
  for (std::size_t t = 0; t < config.turns; ++t) {
    std::string text;
    const bool is_a = t % 2 == 0;
    if (is_a) {
      const std::size_t span = config.max_turn_length - config.min_turn_length + 1;
      const std::size_t length = config.min_turn_length + rng.below(span);
      anchor.clear();
      for (std::size_t w = 0; w < length; ++w) anchor.push_back(rng.below(words.size()));
      for (std::size_t w : anchor) text += (text.empty() ? "" : " ") + words[w];
    } else {
      for (std::size_t w : anchor) {
        const bool copy = rng.uniform() < config.echo_probability;
        const std::size_t pick = copy ? w : rng.below(words.size());
        text += (text.empty() ? "" : " ") + words[pick];
      }
    }
    out.push_back(Utterance{session_id, is_a ? "A" : "B", t, std::move(text)});
  }
  return out;
}

Session echo_session(const std::string& session_id, const EchoConfig& config, Rng& rng) {
  return build_session(echo_utterances(session_id, config, rng), "A", "B");
}

LexicalDatabase taxonomy(std::size_t vocabulary_size, std::size_t branches, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> internal{"root"};
  for (std::size_t b = 0; b < branches; ++b) {
    const std::string name = "c" + std::to_string(b);
    edges.emplace_back(name, internal[rng.below(internal.size())]);
    internal.push_back(name);
  }
  std::vector<std::pair<std::string, std::string>> members;
  for (const auto& word : vocabulary(vocabulary_size)) {
    const std::string leaf = "s_" + word;
    members.emplace_back(word, leaf);
    const std::size_t parent = branches == 0 ? 0 : 1 + rng.below(branches);
    edges.emplace_back(leaf, internal[parent]);
  }
  return LexicalDatabase(std::move(members), std::move(edges));
}

}  // namespace clid::synthetic
