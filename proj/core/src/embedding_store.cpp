#include "clid/embedding_store.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "clid/error.hpp"
#include "io_util.hpp"

namespace clid {

EmbeddingStore::EmbeddingStore(std::size_t dimension, std::vector<std::string> tokens,
                               std::vector<double> components)
    : dimension_(dimension), tokens_(std::move(tokens)), components_(std::move(components)) {
  if (dimension_ == 0) throw Error(Errc::MalformedHeader, "dimension must be positive");
  if (components_.size() != tokens_.size() * dimension_) {
    throw Error(Errc::WrongComponentCount, "component buffer does not match token count");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (!std::isfinite(components_[i])) {
      throw Error(Errc::NonFiniteComponent, "non-finite component", std::nullopt,
                  tokens_[i / dimension_]);
    }
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw Error(Errc::DuplicateToken, "duplicate token '" + tokens_[i] + "'", std::nullopt,
                  tokens_[i]);
    }
  }
}

bool EmbeddingStore::contains(std::string_view token) const { return index_.contains(token); }

std::size_t EmbeddingStore::index_of(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? npos : it->second;
}

std::span<const double> EmbeddingStore::lookup(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) {
    throw Error(Errc::OutOfVocabulary, "token '" + std::string(token) + "' not in store",
                std::nullopt, std::string(token));
  }
  return vector_at(it->second);
}

std::span<const double> EmbeddingStore::vector_at(std::size_t index) const {
  return {components_.data() + index * dimension_, dimension_};
}

EmbeddingStore EmbeddingStore::scaled(double gamma) const {
  EmbeddingStore out = *this;
  for (double& c : out.components_) c *= gamma;
  return out;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double word_distance(const EmbeddingStore& store, std::string_view w_i, std::string_view w_j) {
  return euclidean_distance(store.lookup(w_i), store.lookup(w_j));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && detail::is_space(line[pos])) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !detail::is_space(line[end])) ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool parse_size(std::string_view field, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size() && out > 0;
}

struct Header {
  std::size_t vocab = 0;
  std::size_t dim = 0;
};

Header parse_header(std::string_view line) {
  auto fields = split_fields(line);
  Header h;
  if (fields.size() != 2 || !parse_size(fields[0], h.vocab) || !parse_size(fields[1], h.dim)) {
    throw Error(Errc::MalformedHeader, "expected 'V D' with two positive integers", 1);
  }
  return h;
}

void check_unique(std::unordered_map<std::string_view, std::size_t>& seen, std::string_view token,
                  std::size_t line) {
  auto [it, inserted] = seen.emplace(token, line);
  if (!inserted) {
    throw Error(Errc::DuplicateToken,
                "token '" + std::string(token) + "' already defined on line " +
                    std::to_string(it->second),
                line, std::string(token));
  }
}

}  // namespace

EmbeddingStore parse_text(std::string_view contents) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= contents.size()) return false;
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(Errc::MalformedHeader, "empty file", 1);
  const Header header = parse_header(line);

  std::vector<std::string> tokens;
  std::vector<double> components;
  tokens.reserve(header.vocab);
  components.reserve(header.vocab * header.dim);
  std::unordered_map<std::string_view, std::size_t> seen;

  while (next_line(line)) {
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (tokens.size() == header.vocab) {
      throw Error(Errc::EntryCountMismatch,
                  "header declares " + std::to_string(header.vocab) + " entries, found more",
                  line_no);
    }
    if (fields.size() != header.dim + 1) {
      throw Error(Errc::WrongComponentCount,
                  "expected " + std::to_string(header.dim) + " components, found " +
                      std::to_string(fields.size() - 1),
                  line_no, std::string(fields[0]));
    }
    check_unique(seen, fields[0], line_no);
    for (std::size_t d = 1; d < fields.size(); ++d) {
      double value = 0.0;
      auto f = fields[d];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(Errc::MalformedComponent, "cannot parse '" + std::string(f) + "'", line_no,
                    std::string(fields[0]));
      }
      if (!std::isfinite(value)) {
        throw Error(Errc::NonFiniteComponent, "non-finite component '" + std::string(f) + "'",
                    line_no, std::string(fields[0]));
      }
      components.push_back(value);
    }
    tokens.emplace_back(fields[0]);
  }
  if (tokens.size() != header.vocab) {
    throw Error(Errc::EntryCountMismatch,
                "header declares " + std::to_string(header.vocab) + " entries, found " +
                    std::to_string(tokens.size()),
                line_no);
  }
  return EmbeddingStore(header.dim, std::move(tokens), std::move(components));
}

EmbeddingStore load_text(const std::filesystem::path& path) {
  return parse_text(detail::read_file(path));
}

namespace {

float read_le_float(const char* p) {
  std::uint32_t bits = 0;
  for (int b = 3; b >= 0; --b) {
    bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  }
  return std::bit_cast<float>(bits);
}

void append_le_float(std::string& out, float value) {
  auto bits = std::bit_cast<std::uint32_t>(value);
  for (int b = 0; b < 4; ++b) {
    out.push_back(static_cast<char>(bits & 0xFFu));
    bits >>= 8;
  }
}

}  // namespace

EmbeddingStore parse_binary(std::string_view bytes, const BinaryLoadOptions& options) {
  const std::size_t header_end = bytes.find('\n');
  if (header_end == std::string_view::npos) {
    throw Error(Errc::MalformedHeader, "missing header newline", 1);
  }
  const Header header = parse_header(bytes.substr(0, header_end));

  std::vector<std::string> tokens;
  std::vector<double> components;
  tokens.reserve(header.vocab);
  components.reserve(header.vocab * header.dim);
  std::unordered_map<std::string_view, std::size_t> seen;

  const std::size_t vector_bytes = header.dim * 4;
  std::size_t pos = header_end + 1;
  for (std::size_t entry = 0; entry < header.vocab; ++entry) {
    if (pos < bytes.size() && bytes[pos] == '\n') ++pos;
    if (pos >= bytes.size()) {
      throw Error(Errc::EntryCountMismatch,
                  "header declares " + std::to_string(header.vocab) + " entries, found " +
                      std::to_string(entry));
    }
    const std::size_t space = bytes.find(' ', pos);
    const std::size_t token_end = space == std::string_view::npos ? bytes.size() : space;
    if (token_end - pos > options.max_token_bytes) {
      throw Error(Errc::TokenTooLong,
                  "token exceeds " + std::to_string(options.max_token_bytes) + " bytes",
                  std::nullopt, std::string(bytes.substr(pos, 32)));
    }
    const std::string_view token = bytes.substr(pos, token_end - pos);
    if (space == std::string_view::npos) {
      throw Error(Errc::TruncatedEntry, "file ends inside token", std::nullopt,
                  std::string(token));
    }
    if (token.empty()) throw Error(Errc::MalformedComponent, "empty token at entry " +
                                                                 std::to_string(entry + 1));
    pos = space + 1;
    if (bytes.size() - pos < vector_bytes) {
      throw Error(Errc::TruncatedEntry, "file ends inside vector of '" + std::string(token) + "'",
                  std::nullopt, std::string(token));
    }
    check_unique(seen, token, entry + 2);
    for (std::size_t d = 0; d < header.dim; ++d) {
      const float value = read_le_float(bytes.data() + pos + 4 * d);
      if (!std::isfinite(value)) {
        throw Error(Errc::NonFiniteComponent, "non-finite component in '" + std::string(token) + "'",
                    std::nullopt, std::string(token));
      }
      components.push_back(static_cast<double>(value));
    }
    pos += vector_bytes;
    if (pos < bytes.size() && bytes[pos] == '\n') ++pos;
    tokens.emplace_back(token);
  }
  for (; pos < bytes.size(); ++pos) {
    if (!detail::is_space(bytes[pos])) {
      throw Error(Errc::EntryCountMismatch, "trailing data after " +
                                                std::to_string(header.vocab) + " entries");
    }
  }
  return EmbeddingStore(header.dim, std::move(tokens), std::move(components));
}

EmbeddingStore load_binary(const std::filesystem::path& path, const BinaryLoadOptions& options) {
  return parse_binary(detail::read_file(path), options);
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  return format == EmbeddingFormat::Binary ? load_binary(path) : load_text(path);
}

void write_text(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::string out = std::to_string(store.vocabulary_size()) + " " +
                    std::to_string(store.dimension()) + "\n";
  for (std::size_t i = 0; i < store.vocabulary_size(); ++i) {
    out += store.token_at(i);
    for (double c : store.vector_at(i)) {
      out += ' ';
      out += detail::format_double(c);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

void write_binary(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::string out = std::to_string(store.vocabulary_size()) + " " +
                    std::to_string(store.dimension()) + "\n";
  out.reserve(out.size() + store.vocabulary_size() * (store.dimension() * 4 + 16));
  for (std::size_t i = 0; i < store.vocabulary_size(); ++i) {
    out += store.token_at(i);
    out += ' ';
    for (double c : store.vector_at(i)) append_le_float(out, static_cast<float>(c));
    out += '\n';
  }
  detail::write_file(path, out);
}

}  // namespace clid
