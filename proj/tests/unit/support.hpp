#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clid/embedding_store.hpp"
#include "clid/error.hpp"
#include "clid/transcript.hpp"

namespace clid::test {

inline std::filesystem::path data_dir() { return CLID_TEST_DATA_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary);
  out << contents;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("clid_test_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline EmbeddingStore make_store(
    std::initializer_list<std::pair<std::string, std::vector<double>>> entries) {
  std::vector<std::string> tokens;
  std::vector<double> comps;
  std::size_t dim = 0;
  for (const auto& [tok, vec] : entries) {
    tokens.push_back(tok);
    dim = vec.size();
    comps.insert(comps.end(), vec.begin(), vec.end());
  }
  return EmbeddingStore(dim, std::move(tokens), std::move(comps));
}

/// cat, dog, the on the unit axes.
inline EmbeddingStore axis_store() {
  return make_store({{"cat", {1, 0, 0}}, {"dog", {0, 1, 0}}, {"the", {0, 0, 1}}});
}

inline Utterance utt(const std::string& session, const std::string& speaker,
                     const std::string& text, std::size_t order = 0) {
  return Utterance{session, speaker, order, text};
}

/// Session from alternating "A:text" / "B:text" lines.
inline Session script(const std::vector<std::string>& lines, const std::string& id = "s") {
  std::vector<Utterance> utts;
  for (const auto& l : lines) utts.push_back(utt(id, l.substr(0, 1), l.substr(2), utts.size()));
  return build_session(utts, "A", "B");
}

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected clid::Error");
}

}  // namespace clid::test
