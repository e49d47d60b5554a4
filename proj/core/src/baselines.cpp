#include "clid/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "clid/error.hpp"
#include "io_util.hpp"

namespace clid {

// ---- TF-IDF ------------------------------------------------------------------

TfIdfModel::TfIdfModel(const Session& session) {
  std::unordered_map<std::string, std::size_t> containing;
  for (const auto& turn : session.turns) {
    std::unordered_set<std::string_view> unique(turn.tokens.begin(), turn.tokens.end());
    for (auto token : unique) ++containing[std::string(token)];
  }
  const double total = static_cast<double>(session.turns.size());
  for (const auto& [token, count] : containing) {
    idf_.emplace(token, std::log(total / static_cast<double>(count)));
  }
}

double TfIdfModel::idf(std::string_view token) const {
  auto it = idf_.find(std::string(token));
  return it == idf_.end() ? 0.0 : it->second;
}

SparseVector TfIdfModel::vectorize(const std::vector<std::string>& tokens) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  SparseVector out;
  out.reserve(counts.size());
  for (const auto& [token, count] : counts) {
    out.emplace_back(token, static_cast<double>(count) * idf(token));
  }
  return out;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  if (a == b) {
    const bool nonzero = std::any_of(a.begin(), a.end(), [](const auto& e) { return e.second > 0; });
    return nonzero ? 1.0 : 0.0;
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& e : a) na += e.second * e.second;
  for (const auto& e : b) nb += e.second * e.second;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

DirectionalScore tfidf_session_similarity(const Session& session, std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "context length must be >= 1");
  const TfIdfModel model(session);
  const std::size_t n = session.n_pairs();
  std::vector<SparseVector> va;
  std::vector<SparseVector> vb;
  for (std::size_t i = 0; i < n; ++i) {
    va.push_back(model.vectorize(session.turns_a[i].tokens));
    vb.push_back(model.vectorize(session.turns_b[i].tokens));
  }
  auto direction = [&](const std::vector<SparseVector>& anchors,
                       const std::vector<SparseVector>& responses) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = 0.0;
      for (std::size_t j = i; j < std::min(i + k, n); ++j) {
        best = std::max(best, cosine_similarity(anchors[i], responses[j]));
      }
      sum += best;
    }
    return sum / static_cast<double>(n);
  };
  return {direction(va, vb), direction(vb, va)};
}

// ---- lexical taxonomy -----------------------------------------------------------

std::size_t LexicalDatabase::concept_id(const std::string& name) {
  auto [it, inserted] = concept_index_.emplace(name, concepts_.size());
  if (inserted) {
    concepts_.push_back(name);
    parents_.emplace_back();
  }
  return it->second;
}

LexicalDatabase::LexicalDatabase(std::vector<std::pair<std::string, std::string>> memberships,
                                 std::vector<std::pair<std::string, std::string>> hypernym_edges) {
  for (auto& [word, concept_name] : memberships) {
    const std::size_t c = concept_id(concept_name);
    auto& senses = senses_[word];
    if (std::find(senses.begin(), senses.end(), c) == senses.end()) senses.push_back(c);
  }
  for (auto& [child, parent] : hypernym_edges) {
    const std::size_t c = concept_id(child);
    const std::size_t p = concept_id(parent);
    auto& ps = parents_[c];
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  }

  // Depth-first over parent links; a gray node reached again is a cycle.
  const std::size_t count = concepts_.size();
  depth_.assign(count, 0);
  ancestors_.assign(count, {});
  std::vector<char> state(count, 0);  // 0 new, 1 on stack, 2 done
  std::function<void(std::size_t)> visit = [&](std::size_t c) {
    state[c] = 1;
    std::size_t deepest_parent = 0;
    std::vector<std::size_t> anc{c};
    for (std::size_t p : parents_[c]) {
      if (state[p] == 1) {
        throw Error(Errc::CyclicTaxonomy, "hypernym cycle through '" + concepts_[p] + "'",
                    std::nullopt, concepts_[p]);
      }
      if (state[p] == 0) visit(p);
      deepest_parent = std::max(deepest_parent, depth_[p]);
      anc.insert(anc.end(), ancestors_[p].begin(), ancestors_[p].end());
    }
    std::sort(anc.begin(), anc.end());
    anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
    ancestors_[c] = std::move(anc);
    depth_[c] = deepest_parent + 1;
    state[c] = 2;
  };
  for (std::size_t c = 0; c < count; ++c) {
    if (state[c] == 0) visit(c);
  }
}

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs(const std::filesystem::path& path) {
  std::string contents;
  try {
    contents = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(Errc::DatabaseUnavailable, e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(Errc::DatabaseUnavailable,
                  "expected two tab-separated fields in " + path.string(), line_no);
    }
    out.emplace_back(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return out;
}

}  // namespace

LexicalDatabase LexicalDatabase::load(const std::filesystem::path& synsets,
                                      const std::filesystem::path& hypernyms) {
  return LexicalDatabase(read_pairs(synsets), read_pairs(hypernyms));
}

bool LexicalDatabase::contains(std::string_view word) const { return senses_.contains(word); }

std::size_t LexicalDatabase::depth(std::string_view concept_name) const {
  auto it = concept_index_.find(std::string(concept_name));
  if (it == concept_index_.end()) {
    throw Error(Errc::InvalidArgument, "unknown concept '" + std::string(concept_name) + "'");
  }
  return depth_[it->second];
}

double LexicalDatabase::concept_similarity(std::size_t a, std::size_t b) const {
  const auto& xa = ancestors_[a];
  const auto& xb = ancestors_[b];
  std::size_t lcs_depth = 0;
  auto ia = xa.begin();
  auto ib = xb.begin();
  while (ia != xa.end() && ib != xb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      lcs_depth = std::max(lcs_depth, depth_[*ia]);
      ++ia;
      ++ib;
    }
  }
  return 2.0 * static_cast<double>(lcs_depth) / static_cast<double>(depth_[a] + depth_[b]);
}

std::optional<double> LexicalDatabase::wu_palmer(std::string_view a, std::string_view b) const {
  auto ia = senses_.find(a);
  auto ib = senses_.find(b);
  if (ia == senses_.end() || ib == senses_.end()) return std::nullopt;
  double best = 0.0;
  for (std::size_t ca : ia->second) {
    for (std::size_t cb : ib->second) best = std::max(best, concept_similarity(ca, cb));
  }
  return best;
}

const std::unordered_set<std::string>& default_stop_words() {
  static const std::unordered_set<std::string> words = {
      "i",       "me",      "my",      "myself",  "we",         "our",     "ours",
      "ourselves", "you",   "you're",  "you've",  "you'll",     "you'd",   "your",
      "yours",   "yourself", "yourselves", "he",  "him",        "his",     "himself",
      "she",     "she's",   "her",     "hers",    "herself",    "it",      "it's",
      "its",     "itself",  "they",    "them",    "their",      "theirs",  "themselves",
      "what",    "which",   "who",     "whom",    "this",       "that",    "that'll",
      "these",   "those",   "am",      "is",      "are",        "was",     "were",
      "be",      "been",    "being",   "have",    "has",        "had",     "having",
      "do",      "does",    "did",     "doing",   "a",          "an",      "the",
      "and",     "but",     "if",      "or",      "because",    "as",      "until",
      "while",   "of",      "at",      "by",      "for",        "with",    "about",
      "against", "between", "into",    "through", "during",     "before",  "after",
      "above",   "below",   "to",      "from",    "up",         "down",    "in",
      "out",     "on",      "off",     "over",    "under",      "again",   "further",
      "then",    "once",    "here",    "there",   "when",       "where",   "why",
      "how",     "all",     "any",     "both",    "each",       "few",     "more",
      "most",    "other",   "some",    "such",    "no",         "nor",     "not",
      "only",    "own",     "same",    "so",      "than",       "too",     "very",
      "s",       "t",       "can",     "will",    "just",       "don",     "don't",
      "should",  "should've", "now",   "d",       "ll",         "m",       "o",
      "re",      "ve",      "y",       "ain",     "aren",       "aren't",  "couldn",
      "couldn't", "didn",   "didn't",  "doesn",   "doesn't",    "hadn",    "hadn't",
      "hasn",    "hasn't",  "haven",   "haven't", "isn",        "isn't",   "ma",
      "mightn",  "mightn't", "mustn",  "mustn't", "needn",      "needn't", "shan",
      "shan't",  "shouldn", "shouldn't", "wasn",  "wasn't",     "weren",   "weren't",
      "won",     "won't",   "wouldn",  "wouldn't", "i'm",       "i've",    "i'll",
      "i'd",     "we're",   "we've",   "we'll",   "they're",    "they've", "can't",
  };
  return words;
}

DirectionalScore lexical_cohesion_distance(const Session& session, const LexicalDatabase* db,
                                           std::size_t k,
                                           const std::unordered_set<std::string>& stop_words) {
  if (db == nullptr) throw Error(Errc::DatabaseUnavailable, "no lexical database loaded");
  if (k == 0) throw Error(Errc::InvalidArgument, "context length must be >= 1");
  const std::size_t n = session.n_pairs();

  // Unique content words present in the database, per paired turn.
  auto content = [&](const Turn& turn) {
    std::vector<std::string> words;
    for (const auto& t : turn.tokens) {
      if (stop_words.contains(t) || !db->contains(t)) continue;
      if (std::find(words.begin(), words.end(), t) == words.end()) words.push_back(t);
    }
    return words;
  };
  std::vector<std::vector<std::string>> ca;
  std::vector<std::vector<std::string>> cb;
  for (std::size_t i = 0; i < n; ++i) {
    ca.push_back(content(session.turns_a[i]));
    cb.push_back(content(session.turns_b[i]));
  }

  auto direction = [&](const std::vector<std::vector<std::string>>& anchors,
                       const std::vector<std::vector<std::string>>& responses)
      -> std::optional<double> {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (anchors[i].empty()) continue;
      double anchor_sum = 0.0;
      for (const auto& w : anchors[i]) {
        double best = 0.0;
        for (std::size_t j = i; j < std::min(i + k, n); ++j) {
          for (const auto& r : responses[j]) best = std::max(best, *db->wu_palmer(w, r));
        }
        anchor_sum += best;
      }
      sum += anchor_sum / static_cast<double>(anchors[i].size());
      ++defined;
    }
    if (defined == 0) return std::nullopt;
    return std::clamp(1.0 - sum / static_cast<double>(defined), 0.0, 1.0);
  };
  return {direction(ca, cb), direction(cb, ca)};
}

}  // namespace clid
