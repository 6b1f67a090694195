// Copyright 2026 stdm toolkit authors
// SPDX-License-Identifier: Apache-2.0
//
// Vocabulary construction, sparse row-normalized TF-IDF matrices, and BPE
// subword learning/application.
//
// TF-IDF variant: tf = raw count (optionally sublinear 1+ln tf), idf =
// ln((N+1)/(df+1)) + 1, rows L2-normalized. Out-of-vocabulary tokens are
// dropped; a row that loses every token is flagged empty rather than an
// error so callers can exclude it from scoring.

#pragma once

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stdm/corpus.hpp"
#include "stdm/errors.hpp"

namespace stdm {

class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return terms_.size(); }
  std::size_t doc_count() const { return n_docs_; }

  // -1 when the term is not in the vocabulary.
  std::int64_t index_of(const std::string& term) const {
    auto it = index_.find(term);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  const std::string& term(std::size_t idx) const { return terms_[idx]; }
  std::int64_t df(std::size_t idx) const { return df_[idx]; }

  double idf(std::size_t idx) const {
    return std::log((static_cast<double>(n_docs_) + 1.0) / (static_cast<double>(df_[idx]) + 1.0)) + 1.0;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary: " + path);
    out << "#docs\t" << n_docs_ << '\n';
    for (std::size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << '\t' << df_[i] << '\n';
  }

  static Vocabulary load(const std::string& path) {
    Vocabulary v;
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw DataError("empty vocabulary file: " + path);
    std::size_t start = 0;
    if (lines[0].rfind("#docs\t", 0) == 0) {
      v.n_docs_ = std::stoull(lines[0].substr(6));
      start = 1;
    }
    for (std::size_t i = start; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto cols = detail::split_tabs(lines[i]);
      if (cols.size() != 2) throw DataError(path + ":" + std::to_string(i + 1) + ": expected term<TAB>df");
      v.index_[std::string(cols[0])] = v.terms_.size();
      v.terms_.emplace_back(cols[0]);
      v.df_.push_back(std::stoll(std::string(cols[1])));
    }
    return v;
  }

  friend Vocabulary build_vocab(std::span<const Sentence>, std::int64_t, std::size_t,
                                const std::unordered_set<std::string>*);

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> terms_;
  std::vector<std::int64_t> df_;
  std::size_t n_docs_ = 0;
};

// Keeps terms whose corpus frequency is >= min_count, truncated to max_size
// by frequency with lexicographic tie-break. Index order is canonical
// (frequency desc, term asc), so the vocabulary is a pure function of the
// document multiset.
inline Vocabulary build_vocab(std::span<const Sentence> docs, std::int64_t min_count = 1,
                              std::size_t max_size = 1'000'000,
                              const std::unordered_set<std::string>* stopwords = nullptr) {
  if (docs.empty()) throw DataError("build_vocab: no documents");
  std::unordered_map<std::string, std::int64_t> freq;
  std::unordered_map<std::string, std::int64_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    seen.clear();
    for (const auto& t : d.tokens) {
      if (stopwords && stopwords->count(t)) continue;
      ++freq[t];
      if (seen.insert(t).second) ++df[t];
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(freq.size());
  for (auto& [term, f] : freq) {
    if (f >= min_count) kept.emplace_back(term, f);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (kept.size() > max_size) kept.resize(max_size);

  Vocabulary v;
  v.n_docs_ = docs.size();
  v.terms_.reserve(kept.size());
  v.df_.reserve(kept.size());
  for (const auto& [term, f] : kept) {
    v.index_[term] = v.terms_.size();
    v.terms_.push_back(term);
    v.df_.push_back(df[term]);
  }
  return v;
}

struct TfidfOptions {
  bool sublinear_tf = false;  // 1 + ln(tf) instead of raw counts
};

// Sparse document-term matrix with unit-L2 rows. Row labels are carried
// through for scoring (origin group ids, class labels, ...).
struct DocTermMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;  // docs x |V|
  std::vector<std::int32_t> labels;                     // one per row
  std::vector<std::uint8_t> empty_row;                  // 1 = all tokens were OOV
  std::size_t n_empty = 0;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
};

inline DocTermMatrix build_tfidf(std::span<const Sentence> docs, const Vocabulary& vocab,
                                 const TfidfOptions& opts = {},
                                 std::span<const std::int32_t> labels = {}) {
  DocTermMatrix out;
  out.matrix.resize(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
  out.empty_row.assign(docs.size(), 0);
  if (!labels.empty() && labels.size() != docs.size()) {
    throw DataError("build_tfidf: label count does not match document count");
  }
  out.labels.assign(labels.begin(), labels.end());
  if (out.labels.empty()) out.labels.assign(docs.size(), 0);

  std::vector<Eigen::Triplet<double>> trips;
  std::map<std::int64_t, double> counts;  // ordered: column order is canonical per row
  for (std::size_t d = 0; d < docs.size(); ++d) {
    counts.clear();
    for (const auto& t : docs[d].tokens) {
      const std::int64_t idx = vocab.index_of(t);
      if (idx >= 0) counts[idx] += 1.0;
    }
    if (counts.empty()) {
      out.empty_row[d] = 1;
      ++out.n_empty;
      continue;
    }
    double sq = 0.0;
    for (auto& [idx, tf] : counts) {
      const double w = (opts.sublinear_tf ? 1.0 + std::log(tf) : tf) * vocab.idf(static_cast<std::size_t>(idx));
      tf = w;
      sq += w * w;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (const auto& [idx, w] : counts) {
      trips.emplace_back(static_cast<int>(d), static_cast<int>(idx), w * inv);
    }
  }
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// Packs n consecutive sentences into one document, in the given order.
inline std::vector<Sentence> group_sentences(std::span<const Sentence> docs, std::size_t group) {
  if (group <= 1) return {docs.begin(), docs.end()};
  std::vector<Sentence> out;
  out.reserve((docs.size() + group - 1) / group);
  for (std::size_t i = 0; i < docs.size(); i += group) {
    Sentence merged;
    for (std::size_t j = i; j < std::min(docs.size(), i + group); ++j) {
      merged.tokens.insert(merged.tokens.end(), docs[j].tokens.begin(), docs[j].tokens.end());
    }
    out.push_back(std::move(merged));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Byte-pair encoding
// ---------------------------------------------------------------------------

inline constexpr const char* kBpeEndOfWord = "</w>";
inline constexpr const char* kBpeUnknown = "<unk>";

struct BpeModel {
  std::vector<std::pair<std::string, std::string>> merges;  // applied in order
  std::unordered_set<std::string> symbols;                  // alphabet + merge products

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write BPE model: " + path);
    for (const auto& [a, b] : merges) out << a << '\t' << b << '\n';
  }

  static BpeModel load(const std::string& path);
};

namespace detail {

// One UTF-8 code point per initial symbol.
inline std::vector<std::string> codepoints(const std::string& word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    std::size_t len = 1;
    const unsigned char c = static_cast<unsigned char>(word[i]);
    if ((c >> 5) == 0x6) len = 2;
    else if ((c >> 4) == 0xe) len = 3;
    else if ((c >> 3) == 0x1e) len = 4;
    out.push_back(word.substr(i, std::min(len, word.size() - i)));
    i += len;
  }
  return out;
}

inline std::vector<std::string> bpe_init_word(const std::string& word) {
  auto symbols = codepoints(word);
  symbols.push_back(kBpeEndOfWord);
  return symbols;
}

inline void apply_merge(std::vector<std::string>& seq, const std::string& a, const std::string& b) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < seq.size();) {
    if (r + 1 < seq.size() && seq[r] == a && seq[r + 1] == b) {
      seq[w++] = a + b;
      r += 2;
    } else {
      if (w != r) seq[w] = std::move(seq[r]);
      ++w;
      ++r;
    }
  }
  seq.resize(w);
}

}  // namespace detail

// Greedy BPE: per step merge the highest-frequency adjacent symbol pair,
// ties broken by lexicographic pair order.
inline BpeModel learn_bpe(const MonoCorpus& corpus, std::size_t num_merges) {
  std::map<std::string, std::int64_t> word_freq;  // ordered for determinism
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) ++word_freq[t];
  }
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
  words.reserve(word_freq.size());
  BpeModel model;
  model.symbols.insert(kBpeEndOfWord);
  for (const auto& [w, f] : word_freq) {
    auto seq = detail::bpe_init_word(w);
    for (const auto& sym : seq) model.symbols.insert(sym);
    words.emplace_back(std::move(seq), f);
  }

  for (std::size_t step = 0; step < num_merges; ++step) {
    std::map<std::pair<std::string, std::string>, std::int64_t> pair_freq;
    for (const auto& [seq, f] : words) {
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) pair_freq[{seq[i], seq[i + 1]}] += f;
    }
    if (pair_freq.empty()) break;
    auto best = pair_freq.begin();
    for (auto it = pair_freq.begin(); it != pair_freq.end(); ++it) {
      if (it->second > best->second) best = it;  // map order already resolves ties to the smaller pair
    }
    const auto [a, b] = best->first;
    model.merges.emplace_back(a, b);
    model.symbols.insert(a + b);
    for (auto& [seq, f] : words) detail::apply_merge(seq, a, b);
  }
  return model;
}

inline BpeModel BpeModel::load(const std::string& path) {
  BpeModel m;
  m.symbols.insert(kBpeEndOfWord);
  std::size_t n = 0;
  for (const auto& line : detail::read_lines(path)) {
    ++n;
    if (line.empty()) continue;
    const auto cols = detail::split_tabs(line);
    if (cols.size() != 2) throw DataError(path + ":" + std::to_string(n) + ": expected left<TAB>right");
    m.merges.emplace_back(std::string(cols[0]), std::string(cols[1]));
  }
  // Reconstruct the alphabet: merge parts that are not products of earlier
  // merges are base symbols.
  std::unordered_set<std::string> products;
  for (const auto& [a, b] : m.merges) {
    if (!products.count(a)) m.symbols.insert(a);
    if (!products.count(b)) m.symbols.insert(b);
    products.insert(a + b);
    m.symbols.insert(a + b);
  }
  return m;
}

struct BpeApplyStats {
  std::size_t unknown_chars = 0;
};

// Segments each word by replaying the merge list; word-final units are
// followed by the end-of-word marker. Characters outside the model's
// alphabet become the UNK symbol and are counted.
inline Sentence apply_bpe(const BpeModel& model, const Sentence& sentence,
                          BpeApplyStats* stats = nullptr) {
  Sentence out;
  for (const auto& word : sentence.tokens) {
    auto seq = detail::bpe_init_word(word);
    for (auto& sym : seq) {
      if (!model.symbols.count(sym)) {
        sym = kBpeUnknown;
        if (stats) ++stats->unknown_chars;
      }
    }
    for (const auto& [a, b] : model.merges) detail::apply_merge(seq, a, b);
    out.tokens.insert(out.tokens.end(), seq.begin(), seq.end());
  }
  return out;
}

// Inverse of apply_bpe on in-alphabet text: concatenates units and splits
// words at the end-of-word marker.
inline Sentence invert_bpe(const Sentence& segmented) {
  Sentence out;
  std::string word;
  const std::string marker = kBpeEndOfWord;
  for (const auto& unit : segmented.tokens) {
    word += unit;
    if (word.size() >= marker.size() &&
        word.compare(word.size() - marker.size(), marker.size(), marker) == 0) {
      word.resize(word.size() - marker.size());
      if (!word.empty()) out.tokens.push_back(word);
      word.clear();
    }
  }
  if (!word.empty()) out.tokens.push_back(word);
  return out;
}

}  // namespace stdm
