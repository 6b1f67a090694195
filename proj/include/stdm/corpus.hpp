// Copyright 2026 stdm toolkit authors
// SPDX-License-Identifier: Apache-2.0
//
// Data model and I/O for monolingual and parallel corpora with origin
// labels. A sentence is one line of a UTF-8 text file, tokenized on
// whitespace; corpora are assumed pre-tokenized so that load/write
// round-trips are exact on token sequences.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stdm/errors.hpp"
#include "stdm/rng.hpp"

namespace stdm {

struct Sentence {
  std::vector<std::string> tokens;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out += ' ';
      out += tokens[i];
    }
    return out;
  }

  // Whitespace split; consecutive separators collapse.
  static Sentence parse(std::string_view line) {
    Sentence s;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      if (j > i) s.tokens.emplace_back(line.substr(i, j - i));
      i = j;
    }
    return s;
  }

  bool operator==(const Sentence&) const = default;
  auto operator<=>(const Sentence&) const = default;
};

// Which language a parallel pair was authored in before human translation
// produced the other side.
enum class Origin : std::uint8_t { SourceOriginating, TargetOriginating };

inline char origin_char(Origin o) { return o == Origin::SourceOriginating ? 'S' : 'T'; }

inline Origin parse_origin(std::string_view s, std::size_t line_no) {
  if (s == "S") return Origin::SourceOriginating;
  if (s == "T") return Origin::TargetOriginating;
  throw DataError("line " + std::to_string(line_no) + ": invalid origin token '" +
                  std::string(s) + "' (expected S or T)");
}

struct MonoCorpus {
  std::vector<Sentence> sentences;
  std::string language;
  std::optional<std::string> domain_hint;

  std::size_t size() const { return sentences.size(); }
};

struct ParallelPair {
  Sentence src;
  Sentence tgt;
  Origin origin = Origin::SourceOriginating;

  bool operator==(const ParallelPair&) const = default;
};

struct LabeledParallelCorpus {
  std::vector<ParallelPair> pairs;

  std::size_t size() const { return pairs.size(); }
  std::size_t count(Origin o) const {
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [o](const ParallelPair& p) { return p.origin == o; }));
  }
};

// Per-load bookkeeping the caller may inspect; loading itself only throws
// on hard errors.
struct LoadStats {
  std::size_t blank_lines = 0;
  bool origin_defaulted = false;
};

namespace detail {

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t need;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      need = 1;
    } else if ((c >> 4) == 0xe) {
      need = 2;
    } else if ((c >> 3) == 0x1e) {
      need = 3;
    } else {
      return false;
    }
    if (i + need >= s.size()) return false;
    for (std::size_t k = 1; k <= need; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += need + 1;
  }
  return true;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  std::size_t n = 0;
  for (const auto& l : lines) {
    ++n;
    if (!valid_utf8(l)) throw DataError(path + ":" + std::to_string(n) + ": invalid UTF-8");
  }
  return lines;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

// One sentence per line; blank lines are skipped and tallied in stats.
inline MonoCorpus load_mono(const std::string& path, const std::string& language,
                            LoadStats* stats = nullptr) {
  MonoCorpus corpus;
  corpus.language = language;
  for (const auto& line : detail::read_lines(path)) {
    Sentence s = Sentence::parse(line);
    if (s.empty()) {
      if (stats) ++stats->blank_lines;
      continue;
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

inline void write_mono(const MonoCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& s : corpus.sentences) out << s.str() << '\n';
}

// Line-aligned source/target files plus an optional per-line origin file
// (one of S or T per line). Without an origin file every pair defaults to
// SourceOriginating and stats->origin_defaulted is set.
inline LabeledParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                                           const std::optional<std::string>& origin_path = std::nullopt,
                                           LoadStats* stats = nullptr) {
  const auto src_lines = detail::read_lines(src_path);
  const auto tgt_lines = detail::read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size()) {
    throw DataError("parallel line count mismatch: " + src_path + " has " +
                    std::to_string(src_lines.size()) + " lines, " + tgt_path + " has " +
                    std::to_string(tgt_lines.size()));
  }
  std::vector<Origin> origins;
  if (origin_path) {
    const auto origin_lines = detail::read_lines(*origin_path);
    if (origin_lines.size() != src_lines.size()) {
      throw DataError("origin line count mismatch: " + *origin_path + " has " +
                      std::to_string(origin_lines.size()) + " lines, expected " +
                      std::to_string(src_lines.size()));
    }
    origins.reserve(origin_lines.size());
    for (std::size_t i = 0; i < origin_lines.size(); ++i) {
      Sentence t = Sentence::parse(origin_lines[i]);
      if (t.size() != 1) {
        throw DataError(*origin_path + ":" + std::to_string(i + 1) + ": expected a single S or T");
      }
      origins.push_back(parse_origin(t.tokens[0], i + 1));
    }
  } else {
    origins.assign(src_lines.size(), Origin::SourceOriginating);
    if (stats) stats->origin_defaulted = true;
  }

  LabeledParallelCorpus corpus;
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    ParallelPair p;
    p.src = Sentence::parse(src_lines[i]);
    p.tgt = Sentence::parse(tgt_lines[i]);
    p.origin = origins[i];
    if (p.src.empty() || p.tgt.empty()) {
      throw DataError("line " + std::to_string(i + 1) + ": empty side in parallel pair");
    }
    corpus.pairs.push_back(std::move(p));
  }
  return corpus;
}

// Single-file TSV: src \t tgt \t origin.
inline LabeledParallelCorpus load_parallel_tsv(const std::string& path) {
  LabeledParallelCorpus corpus;
  std::size_t n = 0;
  for (const auto& line : detail::read_lines(path)) {
    ++n;
    if (line.empty()) continue;
    const auto cols = detail::split_tabs(line);
    if (cols.size() != 3) {
      throw DataError(path + ":" + std::to_string(n) + ": expected 3 tab-separated columns, got " +
                      std::to_string(cols.size()));
    }
    ParallelPair p;
    p.src = Sentence::parse(cols[0]);
    p.tgt = Sentence::parse(cols[1]);
    p.origin = parse_origin(cols[2], n);
    if (p.src.empty() || p.tgt.empty()) {
      throw DataError(path + ":" + std::to_string(n) + ": empty side in parallel pair");
    }
    corpus.pairs.push_back(std::move(p));
  }
  return corpus;
}

inline void write_parallel(const LabeledParallelCorpus& corpus, const std::string& src_path,
                           const std::string& tgt_path, const std::string& origin_path) {
  std::ofstream src(src_path, std::ios::binary), tgt(tgt_path, std::ios::binary),
      org(origin_path, std::ios::binary);
  if (!src || !tgt || !org) throw DataError("cannot write parallel corpus files");
  for (const auto& p : corpus.pairs) {
    src << p.src.str() << '\n';
    tgt << p.tgt.str() << '\n';
    org << origin_char(p.origin) << '\n';
  }
}

inline void write_parallel_tsv(const LabeledParallelCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& p : corpus.pairs) {
    out << p.src.str() << '\t' << p.tgt.str() << '\t' << origin_char(p.origin) << '\n';
  }
}

namespace detail {

inline void check_fractions(const std::vector<double>& fractions) {
  if (fractions.empty()) throw DataError("split: need at least one fraction");
  double sum = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) throw DataError("split: fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("split: fractions sum to " + std::to_string(sum) + ", expected 1");
  }
}

// Deterministic shuffle then contiguous partition; cumulative rounding
// keeps every part within one item of its exact share.
template <typename Item>
std::vector<std::vector<Item>> split_items(const std::vector<Item>& items,
                                           const std::vector<double>& fractions, std::uint64_t seed) {
  check_fractions(fractions);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, stream_tag("split")));
  rng.shuffle(order);

  const double n = static_cast<double>(items.size());
  std::vector<std::vector<Item>> parts(fractions.size());
  double cum = 0.0;
  std::size_t prev = 0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    cum += fractions[k];
    const std::size_t bound =
        (k + 1 == fractions.size()) ? items.size()
                                    : static_cast<std::size_t>(std::llround(cum * n));
    for (std::size_t i = prev; i < bound && i < items.size(); ++i) {
      parts[k].push_back(items[order[i]]);
    }
    prev = std::min<std::size_t>(bound, items.size());
  }
  return parts;
}

}  // namespace detail

inline std::vector<MonoCorpus> split_corpus(const MonoCorpus& corpus,
                                            const std::vector<double>& fractions, std::uint64_t seed) {
  auto parts = detail::split_items(corpus.sentences, fractions, seed);
  std::vector<MonoCorpus> out;
  out.reserve(parts.size());
  for (auto& p : parts) {
    MonoCorpus c;
    c.language = corpus.language;
    c.domain_hint = corpus.domain_hint;
    c.sentences = std::move(p);
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<LabeledParallelCorpus> split_corpus(const LabeledParallelCorpus& corpus,
                                                       const std::vector<double>& fractions,
                                                       std::uint64_t seed) {
  auto parts = detail::split_items(corpus.pairs, fractions, seed);
  std::vector<LabeledParallelCorpus> out;
  out.reserve(parts.size());
  for (auto& p : parts) {
    LabeledParallelCorpus c;
    c.pairs = std::move(p);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace stdm
