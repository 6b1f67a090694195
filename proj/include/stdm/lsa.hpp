// Copyright 2026 stdm toolkit authors
// SPDX-License-Identifier: Apache-2.0
//
// Rank-k factorization of the TF-IDF matrix. With A = U S V (V being
// r x |V|), the model keeps Ubar = U sqrt(S) as document topic embeddings
// and Vbar = sqrt(S) V as the term map, so Ubar Vbar reproduces the rank-r
// approximation of A. Held-out documents are folded in as w V' S^{-1/2}.
//
// Two factorization routes: Dense is the exact oracle (full SVD of a dense
// copy); Randomized is a seeded range finder with power/subspace iterations
// refined until the leading singular values stabilize.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "stdm/errors.hpp"
#include "stdm/rng.hpp"
#include "stdm/textproc.hpp"

namespace stdm {

enum class SvdMethod { Dense, Randomized, Auto };

struct TopicModel {
  Eigen::MatrixXd doc_embeddings;   // n x r   (Ubar)
  Eigen::MatrixXd term_map;         // r x |V| (Vbar)
  Eigen::VectorXd singular_values;  // length r, non-increasing, positive
  Eigen::Index rank = 0;

  Eigen::Index vocab_size() const { return term_map.cols(); }
};

struct LsaOptions {
  int oversample = 10;      // extra subspace columns beyond k
  int power_iters = 2;      // minimum power iterations before convergence checks
  double conv_tol = 1e-10;  // relative change of top-k singular values
  int max_iters = 400;
  double rank_tol = 1e-12;  // values below rank_tol * s1 are truncated
};

namespace detail {

// Thin Q factor with deterministic column count.
inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(y.rows(), y.cols());
  q = qr.householderQ() * q;
  return q;
}

// Singular values (descending) and right singular vectors of a sparse
// matrix, via the requested route. Returns only (S, V); document
// embeddings are derived by fold-in so duplicate rows of A embed
// identically bit for bit.
inline void svd_sparse(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, int k,
                       SvdMethod method, std::uint64_t seed, const LsaOptions& opts,
                       Eigen::VectorXd& s_out, Eigen::MatrixXd& v_out) {
  const Eigen::Index n = a.rows(), m = a.cols();
  const Eigen::Index min_dim = std::min(n, m);
  if (method == SvdMethod::Auto) {
    method = (min_dim <= 384) ? SvdMethod::Dense : SvdMethod::Randomized;
  }

  if (method == SvdMethod::Dense) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(a);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinV);
    const Eigen::Index r = std::min<Eigen::Index>(k, svd.singularValues().size());
    s_out = svd.singularValues().head(r);
    v_out = svd.matrixV().leftCols(r).transpose();  // r x m
    return;
  }

  const Eigen::Index ell = std::min<Eigen::Index>(k + opts.oversample, min_dim);
  Rng rng(derive_seed(seed, stream_tag("lsa.rangefinder")));
  Eigen::MatrixXd omega(m, ell);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < ell; ++j) omega(i, j) = rng.normal();
  }

  Eigen::MatrixXd q = orthonormalize(a * omega);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(std::min<Eigen::Index>(k, ell));
  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * z);
    if (it + 1 < opts.power_iters) continue;

    // sigma estimates from the small Gram matrix Q' A A' Q
    Eigen::MatrixXd w = a.transpose() * q;  // m x ell
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.transpose() * w);
    Eigen::VectorXd cur(prev.size());
    for (Eigen::Index i = 0; i < prev.size(); ++i) {
      const double lam = eig.eigenvalues()(ell - 1 - i);
      cur(i) = lam > 0 ? std::sqrt(lam) : 0.0;
    }
    double rel = 0.0;
    for (Eigen::Index i = 0; i < cur.size(); ++i) {
      const double denom = std::max(cur(i), 1e-300);
      rel = std::max(rel, std::abs(cur(i) - prev(i)) / denom);
    }
    prev = cur;
    if (rel <= opts.conv_tol) break;
  }

  // Project and factor the small matrix exactly.
  Eigen::MatrixXd b = q.transpose() * Eigen::MatrixXd(a);  // ell x m
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const Eigen::Index r = std::min<Eigen::Index>(k, svd.singularValues().size());
  s_out = svd.singularValues().head(r);
  v_out = svd.matrixV().leftCols(r).transpose();
}

}  // namespace detail

inline TopicModel fit_lsa(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, int k,
                          SvdMethod method = SvdMethod::Auto, std::uint64_t seed = 0,
                          const LsaOptions& opts = {}) {
  if (k < 1) throw DataError("fit_lsa: k must be >= 1");
  if (a.rows() == 0 || a.cols() == 0) throw DataError("fit_lsa: empty matrix");
  const int k_eff = static_cast<int>(std::min<Eigen::Index>(k, std::min(a.rows(), a.cols())));

  Eigen::VectorXd s;
  Eigen::MatrixXd v;  // r x m
  detail::svd_sparse(a, k_eff, method, seed, opts, s, v);

  // Truncate zero and near-zero singular values so S^{-1/2} stays finite.
  Eigen::Index r = 0;
  const double floor = s.size() ? opts.rank_tol * s(0) : 0.0;
  while (r < s.size() && s(r) > floor && s(r) > 0.0) ++r;
  if (r == 0) throw DataError("fit_lsa: matrix is numerically zero");
  s.conservativeResize(r);
  v.conservativeResize(r, v.cols());

  // Sign convention: the largest-magnitude entry of each right singular
  // vector is made non-negative (first occurrence wins ties).
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const double mag = std::abs(v(i, j));
      if (mag > best) {
        best = mag;
        arg = j;
      }
    }
    if (v(i, arg) < 0.0) v.row(i) = -v.row(i);
  }

  TopicModel model;
  model.rank = r;
  model.singular_values = s;
  model.term_map = s.array().sqrt().matrix().asDiagonal() * v;  // sqrt(S) V
  // Ubar = A V' S^{-1/2} computed through the stored term map, the same
  // expression embed_docs uses, so training rows and folded-in copies agree.
  model.doc_embeddings = (a * model.term_map.transpose()) * s.cwiseInverse().asDiagonal();
  return model;
}

inline TopicModel fit_lsa(const DocTermMatrix& a, int k, SvdMethod method = SvdMethod::Auto,
                          std::uint64_t seed = 0, const LsaOptions& opts = {}) {
  return fit_lsa(a.matrix, k, method, seed, opts);
}

// Fold-in: row i of the result is w_i V' S^{-1/2}, the Ubar row the
// document would have had.
inline Eigen::MatrixXd embed_docs(const TopicModel& model,
                                  const Eigen::SparseMatrix<double, Eigen::RowMajor>& w) {
  if (w.cols() != model.term_map.cols()) {
    throw DataError("embed_docs: vocabulary size mismatch (" + std::to_string(w.cols()) + " vs " +
                    std::to_string(model.term_map.cols()) + ")");
  }
  return (w * model.term_map.transpose()) * model.singular_values.cwiseInverse().asDiagonal();
}

inline Eigen::MatrixXd embed_docs(const TopicModel& model, const DocTermMatrix& w) {
  return embed_docs(model, w.matrix);
}

// ---------------------------------------------------------------------------
// Binary container: header (n, r, |V|) as little-endian u64, then row-major
// Ubar, Vbar, S as little-endian f64.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

inline double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace detail

inline void save_topic_model(const TopicModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write topic model: " + path);
  const auto n = static_cast<std::uint64_t>(model.doc_embeddings.rows());
  const auto r = static_cast<std::uint64_t>(model.rank);
  const auto v = static_cast<std::uint64_t>(model.term_map.cols());
  detail::put_u64(out, n);
  detail::put_u64(out, r);
  detail::put_u64(out, v);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < r; ++j) detail::put_f64(out, model.doc_embeddings(i, j));
  for (std::uint64_t i = 0; i < r; ++i)
    for (std::uint64_t j = 0; j < v; ++j) detail::put_f64(out, model.term_map(i, j));
  for (std::uint64_t i = 0; i < r; ++i) detail::put_f64(out, model.singular_values(i));
}

inline TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open topic model: " + path);
  const std::uint64_t n = detail::get_u64(in);
  const std::uint64_t r = detail::get_u64(in);
  const std::uint64_t v = detail::get_u64(in);
  TopicModel model;
  model.rank = static_cast<Eigen::Index>(r);
  model.doc_embeddings.resize(n, r);
  model.term_map.resize(r, v);
  model.singular_values.resize(r);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < r; ++j) model.doc_embeddings(i, j) = detail::get_f64(in);
  for (std::uint64_t i = 0; i < r; ++i)
    for (std::uint64_t j = 0; j < v; ++j) model.term_map(i, j) = detail::get_f64(in);
  for (std::uint64_t i = 0; i < r; ++i) model.singular_values(i) = detail::get_f64(in);
  if (!in) throw DataError("truncated topic model file: " + path);
  return model;
}

}  // namespace stdm
