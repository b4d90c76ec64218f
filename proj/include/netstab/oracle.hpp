#pragma once

// Numeric oracle for the structural results: samples realizations of a
// pattern and measures controllability rank and stabilizable-subspace
// dimension directly, providing an independent check of the combinatorial
// bounds. All routines are deterministic for a given seed.

#include <cstdint>
#include <map>
#include <vector>

#include "netstab/analyze.hpp"
#include "netstab/linalg.hpp"
#include "netstab/pattern.hpp"

namespace netstab {

inline constexpr double kRankTol = 1e-8;  // relative, on singular values
inline constexpr double kStabTol = 1e-9;  // absolute, on eigenvalues

struct NumericReport {
  int samples = 0;
  std::map<int, int> rank_histogram;
  std::map<int, int> stabdim_histogram;
  int best_stabdim = 0;
  double tolerance = kRankTol;
  std::uint64_t seed = 0;
};

// splitmix64 step; decouples per-sample seeds so sample evaluations are pure
// in (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace oracle_detail {

// Krylov blocks of [B, AB, A^2 B, ...] with per-step column normalization;
// scaling preserves column spaces while avoiding overflow.
inline Mat scaled_controllability_matrix(const Mat& a, const Mat& b) {
  const int n = a.rows();
  const int m = b.cols();
  Mat q(n, n * m);
  Mat block = b;
  for (int step = 0; step < n; ++step) {
    for (int j = 0; j < m; ++j) {
      double norm = 0.0;
      for (int i = 0; i < n; ++i) norm += block(i, j) * block(i, j);
      norm = std::sqrt(norm);
      if (norm > 1e-300)
        for (int i = 0; i < n; ++i) block(i, j) /= norm;
      else
        for (int i = 0; i < n; ++i) block(i, j) = 0.0;
      for (int i = 0; i < n; ++i) q(i, step * m + j) = block(i, j);
    }
    if (step + 1 < n) block = multiply(a, block);
  }
  return q;
}

// Orthonormal basis of the controllable subspace by incremental
// orthogonalization of Krylov blocks; a direction is kept when its residual
// exceeds tol relative to the incoming vector.
inline std::vector<std::vector<double>> controllable_basis(const Mat& a, const Mat& b,
                                                           double tol) {
  const int n = a.rows();
  std::vector<std::vector<double>> basis;
  std::vector<std::vector<double>> frontier;
  for (int j = 0; j < b.cols(); ++j) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = b(i, j);
    frontier.push_back(std::move(v));
  }
  for (int level = 0; level < n && !frontier.empty() && int(basis.size()) < n; ++level) {
    std::vector<std::vector<double>> accepted;
    for (auto& v : frontier) {
      const double incoming = vec_norm(v);
      if (incoming <= 1e-300) continue;
      std::vector<double> w = v;
      const double residual = orthogonalize_against(w, basis);
      if (residual > tol * incoming) {
        for (double& x : w) x /= residual;
        basis.push_back(w);
        accepted.push_back(std::move(w));
        if (int(basis.size()) == n) break;
      }
    }
    if (accepted.empty()) break;
    frontier.clear();
    if (level + 1 < n) {
      for (const auto& w : accepted) {
        std::vector<double> av(n, 0.0);
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += a(i, k) * w[k];
          av[i] = s;
        }
        frontier.push_back(std::move(av));
      }
    }
  }
  return basis;
}

inline std::vector<std::vector<double>> complete_basis(
    const std::vector<std::vector<double>>& basis, int n) {
  std::vector<std::vector<double>> all = basis;
  std::vector<std::vector<double>> extra;
  for (int i = 0; i < n && int(all.size()) < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    const double r = orthogonalize_against(e, all);
    if (r > 1e-8) {
      for (double& x : e) x /= r;
      all.push_back(e);
      extra.push_back(std::move(e));
    }
  }
  if (int(all.size()) != n)
    throw std::logic_error("orthonormal completion failed");
  return extra;
}

}  // namespace oracle_detail

// Numeric rank of the controllability matrix: singular values above
// tol * largest. Zero when B has no columns or is identically zero.
inline int controllability_rank(const NumericRealization& r, double tol = kRankTol) {
  if (!all_finite(r.a) || !all_finite(r.b))
    throw std::invalid_argument("realization contains non-finite entries");
  const int n = r.a.rows();
  if (n == 0 || r.b.cols() == 0) return 0;
  const Mat q = oracle_detail::scaled_controllability_matrix(r.a, r.b);
  const std::vector<double> sv = singular_values(transpose(q));
  if (sv.empty() || sv.front() <= 1e-300) return 0;
  int rank = 0;
  for (double s : sv)
    if (s > tol * sv.front()) ++rank;
  return rank;
}

// Dimension of the stabilizable subspace of one realization: controllable
// dimension plus the count of strictly negative eigenvalues (below -stab_tol)
// of A compressed onto the orthogonal complement of the controllable
// subspace. For symmetric A that complement is A-invariant, so the
// compression is exactly the uncontrollable block.
inline int stabilizable_dim(const NumericRealization& r, double rank_tol = kRankTol,
                            double stab_tol = kStabTol) {
  if (!all_finite(r.a) || !all_finite(r.b))
    throw std::invalid_argument("realization contains non-finite entries");
  const int n = r.a.rows();
  if (n == 0) return 0;
  if (!is_symmetric(r.a, 1e-10 * std::max(1.0, max_abs(r.a))))
    throw std::invalid_argument("state matrix is not symmetric");

  const auto basis = oracle_detail::controllable_basis(r.a, r.b, rank_tol);
  const int rc = int(basis.size());
  if (rc == n) return n;
  const auto comp = oracle_detail::complete_basis(basis, n);
  const int q = int(comp.size());
  Mat block(q, q);
  for (int i = 0; i < q; ++i) {
    std::vector<double> aw(n, 0.0);
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int y = 0; y < n; ++y) s += r.a(x, y) * comp[i][y];
      aw[x] = s;
    }
    for (int j = 0; j < q; ++j) block(i, j) = vec_dot(comp[j], aw);
  }
  const EigenDecomposition eig = jacobi_eigen(block);
  int negatives = 0;
  for (double v : eig.values)
    if (v < -stab_tol) ++negatives;
  return rc + negatives;
}

// Samples realizations and histograms rank and stabilizable dimension.
// Deterministic in (pattern, samples, seed, tolerances); per-sample seeds are
// derived independently so the reduction is partition-free.
inline NumericReport monte_carlo_mdim(const SystemPattern& p, int samples, std::uint64_t seed,
                                      double rank_tol = kRankTol, double stab_tol = kStabTol) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  NumericReport rep;
  rep.samples = samples;
  rep.tolerance = rank_tol;
  rep.seed = seed;
  for (int i = 0; i < samples; ++i) {
    const NumericRealization r = sample_realization(p, mix_seed(seed, std::uint64_t(i)));
    ++rep.rank_histogram[controllability_rank(r, rank_tol)];
    ++rep.stabdim_histogram[stabilizable_dim(r, rank_tol, stab_tol)];
  }
  rep.best_stabdim = rep.stabdim_histogram.rbegin()->first;
  return rep;
}

struct GenericDimCheck {
  bool ok = false;
  int expected = 0;    // term-rank prediction
  int modal_rank = 0;  // most frequent sampled rank
  double modal_share = 0.0;
  std::map<int, int> rank_histogram;
  int samples = 0;
  std::uint64_t seed = 0;
};

// True iff the modal sampled controllability rank matches the term-rank
// prediction and occurs in at least 95% of samples.
inline GenericDimCheck verify_generic_dim(const SystemPattern& p, int samples, std::uint64_t seed,
                                          double tol = kRankTol) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  GenericDimCheck out;
  out.expected = generic_controllable_dim(p);
  out.samples = samples;
  out.seed = seed;
  for (int i = 0; i < samples; ++i) {
    const NumericRealization r = sample_realization(p, mix_seed(seed, std::uint64_t(i)));
    ++out.rank_histogram[controllability_rank(r, tol)];
  }
  int best_count = -1;
  for (const auto& [rank, count] : out.rank_histogram)
    if (count > best_count) {
      best_count = count;
      out.modal_rank = rank;
    }
  out.modal_share = double(best_count) / double(samples);
  out.ok = (out.modal_rank == out.expected) && (out.modal_share >= 0.95);
  return out;
}

}  // namespace netstab
