#pragma once

// Small dense linear algebra used by the numeric oracle: a cyclic Jacobi
// eigensolver for symmetric matrices and a one-sided Jacobi routine for
// singular values. Sized for networks up to a few hundred states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace netstab {

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline Mat multiply(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double frobenius(const Mat& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

inline bool all_finite(const Mat& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool is_symmetric(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

inline double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double vec_norm(const std::vector<double>& a) { return std::sqrt(vec_dot(a, a)); }

// Modified Gram-Schmidt with a second pass; returns the residual norm and
// leaves v orthogonal to every vector of basis.
inline double orthogonalize_against(std::vector<double>& v,
                                    const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double c = vec_dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
  return vec_norm(v);
}

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Mat vectors;                 // column k pairs with values[k]
  int sweeps = 0;
};

// Cyclic Jacobi rotations; converges to machine precision for the matrix
// sizes this library targets.
inline EigenDecomposition jacobi_eigen(Mat s, int max_sweeps = 100) {
  const int n = s.rows();
  if (n != s.cols()) throw std::invalid_argument("jacobi_eigen: matrix not square");
  EigenDecomposition out;
  out.vectors = Mat::identity(n);
  if (n == 0) return out;

  const double scale = std::max(frobenius(s), 1e-300);
  const double stop = 1e-14 * scale;

  Mat& v = out.vectors;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    off = std::sqrt(2.0 * off);
    if (off <= stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) <= stop / (double(n) * n)) continue;
        const double app = s(p, p);
        const double aqq = s(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = s(k, p);
          const double akq = s(k, q);
          s(k, p) = s(p, k) = c * akp - sn * akq;
          s(k, q) = s(q, k) = sn * akp + c * akq;
        }
        s(p, p) = app - t * apq;
        s(q, q) = aqq + t * apq;
        s(p, q) = s(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  out.sweeps = sweep;

  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = s(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.values[a] < out.values[b]; });
  std::vector<double> sorted(n);
  Mat vs(n, n);
  for (int k = 0; k < n; ++k) {
    sorted[k] = out.values[order[k]];
    for (int i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
  }
  out.values = std::move(sorted);
  out.vectors = std::move(vs);
  return out;
}

// One-sided Jacobi: orthogonalizes the columns of m, whose norms are then the
// singular values. Accurate also for small singular values since no Gram
// matrix is formed. Returns the values in descending order.
inline std::vector<double> singular_values(Mat m, int max_sweeps = 60) {
  const int cols = m.cols();
  const int rows = m.rows();
  if (cols == 0 || rows == 0) return {};

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < cols - 1; ++i) {
      for (int j = i + 1; j < cols; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < rows; ++k) {
          const double x = m(k, i);
          const double y = m(k, j);
          alpha += x * x;
          beta += y * y;
          gamma += x * y;
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t;
        if (std::abs(zeta) > 1e150) {
          t = 1.0 / (2.0 * zeta);
        } else {
          t = 1.0 / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
          if (zeta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < rows; ++k) {
          const double x = m(k, i);
          const double y = m(k, j);
          m(k, i) = c * x - sn * y;
          m(k, j) = sn * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(cols);
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int k = 0; k < rows; ++k) s += m(k, j) * m(k, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

}  // namespace netstab
