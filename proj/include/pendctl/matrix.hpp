#pragma once

// Small dense real-matrix kernel: exactly the numerics the control pipeline
// needs (products, inverse, rank, characteristic polynomial, polynomial from
// roots, polynomial roots, matrix exponential). Sizes are runtime values; the
// systems handled here are n <= 8.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pendctl/errors.hpp"

namespace pendctl {

using Complex = std::complex<double>;

class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Row-major nested initializer: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) {
        throw DimensionError("Matrix: ragged initializer list");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix column(std::span<const double> values) {
    Matrix m(values.size(), 1);
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
  }

  static Matrix row(std::span<const double> values) {
    Matrix m(1, values.size());
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
  }

  static Matrix diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }
  [[nodiscard]] std::span<double> entries() noexcept { return data_; }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  [[nodiscard]] Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
      throw DimensionError("Matrix::block: range exceeds matrix");
    }
    Matrix b(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
      throw DimensionError("Matrix::set_block: range exceeds matrix");
    }
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
  }

  [[nodiscard]] Matrix row_at(std::size_t r) const { return block(r, 0, 1, cols_); }
  [[nodiscard]] Matrix col_at(std::size_t c) const { return block(0, c, rows_, 1); }

  // Maximum absolute row sum.
  [[nodiscard]] double norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) sum += std::abs((*this)(r, c));
      best = std::max(best, sum);
    }
    return best;
  }

  [[nodiscard]] double max_abs() const noexcept {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
  }

  [[nodiscard]] double trace() const {
    if (!is_square()) throw DimensionError("trace: matrix is not square");
    double t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  Matrix& operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("operator*: inner dimensions " + std::to_string(a.cols_) + " and " +
                           std::to_string(b.rows_) + " differ");
    }
    Matrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += aik * b(k, j);
      }
    return p;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void require_same_shape(const Matrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string(what) + ": shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline void require_finite(const Matrix& m, const char* where) {
  if (!m.all_finite()) throw NonFiniteError(std::string(where) + ": non-finite entry");
}

inline void require_square(const Matrix& m, const char* where) {
  if (!m.is_square()) {
    throw DimensionError(std::string(where) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Monic real polynomial, coefficients ordered s^n ... s^0.
class Polynomial {
 public:
  explicit Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.size() < 2) throw DimensionError("Polynomial: degree must be at least 1");
    if (coeffs_.front() != 1.0) throw Error("Polynomial: leading coefficient must be exactly 1");
    for (double c : coeffs_) {
      if (!std::isfinite(c)) throw NonFiniteError("Polynomial: non-finite coefficient");
    }
  }

  [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  [[nodiscard]] std::span<const double> coefficients() const noexcept { return coeffs_; }

  // gamma(i) is the coefficient of s^(n-i); gamma(0) == 1.
  [[nodiscard]] double gamma(std::size_t i) const { return coeffs_.at(i); }

  [[nodiscard]] Complex operator()(Complex s) const noexcept {
    Complex acc = 0.0;
    for (double c : coeffs_) acc = acc * s + c;
    return acc;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

inline constexpr std::size_t kDefaultMaxCharPolyOrder = 8;
inline constexpr double kDefaultRankTolerance = 1e-9;
inline constexpr double kDefaultPivotTolerance = 1e-12;

namespace detail {

// Diagonal similarity by powers of two (exact in floating point) that evens
// out row and column norms.
inline Matrix balance(Matrix a) {
  const std::size_t n = a.rows();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double total = c + r;
      while (c < r / 2) {
        c *= 2;
        r /= 2;
        f *= 2;
      }
      while (c >= r * 2) {
        c /= 2;
        r *= 2;
        f /= 2;
      }
      if (c + r < 0.95 * total) {
        changed = true;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return a;
}

// Upper Hessenberg form by Householder reflections.
inline Matrix hessenberg(Matrix a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0) alpha = -alpha;
    std::vector<double> v(n, 0.0);
    v[k + 1] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv == 0.0) continue;
    // A <- (I - 2vv'/v'v) A (I - 2vv'/v'v)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
      const double f = 2.0 * dot / vv;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      const double f = 2.0 * dot / vv;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
  return a;
}

}  // namespace detail

// Coefficients of |sI - A|. A is balanced and reduced to Hessenberg form H,
// then the leading principal minors p_i of sI - H follow
//   p_i = (s - h_ii) p_{i-1} - sum_m h_{i-m,i} (h_{i,i-1} ... h_{i-m+1,i-m}) p_{i-m-1}.
inline Polynomial char_poly(const Matrix& a, std::size_t max_order = kDefaultMaxCharPolyOrder) {
  require_square(a, "char_poly");
  require_finite(a, "char_poly");
  const std::size_t n = a.rows();
  if (n == 0) throw DimensionError("char_poly: empty matrix");
  if (n > max_order) {
    throw DimensionError("char_poly: order " + std::to_string(n) + " exceeds limit " +
                         std::to_string(max_order));
  }
  const Matrix h = detail::hessenberg(detail::balance(a));
  // p[i] holds ascending coefficients of the i x i leading minor.
  std::vector<std::vector<double>> p(n + 1);
  p[0] = {1.0};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<double> q(i + 1, 0.0);
    for (std::size_t d = 0; d < i; ++d) {
      q[d + 1] += p[i - 1][d];
      q[d] -= h(i - 1, i - 1) * p[i - 1][d];
    }
    double beta = 1.0;
    for (std::size_t m = 1; m < i; ++m) {
      beta *= h(i - m, i - m - 1);
      const double f = h(i - m - 1, i - 1) * beta;
      for (std::size_t d = 0; d < p[i - m - 1].size(); ++d) q[d] -= f * p[i - m - 1][d];
    }
    p[i] = std::move(q);
  }
  std::vector<double> coeffs(p[n].rbegin(), p[n].rend());
  coeffs[0] = 1.0;
  return Polynomial(std::move(coeffs));
}

// Monic real polynomial with the given roots. The multiset must be closed
// under conjugation; pairing uses a tolerance relative to the root magnitude.
inline Polynomial poly_from_roots(std::span<const Complex> roots, double pair_tol = 1e-9) {
  if (roots.empty()) throw DimensionError("poly_from_roots: need at least one root");
  for (const Complex& r : roots) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
      throw NonFiniteError("poly_from_roots: non-finite root");
    }
  }
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const double scale = std::max(1.0, std::abs(roots[i]));
    if (std::abs(roots[i].imag()) <= pair_tol * scale) {
      used[i] = true;
      continue;
    }
    used[i] = true;
    bool paired = false;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - std::conj(roots[i])) <= pair_tol * scale) {
        used[j] = true;
        paired = true;
        break;
      }
    }
    if (!paired) {
      throw UnpairedRootError("poly_from_roots: root " + std::to_string(roots[i].real()) + "+" +
                              std::to_string(roots[i].imag()) + "i has no conjugate partner");
    }
  }

  std::vector<Complex> acc{1.0};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, 0.0);
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[k] += acc[k];
      next[k + 1] -= acc[k] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> coeffs(acc.size());
  std::transform(acc.begin(), acc.end(), coeffs.begin(), [](Complex c) { return c.real(); });
  coeffs[0] = 1.0;
  return Polynomial(std::move(coeffs));
}

// Roots of a monic polynomial by simultaneous (Durand-Kerner) iteration,
// polished and returned with conjugate pairs made exact. Used for stability
// tags and closed-loop pole reports, not as a general eigensolver.
inline std::vector<Complex> poly_roots(const Polynomial& p) {
  const std::size_t n = p.degree();
  const auto c = p.coefficients();
  double bound = 0.0;
  for (std::size_t i = 1; i <= n; ++i) bound = std::max(bound, std::abs(c[i]));
  bound += 1.0;  // Cauchy bound on root magnitude

  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<double>(i)) * std::min(bound, 2.0);

  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= (z[i] - z[j]);
      }
      if (std::abs(denom) == 0.0) denom = Complex(1e-14, 1e-14);
      const Complex delta = p(z[i]) / denom;
      z[i] -= delta;
      change = std::max(change, std::abs(delta) / std::max(1.0, std::abs(z[i])));
    }
    if (change < 1e-15) break;
  }

  // Newton polish on the original polynomial.
  for (Complex& r : z) {
    for (int k = 0; k < 3; ++k) {
      Complex dp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dp = dp * r + c[i] * static_cast<double>(n - i);
      }
      if (std::abs(dp) < 1e-300) break;
      const Complex step = p(r) / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      r -= step;
    }
  }

  for (Complex& r : z) {
    if (std::abs(r.imag()) <= 1e-10 * std::max(1.0, std::abs(r))) r = Complex(r.real(), 0.0);
  }
  // Force exact conjugate symmetry for the complex ones.
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i] || z[i].imag() == 0.0) continue;
    std::size_t best = n;
    double best_dist = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || done[j]) continue;
      const double d = std::abs(z[j] - std::conj(z[i]));
      if (best == n || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best != n) {
      const Complex avg = 0.5 * (z[i] + std::conj(z[best]));
      z[i] = avg;
      z[best] = std::conj(avg);
      done[best] = true;
    }
    done[i] = true;
  }
  return z;
}

// e^A by scaling and squaring around a truncated Taylor series: scale so that
// ||A / 2^k||_inf <= 0.5, sum terms until the next one drops below 1e-16 in
// norm, then square k times.
inline Matrix mat_exp(const Matrix& a) {
  require_square(a, "mat_exp");
  require_finite(a, "mat_exp");
  const std::size_t n = a.rows();
  const double norm = a.norm_inf();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a * std::ldexp(1.0, -squarings);

  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k < 64; ++k) {
    term = term * scaled * (1.0 / k);
    result += term;
    if (term.norm_inf() < 1e-16) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  if (!result.all_finite()) throw NonFiniteError("mat_exp: result overflowed");
  return result;
}

// Gauss-Jordan elimination with partial pivoting. A pivot smaller than
// pivot_tol times the largest entry of the input means "singular".
inline Matrix inverse(const Matrix& a, double pivot_tol = kDefaultPivotTolerance) {
  require_square(a, "inverse");
  require_finite(a, "inverse");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  const double scale = a.max_abs();
  if (scale == 0.0) throw SingularMatrixError("inverse: zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    }
    if (std::abs(work(pivot, col)) <= pivot_tol * scale) {
      throw SingularMatrixError("inverse: matrix is singular to working precision (column " +
                                std::to_string(col) + ")");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(col, c), work(pivot, c));
        std::swap(inv(col, c), inv(pivot, c));
      }
    }
    const double d = work(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) -= f * work(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// Numerical rank by row echelon reduction with partial pivoting. A pivot
// counts when |pivot| > tol * (largest absolute entry of the input).
inline std::size_t rank(const Matrix& a, double tol = kDefaultRankTolerance) {
  if (!(tol > 0.0)) throw Error("rank: tolerance must be positive");
  require_finite(a, "rank");
  const double threshold = tol * a.max_abs();
  if (a.max_abs() == 0.0) return 0;
  Matrix work = a;
  std::size_t r = 0;
  for (std::size_t col = 0; col < work.cols() && r < work.rows(); ++col) {
    std::size_t pivot = r;
    for (std::size_t i = r + 1; i < work.rows(); ++i) {
      if (std::abs(work(i, col)) > std::abs(work(pivot, col))) pivot = i;
    }
    if (std::abs(work(pivot, col)) <= threshold) continue;
    if (pivot != r) {
      for (std::size_t c = 0; c < work.cols(); ++c) std::swap(work(r, c), work(pivot, c));
    }
    for (std::size_t i = r + 1; i < work.rows(); ++i) {
      const double f = work(i, col) / work(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < work.cols(); ++c) work(i, c) -= f * work(r, c);
    }
    ++r;
  }
  return r;
}

inline Matrix power(const Matrix& a, unsigned k) {
  require_square(a, "power");
  Matrix result = Matrix::identity(a.rows());
  for (unsigned i = 0; i < k; ++i) result = result * a;
  return result;
}

// Canonical ordering for pole multisets: real part, then imaginary part.
inline void sort_poles(std::vector<Complex>& poles) {
  std::sort(poles.begin(), poles.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace pendctl
