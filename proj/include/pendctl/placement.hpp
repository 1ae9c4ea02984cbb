#pragma once

// Single-input pole placement through the controllable canonical form.
//
// With |sI - A| = s^n + g_1 s^{n-1} + ... + g_n, the transformation
// Phi = ctrb(A, B) * Gamma takes (A, B) to companion form, where a feedback
// row K_hat = [k_1 ... k_n] only shifts the last row. Matching the desired
// polynomial s^n + d_1 s^{n-1} + ... + d_n coefficient by coefficient gives
// k_{n+1-i} = d_i - g_i, and the physical gain is K = K_hat * Phi^{-1}.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"
#include "pendctl/properties.hpp"

namespace pendctl {

inline constexpr double kPlacementTolerance = 1e-6;

struct CanonicalDecomposition {
  Polynomial gamma;                      // open loop, |sI - A|
  std::optional<Polynomial> gamma_bar;   // desired; set by place()
  Matrix Gamma;
  Matrix Phi;
  Matrix Phi_inv;
  Matrix A_hat;                          // Phi^{-1} A Phi
  Matrix B_hat;                          // Phi^{-1} B
  Matrix K_hat;                          // 1 x n, set by place()
};

struct GainSpec {
  std::vector<Complex> desired_poles;    // canonical order
  Matrix K;                              // 1 x n
  std::optional<double> psi;
  std::optional<double> sample_period;   // set for discrete designs
  std::vector<Complex> achieved_poles;   // roots of |sI - (A - BK)|, canonical order
  double residual = 0.0;                 // worst relative coefficient mismatch
  std::optional<CanonicalDecomposition> decomposition;
};

// Hankel-type array with gamma_{n-1} ... gamma_1, 1 on the first row, unit
// anti-diagonal and zeros below it.
inline Matrix gamma_matrix(const Polynomial& gamma) {
  const std::size_t n = gamma.degree();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; i + j < n; ++j) {
      // i + j == n - 1 lands on gamma(0) == 1.
      g(i, j) = gamma.gamma(n - 1 - i - j);
    }
  }
  return g;
}

inline CanonicalDecomposition canonical_transform(const LinearSystem& sys,
                                                  double rank_tol = kDefaultRankTolerance) {
  const Matrix ctrb = controllability_matrix(sys);
  if (rank(ctrb, rank_tol) != sys.order()) {
    throw UncontrollableError("canonical_transform: system is not controllable");
  }
  Polynomial gamma = char_poly(sys.A);
  Matrix big_gamma = gamma_matrix(gamma);
  Matrix phi = ctrb * big_gamma;
  Matrix phi_inv;
  try {
    phi_inv = inverse(phi);
  } catch (const SingularMatrixError&) {
    throw UncontrollableError("canonical_transform: transformation matrix is singular");
  }
  Matrix a_hat = phi_inv * sys.A * phi;
  Matrix b_hat = phi_inv * sys.B;
  return {std::move(gamma), std::nullopt,        std::move(big_gamma), std::move(phi),
          std::move(phi_inv), std::move(a_hat), std::move(b_hat),     Matrix{}};
}

// Largest |a_i - b_i| / max(1, |b_i|) over matching coefficients.
inline double coefficient_residual(const Polynomial& achieved, const Polynomial& desired) {
  if (achieved.degree() != desired.degree()) return INFINITY;
  double worst = 0.0;
  const auto a = achieved.coefficients();
  const auto d = desired.coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - d[i]) / std::max(1.0, std::abs(d[i])));
  }
  return worst;
}

inline GainSpec place(const LinearSystem& sys, std::span<const Complex> desired,
                      double rank_tol = kDefaultRankTolerance) {
  sys.validate();
  const std::size_t n = sys.order();
  if (desired.size() != n) {
    throw DimensionError("place: need " + std::to_string(n) + " poles, got " +
                         std::to_string(desired.size()));
  }
  CanonicalDecomposition dec = canonical_transform(sys, rank_tol);
  Polynomial target = poly_from_roots(desired);

  Matrix k_hat(1, n);
  for (std::size_t i = 1; i <= n; ++i) {
    k_hat(0, n - i) = target.gamma(i) - dec.gamma.gamma(i);
  }
  Matrix k = k_hat * dec.Phi_inv;
  require_finite(k, "place");

  // The closed-loop coefficients are affine in K, so the same map corrects
  // the rounding left over from an ill-conditioned Phi.
  Polynomial closed = char_poly(sys.A - sys.B * k);
  double residual = coefficient_residual(closed, target);
  for (int pass = 0; pass < 3 && residual > 0.0; ++pass) {
    Matrix delta(1, n);
    for (std::size_t i = 1; i <= n; ++i) delta(0, n - i) = closed.gamma(i) - target.gamma(i);
    const Matrix refined_hat = k_hat - delta;
    const Matrix refined = refined_hat * dec.Phi_inv;
    Polynomial refined_closed = char_poly(sys.A - sys.B * refined);
    const double refined_residual = coefficient_residual(refined_closed, target);
    if (!(refined_residual < residual)) break;
    k_hat = refined_hat;
    k = refined;
    closed = std::move(refined_closed);
    residual = refined_residual;
  }
  if (!(residual <= kPlacementTolerance)) {
    throw SynthesisError("place: closed-loop polynomial misses the request by " +
                         std::to_string(residual));
  }

  GainSpec spec;
  spec.desired_poles.assign(desired.begin(), desired.end());
  sort_poles(spec.desired_poles);
  spec.K = std::move(k);
  spec.sample_period = sys.sample_period;
  spec.achieved_poles = poly_roots(closed);
  sort_poles(spec.achieved_poles);
  spec.residual = residual;
  dec.gamma_bar = std::move(target);
  dec.K_hat = std::move(k_hat);
  spec.decomposition = std::move(dec);
  return spec;
}

// z = e^{sT} for each pole.
inline std::vector<Complex> map_poles_s_to_z(std::span<const Complex> poles, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("map_poles_s_to_z: sampling period must be positive");
  }
  std::vector<Complex> z;
  z.reserve(poles.size());
  for (const Complex& s : poles) z.push_back(std::exp(s * period));
  return z;
}

// Reference gain giving unit DC gain from the reference to output row
// `output_index`. Continuous: 1 / (c (BK - A)^{-1} B). Discrete:
// 1 / (c (I - A + BK)^{-1} B).
inline double feedforward_gain(const LinearSystem& sys, const Matrix& k, std::size_t output_index) {
  sys.validate();
  if (k.rows() != 1 || k.cols() != sys.order()) throw DimensionError("feedforward_gain: K must be 1 x n");
  if (output_index >= sys.C.rows()) throw DimensionError("feedforward_gain: output index out of range");
  const Matrix bk = sys.B * k;
  const Matrix m = sys.is_discrete() ? Matrix::identity(sys.order()) - sys.A + bk : bk - sys.A;
  Matrix m_inv;
  try {
    m_inv = inverse(m);
  } catch (const SingularMatrixError&) {
    throw SynthesisError("feedforward_gain: closed loop has an integrator, DC gain undefined");
  }
  const double dc = (sys.C.row_at(output_index) * m_inv * sys.B)(0, 0);
  if (std::abs(dc) < 1e-12) {
    throw SynthesisError("feedforward_gain: zero DC gain on the selected output");
  }
  return 1.0 / dc;
}

}  // namespace pendctl
