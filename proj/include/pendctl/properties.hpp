#pragma once

#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"

namespace pendctl {

struct PropertyReport {
  Matrix matrix;
  std::size_t rank = 0;
  std::size_t required = 0;
  double tolerance = kDefaultRankTolerance;
  bool holds = false;
};

struct SystemProperties {
  PropertyReport controllability;
  PropertyReport observability;
};

// [B | AB | ... | A^{n-1} B]. Single-input systems only.
inline Matrix controllability_matrix(const LinearSystem& sys) {
  sys.validate();
  if (sys.B.cols() != 1) {
    throw DimensionError("controllability_matrix: expected a single-input system, B has " +
                         std::to_string(sys.B.cols()) + " columns");
  }
  const std::size_t n = sys.order();
  Matrix ctrb(n, n);
  Matrix col = sys.B;
  for (std::size_t j = 0; j < n; ++j) {
    ctrb.set_block(0, j, col);
    col = sys.A * col;
  }
  return ctrb;
}

// [C; CA; ...; CA^{n-1}], (p n) x n.
inline Matrix observability_matrix(const LinearSystem& sys) {
  sys.validate();
  const std::size_t n = sys.order();
  const std::size_t p = sys.C.rows();
  Matrix obsv(p * n, n);
  Matrix block = sys.C;
  for (std::size_t k = 0; k < n; ++k) {
    obsv.set_block(k * p, 0, block);
    block = block * sys.A;
  }
  return obsv;
}

inline PropertyReport make_report(Matrix m, std::size_t required, double tol) {
  PropertyReport r;
  r.rank = rank(m, tol);
  r.matrix = std::move(m);
  r.required = required;
  r.tolerance = tol;
  r.holds = r.rank == required;
  return r;
}

inline SystemProperties check(const LinearSystem& sys, double tol = kDefaultRankTolerance) {
  if (!(tol > 0.0)) throw ConfigError("check: rank tolerance must be positive");
  const std::size_t n = sys.order();
  return {make_report(controllability_matrix(sys), n, tol),
          make_report(observability_matrix(sys), n, tol)};
}

}  // namespace pendctl
