#pragma once

// Shared generators for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "strongmoment.hpp"

namespace fixtures {

using namespace strongmoment;

inline CMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = cdouble(nd(rng), nd(rng));
  return a;
}

inline CMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  const CMatrix b = random_complex(n, n, rng);
  return 0.5 * (b + b.adjoint());
}

// B B^* with B n×rank.
inline CMatrix random_psd(Index n, Index rank, std::mt19937_64& rng) {
  const CMatrix b = random_complex(n, rank, rng);
  return b * b.adjoint();
}

// Hermitian with spectrum inside [-1, 1].
inline CMatrix random_contraction(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(-0.95, 0.95);
  Eigen::HouseholderQR<CMatrix> qr(random_complex(n, n, rng));
  const CMatrix q = qr.householderQ();
  RVector lam(n);
  for (Index i = 0; i < n; ++i) lam(i) = ud(rng);
  return q * lam.cast<cdouble>().asDiagonal() * q.adjoint();
}

inline CMatrix example_s() {
  const double c = 3.0 / std::sqrt(10.0);
  CMatrix s(2, 2);
  s << 1.0, c, c, 1.0;
  return s;
}

// Atoms at sorted, well separated points of [lo, hi], full-rank weights
// scaled to order one.
inline AtomicMeasure random_measure(Index n, int atoms, std::mt19937_64& rng, double lo = 0.5, double hi = 3.0,
                                    double min_gap = 0.15) {
  std::uniform_real_distribution<double> ud(lo, hi);
  std::vector<double> ts;
  while (static_cast<int>(ts.size()) < atoms) {
    const double t = ud(rng);
    bool ok = true;
    for (double s : ts) ok = ok && std::abs(s - t) >= min_gap;
    if (ok) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  AtomicMeasure mu;
  mu.dim = n;
  for (double t : ts) {
    CMatrix w = random_psd(n, n, rng) / static_cast<double>(n) + 0.2 * CMatrix::Identity(n, n);
    mu.atoms.push_back({t, hermitian_part(w)});
  }
  return mu;
}

inline AtomicMeasure scalar_measure(std::vector<std::pair<double, double>> atoms) {
  AtomicMeasure mu;
  mu.dim = 1;
  for (auto [t, w] : atoms) mu.atoms.push_back({t, CMatrix::Constant(1, 1, w)});
  return mu;
}

// d = 2, 𝒟 = span e1, T e1 = α e1 + β e2.
inline ContractionWithDomain toy_contraction(double alpha, double beta) {
  ContractionWithDomain t;
  t.domain_basis = CMatrix::Zero(2, 1);
  t.domain_basis(0, 0) = 1.0;
  t.action = CMatrix::Zero(2, 1);
  t.action(0, 0) = alpha;
  t.action(1, 0) = beta;
  t.complement_basis = CMatrix::Zero(2, 1);
  t.complement_basis(1, 0) = 1.0;
  t.norm = std::hypot(alpha, beta);
  return t;
}

// Brute-force range of X such that [[α, β], [β, X]] is a contraction: a
// feasibility scan on a coarse grid, then bisection on each boundary.
inline bool toy_feasible(double alpha, double beta, double x) {
  const double tr = alpha + x, det = alpha * x - beta * beta;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return 0.5 * tr + disc <= 1.0 && 0.5 * tr - disc >= -1.0;
}

inline std::pair<double, double> toy_grid_scan(double alpha, double beta, double step = 1e-4) {
  double lo = 2.0, hi = -2.0;
  for (double x = -1.0; x <= 1.0 + 1e-12; x += step) {
    if (toy_feasible(alpha, beta, x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (lo > hi) return {lo, hi};
  auto refine = [&](double in, double out) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (in + out);
      (toy_feasible(alpha, beta, mid) ? in : out) = mid;
    }
    return in;
  };
  return {refine(lo, lo - step), refine(hi, hi + step)};
}

inline double rel_fro(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / (1.0 + b.norm()); }

}  // namespace fixtures
