#pragma once

// Dense complex Hermitian kernel: cyclic Jacobi eigensolver, positivity
// tests, square roots, pseudo-inverses and subspace bases.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strongmoment/error.hpp"

namespace strongmoment {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default numerical tolerances. Every operation takes its tolerance
/// explicitly; these are the values used when the caller does not override.
struct Tolerances {
  double htol = 1e-12;  // Hermitian symmetry, relative to 1 + max|a_ij|
  double psd = 1e-10;   // PSD slack, relative to 1 + ||A||_2
  double rank = 1e-10;  // numerical rank cutoff, relative to ||A||_2
};

struct EigDecomp {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

inline double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double hermitian_defect(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& a, double htol = Tolerances{}.htol) {
  if (a.rows() != a.cols()) return false;
  return hermitian_defect(a) <= htol * (1.0 + max_abs(a));
}

inline void require_hermitian(const CMatrix& a, double htol, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::NonHermitianInput, std::string(what) + ": matrix is not square");
  }
  if (!a.allFinite()) {
    throw Error(Errc::NonHermitianInput, std::string(what) + ": non-finite entry");
  }
  if (!is_hermitian(a, htol)) {
    throw Error(Errc::NonHermitianInput,
                std::string(what) + ": Hermitian defect " + std::to_string(hermitian_defect(a)));
  }
}

inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Cyclic-by-row Jacobi for complex Hermitian matrices. Each rotation first
/// removes the phase of a_pq, then applies a real Givens rotation. The sweep
/// order is fixed, so results are reproducible on a given platform.
inline EigDecomp herm_eig(const CMatrix& input, double htol = Tolerances{}.htol,
                          int max_sweeps = 100) {
  require_hermitian(input, htol, "herm_eig");
  const Index n = input.rows();
  CMatrix a = hermitian_part(input);
  CMatrix v = CMatrix::Identity(n, n);

  const double scale = a.norm();
  if (n > 0 && scale > 0.0) {
    auto off_norm = [&]() {
      double s = 0.0;
      for (Index q = 0; q < n; ++q)
        for (Index p = 0; p < q; ++p) s += std::norm(a(p, q));
      return std::sqrt(2.0 * s);
    };
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      if (off_norm() <= 1e-15 * scale) {
        converged = true;
        break;
      }
      for (Index p = 0; p < n - 1; ++p) {
        for (Index q = p + 1; q < n; ++q) {
          const cdouble apq = a(p, q);
          const double r = std::abs(apq);
          if (r <= 1e-300 || r <= 1e-18 * scale) continue;
          const cdouble phase = apq / r;
          const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          // J = diag-phase * real rotation, restricted to the (p, q) plane.
          const cdouble jpp = c;
          const cdouble jpq = s;
          const cdouble jqp = -s * std::conj(phase);
          const cdouble jqq = c * std::conj(phase);
          for (Index k = 0; k < n; ++k) {
            const cdouble akp = a(k, p), akq = a(k, q);
            a(k, p) = akp * jpp + akq * jqp;
            a(k, q) = akp * jpq + akq * jqq;
          }
          for (Index k = 0; k < n; ++k) {
            const cdouble apk = a(p, k), aqk = a(q, k);
            a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
            a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          a(p, p) = a(p, p).real();
          a(q, q) = a(q, q).real();
          for (Index k = 0; k < n; ++k) {
            const cdouble vkp = v(k, p), vkq = v(k, q);
            v(k, p) = vkp * jpp + vkq * jqp;
            v(k, q) = vkp * jpq + vkq * jqq;
          }
        }
      }
    }
    if (!converged && off_norm() > 1e-15 * scale) {
      throw Error(Errc::ConvergenceFailure,
                  "herm_eig: Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");
    }
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });
  EigDecomp out{RVector(n), CMatrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

inline double spectral_radius(const EigDecomp& e) {
  return e.values.size() == 0 ? 0.0 : std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

/// ||A||_2 for an arbitrary (not necessarily square) matrix.
inline double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const CMatrix gram = hermitian_part(a.adjoint() * a);
  return std::sqrt(std::max(0.0, herm_eig(gram, 1e-8).values.maxCoeff()));
}

struct PsdVerdict {
  bool is_psd = true;
  double min_eig = 0.0;
};

inline PsdVerdict psd_check(const CMatrix& a, double tol = Tolerances{}.psd,
                            double htol = Tolerances{}.htol) {
  if (a.size() == 0) return {};
  const EigDecomp e = herm_eig(a, htol);
  const double min_eig = e.values(0);
  return {min_eig >= -tol * (1.0 + spectral_radius(e)), min_eig};
}

/// Principal square root of a PSD matrix. Eigenvalues in [-tol·(1+||A||), 0)
/// are clamped to zero.
inline CMatrix herm_sqrt(const CMatrix& a, double tol = Tolerances{}.psd,
                         double htol = Tolerances{}.htol) {
  if (a.size() == 0) return CMatrix(a.rows(), a.cols());
  const EigDecomp e = herm_eig(a, htol);
  const double floor = -tol * (1.0 + spectral_radius(e));
  if (e.values(0) < floor) {
    throw Error(Errc::NotPSD, "herm_sqrt: eigenvalue " + std::to_string(e.values(0)));
  }
  RVector roots = e.values.unaryExpr([](double x) { return std::sqrt(std::max(0.0, x)); });
  return hermitian_part(e.vectors * roots.asDiagonal() * e.vectors.adjoint());
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix; eigenvalues with
/// |λ| <= rank_tol·||A||_2 are treated as zero.
inline CMatrix pinv_psd(const CMatrix& a, double rank_tol = Tolerances{}.rank,
                        double htol = Tolerances{}.htol) {
  if (a.size() == 0) return CMatrix(a.rows(), a.cols());
  const EigDecomp e = herm_eig(a, htol);
  const double cutoff = rank_tol * spectral_radius(e);
  RVector inv(e.values.size());
  for (Index i = 0; i < inv.size(); ++i) {
    const double x = e.values(i);
    inv(i) = (std::abs(x) > cutoff && x != 0.0) ? 1.0 / x : 0.0;
  }
  return hermitian_part(e.vectors * inv.asDiagonal() * e.vectors.adjoint());
}

/// Orthonormal basis of the span of the given columns, by modified
/// Gram-Schmidt with column pivoting and one reorthogonalization pass.
/// Columns whose residual drops to tol·max_j ||c_j|| or below are treated
/// as dependent; the returned column count is the numerical rank.
inline CMatrix orthonormal_basis(const CMatrix& cols, double tol = Tolerances{}.rank) {
  const Index d = cols.rows();
  const Index k = cols.cols();
  double ref = 0.0;
  for (Index j = 0; j < k; ++j) ref = std::max(ref, cols.col(j).norm());
  if (ref == 0.0 || d == 0) return CMatrix(d, 0);

  CMatrix work = cols;
  CMatrix q(d, std::min(d, k));
  std::vector<bool> used(static_cast<size_t>(k), false);
  Index r = 0;
  while (r < std::min(d, k)) {
    Index best = -1;
    double best_norm = 0.0;
    for (Index j = 0; j < k; ++j) {
      if (used[j]) continue;
      const double nj = work.col(j).norm();
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best < 0 || best_norm <= tol * ref) break;
    used[best] = true;
    CVector v = work.col(best) / best_norm;
    if (r > 0) {
      v -= q.leftCols(r) * (q.leftCols(r).adjoint() * v);
      const double nv = v.norm();
      if (nv <= 0.5) continue;  // lost to cancellation; column was dependent
      v /= nv;
    }
    q.col(r++) = v;
    for (Index j = 0; j < k; ++j) {
      if (!used[j]) work.col(j) -= v * v.dot(work.col(j));
    }
  }
  return q.leftCols(r);
}

/// Orthonormal basis of the orthogonal complement in C^d of the span of the
/// orthonormal columns `basis`.
inline CMatrix orthogonal_complement(const CMatrix& basis, Index d) {
  if (basis.cols() == 0) return CMatrix::Identity(d, d);
  const CMatrix proj = hermitian_part(basis * basis.adjoint());
  const EigDecomp e = herm_eig(proj, 1e-8);
  Index count = 0;
  while (count < d && e.values(count) < 0.5) ++count;
  return e.vectors.leftCols(count);
}

}  // namespace strongmoment
