#pragma once

// Cayley transform of the shift operator, the interval [T^μ, T^M] of
// self-adjoint contractive extensions inside H, canonical extensions
// parameterized by constant K, and the inverse Cayley transform.

#include <algorithm>
#include <string>
#include <vector>

#include "strongmoment/gns.hpp"
#include "strongmoment/linalg.hpp"

namespace strongmoment {

/// Hermitian contraction T given on a subspace 𝒟 ⊂ H by its action on an
/// orthonormal basis of 𝒟. ℛ = H ⊖ 𝒟 is spanned by complement_basis.
struct ContractionWithDomain {
  CMatrix domain_basis;      // d × p
  CMatrix action;            // d × p
  CMatrix complement_basis;  // d × (d - p)
  double norm = 0.0;
  double symmetry_defect = 0.0;

  [[nodiscard]] Index dim() const noexcept { return domain_basis.rows(); }
  [[nodiscard]] Index domain_dim() const noexcept { return domain_basis.cols(); }
  [[nodiscard]] Index defect_dim() const noexcept { return complement_basis.cols(); }
};

struct ExtensionTolerances {
  double contraction = 1e-10;  // ||T|| <= 1 + contraction
  double rank = 1e-10;         // pseudo-inverse cutoff for E ± A11
  double range = 1e-8;         // range-condition residual before a warning is raised
  double null = 1e-10;         // eigenvalues of C|ℛ at or below this span ℛ_0
  double deflate = 1e-10;      // |1 + λ| below this deflates a T̃ eigenvalue
  double kernel = 1e-10;       // |1 - λ| below this marks Ker Â ≠ {0}
  double k_interval = 1e-10;   // slack on 0 <= K <= E
};

/// T((A_0 + E) f) = (E - A_0) f on 𝒟 = (A_0 + E) L'.
inline ContractionWithDomain cayley(const PartialHermitian& a0, const ExtensionTolerances& tol = {}) {
  const Index d = a0.dim();
  const Index p = a0.domain_basis.cols();
  ContractionWithDomain t;
  if (p == 0) {
    t.domain_basis = CMatrix(d, 0);
    t.action = CMatrix(d, 0);
    t.complement_basis = CMatrix::Identity(d, d);
    return t;
  }
  const CMatrix sum = a0.action + a0.domain_basis;   // (A_0 + E) Q
  const CMatrix diff = a0.domain_basis - a0.action;  // (E - A_0) Q
  t.domain_basis = orthonormal_basis(sum, tol.rank);
  if (t.domain_basis.cols() < p) {
    throw Error(Errc::DegenerateDomain, "A_0 + E is not injective on L'");
  }
  const CMatrix coords = t.domain_basis.adjoint() * sum;  // sum = U·coords, coords invertible
  t.action = diff * coords.partialPivLu().inverse();
  t.norm = operator_norm(t.action);
  t.symmetry_defect = hermitian_defect(t.domain_basis.adjoint() * t.action);
  t.complement_basis = orthogonal_complement(t.domain_basis, d);
  if (t.norm > 1.0 + tol.contraction) {
    throw Error(Errc::NotContraction, "Cayley transform has norm " + std::to_string(t.norm));
  }
  return t;
}

struct ExtensionInterval {
  CMatrix t_mu;      // minimal extension T^μ
  CMatrix t_max;     // maximal extension T^M
  CMatrix c;         // T^M - T^μ, PSD, supported on ℛ
  CMatrix c_sqrt;
  CMatrix r0_basis;  // ℛ_0: null directions of C inside ℛ
  CMatrix re_basis;  // ℛ_e = ℛ ⊖ ℛ_0
  RVector c_spectrum;  // eigenvalues of C restricted to ℛ, ascending
  double cond_c = 1.0;  // condition number of C on ℛ_e
  double range_residual = 0.0;
  EigDecomp t_mu_eig;
  std::vector<Warning> warnings;

  [[nodiscard]] Index dim() const noexcept { return t_mu.rows(); }
  [[nodiscard]] Index reduced_defect_dim() const noexcept { return re_basis.cols(); }
};

namespace detail {
inline CMatrix assemble_extension(const CMatrix& u, const CMatrix& v, const CMatrix& a11, const CMatrix& a21,
                                  const CMatrix& free_block) {
  CMatrix t = u * a11 * u.adjoint();
  if (v.cols() > 0) {
    const CMatrix off = v * a21 * u.adjoint();
    t += off + off.adjoint() + v * free_block * v.adjoint();
  }
  return hermitian_part(t);
}

inline double range_defect(const CMatrix& a21, const CMatrix& m, const CMatrix& m_pinv) {
  if (a21.size() == 0) return 0.0;
  const Index p = m.rows();
  const CMatrix leak = a21 * (CMatrix::Identity(p, p) - m_pinv * m);
  return leak.norm();
}
}  // namespace detail

/// Minimal and maximal self-adjoint contractive extensions. With
/// A11 = P_𝒟 T|_𝒟 and A21 = P_ℛ T|_𝒟 the free ℛ-block ranges over
///   X_min = -E + A21 (E + A11)^+ A21^*  ≤  X  ≤  E - A21 (E - A11)^+ A21^* = X_max,
/// the Schur-complement conditions for E ± T̃ ≥ 0.
inline ExtensionInterval extremal_extensions(const ContractionWithDomain& t, const ExtensionTolerances& tol = {}) {
  if (t.norm > 1.0 + tol.contraction) {
    throw Error(Errc::NotContraction, "extremal_extensions: ||T|| = " + std::to_string(t.norm));
  }
  const Index d = t.dim();
  const Index p = t.domain_dim();
  const Index q = t.defect_dim();
  const CMatrix& u = t.domain_basis;
  const CMatrix& v = t.complement_basis;
  const CMatrix a11 = hermitian_part(u.adjoint() * t.action);
  const CMatrix a21 = v.adjoint() * t.action;

  ExtensionInterval out;
  CMatrix x_min = CMatrix::Zero(q, q);
  CMatrix x_max = CMatrix::Zero(q, q);
  if (q > 0) {
    const CMatrix eye_p = CMatrix::Identity(p, p);
    const CMatrix eye_q = CMatrix::Identity(q, q);
    const CMatrix plus = eye_p + a11;
    const CMatrix minus = eye_p - a11;
    const CMatrix plus_pinv = pinv_psd(plus, tol.rank, 1e-8);
    const CMatrix minus_pinv = pinv_psd(minus, tol.rank, 1e-8);
    out.range_residual = std::max(detail::range_defect(a21, plus, plus_pinv),
                                  detail::range_defect(a21, minus, minus_pinv));
    if (out.range_residual > tol.range) add_warning(out.warnings, Warning::RangeConditionViolated);
    x_min = hermitian_part(-eye_q + a21 * plus_pinv * a21.adjoint());
    x_max = hermitian_part(eye_q - a21 * minus_pinv * a21.adjoint());
  }
  out.t_mu = detail::assemble_extension(u, v, a11, a21, x_min);
  out.t_max = detail::assemble_extension(u, v, a11, a21, x_max);
  out.t_mu_eig = herm_eig(out.t_mu, 1e-8);

  if (q == 0) {
    out.c = CMatrix::Zero(d, d);
    out.c_sqrt = CMatrix::Zero(d, d);
    out.r0_basis = CMatrix(d, 0);
    out.re_basis = CMatrix(d, 0);
    out.c_spectrum = RVector(0);
    return out;
  }
  const CMatrix gap = hermitian_part(x_max - x_min);
  const EigDecomp ge = herm_eig(gap, 1e-8);
  out.c_spectrum = ge.values;
  Index null_count = 0;
  while (null_count < q && ge.values(null_count) <= tol.null) ++null_count;
  const RVector roots = ge.values.unaryExpr([](double x) { return std::sqrt(std::max(0.0, x)); });
  out.c = hermitian_part(v * gap * v.adjoint());
  out.c_sqrt = hermitian_part(v * ge.vectors * roots.asDiagonal() * ge.vectors.adjoint() * v.adjoint());
  out.r0_basis = v * ge.vectors.leftCols(null_count);
  out.re_basis = v * ge.vectors.rightCols(q - null_count);
  if (q > null_count) {
    out.cond_c = ge.values(q - 1) / ge.values(null_count);
    if (out.cond_c > 1e8) add_warning(out.warnings, Warning::IllConditionedDefect);
  }
  return out;
}

/// T_e: T on 𝒟 and T^μ on ℛ_0. Its defect space is ℛ_e.
struct ExtendedContraction {
  ContractionWithDomain te;
  CMatrix re_basis;
  double cond_c = 1.0;
};

inline ExtendedContraction extend_operator_e(const ExtensionInterval& interval, const ContractionWithDomain& t) {
  ExtendedContraction out;
  const Index d = t.dim();
  const Index p = t.domain_dim();
  const Index r0 = interval.r0_basis.cols();
  out.te.domain_basis.resize(d, p + r0);
  out.te.domain_basis << t.domain_basis, interval.r0_basis;
  out.te.action.resize(d, p + r0);
  out.te.action << t.action, interval.t_mu * interval.r0_basis;
  out.te.complement_basis = interval.re_basis;
  out.te.norm = operator_norm(out.te.action);
  out.te.symmetry_defect = hermitian_defect(out.te.domain_basis.adjoint() * out.te.action);
  out.re_basis = interval.re_basis;
  out.cond_c = interval.cond_c;
  return out;
}

namespace detail {
inline void require_off_spectrum(const EigDecomp& e, cdouble z, double gap, Errc code, const char* what) {
  for (Index i = 0; i < e.values.size(); ++i) {
    if (std::abs(cdouble(e.values(i)) - z) < gap) {
      throw Error(code, std::string(what) + ": z within " + std::to_string(gap) + " of eigenvalue " +
                            std::to_string(e.values(i)));
    }
  }
}

inline CMatrix resolvent(const CMatrix& a, cdouble z) {
  const Index d = a.rows();
  return (a - z * CMatrix::Identity(d, d)).partialPivLu().inverse();
}
}  // namespace detail

/// Q_μ(z) = compression to ℛ_e of C^{1/2} (T^μ - z)^{-1} C^{1/2} + E.
inline CMatrix q_mu(const ExtensionInterval& interval, cdouble z) {
  const Index qe = interval.reduced_defect_dim();
  if (qe == 0) return CMatrix(0, 0);
  detail::require_off_spectrum(interval.t_mu_eig, z, 1e-12, Errc::SpectrumHit, "q_mu");
  const CMatrix r = detail::resolvent(interval.t_mu, z);
  const CMatrix& w = interval.re_basis;
  return w.adjoint() * interval.c_sqrt * r * interval.c_sqrt * w + CMatrix::Identity(qe, qe);
}

/// T̃_K = T^μ + C^{1/2} K C^{1/2}, with K acting on ℛ_e and 0 <= K <= E.
inline CMatrix canonical_extension(const ExtensionInterval& interval, const CMatrix& k,
                                   const ExtensionTolerances& tol = {}) {
  const Index qe = interval.reduced_defect_dim();
  if (k.rows() != qe || k.cols() != qe) {
    throw Error(Errc::KOutOfInterval, "K must be " + std::to_string(qe) + "x" + std::to_string(qe));
  }
  if (qe == 0) return interval.t_mu;
  if (!is_hermitian(k, 1e-10)) throw Error(Errc::KOutOfInterval, "K is not Hermitian");
  const EigDecomp ke = herm_eig(k, 1e-10);
  if (ke.values(0) < -tol.k_interval || ke.values(qe - 1) > 1.0 + tol.k_interval) {
    throw Error(Errc::KOutOfInterval, "K spectrum [" + std::to_string(ke.values(0)) + ", " +
                                          std::to_string(ke.values(qe - 1)) + "] not inside [0, 1]");
  }
  const CMatrix& w = interval.re_basis;
  return hermitian_part(interval.t_mu + interval.c_sqrt * w * hermitian_part(k) * w.adjoint() * interval.c_sqrt);
}

/// Â = -E + 2 (E + T̃)^{-1}, on the subspace where E + T̃ is invertible.
struct CayleyInverse {
  CMatrix a_hat;           // d × d, zero on deflated directions
  CMatrix retained_basis;  // d × r
  CMatrix a_retained;      // r × r, Â in retained coordinates
  CMatrix deflated_basis;  // d × (d - r), eigenvectors of T̃ for eigenvalue -1
  bool kernel = false;     // Â has a kernel (T̃ eigenvalue +1)
  double min_eigenvalue = 0.0;  // smallest eigenvalue of T̃

  [[nodiscard]] Index deflated() const noexcept { return deflated_basis.cols(); }
};

inline CayleyInverse inverse_cayley(const CMatrix& t_tilde, const ExtensionTolerances& tol = {}) {
  const Index d = t_tilde.rows();
  CayleyInverse out;
  const EigDecomp e = herm_eig(t_tilde, 1e-8);
  Index deflated = 0;
  while (deflated < d && e.values(deflated) + 1.0 <= tol.deflate) ++deflated;
  const Index r = d - deflated;
  out.deflated_basis = e.vectors.leftCols(deflated);
  out.retained_basis = e.vectors.rightCols(r);
  out.kernel = r > 0 && 1.0 - e.values(d - 1) <= tol.kernel;
  out.min_eigenvalue = d > 0 ? e.values(0) : 0.0;
  if (r == 0) {
    out.a_hat = CMatrix::Zero(d, d);
    out.a_retained = CMatrix(0, 0);
    return out;
  }
  const CMatrix& w = out.retained_basis;
  const CMatrix shifted = w.adjoint() * (t_tilde + CMatrix::Identity(d, d)) * w;
  out.a_retained = hermitian_part(-CMatrix::Identity(r, r) + 2.0 * shifted.partialPivLu().inverse());
  out.a_hat = hermitian_part(w * out.a_retained * w.adjoint());
  return out;
}

/// T = -E + 2 (E + A)^{-1} for a non-negative Hermitian A (forward map on a
/// full space, used to close the Cayley round trip).
inline CMatrix cayley_full(const CMatrix& a) {
  const Index n = a.rows();
  const CMatrix eye = CMatrix::Identity(n, n);
  return hermitian_part(-eye + 2.0 * (eye + a).partialPivLu().inverse());
}

struct DeterminacyVerdict {
  bool determinate = true;
  double norm_c = 0.0;
};

/// Determinate iff T^μ = T^M, judged as ||C||_2 <= tol·(1 + ||T^μ||_2).
inline DeterminacyVerdict is_determinate(const ExtensionInterval& interval, double tol = 1e-10) {
  const double norm_c = interval.c_spectrum.size() == 0 ? 0.0 : std::max(0.0, interval.c_spectrum.maxCoeff());
  return {norm_c <= tol * (1.0 + spectral_radius(interval.t_mu_eig)), norm_c};
}

/// Canonical parameter choices on ℛ_e.
inline CMatrix k_minimal(const ExtensionInterval& interval) {
  const Index qe = interval.reduced_defect_dim();
  return CMatrix::Zero(qe, qe);
}
inline CMatrix k_maximal(const ExtensionInterval& interval) {
  const Index qe = interval.reduced_defect_dim();
  return CMatrix::Identity(qe, qe);
}
inline CMatrix k_midpoint(const ExtensionInterval& interval) { return 0.5 * k_maximal(interval); }

}  // namespace strongmoment
