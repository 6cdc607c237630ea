#pragma once

// Gram-space realization: coordinates of the elements x_k in a Hilbert space
// H = C^d whose Gram matrix is γ, the shift operator x_k -> x_{k+N} on the
// truncated span L', and the embedding G of C^N onto span{x_0..x_{N-1}}.
//
// Coordinates are chosen so that X^* X = γ, i.e. x_k^* x_l = γ_{k,l}. All
// matrix-valued quantities built from H below (measures, transforms) use the
// same ordering, e.g. S_n = G^* Â^n G.

#include <string>

#include "strongmoment/linalg.hpp"
#include "strongmoment/moments.hpp"

namespace strongmoment {

struct SpaceRep {
  Index block = 1;  // N
  int order = 0;    // m
  Index d = 0;      // dim H
  CMatrix x;        // d × (2m+1)N; column k + mN is x_k
  CMatrix gamma;
  double rank_tol = Tolerances{}.rank;

  [[nodiscard]] Index first_index() const noexcept { return -order * block; }
  [[nodiscard]] Index last_index() const noexcept { return order * block + block - 1; }
  [[nodiscard]] CVector element(Index k) const { return x.col(k + order * block); }
  /// Columns x_k for k in [-mN, mN-1]: the generators of L'.
  [[nodiscard]] CMatrix domain_generators() const { return x.leftCols(2 * order * block); }
  /// Their shifts x_{k+N}.
  [[nodiscard]] CMatrix shifted_generators() const { return x.rightCols(2 * order * block); }
};

/// Realize H from a PSD Gram matrix of size (2m+1)N. Eigen-directions with
/// eigenvalue <= rank_tol·||γ||_2 are treated as null (zero-norm classes).
inline SpaceRep build_space(const CMatrix& gamma, Index block, const Tolerances& tol = {}) {
  if (block <= 0 || gamma.rows() % block != 0 || (gamma.rows() / block) % 2 != 1) {
    throw Error(Errc::DimensionMismatch, "build_space: Gram size must be (2m+1)N");
  }
  SpaceRep s;
  s.block = block;
  s.order = static_cast<int>((gamma.rows() / block - 1) / 2);
  s.gamma = hermitian_part(gamma);
  s.rank_tol = tol.rank;

  const EigDecomp e = herm_eig(gamma, tol.htol);
  const double norm = spectral_radius(e);
  if (e.values(0) < -tol.psd * (1.0 + norm)) {
    throw Error(Errc::NotPSD, "build_space: Gram matrix has eigenvalue " + std::to_string(e.values(0)));
  }
  const double cutoff = tol.rank * norm;
  Index first = 0;
  while (first < e.values.size() && !(e.values(first) > cutoff)) ++first;
  s.d = e.values.size() - first;
  const RVector roots = e.values.tail(s.d).cwiseSqrt();
  s.x = roots.asDiagonal() * e.vectors.rightCols(s.d).adjoint();
  return s;
}

inline SpaceRep build_space(const MomentSequence& seq, const Tolerances& tol = {}) {
  return build_space(flatten_gram(seq), seq.dim(), tol);
}

/// Symmetric operator given on a subspace L' of H by its action on an
/// orthonormal basis of L'.
struct PartialHermitian {
  CMatrix domain_basis;  // d × p, orthonormal
  CMatrix action;        // d × p, images of the basis vectors
  double shift_residual = 0.0;
  double symmetry_defect = 0.0;
  double min_form = 0.0;  // smallest eigenvalue of the compressed form on L'

  [[nodiscard]] Index dim() const noexcept { return domain_basis.rows(); }
  /// d × d matrix equal to the operator on L' and zero on its complement.
  [[nodiscard]] CMatrix matrix() const { return action * domain_basis.adjoint(); }
  /// Compression to L'.
  [[nodiscard]] CMatrix compressed() const { return domain_basis.adjoint() * action; }
};

/// A_0 x_k = x_{k+N} for k in [-mN, mN-1], extended linearly to L'. The
/// least-squares residual of the defining relations doubles as the
/// well-definedness check.
inline PartialHermitian shift_operator(const SpaceRep& space, double shift_tol = 1e-9) {
  PartialHermitian a;
  const CMatrix dom = space.domain_generators();
  const CMatrix img = space.shifted_generators();
  a.domain_basis = orthonormal_basis(dom, space.rank_tol);
  const Index p = a.domain_basis.cols();
  if (p == 0) {
    a.action = CMatrix(space.d, 0);
    return a;
  }
  const CMatrix coeff = a.domain_basis.adjoint() * dom;  // dom ≈ Q·coeff
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(coeff);
  a.action = img * cod.pseudoInverse();

  a.shift_residual = (a.action * coeff - img).norm() / (1.0 + img.norm());
  if (!(a.shift_residual <= shift_tol)) {
    throw Error(Errc::InconsistentShift,
                "shift relations inconsistent, residual " + std::to_string(a.shift_residual));
  }
  const CMatrix m11 = a.compressed();
  a.symmetry_defect = hermitian_defect(m11);
  a.min_form = herm_eig(hermitian_part(m11), 1.0).values(0);
  return a;
}

/// G: C^N -> H with G e_k = x_k, k = 0..N-1. G^* G = S_0.
inline CMatrix embed_G(const SpaceRep& space) {
  return space.x.middleCols(space.order * space.block, space.block);
}

}  // namespace strongmoment
