#pragma once

// Truncated bilateral moment sequences, the block Hankel matrices built from
// them, and the solvability test.

#include <cmath>
#include <string>
#include <vector>

#include "strongmoment/linalg.hpp"

namespace strongmoment {

/// Hermitian N×N moments S_n for n in the window [-2m, 2m+1].
class MomentSequence {
 public:
  MomentSequence() = default;

  /// Zero sequence.
  MomentSequence(Index n, int order)
      : dim_(n), order_(order), moments_(static_cast<size_t>(4 * order + 2), CMatrix::Zero(n, n)) {
    if (n <= 0) throw Error(Errc::DimensionMismatch, "MomentSequence: N must be positive");
    if (order < 0) throw Error(Errc::OrderOutOfRange, "MomentSequence: m must be non-negative");
  }

  /// `moments[i]` holds S_{i-2m}; exactly 4m+2 entries.
  MomentSequence(Index n, int order, std::vector<CMatrix> moments, double htol = Tolerances{}.htol)
      : dim_(n), order_(order), moments_(std::move(moments)) {
    if (n <= 0) throw Error(Errc::DimensionMismatch, "MomentSequence: N must be positive");
    if (order < 0) throw Error(Errc::OrderOutOfRange, "MomentSequence: m must be non-negative");
    if (moments_.size() != static_cast<size_t>(4 * order + 2)) {
      throw Error(Errc::DimensionMismatch, "MomentSequence: window must hold 4m+2 matrices");
    }
    for (size_t i = 0; i < moments_.size(); ++i) {
      auto& s = moments_[i];
      if (s.rows() != n || s.cols() != n) {
        throw Error(Errc::DimensionMismatch, "MomentSequence: S_" + std::to_string(static_cast<int>(i) - 2 * order) +
                                                 " has wrong shape");
      }
      require_hermitian(s, htol, "MomentSequence");
      s = hermitian_part(s);
    }
  }

  [[nodiscard]] Index dim() const noexcept { return dim_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int min_index() const noexcept { return -2 * order_; }
  [[nodiscard]] int max_index() const noexcept { return 2 * order_ + 1; }
  [[nodiscard]] bool contains(int n) const noexcept { return n >= min_index() && n <= max_index(); }

  [[nodiscard]] const CMatrix& at(int n) const {
    if (!contains(n)) throw Error(Errc::OrderOutOfRange, "S_" + std::to_string(n) + " outside window");
    return moments_[static_cast<size_t>(n + 2 * order_)];
  }

  /// Replace S_n; the replacement must be Hermitian.
  void set(int n, const CMatrix& value, double htol = Tolerances{}.htol) {
    if (!contains(n)) throw Error(Errc::OrderOutOfRange, "S_" + std::to_string(n) + " outside window");
    if (value.rows() != dim_ || value.cols() != dim_) throw Error(Errc::DimensionMismatch, "set: wrong shape");
    require_hermitian(value, htol, "MomentSequence::set");
    moments_[static_cast<size_t>(n + 2 * order_)] = hermitian_part(value);
  }

  [[nodiscard]] const std::vector<CMatrix>& data() const noexcept { return moments_; }

 private:
  Index dim_ = 1;
  int order_ = 0;
  std::vector<CMatrix> moments_{CMatrix::Zero(1, 1), CMatrix::Zero(1, 1)};
};

struct Atom {
  double t = 1.0;
  CMatrix weight;
};

/// Finitely many atoms t_i > 0 with PSD weights W_i.
struct AtomicMeasure {
  Index dim = 1;
  std::vector<Atom> atoms;

  [[nodiscard]] bool empty() const noexcept { return atoms.empty(); }

  [[nodiscard]] CMatrix total_mass() const {
    CMatrix s = CMatrix::Zero(dim, dim);
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

/// Checks the AtomicMeasure invariants: positive strictly increasing atoms,
/// Hermitian PSD weights of the right shape.
inline void validate_measure(const AtomicMeasure& mu, const Tolerances& tol = {}) {
  double prev = 0.0;
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    const auto& a = mu.atoms[i];
    if (!(a.t > 0.0) || !std::isfinite(a.t)) {
      throw Error(Errc::AtomAtOrBelowZero, "atom " + std::to_string(i) + " at t=" + std::to_string(a.t));
    }
    if (i > 0 && !(a.t > prev)) {
      throw Error(Errc::DimensionMismatch, "atoms must be strictly increasing");
    }
    prev = a.t;
    if (a.weight.rows() != mu.dim || a.weight.cols() != mu.dim) {
      throw Error(Errc::DimensionMismatch, "atom weight has wrong shape");
    }
    if (!psd_check(a.weight, tol.psd, tol.htol).is_psd) {
      throw Error(Errc::NotPSD, "atom weight " + std::to_string(i) + " is not PSD");
    }
  }
}

/// S_n = Σ_i t_i^n W_i over the window [-2m, 2m+1].
inline MomentSequence moments_from_measure(const AtomicMeasure& mu, int order) {
  if (order < 0) throw Error(Errc::OrderOutOfRange, "moments_from_measure: m must be non-negative");
  for (const auto& a : mu.atoms) {
    if (!(a.t > 0.0)) throw Error(Errc::AtomAtOrBelowZero, "atom at t=" + std::to_string(a.t));
    if (a.weight.rows() != mu.dim || a.weight.cols() != mu.dim) {
      throw Error(Errc::DimensionMismatch, "atom weight has wrong shape");
    }
  }
  std::vector<CMatrix> s;
  s.reserve(static_cast<size_t>(4 * order + 2));
  for (int n = -2 * order; n <= 2 * order + 1; ++n) {
    CMatrix acc = CMatrix::Zero(mu.dim, mu.dim);
    for (const auto& a : mu.atoms) acc += std::pow(a.t, n) * hermitian_part(a.weight);
    s.push_back(hermitian_part(acc));
  }
  return MomentSequence(mu.dim, order, std::move(s));
}

namespace detail {
inline CMatrix hankel_block(const MomentSequence& seq, int n, int shift) {
  if (n < 0 || n > seq.order()) {
    throw Error(Errc::OrderOutOfRange, "block order " + std::to_string(n) + " outside [0, m]");
  }
  const Index dim = seq.dim();
  const Index size = (2 * n + 1) * dim;
  CMatrix g(size, size);
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      g.block((i + n) * dim, (j + n) * dim, dim, dim) = seq.at(i + j + shift);
  return g;
}
}  // namespace detail

/// Γ_n = (S_{i+j})_{i,j=-n..n}.
inline CMatrix build_gamma_block(const MomentSequence& seq, int n) { return detail::hankel_block(seq, n, 0); }

/// Γ̃_n = (S_{i+j+1})_{i,j=-n..n}.
inline CMatrix build_gamma_tilde_block(const MomentSequence& seq, int n) {
  return detail::hankel_block(seq, n, 1);
}

/// Flattened Gram matrix γ with γ_{rN+j, tN+l} = (S_{r+t})_{j,l} for flat
/// indices k in [-mN, mN+N-1]. Flat index k lives at row/column k + mN.
inline CMatrix flatten_gram(const MomentSequence& seq) {
  const Index dim = seq.dim();
  const int m = seq.order();
  const Index size = (2 * m + 1) * dim;
  CMatrix g(size, size);
  for (Index a = 0; a < size; ++a) {
    for (Index b = 0; b < size; ++b) {
      const Index ka = a - m * dim, kb = b - m * dim;
      // floor division for negative flat indices
      const Index ra = (ka >= 0 ? ka / dim : -((-ka + dim - 1) / dim));
      const Index rb = (kb >= 0 ? kb / dim : -((-kb + dim - 1) / dim));
      const Index ja = ka - ra * dim, jb = kb - rb * dim;
      g(a, b) = seq.at(static_cast<int>(ra + rb))(ja, jb);
    }
  }
  return g;
}

/// Row/column position of flat index k inside flatten_gram(seq).
inline Index flat_position(const MomentSequence& seq, Index k) { return k + seq.order() * seq.dim(); }

struct BlockVerdict {
  std::string name;  // "Gamma_n" or "GammaTilde_n"
  int n = 0;
  bool is_psd = true;
  double min_eig = 0.0;
};

struct SolvabilityReport {
  std::vector<BlockVerdict> gamma;
  std::vector<BlockVerdict> gamma_tilde;
  bool overall = true;

  /// Name of the first failing block, or empty.
  [[nodiscard]] std::string first_failure() const {
    for (size_t n = 0; n < gamma.size(); ++n) {
      if (!gamma[n].is_psd) return gamma[n].name;
      if (n < gamma_tilde.size() && !gamma_tilde[n].is_psd) return gamma_tilde[n].name;
    }
    return {};
  }
};

/// Γ_n ≥ 0 and Γ̃_n ≥ 0 for every n in [0, m], each block judged with a
/// tolerance relative to its own norm.
inline SolvabilityReport check_solvable(const MomentSequence& seq, double tol = Tolerances{}.psd) {
  SolvabilityReport rep;
  for (int n = 0; n <= seq.order(); ++n) {
    const auto g = psd_check(build_gamma_block(seq, n), tol);
    const auto gt = psd_check(build_gamma_tilde_block(seq, n), tol);
    rep.gamma.push_back({"Gamma_" + std::to_string(n), n, g.is_psd, g.min_eig});
    rep.gamma_tilde.push_back({"GammaTilde_" + std::to_string(n), n, gt.is_psd, gt.min_eig});
    rep.overall = rep.overall && g.is_psd && gt.is_psd;
  }
  return rep;
}

}  // namespace strongmoment
