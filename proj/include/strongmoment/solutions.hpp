#pragma once

// The parameterized family of solution measures: end-to-end problem setup,
// the matrix Stieltjes transform of the solution for a constant parameter K
// (by the coefficient formula and directly from the spectral decomposition),
// atom extraction, Stieltjes-Perron inversion and moment round trips.
//
// Convention: F(z) = ∫ dM(t)/(t - z) with F(z)[j][n] = ∫ 1/(t-z) dm_{j,n}(t)
// = (G^*(Â_K - z)^{-1} G)_{j,n} and M(t) = G^* E_t G. The matrix printed on
// the right of the coefficient formula in the literature is the transpose of
// this one; both routes here use the ordering above.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "strongmoment/extensions.hpp"
#include "strongmoment/gns.hpp"
#include "strongmoment/moments.hpp"

namespace strongmoment {

struct AnalyzeOptions {
  Tolerances tol;
  double shift_tol = 1e-9;
  ExtensionTolerances ext;
  double determinacy_tol = 1e-10;
};

/// Everything downstream of a solvable moment sequence that does not depend
/// on the parameter K.
struct Problem {
  MomentSequence seq;
  SolvabilityReport solvability;
  SpaceRep space;
  PartialHermitian a0;
  ContractionWithDomain t;
  ExtensionInterval interval;
  CMatrix g;
  DeterminacyVerdict determinacy;

  [[nodiscard]] Index reduced_defect_dim() const noexcept { return interval.reduced_defect_dim(); }
};

inline Problem analyze(const MomentSequence& seq, const AnalyzeOptions& opts = {}) {
  Problem p;
  p.seq = seq;
  p.solvability = check_solvable(seq, opts.tol.psd);
  if (!p.solvability.overall) {
    throw Error(Errc::NotSolvable, "block " + p.solvability.first_failure() + " is not PSD");
  }
  p.space = build_space(seq, opts.tol);
  p.a0 = shift_operator(p.space, opts.shift_tol);
  p.t = cayley(p.a0, opts.ext);
  p.interval = extremal_extensions(p.t, opts.ext);
  p.g = embed_G(p.space);
  p.determinacy = is_determinate(p.interval, opts.determinacy_tol);
  return p;
}

/// A recovered solution: atoms and weights plus where they came from.
struct SolutionMeasure {
  AtomicMeasure measure;
  std::string label;  // parameter or method that produced it
  std::vector<Warning> warnings;
  Index deflated = 0;       // directions removed because T̃ had eigenvalue -1
  Index dropped_atoms = 0;  // eigenvalues whose weight was numerically zero
};

/// Evaluates the Stieltjes transform of the solution measure attached to a
/// constant parameter K. Immutable after construction; safe to share across
/// threads.
class TransformEvaluator {
 public:
  TransformEvaluator(const Problem& problem, const CMatrix& k, std::string label = "K",
                     const ExtensionTolerances& tol = {})
      : g_(problem.g), interval_(problem.interval), k_(k), label_(std::move(label)) {
    t_tilde_ = canonical_extension(interval_, k_, tol);
    inverse_ = inverse_cayley(t_tilde_, tol);
    warnings_ = interval_.warnings;
    if (inverse_.kernel) add_warning(warnings_, Warning::KernelWarning);
    // H ⊖ L' is spanned by the deflated directions whenever there are any,
    // so some generator always has mass there.
    if (inverse_.deflated() > 0) add_warning(warnings_, Warning::DeflatedMass);
    const Index r = inverse_.a_retained.rows();
    if (r > 0) {
      const EigDecomp e = herm_eig(inverse_.a_retained, 1e-8);
      spectrum_ = e.values;
      projected_ = g_.adjoint() * inverse_.retained_basis * e.vectors;  // N × r, column i = G^* v_i
    } else {
      spectrum_ = RVector(0);
      projected_ = CMatrix(g_.cols(), 0);
    }
  }

  [[nodiscard]] Index block() const noexcept { return g_.cols(); }
  [[nodiscard]] const CMatrix& g() const noexcept { return g_; }
  [[nodiscard]] const ExtensionInterval& interval() const noexcept { return interval_; }
  [[nodiscard]] const CMatrix& k() const noexcept { return k_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] const CMatrix& t_tilde() const noexcept { return t_tilde_; }
  [[nodiscard]] const CayleyInverse& a_hat() const noexcept { return inverse_; }
  [[nodiscard]] const RVector& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] const CMatrix& projected_vectors() const noexcept { return projected_; }
  [[nodiscard]] const std::vector<Warning>& warnings() const noexcept { return warnings_; }

 private:
  CMatrix g_;
  ExtensionInterval interval_;
  CMatrix k_;
  std::string label_;
  CMatrix t_tilde_;
  CayleyInverse inverse_;
  RVector spectrum_;
  CMatrix projected_;
  std::vector<Warning> warnings_;
};

namespace detail {
inline void require_transform_point(cdouble z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(Errc::PoleHit, "non-finite z");
  if (z.imag() == 0.0 && z.real() >= 0.0) throw Error(Errc::PoleHit, "z on the support half-line [0, inf)");
  if (std::abs(1.0 + z) < 1e-8) throw Error(Errc::PoleHit, "z too close to -1");
}
}  // namespace detail

/// F(z) = 𝒜(z) + 𝒞(z) K (E + 𝒟(z) K)^{-1} ℬ(z) where, with ζ = (1-z)/(1+z)
/// and R = (T^μ - ζ)^{-1},
///   𝒜 = -2/(z+1)^2 G^* R G - 1/(z+1) G^* G,   ℬ = C^{1/2} R G |_{ℛ_e},
///   𝒞 = 2/(z+1)^2 G^* R C^{1/2},              𝒟 = Q_μ(ζ) - E.
/// The correction enters with a plus sign: that is what the Woodbury form
/// of the canonical resolvent gives after the Cayley change of variable.
inline CMatrix transform_formula(const TransformEvaluator& ev, cdouble z) {
  detail::require_transform_point(z);
  const ExtensionInterval& iv = ev.interval();
  const CMatrix& g = ev.g();
  const cdouble zeta = (1.0 - z) / (1.0 + z);
  detail::require_off_spectrum(iv.t_mu_eig, zeta, 1e-12, Errc::PoleHit, "transform_formula");
  const CMatrix r = detail::resolvent(iv.t_mu, zeta);
  const cdouble s = 1.0 / (z + 1.0);
  const CMatrix rg = r * g;
  CMatrix f = -2.0 * s * s * (g.adjoint() * rg) - s * (g.adjoint() * g);
  const Index qe = iv.reduced_defect_dim();
  if (qe == 0) return f;

  const CMatrix half = iv.c_sqrt * iv.re_basis;  // C^{1/2} restricted to ℛ_e
  const CMatrix b = half.adjoint() * rg;
  const CMatrix c = 2.0 * s * s * (g.adjoint() * r * half);
  const CMatrix dm = half.adjoint() * r * half;
  const CMatrix inner = CMatrix::Identity(qe, qe) + dm * ev.k();
  const Eigen::PartialPivLU<CMatrix> lu(inner);
  if (lu.rcond() < 1e-12) {
    throw Error(Errc::SingularInnerInverse, "E + D(z)K has reciprocal condition " + std::to_string(lu.rcond()));
  }
  f += c * ev.k() * lu.solve(b);
  return f;
}

/// F(z) = G^* (Â_K - z)^{-1} G from the spectral decomposition of Â_K.
inline CMatrix transform_direct(const TransformEvaluator& ev, cdouble z) {
  detail::require_transform_point(z);
  const RVector& lam = ev.spectrum();
  const CMatrix& gv = ev.projected_vectors();
  CMatrix f = CMatrix::Zero(ev.block(), ev.block());
  for (Index i = 0; i < lam.size(); ++i) {
    const cdouble denom = lam(i) - z;
    if (std::abs(denom) < 1e-12) throw Error(Errc::PoleHit, "z hits an atom of the solution");
    f += (gv.col(i) * gv.col(i).adjoint()) / denom;
  }
  return f;
}

struct MeasureOptions {
  double merge_tol = 1e-8;  // relative to 1 + spectral radius
  double drop_tol = 1e-12;  // weight norm relative to 1 + ||S_0||
};

/// Atoms at the eigenvalues of Â_K with weights G^* P_i G.
inline SolutionMeasure spectral_measure_direct(const TransformEvaluator& ev, const MeasureOptions& opt = {}) {
  SolutionMeasure out;
  out.label = ev.label();
  out.warnings = ev.warnings();
  out.deflated = ev.a_hat().deflated();
  out.measure.dim = ev.block();
  const RVector& lam = ev.spectrum();
  const CMatrix& gv = ev.projected_vectors();
  const double radius = lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0;
  const double merge = opt.merge_tol * (1.0 + radius);
  const double drop = opt.drop_tol * (1.0 + (ev.g().adjoint() * ev.g()).norm());
  Index i = 0;
  while (i < lam.size()) {
    Index j = i;
    CMatrix w = CMatrix::Zero(ev.block(), ev.block());
    double t_sum = 0.0;
    while (j < lam.size() && lam(j) - lam(i) <= merge) {
      w += gv.col(j) * gv.col(j).adjoint();
      t_sum += lam(j);
      ++j;
    }
    if (w.norm() > drop) {
      out.measure.atoms.push_back({t_sum / static_cast<double>(j - i), hermitian_part(w)});
    } else {
      out.dropped_atoms += j - i;
    }
    i = j;
  }
  return out;
}

using TransformFn = std::function<CMatrix(cdouble)>;

inline CMatrix imaginary_part(const CMatrix& f) {
  return (f - f.adjoint()) / cdouble(0.0, 2.0);
}

/// True iff (F(z) - F(z)^*)/(2i) >= -tol·(1 + ||F(z)||) at every grid point
/// with Im z > 0.
inline bool herglotz_check(const TransformFn& f, const std::vector<cdouble>& grid, double tol = 1e-9) {
  for (cdouble z : grid) {
    if (!(z.imag() > 0.0)) continue;
    const CMatrix fz = f(z);
    const CMatrix im = hermitian_part(imaginary_part(fz));
    if (im.size() == 0) continue;
    if (herm_eig(im, 1.0).values(0) < -tol * (1.0 + fz.norm())) return false;
  }
  return true;
}

struct PerronOptions {
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  double grid_factor = 0.25;     // coarse grid spacing as a fraction of eps[0]
  double min_weight_rel = 1e-6;  // atoms with trace weight below this fraction of the total are ignored
  double herglotz_tol = 1e-9;
  bool extrapolate = true;  // two-point linear extrapolation in ε over the last two levels
};

namespace detail {
inline double golden_max(const std::function<double(double)>& g, double lo, double hi, double xtol) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = g(x1);
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// Stieltjes-Perron recovery of an atomic measure from its transform on
/// [lo, hi]: atoms are the peaks of tr Im F(t + iε) found on a coarse grid
/// and sharpened as ε decreases; weights are lim ε·Im F(t_0 + iε).
inline SolutionMeasure perron_invert(const TransformFn& f, Index block, double lo, double hi,
                                     const PerronOptions& opt = {}) {
  if (opt.eps.empty()) throw Error(Errc::DimensionMismatch, "perron_invert: empty eps schedule");
  SolutionMeasure out;
  out.label = "perron";
  out.measure.dim = block;

  auto im_at = [&](double t, double eps) {
    const CMatrix fz = f(cdouble(t, eps));
    return CMatrix(hermitian_part(imaginary_part(fz)));
  };
  auto trace_im = [&](double t, double eps) { return im_at(t, eps).trace().real(); };

  const double y_far = 1e6 * (1.0 + std::abs(hi) + std::abs(lo));
  const cdouble z_far(0.0, y_far);
  const double total = (-z_far * f(z_far)).trace().real();

  const double eps0 = opt.eps.front();
  const double h = opt.grid_factor * eps0;
  const auto count = static_cast<Index>(std::ceil((hi - lo) / h)) + 1;
  std::vector<double> ts(static_cast<size_t>(count)), gs(static_cast<size_t>(count));
  for (Index k = 0; k < count; ++k) {
    const double t = std::min(hi, lo + static_cast<double>(k) * h);
    const CMatrix fz = f(cdouble(t, eps0));
    const CMatrix im = hermitian_part(imaginary_part(fz));
    if (herm_eig(im, 1.0).values(0) < -opt.herglotz_tol * (1.0 + fz.norm())) {
      throw Error(Errc::NonHerglotz, "Im F has a negative eigenvalue at t=" + std::to_string(t));
    }
    ts[k] = t;
    gs[k] = im.trace().real();
  }

  if (!(total > 0.0)) return out;
  const double threshold = opt.min_weight_rel * total;

  std::vector<double> located;
  for (Index k = 0; k < count; ++k) {
    const double left = k > 0 ? gs[k - 1] : -std::numeric_limits<double>::infinity();
    const double right = k + 1 < count ? gs[k + 1] : -std::numeric_limits<double>::infinity();
    if (!(gs[k] >= left && gs[k] > right)) continue;
    if (eps0 * gs[k] < threshold) continue;

    // Level 0 brackets the grid neighbours; later levels search ±4ε around
    // the previous peak.
    double center = ts[k];
    for (size_t level = 0; level < opt.eps.size(); ++level) {
      const double eps = opt.eps[level];
      const double half = level == 0 ? h : 4.0 * eps;
      const double a = std::max(lo, center - half), b = std::min(hi, center + half);
      center = detail::golden_max([&](double t) { return trace_im(t, eps); }, a, b, 1e-4 * eps);
    }
    bool duplicate = false;
    for (double prev : located) duplicate = duplicate || std::abs(prev - center) < 10.0 * opt.eps.back();
    if (!duplicate) located.push_back(center);
  }
  std::sort(located.begin(), located.end());

  for (double t0 : located) {
    std::vector<CMatrix> ws;
    for (double eps : opt.eps) ws.push_back(eps * im_at(t0, eps));
    CMatrix w = ws.back();
    if (opt.extrapolate && ws.size() >= 2) {
      const double e1 = opt.eps[opt.eps.size() - 2], e2 = opt.eps.back();
      w = (e1 * ws.back() - e2 * ws[ws.size() - 2]) / (e1 - e2);
    }
    w = hermitian_part(w);
    if (w.trace().real() >= threshold) out.measure.atoms.push_back({t0, w});
  }
  return out;
}

struct MomentResidual {
  int n = 0;
  double residual = 0.0;
  bool skipped = false;
};

struct ResidualReport {
  std::vector<MomentResidual> rows;  // every n in [-2m, 2m+1]
  double max_residual = 0.0;         // over non-skipped n in [-2m, 2m]
  double top_residual = 0.0;         // n = 2m+1, reported only
  bool negative_skipped = false;
  std::vector<Warning> warnings;
};

/// residual_n = ||Σ t_i^n W_i - S_n||_F / (1 + ||S_n||_F).
inline ResidualReport roundtrip_verify(const SolutionMeasure& mu, const MomentSequence& seq) {
  ResidualReport rep;
  rep.warnings = mu.warnings;
  bool skip_negative = has_warning(mu.warnings, Warning::KernelWarning);
  for (const auto& a : mu.measure.atoms) skip_negative = skip_negative || !(a.t > 0.0);
  if (skip_negative) add_warning(rep.warnings, Warning::KernelWarning);
  rep.negative_skipped = skip_negative;

  const int m = seq.order();
  for (int n = seq.min_index(); n <= seq.max_index(); ++n) {
    MomentResidual row{n, 0.0, n < 0 && skip_negative};
    if (!row.skipped) {
      CMatrix acc = CMatrix::Zero(seq.dim(), seq.dim());
      for (const auto& a : mu.measure.atoms) acc += std::pow(a.t, n) * a.weight;
      row.residual = (acc - seq.at(n)).norm() / (1.0 + seq.at(n).norm());
      if (n == 2 * m + 1) {
        rep.top_residual = row.residual;
      } else {
        rep.max_residual = std::max(rep.max_residual, row.residual);
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

struct MeasureDistance {
  bool same_count = true;
  double atom = 0.0;    // max |t_i - s_i|
  double weight = 0.0;  // max ||W_i - V_i||_F
};

/// Atom-by-atom distance between two measures with sorted atoms.
inline MeasureDistance measure_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
  MeasureDistance d;
  if (a.atoms.size() != b.atoms.size()) {
    d.same_count = false;
    d.atom = d.weight = std::numeric_limits<double>::infinity();
    return d;
  }
  for (size_t i = 0; i < a.atoms.size(); ++i) {
    d.atom = std::max(d.atom, std::abs(a.atoms[i].t - b.atoms[i].t));
    d.weight = std::max(d.weight, (a.atoms[i].weight - b.atoms[i].weight).norm());
  }
  return d;
}

}  // namespace strongmoment
