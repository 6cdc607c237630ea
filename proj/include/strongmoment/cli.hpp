#pragma once

// Pipeline commands behind the strongmoment executable. Each command returns
// a Report; exit codes live in Report::exit_code.
//   0 success, 1 other failure, 2 not solvable, 3 warning escalated by
//   strict mode, 4 parse error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "strongmoment/io.hpp"
#include "strongmoment/solutions.hpp"

namespace strongmoment {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitNotSolvable = 2,
  kExitStrict = 3,
  kExitParse = 4,
};

struct CliOptions {
  std::string k_spec = "mid";      // comma separated: mu, M, mid or a matrix file
  std::string invert = "spectral"; // spectral, perron, both
  double tol = Tolerances{}.psd;
  bool strict = false;
  int jobs = 1;
  int m = 1;  // order used by `example`
  double residual_tol = 1e-6;
};

namespace detail {

inline AnalyzeOptions analyze_options(const CliOptions& o) {
  AnalyzeOptions a;
  a.tol.psd = o.tol;
  return a;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<std::string> warning_names(const std::vector<Warning>& ws) {
  std::vector<std::string> out;
  for (auto w : ws) out.emplace_back(to_string(w));
  return out;
}

inline void merge_names(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

inline CMatrix k_from_file(const std::string& path) {
  const json doc = read_json_file(path);
  if (doc.is_object()) {
    if (!doc.contains("K")) throw Error(Errc::ParseError, path + ": expected a matrix or {\"K\": matrix}");
    return matrix_from_json(doc["K"], path);
  }
  return matrix_from_json(doc, path);
}

inline CMatrix resolve_k(const ExtensionInterval& interval, const std::string& spec) {
  if (spec == "mu") return k_minimal(interval);
  if (spec == "M") return k_maximal(interval);
  if (spec == "mid") return k_midpoint(interval);
  return k_from_file(spec);
}

inline void fill_solvability(Report& r, const SolvabilityReport& s) {
  r.solvable = s.overall;
  r.blocks.clear();
  r.blocks.insert(r.blocks.end(), s.gamma.begin(), s.gamma.end());
  r.blocks.insert(r.blocks.end(), s.gamma_tilde.begin(), s.gamma_tilde.end());
  r.offending_block = s.overall ? std::string{} : s.first_failure();
}

inline void fill_determinacy(Report& r, const Problem& p) {
  DeterminacySection d;
  d.determinate = p.determinacy.determinate;
  d.norm_c = p.determinacy.norm_c;
  d.dim_h = p.space.d;
  d.dim_re = p.reduced_defect_dim();
  d.cond_c = p.interval.cond_c;
  r.determinacy = d;
  merge_names(r.warnings, warning_names(p.interval.warnings));
}

inline SolutionEntry make_entry(const SolutionMeasure& mu, const MomentSequence& seq, const std::string& k_label,
                                const std::string& method) {
  SolutionEntry e;
  e.k_label = k_label;
  e.method = method;
  e.measure = mu.measure;
  e.deflated = mu.deflated;
  const ResidualReport rr = roundtrip_verify(mu, seq);
  e.warnings = warning_names(rr.warnings);
  for (const auto& row : rr.rows) e.residuals.push_back({row.n, row.residual, row.skipped});
  e.max_residual = rr.max_residual;
  e.top_residual = rr.top_residual;
  e.negative_skipped = rr.negative_skipped;
  return e;
}

inline double disagreement(const AtomicMeasure& a, const AtomicMeasure& b) {
  const MeasureDistance d = measure_distance(a, b);
  return std::max(d.atom, d.weight);
}

struct SolveOutcome {
  std::vector<SolutionEntry> entries;
  double disagreement = 0.0;
  bool has_disagreement = false;
};

inline SolveOutcome solve_one(const Problem& p, const std::string& spec, const std::string& invert) {
  SolveOutcome out;
  const TransformEvaluator ev(p, resolve_k(p.interval, spec), spec);
  const bool spectral = invert == "spectral" || invert == "both";
  const bool perron = invert == "perron" || invert == "both";

  SolutionMeasure direct;
  if (spectral || perron) direct = spectral_measure_direct(ev);
  if (spectral) out.entries.push_back(make_entry(direct, p.seq, spec, "spectral"));
  if (perron) {
    const double top = ev.spectrum().size() ? ev.spectrum().maxCoeff() : 0.0;
    SolutionMeasure inv = perron_invert([&ev](cdouble z) { return transform_formula(ev, z); }, ev.block(), 0.0,
                                        1.1 * top + 1.0);
    inv.warnings = ev.warnings();
    inv.deflated = ev.a_hat().deflated();
    out.entries.push_back(make_entry(inv, p.seq, spec, "perron"));
    if (spectral) {
      out.disagreement = disagreement(direct.measure, inv.measure);
      out.has_disagreement = true;
    }
  }
  return out;
}

inline bool strict_hit(const std::vector<std::string>& ws) {
  for (const auto& w : ws) {
    if (w == to_string(Warning::KernelWarning) || w == to_string(Warning::RangeConditionViolated)) return true;
  }
  return false;
}

inline void finish(Report& r, const CliOptions& o) {
  if (r.exit_code == kExitOk && !r.failures.empty()) r.exit_code = kExitFailure;
  if (r.exit_code == kExitOk && o.strict && strict_hit(r.warnings)) {
    r.failures.push_back("strict: numerical warning escalated");
    r.exit_code = kExitStrict;
  }
}

template <class Body>
Report guarded(const std::string& command, const MomentSequence* seq, const CliOptions& o, Body&& body) {
  Report r;
  r.command = command;
  if (seq != nullptr) {
    r.n = seq->dim();
    r.m = seq->order();
  }
  try {
    body(r);
  } catch (const Error& e) {
    r.error = e.what();
    switch (e.code()) {
      case Errc::NotSolvable: r.exit_code = kExitNotSolvable; break;
      case Errc::ParseError:
      case Errc::NonHermitianInput: r.exit_code = kExitParse; break;
      default: r.exit_code = kExitFailure; break;
    }
    return r;
  }
  finish(r, o);
  return r;
}

}  // namespace detail

/// Per-block positivity verdicts.
inline Report cmd_check(const Instance& inst, const CliOptions& o = {}) {
  return detail::guarded("check", &inst.seq, o, [&](Report& r) {
    detail::fill_solvability(r, check_solvable(inst.seq, o.tol));
    if (!*r.solvable) r.exit_code = kExitNotSolvable;
  });
}

inline Report cmd_determinacy(const Instance& inst, const CliOptions& o = {}) {
  return detail::guarded("determinacy", &inst.seq, o, [&](Report& r) {
    detail::fill_solvability(r, check_solvable(inst.seq, o.tol));
    const Problem p = analyze(inst.seq, detail::analyze_options(o));
    detail::fill_determinacy(r, p);
  });
}

/// Solves for every K in the comma-separated list. K sweeps run on up to
/// o.jobs threads; results keep the input order.
inline Report cmd_solve(const Instance& inst, const CliOptions& o = {}) {
  return detail::guarded("solve", &inst.seq, o, [&](Report& r) {
    if (o.invert != "spectral" && o.invert != "perron" && o.invert != "both") {
      throw Error(Errc::ParseError, "unknown --invert mode " + o.invert);
    }
    detail::fill_solvability(r, check_solvable(inst.seq, o.tol));
    const Problem p = analyze(inst.seq, detail::analyze_options(o));
    detail::fill_determinacy(r, p);

    const std::vector<std::string> specs = detail::split_list(o.k_spec);
    if (specs.empty()) throw Error(Errc::ParseError, "empty --K");
    std::vector<detail::SolveOutcome> outcomes(specs.size());
    std::vector<std::string> errors(specs.size());
    std::vector<Errc> codes(specs.size(), Errc::ParseError);
    std::vector<char> failed(specs.size(), 0);

    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < specs.size(); i = next++) {
        try {
          outcomes[i] = detail::solve_one(p, specs[i], o.invert);
        } catch (const Error& e) {
          failed[i] = 1;
          codes[i] = e.code();
          errors[i] = e.what();
        }
      }
    };
    const size_t threads = std::clamp<size_t>(static_cast<size_t>(std::max(o.jobs, 1)), 1, specs.size());
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    for (size_t i = 0; i < specs.size(); ++i) {
      if (failed[i]) {
        if (codes[i] == Errc::ParseError) throw Error(Errc::ParseError, errors[i]);
        r.failures.push_back("K=" + specs[i] + ": " + errors[i]);
        continue;
      }
      for (auto& e : outcomes[i].entries) {
        detail::merge_names(r.warnings, e.warnings);
        if (e.max_residual > o.residual_tol) {
          std::ostringstream msg;
          msg << "K=" << specs[i] << " (" << e.method << "): residual " << e.max_residual << " exceeds "
              << o.residual_tol;
          r.failures.push_back(msg.str());
        }
        r.solutions.push_back(std::move(e));
      }
      if (outcomes[i].has_disagreement) {
        r.inversion_disagreement = std::max(r.inversion_disagreement.value_or(0.0), outcomes[i].disagreement);
      }
    }
  });
}

/// Measure instance -> moments -> solution -> comparison with the generator.
inline Report cmd_roundtrip(const Instance& inst, const CliOptions& o = {}) {
  return detail::guarded("roundtrip", &inst.seq, o, [&](Report& r) {
    if (!inst.measure) throw Error(Errc::ParseError, "roundtrip needs a measure instance");
    detail::fill_solvability(r, check_solvable(inst.seq, o.tol));
    const Problem p = analyze(inst.seq, detail::analyze_options(o));
    detail::fill_determinacy(r, p);

    const std::string spec = detail::split_list(o.k_spec).empty() ? "mid" : detail::split_list(o.k_spec).front();
    auto out = detail::solve_one(p, spec, "spectral");
    SolutionEntry& e = out.entries.front();
    detail::merge_names(r.warnings, e.warnings);
    if (e.max_residual > o.residual_tol) {
      std::ostringstream msg;
      msg << "residual " << e.max_residual << " exceeds " << o.residual_tol;
      r.failures.push_back(msg.str());
    }

    AtomicMeasure gen = *inst.measure;
    std::sort(gen.atoms.begin(), gen.atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
    const MeasureDistance d = measure_distance(gen, e.measure);
    r.generator = GeneratorComparison{d.same_count, d.atom, d.weight};
    if (p.determinacy.determinate && !(d.same_count && d.atom <= 1e-8 && d.weight <= 1e-8)) {
      r.failures.push_back("determinate instance but recovered measure differs from the generator");
    }
    r.solutions.push_back(std::move(e));
  });
}

/// N = 2, S_n = [[1, 3/sqrt(10)], [3/sqrt(10), 1]] for every n.
inline MomentSequence example_sequence(int m) {
  const double c = 3.0 / std::sqrt(10.0);
  CMatrix s(2, 2);
  s << 1.0, c, c, 1.0;
  return MomentSequence(2, m, std::vector<CMatrix>(static_cast<size_t>(4 * m + 2), s));
}

/// Runs the built-in two-by-two constant sequence; fails unless it is
/// determinate with the single atom (1, S) and residuals <= 1e-10.
inline Report cmd_example(const CliOptions& o = {}) {
  if (o.m < 0) {
    Report r;
    r.command = "example";
    r.error = "--m must be non-negative";
    r.exit_code = kExitParse;
    return r;
  }
  const MomentSequence seq = example_sequence(o.m);
  return detail::guarded("example", &seq, o, [&](Report& r) {
    detail::fill_solvability(r, check_solvable(seq, o.tol));
    const Problem p = analyze(seq, detail::analyze_options(o));
    detail::fill_determinacy(r, p);
    if (!p.determinacy.determinate) r.failures.push_back("expected a determinate problem");
    if (p.space.d != 2) r.failures.push_back("expected dim H = 2");

    auto out = detail::solve_one(p, "mid", "spectral");
    SolutionEntry& e = out.entries.front();
    detail::merge_names(r.warnings, e.warnings);
    const auto& atoms = e.measure.atoms;
    if (atoms.size() != 1 || std::abs(atoms[0].t - 1.0) > 1e-10 || (atoms[0].weight - seq.at(0)).norm() > 1e-10) {
      r.failures.push_back("expected a single atom at t = 1 with weight S");
    }
    for (const auto& row : e.residuals) {
      if (!row.skipped && row.residual > 1e-10) {
        r.failures.push_back("residual at n = " + std::to_string(row.n) + " exceeds 1e-10");
      }
    }
    r.solutions.push_back(std::move(e));
  });
}

// ---------------------------------------------------------------------------
// Text output

inline std::string render_matrix(const CMatrix& a) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "[";
  for (Index i = 0; i < a.rows(); ++i) {
    os << (i ? "; " : "");
    for (Index j = 0; j < a.cols(); ++j) {
      const cdouble v = a(i, j);
      os << (j ? " " : "") << v.real();
      if (std::abs(v.imag()) > 1e-14) os << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
    }
  }
  os << "]";
  return os.str();
}

inline std::string render_text(const Report& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << r.command << ": N=" << r.n << " m=" << r.m << "\n";
  if (r.solvable) {
    os << "solvable: " << (*r.solvable ? "true" : "false");
    if (!r.offending_block.empty()) os << "  (offending block " << r.offending_block << ")";
    os << "\n";
    for (const auto& b : r.blocks) {
      os << "  " << std::left << std::setw(12) << b.name << " n=" << b.n << "  min_eig=" << b.min_eig
         << (b.is_psd ? "" : "  NOT PSD") << "\n";
    }
  }
  if (r.determinacy) {
    const auto& d = *r.determinacy;
    os << "determinate: " << (d.determinate ? "true" : "false") << "  |C|=" << d.norm_c << "  dim H=" << d.dim_h
       << "  dim Re=" << d.dim_re << "  cond C=" << d.cond_c << "\n";
  }
  for (const auto& s : r.solutions) {
    os << "solution K=" << s.k_label << " [" << s.method << "]  atoms=" << s.measure.atoms.size();
    if (s.deflated) os << "  deflated=" << s.deflated;
    os << "\n";
    for (const auto& a : s.measure.atoms) os << "  t=" << a.t << "  W=" << render_matrix(a.weight) << "\n";
    os << "  max residual [-2m,2m]=" << s.max_residual << "  n=2m+1 residual=" << s.top_residual
       << (s.negative_skipped ? "  (negative n skipped)" : "") << "\n";
  }
  if (r.inversion_disagreement) os << "inversion disagreement: " << *r.inversion_disagreement << "\n";
  if (r.generator) {
    os << "generator: same_count=" << (r.generator->same_count ? "true" : "false")
       << "  atom dist=" << r.generator->atom_distance << "  weight dist=" << r.generator->weight_distance << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  for (const auto& f : r.failures) os << "FAIL: " << f << "\n";
  if (!r.error.empty()) os << "error: " << r.error << "\n";
  os << "exit " << r.exit_code << "\n";
  return os.str();
}

}  // namespace strongmoment
