#pragma once

// JSON instance and report files.
//
// Instance, moment form:
//   { "N": 2, "m": 1, "moments": { "-2": M, "-1": M, ..., "3": M } }
// Instance, measure form:
//   { "m": 1, "measure": { "atoms": [ { "t": 1.0, "W": M }, ... ] } }
// M is a row-major matrix of [re, im] pairs. Moment keys are decimal strings
// and must cover [-2m, 2m+1] exactly.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strongmoment/moments.hpp"
#include "strongmoment/solutions.hpp"

namespace strongmoment {

using json = nlohmann::json;

inline json matrix_to_json(const CMatrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(Errc::ParseError, where + ": matrix must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (rows == 0) return CMatrix(0, 0);
  if (!j[0].is_array()) throw Error(Errc::ParseError, where + ": matrix row must be an array");
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix a(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(Errc::ParseError, where + ": ragged matrix");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<size_t>(c)];
      if (e.is_number()) {
        a(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        a(r, c) = cdouble(e[0].get<double>(), e[1].get<double>());
      } else {
        throw Error(Errc::ParseError, where + ": entry must be [re, im]");
      }
    }
  }
  return a;
}

struct Instance {
  MomentSequence seq;
  std::optional<AtomicMeasure> measure;  // set for measure-form instances
};

inline Instance instance_from_json(const json& doc, double htol = Tolerances{}.htol) {
  if (!doc.is_object()) throw Error(Errc::ParseError, "instance must be a JSON object");
  if (!doc.contains("m") || !doc["m"].is_number_integer()) throw Error(Errc::ParseError, "missing integer \"m\"");
  const int m = doc["m"].get<int>();
  if (m < 0) throw Error(Errc::ParseError, "\"m\" must be non-negative");

  Instance inst;
  if (doc.contains("measure")) {
    const json& jm = doc["measure"];
    if (!jm.is_object() || !jm.contains("atoms") || !jm["atoms"].is_array()) {
      throw Error(Errc::ParseError, "\"measure\" needs an \"atoms\" array");
    }
    AtomicMeasure mu;
    mu.dim = doc.contains("N") ? doc["N"].get<Index>() : 0;
    for (const json& ja : jm["atoms"]) {
      if (!ja.contains("t") || !ja["t"].is_number() || !ja.contains("W")) {
        throw Error(Errc::ParseError, "atom needs \"t\" and \"W\"");
      }
      Atom a{ja["t"].get<double>(), matrix_from_json(ja["W"], "atom W")};
      if (mu.dim == 0) mu.dim = a.weight.rows();
      mu.atoms.push_back(std::move(a));
    }
    if (mu.dim <= 0) throw Error(Errc::ParseError, "cannot infer N for an empty measure; give \"N\"");
    for (const auto& a : mu.atoms) {
      if (a.weight.rows() != mu.dim || a.weight.cols() != mu.dim) throw Error(Errc::ParseError, "atom W has wrong shape");
      require_hermitian(a.weight, htol, "atom W");
    }
    inst.seq = moments_from_measure(mu, m);
    inst.measure = std::move(mu);
    return inst;
  }

  if (!doc.contains("N") || !doc["N"].is_number_integer()) throw Error(Errc::ParseError, "missing integer \"N\"");
  const auto n = doc["N"].get<Index>();
  if (n <= 0) throw Error(Errc::ParseError, "\"N\" must be positive");
  if (!doc.contains("moments") || !doc["moments"].is_object()) throw Error(Errc::ParseError, "missing \"moments\" object");
  const json& jmom = doc["moments"];
  if (jmom.size() != static_cast<size_t>(4 * m + 2)) {
    throw Error(Errc::ParseError, "\"moments\" must have exactly the keys -2m..2m+1");
  }
  std::vector<CMatrix> s;
  for (int k = -2 * m; k <= 2 * m + 1; ++k) {
    const std::string key = std::to_string(k);
    if (!jmom.contains(key)) throw Error(Errc::ParseError, "missing moment \"" + key + "\"");
    CMatrix a = matrix_from_json(jmom[key], "moment " + key);
    if (a.rows() != n || a.cols() != n) throw Error(Errc::ParseError, "moment " + key + " is not NxN");
    s.push_back(std::move(a));
  }
  inst.seq = MomentSequence(n, m, std::move(s), htol);
  return inst;
}

inline json instance_to_json(const MomentSequence& seq) {
  json doc;
  doc["N"] = seq.dim();
  doc["m"] = seq.order();
  json mom = json::object();
  for (int k = seq.min_index(); k <= seq.max_index(); ++k) mom[std::to_string(k)] = matrix_to_json(seq.at(k));
  doc["moments"] = std::move(mom);
  return doc;
}

inline json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms) atoms.push_back({{"t", a.t}, {"W", matrix_to_json(a.weight)}});
  return {{"atoms", std::move(atoms)}};
}

inline json instance_to_json(const AtomicMeasure& mu, int m) {
  return {{"N", mu.dim}, {"m", m}, {"measure", measure_to_json(mu)}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

struct ResidualRow {
  int n = 0;
  double residual = 0.0;
  bool skipped = false;
};

struct SolutionEntry {
  std::string k_label;
  std::string method;  // "spectral" or "perron"
  AtomicMeasure measure;
  std::vector<std::string> warnings;
  Index deflated = 0;
  std::vector<ResidualRow> residuals;
  double max_residual = 0.0;
  double top_residual = 0.0;
  bool negative_skipped = false;
};

struct DeterminacySection {
  bool determinate = true;
  double norm_c = 0.0;
  Index dim_h = 0;
  Index dim_re = 0;
  double cond_c = 1.0;
};

struct GeneratorComparison {
  bool same_count = true;
  double atom_distance = 0.0;
  double weight_distance = 0.0;
};

struct Report {
  std::string command;
  Index n = 0;
  int m = 0;
  std::optional<bool> solvable;
  std::vector<BlockVerdict> blocks;
  std::string offending_block;
  std::optional<DeterminacySection> determinacy;
  std::vector<SolutionEntry> solutions;
  std::optional<double> inversion_disagreement;
  std::optional<GeneratorComparison> generator;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
  std::string error;
  int exit_code = 0;
};

inline void to_json(json& j, const BlockVerdict& b) {
  j = {{"name", b.name}, {"n", b.n}, {"psd", b.is_psd}, {"min_eig", b.min_eig}};
}
inline void from_json(const json& j, BlockVerdict& b) {
  b.name = j.at("name").get<std::string>();
  b.n = j.at("n").get<int>();
  b.is_psd = j.at("psd").get<bool>();
  b.min_eig = j.at("min_eig").get<double>();
}

inline void to_json(json& j, const ResidualRow& r) {
  j = {{"n", r.n}, {"residual", r.residual}, {"skipped", r.skipped}};
}
inline void from_json(const json& j, ResidualRow& r) {
  r.n = j.at("n").get<int>();
  r.residual = j.at("residual").get<double>();
  r.skipped = j.at("skipped").get<bool>();
}

inline void to_json(json& j, const SolutionEntry& s) {
  j = {{"K", s.k_label},
       {"method", s.method},
       {"N", s.measure.dim},
       {"atoms", measure_to_json(s.measure)["atoms"]},
       {"warnings", s.warnings},
       {"deflated", s.deflated},
       {"residuals", s.residuals},
       {"max_residual", s.max_residual},
       {"top_residual", s.top_residual},
       {"negative_skipped", s.negative_skipped}};
}
inline void from_json(const json& j, SolutionEntry& s) {
  s.k_label = j.at("K").get<std::string>();
  s.method = j.at("method").get<std::string>();
  s.measure.dim = j.at("N").get<Index>();
  s.measure.atoms.clear();
  for (const json& ja : j.at("atoms")) {
    s.measure.atoms.push_back({ja.at("t").get<double>(), matrix_from_json(ja.at("W"), "atom W")});
  }
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  s.deflated = j.at("deflated").get<Index>();
  s.residuals = j.at("residuals").get<std::vector<ResidualRow>>();
  s.max_residual = j.at("max_residual").get<double>();
  s.top_residual = j.at("top_residual").get<double>();
  s.negative_skipped = j.at("negative_skipped").get<bool>();
}

inline void to_json(json& j, const DeterminacySection& d) {
  j = {{"determinate", d.determinate}, {"norm_C", d.norm_c}, {"dim_H", d.dim_h},
       {"dim_Re", d.dim_re},           {"cond_C", d.cond_c}};
}
inline void from_json(const json& j, DeterminacySection& d) {
  d.determinate = j.at("determinate").get<bool>();
  d.norm_c = j.at("norm_C").get<double>();
  d.dim_h = j.at("dim_H").get<Index>();
  d.dim_re = j.at("dim_Re").get<Index>();
  d.cond_c = j.at("cond_C").get<double>();
}

inline void to_json(json& j, const GeneratorComparison& g) {
  j = {{"same_count", g.same_count}, {"atom_distance", g.atom_distance}, {"weight_distance", g.weight_distance}};
}
inline void from_json(const json& j, GeneratorComparison& g) {
  g.same_count = j.at("same_count").get<bool>();
  g.atom_distance = j.at("atom_distance").get<double>();
  g.weight_distance = j.at("weight_distance").get<double>();
}

inline void to_json(json& j, const Report& r) {
  j = json::object();
  j["command"] = r.command;
  j["N"] = r.n;
  j["m"] = r.m;
  if (r.solvable) j["solvable"] = *r.solvable;
  j["blocks"] = r.blocks;
  if (!r.offending_block.empty()) j["offending_block"] = r.offending_block;
  if (r.determinacy) j["determinacy"] = *r.determinacy;
  j["solutions"] = r.solutions;
  if (r.inversion_disagreement) j["inversion_disagreement"] = *r.inversion_disagreement;
  if (r.generator) j["generator"] = *r.generator;
  j["warnings"] = r.warnings;
  j["failures"] = r.failures;
  if (!r.error.empty()) j["error"] = r.error;
  j["exit_code"] = r.exit_code;
}

inline void from_json(const json& j, Report& r) {
  r.command = j.at("command").get<std::string>();
  r.n = j.at("N").get<Index>();
  r.m = j.at("m").get<int>();
  r.solvable = j.contains("solvable") ? std::optional<bool>(j["solvable"].get<bool>()) : std::nullopt;
  r.blocks = j.at("blocks").get<std::vector<BlockVerdict>>();
  r.offending_block = j.value("offending_block", std::string{});
  r.determinacy = j.contains("determinacy") ? std::optional(j["determinacy"].get<DeterminacySection>()) : std::nullopt;
  r.solutions = j.at("solutions").get<std::vector<SolutionEntry>>();
  r.inversion_disagreement =
      j.contains("inversion_disagreement") ? std::optional(j["inversion_disagreement"].get<double>()) : std::nullopt;
  r.generator = j.contains("generator") ? std::optional(j["generator"].get<GeneratorComparison>()) : std::nullopt;
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.failures = j.at("failures").get<std::vector<std::string>>();
  r.error = j.value("error", std::string{});
  r.exit_code = j.at("exit_code").get<int>();
}

}  // namespace strongmoment
