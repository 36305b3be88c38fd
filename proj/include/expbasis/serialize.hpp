#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "expbasis/basis_diagnostics.hpp"
#include "expbasis/critical.hpp"
#include "expbasis/dual_norm.hpp"
#include "expbasis/muckenhoupt.hpp"
#include "expbasis/spectrum.hpp"
#include "expbasis/subcouple.hpp"
#include "expbasis/version.hpp"

// CSV and JSON emission for every result type, plus the binary Gram export.
// All numbers go through %.17g so a reparse restores the exact binary64
// value, and every document carries the artifact version and the resolved
// configuration it was produced under.

namespace expbasis {

using json = nlohmann::json;

inline std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- spectrum

inline json spectrum_to_json(const Spectrum& s) {
  json j;
  j["version"] = kVersionString;
  j["label"] = s.descriptor.label;
  j["N"] = s.N;
  std::vector<long> idx;
  std::vector<double> re, im;
  idx.reserve(static_cast<std::size_t>(2 * s.N + 1));
  for (long n = -s.N; n <= s.N; ++n) {
    cplx l = s.lambda(n);
    idx.push_back(n);
    re.push_back(l.real());
    im.push_back(l.imag());
  }
  j["n"] = idx;
  j["re"] = re;
  j["im"] = im;
  return j;
}

// Rebuilds the point set bit-for-bit; the descriptor collapses to "custom"
// because only the geometry is stored.
inline Spectrum spectrum_from_json(const json& j) {
  for (const char* key : {"n", "re", "im"})
    if (!j.contains(key) || !j[key].is_array())
      throw std::invalid_argument(std::string("spectrum_from_json: missing ") +
                                  key);
  std::vector<long> idx = j["n"].get<std::vector<long>>();
  std::vector<double> re = j["re"].get<std::vector<double>>();
  std::vector<double> im = j["im"].get<std::vector<double>>();
  if (idx.size() != re.size() || idx.size() != im.size() || idx.empty() ||
      idx.size() % 2 != 1)
    throw std::invalid_argument("spectrum_from_json: bad array shapes");
  long N = (static_cast<long>(idx.size()) - 1) / 2;
  std::vector<double> delta(idx.size()), tau(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    long n = -N + static_cast<long>(i);
    if (idx[i] != n)
      throw std::invalid_argument("spectrum_from_json: n must run -N..N");
    delta[i] = re[i] - static_cast<double>(n);
    tau[i] = im[i];
  }
  return make_custom(delta, tau, N);
}

// ------------------------------------------------------------------ curves

inline void csv_preamble(std::ostringstream& os, const json& config) {
  os << "# expbasis " << kVersionString << "\n";
  os << "# config " << config.dump() << "\n";
}

inline std::string dual_norm_curve_csv(const DualNormCurve& c,
                                       const json& config = json::object()) {
  std::ostringstream os;
  csv_preamble(os, config);
  os << "t,log_norm,method,M_or_X,tail_fraction\n";
  for (const CurvePoint& p : c.points)
    os << num17(p.t) << "," << num17(p.log_norm) << ","
       << norm_method_name(p.method) << "," << num17(p.M_or_X) << ","
       << num17(p.tail_fraction) << "\n";
  return os.str();
}

// F along the real axis; the truncation column is a crude upper estimate of
// the first dropped compensation-tail order, zero for the closed form
inline std::string f_curve_csv(const GeneratingFunction& g,
                               const std::vector<double>& xs,
                               const json& config = json::object()) {
  std::ostringstream os;
  csv_preamble(os, config);
  os << "t,log_mag,phase,truncation_bound\n";
  for (double x : xs) {
    LogComplex F = eval_F(g, cplx(x, 0.0));
    double bound = 0.0;
    if (g.mode != FMode::closed_form_sine) {
      double r = std::fabs(x) / static_cast<double>(g.N_prod);
      bound = std::pow(r, 2 * g.R + 2) * static_cast<double>(g.N_prod);
    }
    os << num17(x) << "," << num17(F.log_mag) << "," << num17(F.phase) << ","
       << num17(bound) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- critical

inline json critical_to_json(const CriticalIndices& ci,
                             const json& extra_params = json::object()) {
  json p = extra_params;
  p["tau_used"] = ci.tau_used;
  p["t_lo"] = ci.t_lo;
  p["t_hi"] = ci.t_hi;
  json j;
  j["version"] = kVersionString;
  j["method"] = critical_method_name(ci.method);
  j["s0"] = ci.s0;
  j["s1"] = ci.s1;
  j["uncertainty"] = ci.uncertainty;
  j["parameters"] = p;
  return j;
}

inline CriticalIndices critical_from_json(const json& j) {
  for (const char* key : {"method", "s0", "s1", "uncertainty"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("critical_from_json: missing ") +
                                  key);
  CriticalIndices ci;
  std::string m = j["method"].get<std::string>();
  if (m == critical_method_name(CriticalMethod::delta_sum))
    ci.method = CriticalMethod::delta_sum;
  else if (m == critical_method_name(CriticalMethod::block_b))
    ci.method = CriticalMethod::block_b;
  else if (m == critical_method_name(CriticalMethod::weight_slope))
    ci.method = CriticalMethod::weight_slope;
  else
    throw std::invalid_argument("critical_from_json: unknown method " + m);
  ci.s0 = j["s0"].get<double>();
  ci.s1 = j["s1"].get<double>();
  ci.uncertainty = j["uncertainty"].get<double>();
  if (j.contains("parameters")) {
    const json& p = j["parameters"];
    if (p.contains("tau_used")) ci.tau_used = p["tau_used"].get<double>();
    if (p.contains("t_lo")) ci.t_lo = p["t_lo"].get<double>();
    if (p.contains("t_hi")) ci.t_hi = p["t_hi"].get<double>();
  }
  detail::validate_critical(ci, "critical_from_json");
  return ci;
}

// --------------------------------------------------------------- subcouple

inline json classification_to_json(double theta,
                                   const SubcoupleClassification& c) {
  json j;
  j["version"] = kVersionString;
  j["theta"] = theta;
  j["sigma0"] = c.sigma0;
  j["sigma1"] = c.sigma1;
  j["verdict"] = verdict_name(c.verdict);
  j["uncertain"] = c.uncertain;
  j["annihilation_ok"] = c.annihilation_ok;
  json tab = json::array();
  for (const LsvRow& r : c.lsv) tab.push_back({{"N", r.N}, {"lsv", r.lsv}});
  j["lsv_table"] = tab;
  return j;
}

// ---------------------------------------------------------------------- A2

inline std::string a2_csv(const SweepTable& t,
                          const json& config = json::object()) {
  std::ostringstream os;
  csv_preamble(os, config);
  os << "s,j,constant\n";
  for (const SweepRow& row : t.rows)
    for (std::size_t k = 0; k < row.report.lengths.size(); ++k) {
      long jexp = std::lround(std::log2(row.report.lengths[k]));
      os << num17(row.s) << "," << jexp << ","
         << num17(row.report.constant_by_scale[k]) << "\n";
    }
  return os.str();
}

inline json a2_summary_json(const SweepTable& t,
                            const json& config = json::object()) {
  json j;
  j["version"] = kVersionString;
  j["y"] = t.y;
  json rows = json::array();
  for (const SweepRow& row : t.rows)
    rows.push_back({{"s", row.s},
                    {"growth", row.growth},
                    {"overall", row.report.overall},
                    {"fails", row.fails},
                    {"indeterminate", row.indeterminate}});
  j["rows"] = rows;
  if (std::isnan(t.s_fail_lo)) {
    j["s_fail_lo"] = nullptr;
    j["s_fail_hi"] = nullptr;
  } else {
    j["s_fail_lo"] = t.s_fail_lo;
    j["s_fail_hi"] = t.s_fail_hi;
  }
  j["config"] = config;
  return j;
}

// -------------------------------------------------------------------- gram

inline const char* gram_mode_name(GramMode m) {
  return m == GramMode::L2 ? "L2" : "H1";
}

// two files: <base>.bin holds row-major (re, im) binary64 pairs in host
// endianness, <base>.json the header
inline void write_gram(const GramMatrix& gm, const std::string& path_base,
                       const json& config = json::object()) {
  long size = 2 * gm.N + 1;
  if (gm.G.rows() != size || gm.G.cols() != size)
    throw std::invalid_argument("write_gram: matrix shape disagrees with N");
  std::ofstream bin(path_base + ".bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("write_gram: cannot open " + path_base);
  for (long i = 0; i < size; ++i)
    for (long j = 0; j < size; ++j) {
      double buf[2] = {gm.G(i, j).real(), gm.G(i, j).imag()};
      bin.write(reinterpret_cast<const char*>(buf), sizeof(buf));
    }
  bin.close();
  if (!bin) throw std::runtime_error("write_gram: short write");
  json h;
  h["version"] = kVersionString;
  h["size"] = size;
  h["mode"] = gram_mode_name(gm.mode);
  h["t"] = gm.t;
  h["config"] = config;
  std::ofstream hdr(path_base + ".json", std::ios::trunc);
  if (!hdr) throw std::runtime_error("write_gram: cannot open header");
  hdr << h.dump(2) << "\n";
}

inline GramMatrix read_gram(const std::string& path_base) {
  std::ifstream hdr(path_base + ".json");
  if (!hdr) throw std::runtime_error("read_gram: missing header");
  json h = json::parse(hdr);
  long size = h.at("size").get<long>();
  if (size < 1 || size % 2 != 1)
    throw std::runtime_error("read_gram: bad size field");
  GramMatrix gm;
  gm.N = (size - 1) / 2;
  std::string mode = h.at("mode").get<std::string>();
  if (mode == "L2")
    gm.mode = GramMode::L2;
  else if (mode == "H1")
    gm.mode = GramMode::H1;
  else
    throw std::runtime_error("read_gram: bad mode field");
  gm.t = h.at("t").get<double>();
  gm.G.resize(size, size);
  std::ifstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("read_gram: missing binary file");
  for (long i = 0; i < size; ++i)
    for (long j = 0; j < size; ++j) {
      double buf[2];
      bin.read(reinterpret_cast<char*>(buf), sizeof(buf));
      if (!bin) throw std::runtime_error("read_gram: binary file truncated");
      gm.G(i, j) = cplx(buf[0], buf[1]);
    }
  char extra;
  bin.read(&extra, 1);
  if (!bin.eof()) throw std::runtime_error("read_gram: trailing bytes");
  return gm;
}

// ------------------------------------------------------------------- files

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_text_file: cannot open " + path);
  f << content;
  f.close();
  if (!f) throw std::runtime_error("write_text_file: write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace expbasis
