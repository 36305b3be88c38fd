// expbasis: batch front end for the exponential-basis laboratory.
//
// One subcommand per experiment family. Parameters come from an optional
// JSON config file plus command-line flags; flags win. Every run resolves
// its configuration up front, computes the whole result in memory, and only
// then touches the output path, so a failed run never leaves partial files.
//
// Exit codes: 0 success, 1 reconcile mismatch, 2 validation error,
// 3 numerical failure. Errors go to stderr as a one-line JSON object.

#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "expbasis/critical.hpp"
#include "expbasis/muckenhoupt.hpp"
#include "expbasis/serialize.hpp"
#include "expbasis/subcouple.hpp"

namespace eb = expbasis;
using eb::json;

namespace {

// ------------------------------------------------------------ error plumbing

int fail(int code, const char* kind, const std::string& msg) {
  json e;
  e["version"] = eb::kVersionString;
  e["kind"] = kind;
  e["message"] = msg;
  std::fprintf(stderr, "%s\n", e.dump().c_str());
  return code;
}

// ------------------------------------------------------- resolved-config I/O

// typed getters over the resolved config; wrong JSON types become
// validation errors naming the offending key
double getd(const json& r, const char* k, double dflt) {
  if (!r.contains(k)) return dflt;
  if (!r[k].is_number())
    throw std::invalid_argument(std::string("config key '") + k +
                                "' must be a number");
  return r[k].get<double>();
}

long getl(const json& r, const char* k, long dflt) {
  if (!r.contains(k)) return dflt;
  const json& v = r[k];
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    double x = v.get<double>();
    long n = std::lround(x);
    if (double(n) != x)
      throw std::invalid_argument(std::string("config key '") + k +
                                  "' must be an integer");
    return n;
  }
  throw std::invalid_argument(std::string("config key '") + k +
                              "' must be an integer");
}

std::string gets(const json& r, const char* k, const std::string& dflt) {
  if (!r.contains(k)) return dflt;
  if (!r[k].is_string())
    throw std::invalid_argument(std::string("config key '") + k +
                                "' must be a string");
  return r[k].get<std::string>();
}

bool getb(const json& r, const char* k, bool dflt) {
  if (!r.contains(k)) return dflt;
  if (!r[k].is_boolean())
    throw std::invalid_argument(std::string("config key '") + k +
                                "' must be a boolean");
  return r[k].get<bool>();
}

// list-valued keys accept a JSON array or a comma-separated string, so the
// same key works from a config file and from a flag
std::vector<double> get_dlist(const json& r, const char* k,
                              std::vector<double> dflt) {
  if (!r.contains(k)) return dflt;
  const json& v = r[k];
  std::vector<double> out;
  if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number())
        throw std::invalid_argument(std::string("config key '") + k +
                                    "' must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::size_t pos = 0;
    while (pos <= s.size()) {
      std::size_t comma = s.find(',', pos);
      std::string tok = s.substr(pos, comma == std::string::npos
                                          ? std::string::npos
                                          : comma - pos);
      if (tok.empty())
        throw std::invalid_argument(std::string("config key '") + k +
                                    "': empty list entry");
      std::size_t used = 0;
      double x = std::stod(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument(std::string("config key '") + k +
                                    "': bad number '" + tok + "'");
      out.push_back(x);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }
  throw std::invalid_argument(std::string("config key '") + k +
                              "' must be an array or comma list");
}

std::vector<long> get_llist(const json& r, const char* k,
                            std::vector<long> dflt) {
  if (!r.contains(k)) return dflt;
  std::vector<double> d = get_dlist(r, k, {});
  std::vector<long> out;
  for (double x : d) {
    long n = std::lround(x);
    if (double(n) != x)
      throw std::invalid_argument(std::string("config key '") + k +
                                  "' must hold integers");
    out.push_back(n);
  }
  return out;
}

std::vector<std::string> get_slist(const json& r, const char* k,
                                   std::vector<std::string> dflt) {
  if (!r.contains(k)) return dflt;
  const json& v = r[k];
  if (!v.is_array())
    throw std::invalid_argument(std::string("config key '") + k +
                                "' must be an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string())
      throw std::invalid_argument(std::string("config key '") + k +
                                  "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// --------------------------------------------------------- shared builders

eb::Spectrum build_spectrum(const json& r) {
  long N = getl(r, "N", 4096);
  std::string dflt_kind = "integer";
  if (r.contains("shift-q")) dflt_kind = "shift";
  if (r.contains("block-p") || r.contains("block-q") ||
      r.contains("block-bounds"))
    dflt_kind = "block";
  std::string kind = gets(r, "kind", dflt_kind);
  if (kind == "integer") return eb::make_constant_shift(0.0, N);
  if (kind == "shift")
    return eb::make_constant_shift(getd(r, "shift-q", 0.2), N);
  if (kind == "block") {
    std::vector<long> bounds = get_llist(r, "block-bounds", {16, 256, 4096});
    while (!bounds.empty() && bounds.back() >= N) bounds.pop_back();
    return eb::make_block(getd(r, "block-p", 0.1), getd(r, "block-q", 0.3),
                          bounds, N);
  }
  throw std::invalid_argument("unknown spectrum kind '" + kind +
                              "' (integer, shift, block)");
}

eb::FMode pick_fmode(const eb::Spectrum& s) {
  return s.is_integer() ? eb::FMode::closed_form_sine
                        : eb::FMode::sine_relative;
}

int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string pick_format(const json& r, const std::string& dflt,
                        const std::set<std::string>& allowed) {
  std::string f = gets(r, "format", dflt);
  if (!allowed.count(f))
    throw std::invalid_argument("format '" + f +
                                "' is not supported by this command");
  return f;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  eb::write_text_file(out_path, text);
}

// ------------------------------------------------------------ option wiring

// records which flags the user actually passed so they can overlay the
// config file afterwards; CLI11 holds the values, we hold the json writers
struct Overlay {
  std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> items;

  void add(CLI::Option* opt, std::function<void(json&)> put) {
    items.emplace_back(opt, std::move(put));
  }
  void apply(json& r) const {
    for (const auto& [opt, put] : items)
      if (opt->count() > 0) put(r);
  }
};

struct Opts {
  std::string config_path, out, format;
  long threads = 0;
  // spectrum family
  std::string kind, block_bounds;
  long N = 0;
  double shift_q = 0.0, block_p = 0.0, block_q = 0.0;
  // critical
  std::string route;
  double tau = 0.0, t_lo = 0.0, t_hi = 0.0;
  long block_count = 0, window = 0, n_max = 0, k_max = 0, N_prod = 0;
  // kfunc-sweep
  std::string method;
  double ratio = 0.0;
  // a2-sweep
  std::string s_grid;
  double y = 0.0, X_max = 0.0;
  long j_min = 0, j_max = 0, quad_nodes = 0;
  // subcouple
  double slope = 0.0, slope2 = 0.0, theta = 0.0, tol = 0.0;
  bool neumann = false;
  // gram
  std::string mode;
  double t = 0.0;
  long gram_N = 0;
  bool no_normalize = false;
  // reconcile
  std::vector<std::string> inputs;
};

void add_io_opts(CLI::App* c, Opts& o, Overlay& ov,
                 std::set<std::string>& keys) {
  c->add_option("--config", o.config_path,
                "JSON config file; flags override its keys");
  ov.add(c->add_option("--out", o.out, "output path (default: stdout)"),
         [&o](json& r) { r["out"] = o.out; });
  ov.add(c->add_option("--format", o.format, "output format: csv or json"),
         [&o](json& r) { r["format"] = o.format; });
  keys.insert({"out", "format"});
}

void add_spectrum_opts(CLI::App* c, Opts& o, Overlay& ov,
                       std::set<std::string>& keys) {
  ov.add(c->add_option("--kind", o.kind, "spectrum kind: integer, shift, block"),
         [&o](json& r) { r["kind"] = o.kind; });
  ov.add(c->add_option("--N", o.N, "spectrum window half-width"),
         [&o](json& r) { r["N"] = o.N; });
  ov.add(c->add_option("--shift-q", o.shift_q,
                       "constant shift q (implies --kind shift)"),
         [&o](json& r) { r["shift-q"] = o.shift_q; });
  ov.add(c->add_option("--block-p", o.block_p, "block spectrum inner shift"),
         [&o](json& r) { r["block-p"] = o.block_p; });
  ov.add(c->add_option("--block-q", o.block_q, "block spectrum outer shift"),
         [&o](json& r) { r["block-q"] = o.block_q; });
  ov.add(c->add_option("--block-bounds", o.block_bounds,
                       "comma list of block boundaries"),
         [&o](json& r) { r["block-bounds"] = o.block_bounds; });
  keys.insert({"kind", "N", "shift-q", "block-p", "block-q", "block-bounds"});
}

// ------------------------------------------------------------- subcommands

int run_spectrum(const json& r) {
  eb::Spectrum s = build_spectrum(r);
  pick_format(r, "json", {"json"});
  json doc = eb::spectrum_to_json(s);
  doc["config"] = r;
  emit(gets(r, "out", ""), doc.dump(2) + "\n");
  return 0;
}

int run_critical(const json& r) {
  eb::Spectrum s = build_spectrum(r);
  pick_format(r, "json", {"json"});
  std::string route = gets(r, "route", "delta");
  eb::CriticalIndices ci;
  if (route == "delta") {
    double tau = getd(r, "tau", 16.0);
    double t_lo = getd(r, "t-lo", 1.0);
    double t_hi = getd(r, "t-hi", std::max(t_lo, double(s.N) / tau));
    ci = eb::s_from_deltas(s, tau, eb::geometric_t_grid(t_lo, t_hi));
  } else if (route == "blocks") {
    long cmax = 0;
    while (cmax < 30 && (1L << (cmax + 1)) <= s.N) ++cmax;
    long count = getl(r, "block-count", std::min<long>(14, cmax));
    long window = getl(r, "window", std::max<long>(1, count / 2));
    ci = eb::s_from_blocks(eb::blocks_from_spectrum(s, count), window).ci;
  } else if (route == "weights") {
    long fit = 4;
    while (fit < 6 && 256.0 * std::ldexp(1.0, int(fit) + 1) <= double(s.N))
      ++fit;
    long n_max = getl(r, "n-max", fit);
    long k_max = getl(r, "k-max", std::max<long>(2, n_max - 1));
    long N_prod = getl(r, "N-prod", s.N);
    eb::GeneratingFunction g = eb::make_genfun(s, pick_fmode(s), N_prod);
    ci = eb::s_from_weights(eb::weight_sequence(g, n_max), k_max);
  } else {
    throw std::invalid_argument("unknown route '" + route +
                                "' (delta, blocks, weights)");
  }
  json doc = eb::critical_to_json(ci, json{{"config", r}});
  emit(gets(r, "out", ""), doc.dump(2) + "\n");
  return 0;
}

int run_kfunc_sweep(const json& r) {
  eb::Spectrum s = build_spectrum(r);
  pick_format(r, "csv", {"csv"});
  long N_prod = getl(r, "N-prod", s.N);
  eb::GeneratingFunction g = eb::make_genfun(s, pick_fmode(s), N_prod);
  std::string method = gets(r, "method", "series");
  eb::NormMethod nm;
  if (method == "series")
    nm = eb::NormMethod::series;
  else if (method == "integral")
    nm = eb::NormMethod::integral;
  else if (method == "closed_form" || method == "closed")
    nm = eb::NormMethod::closed_form;
  else
    throw std::invalid_argument("unknown method '" + method +
                                "' (series, integral, closed_form)");
  double t_lo = getd(r, "t-lo", 4.0);
  double t_hi = getd(r, "t-hi", 64.0);
  double ratio = getd(r, "ratio", 1.189207115002721);
  eb::DualNormCurve c = eb::dual_norm_curve(
      g, eb::geometric_t_grid(t_lo, t_hi, ratio), nm, eb::CurveParams{});
  emit(gets(r, "out", ""), eb::dual_norm_curve_csv(c, r));
  return 0;
}

int run_a2_sweep(const json& r) {
  eb::Spectrum s = build_spectrum(r);
  std::string fmt = pick_format(r, "json", {"json", "csv"});
  long N_prod = getl(r, "N-prod", s.N);
  eb::GeneratingFunction g = eb::make_genfun(s, pick_fmode(s), N_prod);
  double y = getd(r, "y", s.sup_tau() + 1.0);
  std::vector<double> s_grid = get_dlist(r, "s-grid", {0.3, 0.5, 0.7});
  eb::DyadicFamily fam;
  fam.j_min = getl(r, "j-min", fam.j_min);
  fam.j_max = getl(r, "j-max", fam.j_max);
  fam.X_max = getd(r, "X-max", fam.X_max);
  fam.quad_nodes = getl(r, "quad-nodes", fam.quad_nodes);
  int threads = static_cast<int>(getl(r, "threads", default_threads()));
  eb::SweepTable table = eb::sweep_s(g, y, s_grid, fam, threads);
  std::string text = fmt == "csv"
                         ? eb::a2_csv(table, r)
                         : eb::a2_summary_json(table, r).dump(2) + "\n";
  emit(gets(r, "out", ""), text);
  return 0;
}

int run_subcouple(const json& r) {
  pick_format(r, "json", {"json"});
  if (!r.contains("theta"))
    throw std::invalid_argument("subcouple: --theta is required");
  if (!r.contains("slope"))
    throw std::invalid_argument("subcouple: --slope is required");
  double theta = getd(r, "theta", 0.0);
  long n_max = getl(r, "n-max", 256);
  if (n_max < 4) throw std::invalid_argument("subcouple: need n-max >= 4");
  double s_even = getd(r, "slope", 0.0);
  double s_odd = getd(r, "slope2", s_even);

  eb::WeightSeq w;
  w.p = 2.0;
  w.n_max = n_max;
  w.w.assign(static_cast<std::size_t>(n_max) + 1, 1.0);
  double lw = 0.0;
  for (long n = 1; n <= n_max; ++n) {
    // slope alternates per octave of n; with slope2 absent this is the
    // plain power weight 2^{slope * n}
    long oct = 0;
    while ((2L << oct) <= n) ++oct;
    lw += (oct % 2 == 0) ? s_even : s_odd;
    if (std::fabs(lw) > 900.0)
      throw std::invalid_argument(
          "subcouple: weight exponent overflows binary64, lower n-max or the slopes");
    w.w[static_cast<std::size_t>(n)] = std::exp2(lw);
  }

  long k_max = getl(r, "k-max", 32);
  eb::SubcoupleClassification c = eb::classify(theta, w, k_max, n_max);
  json doc = eb::classification_to_json(theta, c);
  doc["config"] = r;
  if (getb(r, "neumann", false)) {
    eb::ThetaOperator op = eb::make_theta_operator(theta, w, n_max);
    eb::NeumannResult nr =
        eb::neumann_inverse(op, eb::zeta(0), getd(r, "tol", 1e-9));
    doc["neumann"] = {{"terms", nr.terms}, {"residual", nr.residual}};
  }
  emit(gets(r, "out", ""), doc.dump(2) + "\n");
  return 0;
}

int run_gram(const json& r) {
  eb::Spectrum s = build_spectrum(r);
  pick_format(r, "json", {"json"});
  std::string mode_name = gets(r, "mode", "L2");
  eb::GramMode mode;
  if (mode_name == "L2")
    mode = eb::GramMode::L2;
  else if (mode_name == "H1")
    mode = eb::GramMode::H1;
  else
    throw std::invalid_argument("unknown gram mode '" + mode_name +
                                "' (L2, H1)");
  double t = getd(r, "t", 2.0);
  long gN = getl(r, "gram-N", std::min<long>(64, s.N));
  eb::GramMatrix gm =
      eb::gram(s, mode, mode == eb::GramMode::H1 ? t : 0.0, gN);
  bool normalize = getb(r, "normalize", true);
  eb::CondBounds cb = eb::cond_and_bounds(gm, normalize);

  json doc;
  doc["version"] = eb::kVersionString;
  doc["mode"] = mode_name;
  doc["t"] = gm.t;
  doc["N"] = gN;
  doc["normalize"] = normalize;
  doc["cond"] = cb.cond;
  doc["riesz_lower"] = cb.riesz_lower;
  doc["riesz_upper"] = cb.riesz_upper;
  doc["lam_min"] = cb.lam_min;
  doc["lam_max"] = cb.lam_max;
  doc["config"] = r;
  // --out names the matrix artifact base; the condition summary always
  // goes to stdout
  std::string out = gets(r, "out", "");
  if (!out.empty()) {
    eb::write_gram(gm, out, r);
    doc["files"] = {out + ".bin", out + ".json"};
  }
  std::string text = doc.dump(2) + "\n";
  std::fwrite(text.data(), 1, text.size(), stdout);
  return 0;
}

int run_reconcile(const json& r) {
  pick_format(r, "json", {"json"});
  std::vector<std::string> inputs = get_slist(r, "inputs", {});
  if (inputs.size() < 2)
    throw std::invalid_argument(
        "reconcile: need at least two critical reports (--inputs)");
  std::vector<eb::CriticalIndices> rs;
  for (const std::string& p : inputs) {
    std::string text;
    try {
      text = eb::read_text_file(p);
    } catch (const std::runtime_error& e) {
      // a missing report is a configuration problem, not a numerical one
      throw std::invalid_argument(e.what());
    }
    rs.push_back(eb::critical_from_json(json::parse(text)));
  }
  eb::ReconcileReport rep = eb::reconcile(rs);
  json pairs = json::array();
  for (const eb::ReconcilePair& p : rep.pairs)
    pairs.push_back({{"a", eb::critical_method_name(p.a)},
                     {"b", eb::critical_method_name(p.b)},
                     {"ds0", p.ds0},
                     {"ds1", p.ds1},
                     {"allowed", p.allowed},
                     {"ok", p.ok}});
  json doc;
  doc["version"] = eb::kVersionString;
  doc["pass"] = rep.pass;
  doc["pairs"] = pairs;
  doc["config"] = r;
  emit(gets(r, "out", ""), doc.dump(2) + "\n");
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expbasis: numerical laboratory for exponential bases"};
  app.require_subcommand(1);
  Opts o;
  std::map<std::string, Overlay> overlays;
  std::map<std::string, std::set<std::string>> allowed;

  auto* c_spectrum =
      app.add_subcommand("spectrum", "emit a spectrum as JSON");
  auto* c_critical =
      app.add_subcommand("critical", "critical Sobolev exponents s0, s1");
  auto* c_kfunc =
      app.add_subcommand("kfunc-sweep", "dual-norm curve t -> ||psi||_t");
  auto* c_a2 =
      app.add_subcommand("a2-sweep", "Muckenhoupt A2 sweep over s");
  auto* c_sub = app.add_subcommand(
      "subcouple", "weighted shift trichotomy for T_theta = S - 2^theta I");
  auto* c_gram =
      app.add_subcommand("gram", "Gram matrix, condition number, Riesz bounds");
  auto* c_rec = app.add_subcommand(
      "reconcile", "cross-check critical reports produced by several routes");

  for (CLI::App* c : {c_spectrum, c_critical, c_kfunc, c_a2, c_gram}) {
    add_io_opts(c, o, overlays[c->get_name()], allowed[c->get_name()]);
    add_spectrum_opts(c, o, overlays[c->get_name()], allowed[c->get_name()]);
  }
  for (CLI::App* c : {c_sub, c_rec})
    add_io_opts(c, o, overlays[c->get_name()], allowed[c->get_name()]);

  {
    Overlay& ov = overlays["critical"];
    std::set<std::string>& k = allowed["critical"];
    ov.add(c_critical->add_option("--route", o.route,
                                  "delta, blocks, or weights"),
           [&o](json& r) { r["route"] = o.route; });
    ov.add(c_critical->add_option("--tau", o.tau, "shell width factor"),
           [&o](json& r) { r["tau"] = o.tau; });
    ov.add(c_critical->add_option("--t-lo", o.t_lo, "lowest t on the grid"),
           [&o](json& r) { r["t-lo"] = o.t_lo; });
    ov.add(c_critical->add_option("--t-hi", o.t_hi, "highest t on the grid"),
           [&o](json& r) { r["t-hi"] = o.t_hi; });
    ov.add(c_critical->add_option("--block-count", o.block_count,
                                  "octave blocks for the block route"),
           [&o](json& r) { r["block-count"] = o.block_count; });
    ov.add(c_critical->add_option("--window", o.window,
                                  "window length for the block route"),
           [&o](json& r) { r["window"] = o.window; });
    ov.add(c_critical->add_option("--n-max", o.n_max,
                                  "dyadic levels for the weight route"),
           [&o](json& r) { r["n-max"] = o.n_max; });
    ov.add(c_critical->add_option("--k-max", o.k_max,
                                  "slope window for the weight route"),
           [&o](json& r) { r["k-max"] = o.k_max; });
    ov.add(c_critical->add_option("--N-prod", o.N_prod,
                                  "generating-function truncation"),
           [&o](json& r) { r["N-prod"] = o.N_prod; });
    k.insert({"route", "tau", "t-lo", "t-hi", "block-count", "window",
              "n-max", "k-max", "N-prod"});
  }
  {
    Overlay& ov = overlays["kfunc-sweep"];
    std::set<std::string>& k = allowed["kfunc-sweep"];
    ov.add(c_kfunc->add_option("--method", o.method,
                               "series, integral, or closed_form"),
           [&o](json& r) { r["method"] = o.method; });
    ov.add(c_kfunc->add_option("--t-lo", o.t_lo, "lowest t"),
           [&o](json& r) { r["t-lo"] = o.t_lo; });
    ov.add(c_kfunc->add_option("--t-hi", o.t_hi, "highest t"),
           [&o](json& r) { r["t-hi"] = o.t_hi; });
    ov.add(c_kfunc->add_option("--ratio", o.ratio, "geometric grid ratio"),
           [&o](json& r) { r["ratio"] = o.ratio; });
    ov.add(c_kfunc->add_option("--N-prod", o.N_prod,
                               "generating-function truncation"),
           [&o](json& r) { r["N-prod"] = o.N_prod; });
    k.insert({"method", "t-lo", "t-hi", "ratio", "N-prod"});
  }
  {
    Overlay& ov = overlays["a2-sweep"];
    std::set<std::string>& k = allowed["a2-sweep"];
    ov.add(c_a2->add_option("--y", o.y, "horizontal line height"),
           [&o](json& r) { r["y"] = o.y; });
    ov.add(c_a2->add_option("--s-grid", o.s_grid, "comma list of s values"),
           [&o](json& r) { r["s-grid"] = o.s_grid; });
    ov.add(c_a2->add_option("--j-min", o.j_min, "smallest dyadic scale"),
           [&o](json& r) { r["j-min"] = o.j_min; });
    ov.add(c_a2->add_option("--j-max", o.j_max, "largest dyadic scale"),
           [&o](json& r) { r["j-max"] = o.j_max; });
    ov.add(c_a2->add_option("--X-max", o.X_max, "farthest interval center"),
           [&o](json& r) { r["X-max"] = o.X_max; });
    ov.add(c_a2->add_option("--quad-nodes", o.quad_nodes,
                            "Gauss-Legendre nodes per panel"),
           [&o](json& r) { r["quad-nodes"] = o.quad_nodes; });
    ov.add(c_a2->add_option("--N-prod", o.N_prod,
                            "generating-function truncation"),
           [&o](json& r) { r["N-prod"] = o.N_prod; });
    ov.add(c_a2->add_option("--threads", o.threads, "worker threads"),
           [&o](json& r) { r["threads"] = o.threads; });
    k.insert({"y", "s-grid", "j-min", "j-max", "X-max", "quad-nodes",
              "N-prod", "threads"});
  }
  {
    Overlay& ov = overlays["subcouple"];
    std::set<std::string>& k = allowed["subcouple"];
    ov.add(c_sub->add_option("--slope", o.slope, "log2 weight slope"),
           [&o](json& r) { r["slope"] = o.slope; });
    ov.add(c_sub->add_option("--slope2", o.slope2,
                             "second slope, alternating per octave"),
           [&o](json& r) { r["slope2"] = o.slope2; });
    ov.add(c_sub->add_option("--theta", o.theta, "interpolation parameter"),
           [&o](json& r) { r["theta"] = o.theta; });
    ov.add(c_sub->add_option("--n-max", o.n_max, "weight window length"),
           [&o](json& r) { r["n-max"] = o.n_max; });
    ov.add(c_sub->add_option("--k-max", o.k_max, "sigma-index resolution"),
           [&o](json& r) { r["k-max"] = o.k_max; });
    ov.add(c_sub->add_flag("--neumann", o.neumann,
                           "also invert T_theta zeta_0 by Neumann series"),
           [&o](json& r) { r["neumann"] = o.neumann; });
    ov.add(c_sub->add_option("--tol", o.tol, "Neumann truncation tolerance"),
           [&o](json& r) { r["tol"] = o.tol; });
    k.insert({"slope", "slope2", "theta", "n-max", "k-max", "neumann", "tol"});
  }
  {
    Overlay& ov = overlays["gram"];
    std::set<std::string>& k = allowed["gram"];
    ov.add(c_gram->add_option("--mode", o.mode, "L2 or H1"),
           [&o](json& r) { r["mode"] = o.mode; });
    ov.add(c_gram->add_option("--t", o.t, "H1 smoothing parameter"),
           [&o](json& r) { r["t"] = o.t; });
    ov.add(c_gram->add_option("--gram-N", o.gram_N, "matrix half-width"),
           [&o](json& r) { r["gram-N"] = o.gram_N; });
    ov.add(c_gram->add_flag("--no-normalize", o.no_normalize,
                            "skip diagonal normalization"),
           [&o](json& r) { r["normalize"] = !o.no_normalize; });
    k.insert({"mode", "t", "gram-N", "normalize"});
  }
  {
    Overlay& ov = overlays["reconcile"];
    std::set<std::string>& k = allowed["reconcile"];
    ov.add(c_rec->add_option("--inputs", o.inputs,
                             "two or more critical report files"),
           [&o](json& r) { r["inputs"] = o.inputs; });
    k.insert({"inputs"});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    (void)app.exit(e);
    return fail(2, "validation", e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string cmd = sub->get_name();
  try {
    // CLI11 quietly turns --shift-q '' into 0.0, which is a trap for shell
    // scripts with an unset variable; reject empty values across the board
    for (const CLI::Option* opt : sub->get_options())
      if (opt->count() > 0)
        for (const std::string& raw : opt->results())
          if (raw.empty())
            throw std::invalid_argument("option " + opt->get_name() +
                                        ": empty value");
    json resolved = json::object();
    if (!o.config_path.empty()) {
      std::string cfg_text;
      try {
        cfg_text = eb::read_text_file(o.config_path);
      } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
      }
      json cfg = json::parse(cfg_text);
      if (!cfg.is_object())
        throw std::invalid_argument("config file must hold a JSON object");
      if (cfg.contains("command")) {
        if (!cfg["command"].is_string() ||
            cfg["command"].get<std::string>() != cmd)
          throw std::invalid_argument(
              "config command disagrees with the subcommand");
        cfg.erase("command");
      }
      resolved = std::move(cfg);
    }
    overlays[cmd].apply(resolved);
    for (const auto& [key, value] : resolved.items()) {
      (void)value;
      if (!allowed[cmd].count(key))
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
    resolved["command"] = cmd;

    if (cmd == "spectrum") return run_spectrum(resolved);
    if (cmd == "critical") return run_critical(resolved);
    if (cmd == "kfunc-sweep") return run_kfunc_sweep(resolved);
    if (cmd == "a2-sweep") return run_a2_sweep(resolved);
    if (cmd == "subcouple") return run_subcouple(resolved);
    if (cmd == "gram") return run_gram(resolved);
    if (cmd == "reconcile") return run_reconcile(resolved);
    throw std::invalid_argument("unknown command " + cmd);
  } catch (const json::exception& e) {
    return fail(2, "validation", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, "validation", e.what());
  } catch (const std::domain_error& e) {
    return fail(2, "validation", e.what());
  } catch (const std::runtime_error& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(3, "internal", e.what());
  }
}
