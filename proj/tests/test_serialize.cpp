#include "catch_amalgamated.hpp"

#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "expbasis/serialize.hpp"

using namespace expbasis;

namespace {

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string::npos) nl = csv.size();
    std::string line = csv.substr(pos, nl - pos);
    if (!line.empty() && line[0] != '#') out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = line.find(',', pos);
    if (c == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("num17 restores the exact binary64 value") {
  std::vector<double> vals{0.1,
                           1.0 / 3.0,
                           1e-300,
                           -2.5000000000000004,
                           6.283185307179586,
                           123456789.12345679,
                           -0.0,
                           5e-324};
  std::mt19937_64 rng(77u);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) vals.push_back(U(rng));
  for (double v : vals) {
    std::string s = num17(v);
    double back = std::strtod(s.c_str(), nullptr);
    REQUIRE(back == v);
  }
  REQUIRE(std::signbit(std::strtod(num17(-0.0).c_str(), nullptr)));
}

TEST_CASE("spectrum json round trip is bitwise") {
  Spectrum blk = make_block(0.1, 0.3, {16, 256}, 512);
  Spectrum back = spectrum_from_json(spectrum_to_json(blk));
  REQUIRE(back.N == blk.N);
  for (long n = -blk.N; n <= blk.N; ++n) {
    REQUIRE(back.lambda(n).real() == blk.lambda(n).real());
    REQUIRE(back.lambda(n).imag() == blk.lambda(n).imag());
  }

  long N = 40;
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> U(-0.45, 0.45);
  std::vector<double> d(static_cast<std::size_t>(2 * N + 1));
  std::vector<double> z(d.size());
  for (auto& v : d) v = U(rng);
  for (auto& v : z) v = 0.5 * U(rng);
  Spectrum cus = make_custom(d, z, N);
  // through an actual text dump, not just the DOM
  json j = json::parse(spectrum_to_json(cus).dump());
  Spectrum cub = spectrum_from_json(j);
  for (long n = -N; n <= N; ++n) {
    REQUIRE(cub.lambda(n).real() == cus.lambda(n).real());
    REQUIRE(cub.lambda(n).imag() == cus.lambda(n).imag());
  }

  json bad = spectrum_to_json(blk);
  bad.erase("im");
  REQUIRE_THROWS_AS(spectrum_from_json(bad), std::invalid_argument);
  json shrunk = spectrum_to_json(blk);
  shrunk["re"].erase(0);
  REQUIRE_THROWS_AS(spectrum_from_json(shrunk), std::invalid_argument);
  json shifted = spectrum_to_json(blk);
  shifted["n"][0] = 7;
  REQUIRE_THROWS_AS(spectrum_from_json(shifted), std::invalid_argument);
}

TEST_CASE("curve csv carries version, config, header, and exact numbers") {
  Spectrum si = make_constant_shift(0.0, 4096);
  GeneratingFunction gi = make_genfun(si, FMode::closed_form_sine, 4096);
  DualNormCurve c = dual_norm_curve(gi, {2.0, 4.0, 8.0}, NormMethod::closed_form);
  json cfg{{"command", "kfunc-sweep"}, {"N", 4096}};
  std::string csv = dual_norm_curve_csv(c, cfg);

  REQUIRE(csv.find("# expbasis 0.3.0") != std::string::npos);
  REQUIRE(csv.find("\"command\":\"kfunc-sweep\"") != std::string::npos);
  std::vector<std::string> lines = data_lines(csv);
  REQUIRE(lines.size() == 4);
  REQUIRE(lines[0] == "t,log_norm,method,M_or_X,tail_fraction");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = split_commas(lines[i]);
    REQUIRE(f.size() == 5);
    REQUIRE(std::strtod(f[0].c_str(), nullptr) == c.points[i - 1].t);
    REQUIRE(std::strtod(f[1].c_str(), nullptr) == c.points[i - 1].log_norm);
    REQUIRE(f[2] == "closed_form");
  }

  std::string fcsv = f_curve_csv(gi, {0.5, 1.5, 2.5});
  std::vector<std::string> fl = data_lines(fcsv);
  REQUIRE(fl[0] == "t,log_mag,phase,truncation_bound");
  REQUIRE(fl.size() == 4);
  // closed form carries no truncation at all
  for (std::size_t i = 1; i < fl.size(); ++i)
    REQUIRE(split_commas(fl[i])[3] == "0");
}

TEST_CASE("critical json round trips through its reader") {
  Spectrum sh = make_constant_shift(0.2, 16384);
  CriticalIndices ci = s_from_deltas(sh, 16.0, geometric_t_grid(1.0, 1024.0));
  json j = json::parse(critical_to_json(ci, {{"spectrum", "shift"}}).dump());
  CriticalIndices back = critical_from_json(j);
  REQUIRE(back.s0 == ci.s0);
  REQUIRE(back.s1 == ci.s1);
  REQUIRE(back.uncertainty == ci.uncertainty);
  REQUIRE(back.method == ci.method);
  REQUIRE(back.tau_used == ci.tau_used);

  json bad = critical_to_json(ci);
  bad["method"] = "psychic";
  REQUIRE_THROWS_AS(critical_from_json(bad), std::invalid_argument);
  json swapped = critical_to_json(ci);
  swapped["s0"] = 0.9;
  swapped["s1"] = 0.1;
  REQUIRE_THROWS_AS(critical_from_json(swapped), std::runtime_error);
}

TEST_CASE("subcouple and a2 documents expose the right fields") {
  WeightSeq w;
  w.n_max = 64;
  w.w.resize(65);
  for (int n = 0; n <= 64; ++n) w.w[static_cast<std::size_t>(n)] = std::exp2(0.5 * n);
  SubcoupleClassification c = classify(0.75, w, 16);
  json j = classification_to_json(0.75, c);
  REQUIRE(j["verdict"] == "Invertible");
  REQUIRE(j["theta"] == 0.75);
  REQUIRE(j["lsv_table"].is_array());
  REQUIRE(j["lsv_table"].size() == c.lsv.size());
  REQUIRE(j.contains("sigma0"));
  REQUIRE(j.contains("sigma1"));

  LogWeight lu = [](double x) { return 0.5 * 1.5 * std::log1p(x * x); };
  DyadicFamily fam;
  fam.j_min = -1;
  fam.j_max = 4;
  fam.X_max = 16.0;
  A2Report rep = a2_constant(lu, family_lengths(fam), family_centers(fam), 16);
  SweepTable tab;
  tab.y = 1.0;
  SweepRow row;
  row.s = 0.25;
  row.report = rep;
  row.growth = rep.constant_by_scale.back() / rep.constant_by_scale.front();
  row.fails = row.growth >= 10.0;
  tab.rows.push_back(row);
  std::string csv = a2_csv(tab);
  std::vector<std::string> lines = data_lines(csv);
  REQUIRE(lines[0] == "s,j,constant");
  REQUIRE(lines.size() == 1 + 6);  // six scales
  REQUIRE(split_commas(lines[1])[1] == "-1");
  REQUIRE(split_commas(lines[6])[1] == "4");
  json summary = a2_summary_json(tab);
  REQUIRE(summary["rows"].size() == 1);
  REQUIRE(summary["s_fail_lo"].is_null());
  REQUIRE(summary["y"] == 1.0);
}

TEST_CASE("gram binary export round trips bitwise") {
  long N = 5;
  std::vector<double> dz(2 * N + 1, 0.0), tz(2 * N + 1, 0.0);
  dz[2] = 0.2;
  tz[7] = -0.3;
  Spectrum s = make_custom(dz, tz, N);
  GramMatrix gm = gram(s, GramMode::H1, 2.5, N);

  std::string base = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR")
                                                       : "/tmp") +
                     "/expbasis_gram_rt";
  write_gram(gm, base, {{"command", "gram"}});
  GramMatrix back = read_gram(base);
  REQUIRE(back.mode == GramMode::H1);
  REQUIRE(back.t == 2.5);
  REQUIRE(back.N == N);
  for (long i = 0; i < 2 * N + 1; ++i)
    for (long j = 0; j < 2 * N + 1; ++j) {
      REQUIRE(back.G(i, j).real() == gm.G(i, j).real());
      REQUIRE(back.G(i, j).imag() == gm.G(i, j).imag());
    }
  json hdr = json::parse(read_text_file(base + ".json"));
  REQUIRE(hdr["size"] == 11);
  REQUIRE(hdr["mode"] == "H1");
  REQUIRE(hdr["version"] == kVersionString);
  REQUIRE(hdr["config"]["command"] == "gram");

  // truncated payload must be rejected
  std::string bin = read_text_file(base + ".bin");
  write_text_file(base + ".bin", bin.substr(0, bin.size() - 8));
  REQUIRE_THROWS_AS(read_gram(base), std::runtime_error);
  std::remove((base + ".bin").c_str());
  std::remove((base + ".json").c_str());
}
