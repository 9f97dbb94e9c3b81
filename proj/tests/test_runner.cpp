#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "esm/esm.hpp"

namespace {

struct ParsedCsv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  double num(std::size_t row, std::size_t col) const {
    return std::strtod(rows.at(row).at(col).c_str(), nullptr);
  }
  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, p - start));
    start = p + 1;
  }
  return out;
}

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv out;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.comments.push_back(line);
    } else if (!have_header) {
      out.header = split(line, ',');
      have_header = true;
    } else {
      out.rows.push_back(split(line, ','));
    }
  }
  return out;
}

esm::RunConfig harmonic_config(int n, double t_max, int n_steps) {
  esm::RunConfig cfg;
  cfg.sys.basis.size = n;
  cfg.time.t_max = t_max;
  cfg.time.n_steps = n_steps;
  cfg.stencil.h_mu = 1e-3;
  cfg.stencil.h_nu = 2e-3;
  cfg.stencil.scheme = esm::Scheme::central2_richardson;
  cfg.stencil.nu_mode = esm::NuMode::semianalytic_mu;
  cfg.finalize();
  return cfg;
}

esm::RunConfig anharmonic_config(int n, double t_max, int n_steps) {
  esm::RunConfig cfg;
  cfg.sys.potential = esm::PolynomialObservable{0.0, 0.0, 0.5, 0.1, 0.01};
  cfg.sys.basis.size = n;
  cfg.time.t_max = t_max;
  cfg.time.n_steps = n_steps;
  cfg.stencil.h_mu = 1e-3;
  cfg.stencil.h_nu = 2e-3;
  cfg.stencil.scheme = esm::Scheme::central2_richardson;
  cfg.stencil.nu_mode = esm::NuMode::semianalytic_mu;
  cfg.finalize();
  return cfg;
}

}  // namespace

TEST_CASE("float formatting round-trips and spells nan", "[runner]") {
  CHECK(esm::format_float(std::nan("")) == "nan");
  CHECK(esm::format_float(1.0) == "1");
  CHECK(esm::format_float(2.5, 3) == "2.5");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -7.25e17, 3.141592653589793}) {
    const std::string s = esm::format_float(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("exact runner emits metadata, header, and the cosine series", "[runner]") {
  const esm::RunConfig cfg = harmonic_config(60, M_PI, 3);
  const ParsedCsv csv = parse_csv(esm::run_exact(cfg));

  CHECK(csv.comments.front() == "# kubo-esm exact");
  bool saw_potential = false;
  for (const std::string& c : csv.comments) {
    if (c == "# system.potential = 0 0 0.5") saw_potential = true;
  }
  CHECK(saw_potential);

  REQUIRE(csv.header == std::vector<std::string>{"t", "c_exact_re", "c_exact_im"});
  REQUIRE(csv.rows.size() == 3);
  CHECK_THAT(csv.num(0, 1), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(std::abs(csv.num(1, 1)) < 1e-10);
  CHECK_THAT(csv.num(2, 1), Catch::Matchers::WithinAbs(-1.0, 1e-10));
  for (std::size_t r = 0; r < 3; ++r) CHECK(std::abs(csv.num(r, 2)) < 1e-12);
}

TEST_CASE("esm runner reports every term of the reconstruction", "[runner]") {
  const esm::RunConfig cfg = harmonic_config(60, M_PI, 3);
  const ParsedCsv csv = parse_csv(esm::run_esm(cfg));

  REQUIRE(csv.header ==
          std::vector<std::string>{"t", "c_kv", "c_ad", "d_expect", "c_exact_formula",
                                   "c_exact_direct", "err_kv", "err_formula"});
  REQUIRE(csv.rows.size() == 3);

  const std::size_t kv = csv.col("c_kv"), ad = csv.col("c_ad"), de = csv.col("d_expect");
  const std::size_t ef = csv.col("c_exact_formula"), ek = csv.col("err_kv");
  const std::size_t ff = csv.col("err_formula");

  // t = pi/2: kv = -pi/4, c_ad = +pi/4, so the reconstruction returns ~0.
  CHECK_THAT(csv.num(1, kv), Catch::Matchers::WithinAbs(-M_PI / 4.0, 1e-6));
  CHECK_THAT(csv.num(1, ad), Catch::Matchers::WithinAbs(M_PI / 4.0, 1e-10));
  CHECK(std::abs(csv.num(1, ef)) < 1e-6);
  CHECK_THAT(csv.num(1, ek), Catch::Matchers::WithinAbs(M_PI / 4.0, 1e-4));
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(std::abs(csv.num(r, de)) < 1e-12);
    CHECK(csv.num(r, ff) < 1e-6);
  }

  bool saw_stability = false;
  for (const std::string& c : csv.comments) {
    if (c.find("stability") != std::string::npos) saw_stability = true;
  }
  CHECK(saw_stability);
}

TEST_CASE("esm runner keeps the reconstruction tight over a long window", "[runner]") {
  const esm::RunConfig cfg = harmonic_config(60, 10.0, 101);
  const ParsedCsv csv = parse_csv(esm::run_esm(cfg));
  const std::size_t ff = csv.col("err_formula");
  for (std::size_t r = 0; r < csv.rows.size(); ++r) CHECK(csv.num(r, ff) < 1e-6);
}

TEST_CASE("oracle runner blanks the ratio at correlator zeros", "[runner]") {
  const esm::RunConfig cfg = harmonic_config(60, M_PI, 3);
  const ParsedCsv csv = parse_csv(esm::run_oracle(cfg));

  REQUIRE(csv.header == std::vector<std::string>{"t", "c_kubo", "c_kv", "envelope", "phase",
                                                 "c_ad", "mixed", "ratio"});
  REQUIRE(csv.rows.size() == 3);
  const std::size_t kubo = csv.col("c_kubo"), ratio = csv.col("ratio");
  CHECK_THAT(csv.num(0, kubo), Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK(std::abs(csv.num(1, kubo)) < 1e-14);
  CHECK_THAT(csv.num(2, kubo), Catch::Matchers::WithinAbs(-1.0, 1e-14));
  CHECK(csv.rows[1][ratio] == "nan");
  CHECK(csv.rows[0][ratio] != "nan");
  CHECK_THAT(csv.num(1, csv.col("envelope")),
             Catch::Matchers::WithinRel(std::sqrt(1.0 + M_PI * M_PI / 16.0), 1e-12));

  esm::RunConfig bad = cfg;
  bad.sys.potential = esm::PolynomialObservable{0.0, 0.0, 0.5, 0.1, 0.01};
  bad.finalize();
  CHECK_THROWS_AS(esm::run_oracle(bad), esm::ValidationError);
}

TEST_CASE("single-value scans reproduce a direct approximate run", "[runner]") {
  esm::ScanConfig scan;
  scan.base = harmonic_config(48, 6.0, 31);
  scan.axis = esm::ScanAxis::h_nu;
  scan.values = {2e-3};
  const ParsedCsv csv = parse_csv(esm::run_scan(scan));

  REQUIRE(csv.header == std::vector<std::string>{"value", "max_abs_err", "wall_ms"});
  REQUIRE(csv.rows.size() == 1);
  CHECK(csv.num(0, 0) == 2e-3);
  CHECK(csv.num(0, 2) > 0.0);

  const std::vector<double> times = scan.base.times();
  const esm::CorrelationSeries kv =
      esm::kv_correlator(scan.base.sys, scan.base.a, scan.base.b, scan.base.stencil, times);
  const esm::HarmonicParams hp;  // matches the config: m = w = beta = hbar = 1
  double expected = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    expected = std::max(expected,
                        std::abs(kv.values[k] - esm::Complex(esm::oracle_kv(hp, times[k]).value)));
  }
  CHECK_THAT(csv.num(0, 1), Catch::Matchers::WithinRel(expected, 1e-13));
}

TEST_CASE("step scans show second-order convergence in h_nu", "[runner]") {
  esm::ScanConfig scan;
  scan.base = harmonic_config(60, 10.0, 51);
  scan.base.stencil.scheme = esm::Scheme::central2;
  scan.base.stencil.nu_mode = esm::NuMode::fd;
  scan.axis = esm::ScanAxis::h_nu;
  scan.values = {1e-2, 1e-3};
  const ParsedCsv csv = parse_csv(esm::run_scan(scan));
  REQUIRE(csv.rows.size() == 2);
  const double ratio = csv.num(0, 1) / csv.num(1, 1);
  CHECK(ratio > 50.0);
  CHECK(ratio < 200.0);
}

TEST_CASE("basis scans converge toward the reference run", "[runner]") {
  esm::ScanConfig scan;
  scan.base = anharmonic_config(60, 6.0, 31);
  scan.axis = esm::ScanAxis::basis_n;
  scan.values = {20, 40};
  const ParsedCsv csv = parse_csv(esm::run_scan(scan));
  REQUIRE(csv.rows.size() == 2);
  const double err20 = csv.num(0, 1);
  const double err40 = csv.num(1, 1);
  CHECK(err40 < 1e-5);
  CHECK(err20 > 10.0 * err40);
}

TEST_CASE("verify passes every check on the harmonic configuration", "[runner]") {
  const esm::RunConfig cfg = harmonic_config(60, 10.0, 101);
  const esm::VerifyReport rep = esm::run_verify(cfg);
  CHECK(rep.all_passed);

  const std::vector<std::string> expected = {
      "realness",           "gauge_invariance",     "short_time",
      "secular_cancellation", "boltzmann_derivative", "partition_derivative",
      "density_derivative", "operator_identity",    "d_zero",
      "temperature_independence"};
  REQUIRE(rep.checks.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(rep.checks[i].name == expected[i]);
    CHECK_FALSE(rep.checks[i].skipped);
    CHECK(rep.checks[i].passed);
    CHECK(rep.checks[i].observed <= rep.checks[i].tolerance);
  }

  const std::string text = rep.text();
  CHECK(text.find("overall: PASS") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  CHECK(text == esm::run_verify(cfg).text());
}

TEST_CASE("verify skips the ratio check off the harmonic case", "[runner]") {
  const esm::RunConfig cfg = anharmonic_config(60, 10.0, 101);
  const esm::VerifyReport rep = esm::run_verify(cfg);
  CHECK(rep.all_passed);
  REQUIRE(rep.checks.back().name == "temperature_independence");
  CHECK(rep.checks.back().skipped);
  CHECK(rep.text().find("skipped") != std::string::npos);
}
