#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "esm/correlation.hpp"
#include "esm/csv.hpp"
#include "esm/errors.hpp"
#include "esm/poly.hpp"
#include "esm/source.hpp"

namespace esm {

struct TimeSpec {
  double t_max = 10.0;
  int n_steps = 501;

  void validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("time: t_max > 0");
    if (n_steps < 2) throw ValidationError("time: n_steps >= 2");
  }
};

struct OutputSpec {
  std::string path;  ///< empty means stdout
  int precision = 17;

  void validate() const {
    if (precision < 1 || precision > 30) {
      throw ValidationError("output: precision must be in [1, 30]");
    }
  }
};

/// Fully resolved run configuration (one system, one observable pair, one
/// stencil, one time grid).
struct RunConfig {
  SystemSpec sys;
  PolynomialObservable a{0.0, 1.0};
  PolynomialObservable b{0.0, 1.0};
  SourceStencil stencil;
  TimeSpec time;
  OutputSpec output;
  bool pad_explicit = false;

  std::vector<double> times() const { return uniform_grid(time.t_max, time.n_steps); }

  /// Build padding needed by every polynomial this run can touch: the
  /// potential, both observables, and the antiderivative of b.
  int required_pad() const {
    int need = 2;
    need = std::max(need, sys.potential.degree());
    need = std::max(need, a.degree());
    need = std::max(need, b.degree() + 1);
    return need;
  }

  /// Derive the pad (unless set explicitly) and validate every invariant.
  void finalize() {
    if (!pad_explicit) sys.basis.build_pad = required_pad();
    sys.validate();
    stencil.validate();
    time.validate();
    output.validate();
    if (sys.basis.build_pad < required_pad()) {
      throw PadTooSmall("basis: build_pad " + std::to_string(sys.basis.build_pad) +
                        " < required " + std::to_string(required_pad()));
    }
  }

  /// Canonical "section.key = value" lines, in a fixed order, for metadata
  /// comments.  Excludes output.path so artifacts written to different files
  /// stay byte-comparable.
  std::vector<std::string> snapshot() const {
    auto list = [](const std::vector<double>& c) {
      std::string s;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ' ';
        s += format_float(c[i]);
      }
      return s;
    };
    std::vector<std::string> lines;
    lines.push_back("system.mass = " + format_float(sys.basis.mass));
    lines.push_back("system.hbar = " + format_float(sys.basis.hbar));
    lines.push_back("system.ref_frequency = " + format_float(sys.basis.ref_frequency));
    lines.push_back("system.potential = " + list(sys.potential.coeffs()));
    lines.push_back("thermo.beta = " + format_float(sys.th.beta));
    lines.push_back("thermo.kB = " + format_float(sys.th.kB));
    lines.push_back("basis.n = " + std::to_string(sys.basis.size));
    lines.push_back("basis.build_pad = " + std::to_string(sys.basis.build_pad));
    lines.push_back("esm.a_coeffs = " + list(a.coeffs()));
    lines.push_back("esm.b_coeffs = " + list(b.coeffs()));
    lines.push_back("esm.h_mu = " + format_float(stencil.h_mu));
    lines.push_back("esm.h_nu = " + format_float(stencil.h_nu));
    lines.push_back("esm.scheme = " + scheme_name(stencil.scheme));
    lines.push_back("esm.nu_mode = " + nu_mode_name(stencil.nu_mode));
    lines.push_back("time.t_max = " + format_float(time.t_max));
    lines.push_back("time.n_steps = " + std::to_string(time.n_steps));
    lines.push_back("output.precision = " + std::to_string(output.precision));
    return lines;
  }
};

enum class ScanAxis { basis_n, h_mu, h_nu, beta };

inline std::string scan_axis_name(ScanAxis a) {
  switch (a) {
    case ScanAxis::basis_n: return "basis_n";
    case ScanAxis::h_mu: return "h_mu";
    case ScanAxis::h_nu: return "h_nu";
    default: return "beta";
  }
}

struct ScanConfig {
  RunConfig base;
  ScanAxis axis = ScanAxis::basis_n;
  std::vector<double> values;

  void validate() const {
    if (values.empty()) throw ValidationError("scan: values must be nonempty");
    for (double v : values) {
      if (!std::isfinite(v)) throw ValidationError("scan: values must be finite");
      switch (axis) {
        case ScanAxis::basis_n:
          if (v != std::floor(v) || v < 2.0) {
            throw ValidationError("scan: basis_n values must be integers >= 2");
          }
          break;
        case ScanAxis::h_mu:
        case ScanAxis::h_nu:
          if (!(v > 0.0)) throw ValidationError("scan: step values must be > 0");
          break;
        case ScanAxis::beta:
          if (!(v > 0.0)) throw ValidationError("scan: beta values must be > 0");
          break;
      }
    }
  }
};

namespace detail {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;  ///< 0 marks command-line overrides
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<IniEntry> parse_ini(const std::string& text) {
  std::vector<IniEntry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string raw =
        text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError("malformed section header \"" + line + "\"", line_no);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError("empty section name", line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value, got \"" + line + "\"", line_no);
    }
    if (section.empty()) {
      throw ParseError("key \"" + trim(line.substr(0, eq)) + "\" outside any [section]",
                       line_no);
    }
    IniEntry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) throw ParseError("empty key", line_no);
    entries.push_back(std::move(e));
  }
  return entries;
}

/// "section.key=value" command-line override to an entry with line 0.
inline IniEntry parse_override(const std::string& s) {
  const std::size_t eq = s.find('=');
  if (eq == std::string::npos) {
    throw ParseError("override must look like section.key=value: \"" + s + "\"", 0);
  }
  const std::string target = trim(s.substr(0, eq));
  const std::size_t dot = target.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= target.size()) {
    throw ParseError("override must look like section.key=value: \"" + s + "\"", 0);
  }
  IniEntry e;
  e.section = target.substr(0, dot);
  e.key = target.substr(dot + 1);
  e.value = trim(s.substr(eq + 1));
  e.line = 0;
  return e;
}

inline double parse_real(const std::string& tok, const IniEntry& e) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || tok.empty()) {
    throw ParseError("invalid number \"" + tok + "\" in " + e.section + "." + e.key, e.line);
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite number \"" + tok + "\" in " + e.section + "." + e.key, e.line);
  }
  return v;
}

inline int parse_int(const std::string& tok, const IniEntry& e) {
  int v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || tok.empty()) {
    throw ParseError("invalid integer \"" + tok + "\" in " + e.section + "." + e.key, e.line);
  }
  return v;
}

inline std::vector<double> parse_list(const IniEntry& e) {
  std::vector<double> out;
  std::size_t i = 0;
  const std::string& s = e.value;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    out.push_back(parse_real(s.substr(i, j - i), e));
    i = j;
  }
  if (out.empty()) {
    throw ParseError("empty list in " + e.section + "." + e.key, e.line);
  }
  return out;
}

struct ScanEntries {
  std::optional<ScanAxis> axis;
  std::optional<std::vector<double>> values;
};

/// Routes one entry into the config; [scan] entries are collected separately
/// so a single file can drive both plain runs and scans.
inline void apply_entry(RunConfig& cfg, ScanEntries& scan, const IniEntry& e) {
  auto unknown = [&]() -> void {
    throw ParseError("unknown key " + e.section + "." + e.key, e.line);
  };
  if (e.section == "system") {
    if (e.key == "mass") cfg.sys.basis.mass = parse_real(e.value, e);
    else if (e.key == "hbar") cfg.sys.basis.hbar = parse_real(e.value, e);
    else if (e.key == "ref_frequency") cfg.sys.basis.ref_frequency = parse_real(e.value, e);
    else if (e.key == "potential") cfg.sys.potential = PolynomialObservable(parse_list(e));
    else unknown();
  } else if (e.section == "thermo") {
    if (e.key == "beta") cfg.sys.th.beta = parse_real(e.value, e);
    else if (e.key == "kB") cfg.sys.th.kB = parse_real(e.value, e);
    else unknown();
  } else if (e.section == "basis") {
    if (e.key == "n") cfg.sys.basis.size = parse_int(e.value, e);
    else if (e.key == "build_pad") {
      cfg.sys.basis.build_pad = parse_int(e.value, e);
      cfg.pad_explicit = true;
    } else unknown();
  } else if (e.section == "esm") {
    if (e.key == "a_coeffs") cfg.a = PolynomialObservable(parse_list(e));
    else if (e.key == "b_coeffs") cfg.b = PolynomialObservable(parse_list(e));
    else if (e.key == "h_mu") cfg.stencil.h_mu = parse_real(e.value, e);
    else if (e.key == "h_nu") cfg.stencil.h_nu = parse_real(e.value, e);
    else if (e.key == "scheme") {
      if (e.value == "central2") cfg.stencil.scheme = Scheme::central2;
      else if (e.value == "central2_richardson") cfg.stencil.scheme = Scheme::central2_richardson;
      else throw ParseError("unknown scheme \"" + e.value + "\"", e.line);
    } else if (e.key == "nu_mode") {
      if (e.value == "fd") cfg.stencil.nu_mode = NuMode::fd;
      else if (e.value == "semianalytic_mu") cfg.stencil.nu_mode = NuMode::semianalytic_mu;
      else throw ParseError("unknown nu_mode \"" + e.value + "\"", e.line);
    } else unknown();
  } else if (e.section == "time") {
    if (e.key == "t_max") cfg.time.t_max = parse_real(e.value, e);
    else if (e.key == "n_steps") cfg.time.n_steps = parse_int(e.value, e);
    else unknown();
  } else if (e.section == "output") {
    if (e.key == "path") cfg.output.path = e.value;
    else if (e.key == "precision") cfg.output.precision = parse_int(e.value, e);
    else unknown();
  } else if (e.section == "scan") {
    if (e.key == "axis") {
      if (e.value == "basis_n") scan.axis = ScanAxis::basis_n;
      else if (e.value == "h_mu") scan.axis = ScanAxis::h_mu;
      else if (e.value == "h_nu") scan.axis = ScanAxis::h_nu;
      else if (e.value == "beta") scan.axis = ScanAxis::beta;
      else throw ParseError("unknown scan axis \"" + e.value + "\"", e.line);
    } else if (e.key == "values") {
      scan.values = parse_list(e);
    } else unknown();
  } else {
    throw ParseError("unknown section \"" + e.section + "\"", e.line);
  }
}

inline std::pair<RunConfig, ScanEntries> parse_all(const std::string& text,
                                                   const std::vector<std::string>& overrides) {
  std::vector<IniEntry> entries = parse_ini(text);
  for (const std::string& o : overrides) entries.push_back(parse_override(o));
  RunConfig cfg;
  ScanEntries scan;
  for (const IniEntry& e : entries) apply_entry(cfg, scan, e);
  return {std::move(cfg), std::move(scan)};
}

}  // namespace detail

/// Parses sectioned key-value text (plus command-line overrides) into a
/// validated RunConfig.  A [scan] section, if present, is accepted and
/// ignored here.
inline RunConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {}) {
  auto [cfg, scan] = detail::parse_all(text, overrides);
  cfg.finalize();
  return cfg;
}

/// Like parse_config, but requires the [scan] section (axis + values).
inline ScanConfig parse_scan_config(const std::string& text,
                                    const std::vector<std::string>& overrides = {}) {
  auto [cfg, scan] = detail::parse_all(text, overrides);
  cfg.finalize();
  if (!scan.axis || !scan.values) {
    throw ValidationError("scan: [scan] section with axis and values is required");
  }
  ScanConfig sc;
  sc.base = std::move(cfg);
  sc.axis = *scan.axis;
  sc.values = *scan.values;
  sc.validate();
  return sc;
}

}  // namespace esm
