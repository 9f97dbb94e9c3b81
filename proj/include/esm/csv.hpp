#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace esm {

/// Round-trip-safe decimal rendering (17 significant digits by default).
/// NaN is normalized to "nan" regardless of sign.
inline std::string format_float(double v, int precision = 17) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return std::string(buf);
}

/// Assembles CSV text: '#'-prefixed metadata comments, a single header line,
/// comma-separated rows.
class CsvBuilder {
 public:
  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& columns) { line(columns); }

  void row(const std::vector<std::string>& cells) { line(cells); }

  std::string str() const { return os_.str(); }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

  std::ostringstream os_;
};

}  // namespace esm
