#pragma once

// CSV dialect used by every artifact: comma separated, '.' decimal point,
// 17 significant digits, header row, LF line endings.

#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>

namespace pgreen {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((cell(cells, first)), ...);
    out_ << '\n';
  }

 private:
  void sep(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }
  void cell(double v, bool& first) {
    sep(first);
    out_ << format_real(v);
  }
  void cell(const std::string& s, bool& first) {
    sep(first);
    out_ << s;
  }
  void cell(const char* s, bool& first) {
    sep(first);
    out_ << s;
  }
  template <class Int>
  requires std::is_integral_v<Int> void cell(Int v, bool& first) {
    sep(first);
    out_ << v;
  }

  std::ostream& out_;
};

}  // namespace pgreen
