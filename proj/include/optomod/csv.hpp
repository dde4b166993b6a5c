#pragma once

#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "optomod/errors.hpp"

namespace optomod {

/// Shortest-form-independent text for a double: always 17 significant
/// digits, so values round-trip exactly.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Line-oriented CSV writer. Complex cells expand to two columns; header
/// names for them are expected as <name>_re, <name>_im.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
  }

  CsvWriter& cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
  }
  CsvWriter& cell(std::complex<double> v) { return cell(v.real()).cell(v.imag()); }
  CsvWriter& cell(int v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& cell(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::Io, "failed writing '" + path_ + "'");
  }

  const std::string& path() const { return path_; }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::string path_;
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace optomod
