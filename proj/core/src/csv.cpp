#include "outage/csv.hpp"

#include <cmath>
#include <cstdio>

namespace outage {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_number(v))); }

CsvWriter& CsvWriter::field(int v) { return field(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace outage
