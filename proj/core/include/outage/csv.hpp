#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace outage {

/// Fixed 12-significant-digit formatting used by every CSV artifact.
std::string format_number(double v);

/// Minimal CSV writer. Fields are written verbatim; callers pass plain
/// identifiers and numbers only.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(std::string_view text);
  CsvWriter& field(double v);
  CsvWriter& field(int v);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace outage
