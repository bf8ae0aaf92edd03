#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace adoptsub::scenario {

/// 17 significant digits, `.` separator; +infinity renders as `inf`.
std::string format_number(double v);
/// nullopt renders as `inf` (unbounded durations and costs).
std::string format_number(const std::optional<double>& v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(const std::optional<double>& v);
  CsvWriter& cell(int v);
  CsvWriter& cell(bool v);
  CsvWriter& cell(std::string_view v);
  CsvWriter& cell(const char* v) { return cell(std::string_view(v)); }
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace adoptsub::scenario
