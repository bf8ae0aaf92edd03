#include "adoptsub/scenario/csv.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace adoptsub::scenario {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.17g}", v);
}

std::string format_number(const std::optional<double>& v) {
  return v ? format_number(*v) : "inf";
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
  for (std::string_view h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (filled_ == columns_) throw std::logic_error("csv row has too many cells");
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format_number(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::optional<double>& v) {
  separator();
  out_ << format_number(v);
  return *this;
}

CsvWriter& CsvWriter::cell(int v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
  separator();
  out_ << (v ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has too few cells");
  out_ << '\n';
  filled_ = 0;
}

}  // namespace adoptsub::scenario
