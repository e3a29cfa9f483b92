#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mjost {

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
/// RFC 4180: quote fields containing a comma, quote, CR or LF; double quotes inside.
std::string csv_field(std::string_view s);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace mjost
