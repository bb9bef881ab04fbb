#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace reoica::csv {

/// Shortest decimal that round-trips; "inf", "-inf" and "nan" for specials.
std::string format_double(double value);

/// Minimal RFC-4180 row writer: quotes fields containing , " or newlines.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  Writer& field(std::string_view text);
  Writer& field(double value);
  Writer& field(long long value);
  Writer& empty();
  void end_row();
  void row(const std::vector<std::string>& fields);

 private:
  void separator();

  std::ostream& out_;
  bool first_ = true;
};

/// Splits one CSV line (no embedded newlines) honouring quotes.
std::vector<std::string> split_line(std::string_view line);

}  // namespace reoica::csv
