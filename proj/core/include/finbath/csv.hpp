#pragma once

// Plot-ready CSV emission: '#'-prefixed metadata lines, one header row, and
// doubles printed with 17 significant digits so values round-trip exactly.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace finbath::csv {

/// printf("%.17g"); non-finite values print as nan / inf / -inf.
std::string format_double(double x);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// Sixteen lowercase hex digits.
std::string hex64(std::uint64_t x);

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value);
  /// Throws DimensionError if the row width differs from the column count.
  void add_row(std::vector<double> row);
  void write(std::ostream& os) const;
  std::string str() const;
};

}  // namespace finbath::csv
