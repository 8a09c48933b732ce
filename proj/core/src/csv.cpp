#include "finbath/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "finbath/errors.hpp"

namespace finbath::csv {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void Table::add_meta(std::string key, std::string value) {
  metadata.emplace_back(std::move(key), std::move(value));
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw DimensionError("csv row has " + std::to_string(row.size()) + " fields, expected " +
                         std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

void Table::write(std::ostream& os) const {
  for (const auto& [key, value] : metadata) os << "# " << key << ": " << value << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
}

std::string Table::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace finbath::csv
