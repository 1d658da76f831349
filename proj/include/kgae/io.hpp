#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kgae/error.hpp"
#include "kgae/matrix.hpp"

namespace kgae {

// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view tok, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw io_error(std::string("bad ") + what + ": '" + std::string(tok) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    start = end + 1;
    if (end == line.size()) break;
  }
  return out;
}

// CSV datasets: comma-separated decimal values, one sample per line,
// no header. An empty stream yields a 0x0 matrix.
inline Dataset read_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw io_error("csv: row " + std::to_string(rows + 1) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(cols));
    }
    for (auto f : fields) values.push_back(parse_double(f, "csv value"));
    ++rows;
  }
  Dataset out(rows, cols);
  out.data() = std::move(values);
  return out;
}

inline void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (c) out << ',';
      out << format_double(data(r, c));
    }
    out << '\n';
  }
}

}  // namespace kgae
