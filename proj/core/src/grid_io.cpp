#include "l0prox/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "l0prox/error.hpp"

namespace l0prox {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError(fmt::format("not a number: '{}'", field));
  }
  return v;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& u) {
  const Grid& g = *u.grid();
  os << (g.dim() == 1 ? "index,x,value\n" : "index,x,y,value\n");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point c = g.coordinate(i);
    if (g.dim() == 1) {
      os << fmt::format("{},{},{}\n", i, format_double(c[0]), format_double(u[i]));
    } else {
      os << fmt::format("{},{},{},{}\n", i, format_double(c[0]), format_double(c[1]), format_double(u[i]));
    }
  }
}

void write_csv(const std::filesystem::path& path, const GridFunction& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError(fmt::format("cannot open '{}' for writing", path.string()));
  write_csv(os, u);
}

GridFunction read_csv(std::istream& is, const GridPtr& grid) {
  const Grid& g = *grid;
  const std::size_t ncols = g.dim() == 1 ? 3 : 4;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty CSV");
  if (split_commas(line).size() != ncols) {
    throw ParseError(fmt::format("CSV header '{}' does not have {} columns", line, ncols));
  }
  std::vector<double> values;
  values.reserve(g.size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_commas(line);
    if (fields.size() != ncols) {
      throw ParseError(fmt::format("CSV row {} has {} columns, expected {}", row, fields.size(), ncols));
    }
    if (row >= g.size()) throw ParseError("CSV has more rows than grid cells");
    const double idx = parse_double(fields[0]);
    if (idx != static_cast<double>(row)) {
      throw ParseError(fmt::format("CSV row {} carries index {}", row, fields[0]));
    }
    const Point c = g.coordinate(row);
    for (int d = 0; d < g.dim(); ++d) {
      const double x = parse_double(fields[1 + d]);
      if (std::abs(x - c[d]) > 1e-9 * (1.0 + std::abs(c[d]))) {
        throw ParseError(fmt::format("CSV row {} coordinate {} does not match grid ({})", row, x, c[d]));
      }
    }
    values.push_back(parse_double(fields[ncols - 1]));
    ++row;
  }
  if (values.size() != g.size()) {
    throw ParseError(fmt::format("CSV has {} rows for {} cells", values.size(), g.size()));
  }
  return GridFunction(grid, std::move(values));
}

GridFunction read_csv(const std::filesystem::path& path, const GridPtr& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return read_csv(is, grid);
}

}  // namespace l0prox
