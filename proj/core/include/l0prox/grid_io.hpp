#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "l0prox/grid.hpp"

namespace l0prox {

/// Shortest-safe round-trip text for a double: 17 significant digits, '.'
/// decimal separator regardless of the global locale.
[[nodiscard]] std::string format_double(double v);
/// Locale-independent parse of the whole field; throws ParseError.
[[nodiscard]] double parse_double(std::string_view field);

/// CSV with header `index,x,value` (1D) or `index,x,y,value` (2D).
void write_csv(std::ostream& os, const GridFunction& u);
void write_csv(const std::filesystem::path& path, const GridFunction& u);

/// Reads a grid function written by write_csv. Rows must be in cell order and
/// coordinates must match the grid's cell centers.
[[nodiscard]] GridFunction read_csv(std::istream& is, const GridPtr& grid);
[[nodiscard]] GridFunction read_csv(const std::filesystem::path& path, const GridPtr& grid);

}  // namespace l0prox
