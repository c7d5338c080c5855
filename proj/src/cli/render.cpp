#include <algorithm>

#include "sca/cli.hpp"

namespace sca::cli {

DiagramStyle parse_diagram_style(const std::string& text) {
  if (text == "text") return DiagramStyle::Text;
  if (text == "pgm") return DiagramStyle::Pgm;
  throw ParseError("unknown diagram style: " + text);
}

std::string render_diagram(const Alphabet& states, const SpaceTime& d, DiagramStyle style) {
  std::size_t width = 0;
  for (const auto& row : d.rows) width = std::max(width, row.period.size());
  auto cells = [&](const PeriodicConfig& row) {
    Symbols out(width);
    for (std::size_t z = 0; z < width; ++z) out[z] = row.at(static_cast<long>(z));
    return out;
  };
  std::string out;
  if (style == DiagramStyle::Text) {
    for (const auto& row : d.rows) out += states.format(cells(row)) + "\n";
    return out;
  }
  out = "P5\n" + std::to_string(width) + " " + std::to_string(d.rows.size()) + "\n255\n";
  const std::size_t top = states.size() > 1 ? states.size() - 1 : 1;
  for (const auto& row : d.rows)
    for (Symbol s : cells(row)) out.push_back(static_cast<char>(255 * s / top));
  return out;
}

}  // namespace sca::cli
