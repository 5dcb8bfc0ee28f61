#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "xxz/operator_io.hpp"

namespace xxz {

/// Header plus records; doubles are written in shortest round-trip form.
struct CsvTable {
  using Cell = std::variant<double, long long, std::string>;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void write(std::ostream& os) const {
    auto line = [&](const auto& cells, auto&& render) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << render(cells[i]);
      }
      os << '\n';
    };
    line(header, [](const std::string& s) { return s; });
    for (const auto& r : rows) {
      line(r, [](const Cell& c) {
        if (auto d = std::get_if<double>(&c)) return detail::format_double(*d);
        if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
        return std::get<std::string>(c);
      });
    }
  }
};

}  // namespace xxz
