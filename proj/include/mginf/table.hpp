#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace mginf {

// One CSV/JSON output cell: blank, number, integer, or bare token.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// 12 significant digits, '.' decimal separator; byte-stable for equal inputs.
std::string format_number(double v);

// Header row plus newline-terminated data rows; blank cells stay empty.
std::string to_csv(const Table& table);

// {"columns": [...], "rows": [[...], ...]} with null for blank cells.
nlohmann::json table_to_json(const Table& table);

}  // namespace mginf
