#include "mginf/table.hpp"

#include <cstdio>

namespace mginf {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

void append_cell_csv(std::string& out, const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) {
        return;
    }
    if (const auto* d = std::get_if<double>(&cell)) {
        out += format_number(*d);
        return;
    }
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        out += std::to_string(*i);
        return;
    }
    out += std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) {
            out += ',';
        }
        out += table.columns[c];
    }
    out += '\n';
    for (const std::vector<Cell>& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out += ',';
            }
            append_cell_csv(out, row[c]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json table_to_json(const Table& table) {
    nlohmann::json j;
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const std::vector<Cell>& row : table.rows) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const Cell& cell : row) {
            if (std::holds_alternative<std::monostate>(cell)) {
                jrow.push_back(nullptr);
            } else if (const auto* d = std::get_if<double>(&cell)) {
                jrow.push_back(*d);
            } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
                jrow.push_back(*i);
            } else {
                jrow.push_back(std::get<std::string>(cell));
            }
        }
        rows.push_back(std::move(jrow));
    }
    j["rows"] = std::move(rows);
    return j;
}

}  // namespace mginf
