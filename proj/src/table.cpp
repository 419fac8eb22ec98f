#include "collapse_kaon/table.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace collapse_kaon {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::to_string(std::get<long long>(c));
}

}  // namespace

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(columns[i]);
    }
    out += "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cell_text(row[i]));
        }
        out += "\r\n";
    }
    return out;
}

std::string Table::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) {
            const auto& c = row[i];
            if (const auto* s = std::get_if<std::string>(&c)) {
                obj[columns[i]] = *s;
            } else if (const auto* d = std::get_if<double>(&c)) {
                obj[columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nullptr;
            } else {
                obj[columns[i]] = std::get<long long>(c);
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

}  // namespace collapse_kaon
