#pragma once

#include <string>
#include <variant>
#include <vector>

namespace collapse_kaon {

/// A cell is either text or a number; numbers print with 17 significant digits.
using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    /// RFC 4180: fields containing comma, quote or newline are quoted, quotes doubled.
    std::string to_csv() const;
    /// Array of row objects; non-finite numbers become null.
    std::string to_json() const;
};

std::string format_number(double v);

}  // namespace collapse_kaon
