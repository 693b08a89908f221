#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mftx::csv {

/// Header plus numeric rows. Every row has header.size() columns.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const;  // throws if absent
    std::vector<double> column_values(std::string_view name) const;
};

/// Shortest representation that parses back to the same double.
std::string format(double value);

std::string to_string(const Table& table);
Table parse(std::string_view text);
Table read(const std::string& path);

/// Writes via a temporary file in the same directory followed by rename.
void write_atomic(const std::string& path, std::string_view content);

}  // namespace mftx::csv
