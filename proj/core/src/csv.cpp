#include "mftx/csv.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mftx/errors.hpp"

namespace mftx::csv {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line_no) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        // from_chars rejects "inf"/"nan" spellings produced by some tools.
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw ValidationError({"CSV line " + std::to_string(line_no) + ": cannot parse '" +
                               std::string(s) + "' as a number"});
    }
    return v;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ValidationError({"CSV has no column '" + std::string(name) + "'"});
}

std::vector<double> Table::column_values(std::string_view name) const {
    const auto idx = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

std::string format(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("to_chars failed");
    return std::string(buf.data(), ptr);
}

std::string to_string(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format(row[i]);
        }
        out += '\n';
    }
    return out;
}

Table parse(std::string_view text) {
    Table table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(trim(f));
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ValidationError({"CSV line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(table.header.size()) + " columns, got " +
                                   std::to_string(fields.size())});
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(parse_double(f, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ValidationError({"CSV is empty"});
    return table;
}

Table read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError({"cannot open CSV file '" + path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void write_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace mftx::csv
