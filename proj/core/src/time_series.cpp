#include "mftx/time_series.hpp"

#include "mftx/csv.hpp"
#include "mftx/errors.hpp"

namespace mftx {

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::release_density: return "release_density";
        case Quantity::release_fraction: return "release_fraction";
        case Quantity::uniform_hit: return "uniform_hit";
        case Quantity::e2e_hit: return "e2e_hit";
        case Quantity::point_hit: return "point_hit";
    }
    return "unknown";
}

Quantity quantity_from_string(std::string_view name) {
    for (auto q : {Quantity::release_density, Quantity::release_fraction, Quantity::uniform_hit,
                   Quantity::e2e_hit, Quantity::point_hit}) {
        if (to_string(q) == name) return q;
    }
    throw ValidationError({"unknown quantity '" + std::string(name) + "'"});
}

void check_invariants(const TimeSeries& s) {
    std::vector<std::string> bad;
    if (s.t.size() != s.v.size()) bad.emplace_back("t and v lengths differ");
    if (!s.t.empty() && !(s.t.front() >= 0.0)) bad.emplace_back("t[0] must be >= 0");
    for (std::size_t i = 1; i < s.t.size(); ++i) {
        if (!(s.t[i] > s.t[i - 1])) {
            bad.push_back("t not strictly increasing at index " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        if (!(s.v[i] >= 0.0)) {
            bad.push_back("negative value at index " + std::to_string(i));
            break;
        }
        if (!is_density(s.quantity)) {
            if (s.v[i] > 1.0) {
                bad.push_back("fraction above 1 at index " + std::to_string(i));
                break;
            }
            if (i > 0 && s.v[i] < s.v[i - 1]) {
                bad.push_back("fraction decreasing at index " + std::to_string(i));
                break;
            }
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

std::string to_csv(const TimeSeries& s) {
    csv::Table table{{"t", "value"}, {}};
    table.rows.reserve(s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) table.rows.push_back({s.t[i], s.v[i]});
    return csv::to_string(table);
}

TimeSeries time_series_from_csv(std::string_view text, Quantity quantity) {
    const auto table = csv::parse(text);
    return TimeSeries{quantity, table.column_values("t"), table.column_values("value")};
}

std::vector<double> linear_grid(double t_start, double t_end, std::size_t n_points) {
    if (n_points == 0) return {};
    if (n_points == 1) return {t_start};
    if (!(t_end > t_start)) throw ValidationError({"time grid requires t_end > t_start"});
    std::vector<double> grid(n_points);
    const double h = (t_end - t_start) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) grid[i] = t_start + h * static_cast<double>(i);
    grid.back() = t_end;
    return grid;
}

}  // namespace mftx
