#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mftx {

enum class Quantity { release_density, release_fraction, uniform_hit, e2e_hit, point_hit };

std::string_view to_string(Quantity q);
Quantity quantity_from_string(std::string_view name);  // throws ValidationError

/// Densities carry units 1/s, fractions are dimensionless.
inline bool is_density(Quantity q) { return q != Quantity::release_fraction; }

/// A sampled function of time.
struct TimeSeries {
    Quantity quantity;
    std::vector<double> t;
    std::vector<double> v;
};

/// Throws ValidationError when the grid or values break the TimeSeries
/// invariants (strictly increasing t starting at >= 0, densities >= 0,
/// fractions in [0, 1] and nondecreasing).
void check_invariants(const TimeSeries& series);

/// `t,value` CSV.
std::string to_csv(const TimeSeries& series);
TimeSeries time_series_from_csv(std::string_view text, Quantity quantity);

/// n_points evenly spaced samples over [t_start, t_end], endpoints included.
std::vector<double> linear_grid(double t_start, double t_end, std::size_t n_points);

}  // namespace mftx
