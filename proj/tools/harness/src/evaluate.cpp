#include "mftx/harness.hpp"

#include <algorithm>

namespace mftx::harness {

std::vector<double> grid_points(const TimeGrid& grid) {
    std::vector<std::string> bad;
    if (grid.n_points < 1) bad.emplace_back("time grid needs at least one point");
    if (!(grid.t_start >= 0.0)) bad.emplace_back("t_start must be >= 0");
    if (grid.n_points > 1 && !(grid.t_end > grid.t_start)) {
        bad.emplace_back("t_end must exceed t_start");
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return linear_grid(grid.t_start, grid.t_end, grid.n_points);
}

namespace {

double sample(const analytic::Channel& ch, Quantity q, double l_alpha, double t) {
    switch (q) {
        case Quantity::release_density: return ch.release_density(t);
        case Quantity::release_fraction: return ch.release_fraction(t);
        case Quantity::uniform_hit: return ch.uniform_hitting(t);
        case Quantity::e2e_hit: return ch.e2e_hitting(t);
        case Quantity::point_hit: return ch.point_hitting(l_alpha, t);
    }
    return 0.0;
}

bool uses_series(Quantity q) {
    return q == Quantity::release_density || q == Quantity::release_fraction ||
           q == Quantity::e2e_hit;
}

}  // namespace

TimeSeries evaluate(const analytic::Channel& channel, Quantity quantity,
                    const std::vector<double>& t, double bin_width,
                    std::optional<double> l_alpha) {
    if (bin_width < 0.0) throw ValidationError({"bin width must be >= 0"});
    const double la = l_alpha.value_or(channel.config().l);
    if (quantity == Quantity::point_hit) analytic::point_hitting(channel.config(), la, 1.0);

    TimeSeries out{quantity, t, std::vector<double>(t.size(), 0.0)};
    quad::QuadraturePolicy policy = channel.quadrature_policy();
    policy.rel_tol = 1e-8;
    policy.abs_tol = 1e-14;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (bin_width == 0.0) {
            out.v[i] = sample(channel, quantity, la, t[i]);
            continue;
        }
        // Series quantities are negligible (and not evaluable) below t_min,
        // so that sliver of the bin contributes zero.
        const double floor = uses_series(quantity) ? channel.series_policy().t_min : 0.0;
        const double lo = std::max(floor, t[i] - 0.5 * bin_width);
        const double hi = t[i] + 0.5 * bin_width;
        if (!(hi > lo)) {
            out.v[i] = sample(channel, quantity, la, t[i]);
            continue;
        }
        const auto est = quad::integrate(
            [&](double u) { return sample(channel, quantity, la, u); }, lo, hi, policy);
        out.v[i] = est.value / bin_width;
    }
    return out;
}

}  // namespace mftx::harness
