#include "mftx/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "mftx/errors.hpp"

namespace mftx::quad {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478080, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk21(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = kronrod * half;
    // Plain |K21 - G10|: pessimistic but never optimistic.
    double error = std::abs((kronrod - gauss) * half);
    if (!std::isfinite(value)) error = std::numeric_limits<double>::infinity();
    return {a, b, value, error};
}

}  // namespace

Estimate integrate(const Integrand& f, double a, double b, const QuadraturePolicy& policy,
                   std::span<const double> breakpoints) {
    if (a == b) return {};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = gk21(f, cuts[i], cuts[i + 1]);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }
    std::size_t used = heap.size();
    auto converged = [&] {
        return total_err <= std::max(policy.abs_tol, policy.rel_tol * std::abs(total));
    };
    while (!converged()) {
        if (used >= policy.max_subdivisions) {
            std::ostringstream msg;
            msg << "quadrature did not converge on [" << a << ", " << b << "] within "
                << policy.max_subdivisions << " subdivisions: estimate " << sign * total
                << ", error bound " << total_err;
            throw NumericalError(msg.str());
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval cannot be split further in double precision.
            std::ostringstream msg;
            msg << "quadrature hit round-off limit near " << mid << ": estimate " << sign * total
                << ", error bound " << total_err;
            throw NumericalError(msg.str());
        }
        const auto left = gk21(f, worst.a, mid);
        const auto right = gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++used;
    }
    // Recompute the sum to avoid drift from incremental updates.
    double sum = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sign * sum, err, used};
}

namespace {
constexpr double kTailShare = 1e-4;
}  // namespace

Estimate integrate_to_infinity(const Integrand& f, double a, double first_panel,
                               const QuadraturePolicy& policy) {
    Estimate total;
    double peak = 0.0;
    double lo = a;
    double width = first_panel;
    auto add_panel = [&](double from, double to) {
        // Panels far out only need accuracy relative to what is already summed.
        QuadraturePolicy panel_policy = policy;
        panel_policy.abs_tol = std::max(policy.abs_tol, policy.rel_tol * std::abs(total.value));
        const auto piece = integrate(f, from, to, panel_policy);
        total.value += piece.value;
        total.error += piece.error;
        total.subdivisions += piece.subdivisions;
        return piece;
    };
    for (int panel = 0; panel < 200; ++panel) {
        const double hi = lo + width;
        add_panel(lo, hi);
        // Sample the panel for the running peak and the tail criterion.
        double panel_peak = 0.0;
        for (int k = 1; k <= 16; ++k) {
            panel_peak = std::max(panel_peak, std::abs(f(lo + width * k / 16.0)));
        }
        peak = std::max(peak, panel_peak);
        lo = hi;
        width *= 2.0;
        if (peak > 0.0 && std::abs(f(lo)) < 1e-12 * peak && panel_peak < 1e-6 * peak) {
            // One more decade. Power-law tails never vanish outright, so the
            // decade only has to be small; its size is added to the error.
            const double end = lo;
            const auto check = add_panel(end, 10.0 * end);
            total.error += std::abs(check.value);
            if (std::abs(check.value) <= std::max(policy.abs_tol, kTailShare * std::abs(total.value))) {
                return total;
            }
            lo = 10.0 * end;
            width = lo;
        }
    }
    throw NumericalError("improper integral did not settle: estimate " +
                         std::to_string(total.value));
}

}  // namespace mftx::quad
