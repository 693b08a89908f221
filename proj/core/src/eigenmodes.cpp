#include "mftx/eigenmodes.hpp"

#include <cmath>
#include <sstream>

#include "mftx/csv.hpp"

namespace mftx::eigen {

namespace {

// x cos x - c sin x: same roots as x cot x - c away from sin x = 0, no poles.
double robin_function(double x, double c) { return x * std::cos(x) - c * std::sin(x); }

struct Bracket {
    double lo;
    double hi;
    double sign_lo;  // analytic sign of robin_function at lo
};

// Interval containing exactly the n-th positive root (n >= 1).
Bracket bracket_for(std::size_t n, double c) {
    const double nn = static_cast<double>(n);
    if (c < 0.0) {
        // Between the zero of cos and the zero of sin; f((n-1/2)pi) = -c sin.
        const double lo = (nn - 0.5) * kPi;
        return {lo, nn * kPi, std::sin(lo) * -c > 0.0 ? 1.0 : -1.0};
    }
    // 0 < c < 1: x cot x falls from 1 to 0 on (0, pi/2) and is positive on
    // ((n-1)pi, (n-1/2)pi) for n >= 2.
    if (n == 1) return {0.0, 0.5 * kPi, 1.0};
    const double lo = (nn - 1.0) * kPi;
    // f(lo) = lo * cos(lo) = lo * (-1)^(n-1)
    return {lo, (nn - 0.5) * kPi, (n % 2 == 1) ? 1.0 : -1.0};
}

double bisect(const Bracket& b, double c, double tol) {
    double lo = b.lo;
    double hi = b.hi;
    const double hi_val = robin_function(hi, c);
    if (hi_val == 0.0) return hi;
    if ((hi_val > 0.0) == (b.sign_lo > 0.0)) {
        std::ostringstream msg;
        msg << "eigenvalue bracket (" << lo << ", " << hi << ") does not change sign for c = " << c;
        throw NumericalError(msg.str());
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = robin_function(mid, c);
        if (f == 0.0) return mid;
        if ((f > 0.0) == (b.sign_lo > 0.0)) lo = mid;
        else hi = mid;
    }
    // Bisection runs to adjacent doubles; keep the end with the smaller residual.
    const double x =
        std::abs(robin_function(lo, c)) <= std::abs(robin_function(hi, c)) && lo > 0.0 ? lo : hi;
    const double relative = std::abs(robin_function(x, c)) / (x + std::abs(c));
    if (relative > tol) {
        std::ostringstream msg;
        msg << "eigenvalue in (" << b.lo << ", " << b.hi << ") reached relative residual "
            << relative << " > " << tol;
        throw NumericalError(msg.str());
    }
    return x;
}

}  // namespace

double j0(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

double j0_prime(double z) {
    if (std::abs(z) < 1e-4) return -z / 3.0;
    return (z * std::cos(z) - std::sin(z)) / (z * z);
}

double reduce_to_scalar(const SystemConfig& config) {
    return 1.0 - config.k_f * config.r_tx / config.d_v;
}

EigenSpectrum solve_eigenvalues(const SystemConfig& config, std::size_t n_terms, double tol) {
    EigenSpectrum spectrum;
    spectrum.robin_c = reduce_to_scalar(config);
    if (n_terms == 0) return spectrum;
    if (!(config.k_f > 0.0)) {
        throw NumericalError("no-release limit: spectrum degenerate (k_f = 0)");
    }
    const double c = spectrum.robin_c;
    spectrum.lambdas.reserve(n_terms);
    spectrum.x.reserve(n_terms);
    spectrum.residuals.reserve(n_terms);
    for (std::size_t n = 1; n <= n_terms; ++n) {
        double x;
        if (c == 0.0) {
            x = (static_cast<double>(n) - 0.5) * kPi;  // cos x = 0 exactly
        } else {
            x = bisect(bracket_for(n, c), c, tol);
        }
        const double lambda = x / config.r_tx;
        spectrum.x.push_back(x);
        spectrum.lambdas.push_back(lambda);
        spectrum.residuals.push_back(
            std::abs(config.d_v * lambda * j0_prime(x) + config.k_f * j0(x)));
    }
    return spectrum;
}

std::string to_csv(const EigenSpectrum& s) {
    csv::Table table{{"n", "x_n", "lambda_n", "residual"}, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
        table.rows.push_back({static_cast<double>(i + 1), s.x[i], s.lambdas[i], s.residuals[i]});
    }
    return csv::to_string(table);
}

}  // namespace mftx::eigen
