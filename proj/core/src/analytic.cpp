#include "mftx/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace mftx::analytic {

namespace {

void require_terms(const eigen::EigenSpectrum& spectrum, std::size_t n_terms) {
    if (spectrum.size() < n_terms) {
        std::ostringstream msg;
        msg << "spectrum has " << spectrum.size() << " roots but the series policy needs "
            << n_terms;
        throw NumericalError(msg.str());
    }
}

std::string not_converged(double t, std::size_t n_terms, double last, double scale) {
    std::ostringstream msg;
    msg << "series not converged at requested t = " << t << " s with n_terms = " << n_terms
        << " (last term " << last << ", scale " << scale << ")";
    return msg.str();
}

// sum c_n exp(-mu_n t) with the truncation diagnostic.
struct SeriesSum {
    double value;
    double abs_sum;
    double last;
};

SeriesSum exp_series(const std::vector<double>& coeff, const std::vector<double>& mu, double t) {
    SeriesSum s{0.0, 0.0, 0.0};
    for (std::size_t n = 0; n < coeff.size(); ++n) {
        const double term = coeff[n] * std::exp(-mu[n] * t);
        s.value += term;
        s.abs_sum += std::abs(term);
        s.last = std::abs(term);
    }
    return s;
}

// Cached f_r evaluator for repeated use inside quadratures.
class DensitySeries {
public:
    DensitySeries(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                  const SeriesPolicy& policy)
        : policy_(policy), enabled_(config.k_f > 0.0) {
        if (!enabled_) return;
        require_terms(spectrum, policy.n_terms);
        auto c = release_coefficients(config, spectrum, policy.n_terms);
        mu_ = std::move(c.mu);
        b_.resize(mu_.size());
        for (std::size_t n = 0; n < mu_.size(); ++n) b_[n] = c.a[n] * mu_[n];
    }

    double operator()(double t) const {
        if (!enabled_ || t <= 0.0) return 0.0;
        const auto s = exp_series(b_, mu_, t);
        if (s.last > policy_.tail_tol * s.abs_sum) {
            throw NumericalError(not_converged(t, policy_.n_terms, s.last, s.abs_sum));
        }
        // Below the rounding error of the sum the value is indistinguishable
        // from zero (f_r is ~exp(-r^2 / 4 D t) there).
        const double rounding =
            static_cast<double>(b_.size()) * std::numeric_limits<double>::epsilon() * s.abs_sum;
        if (std::abs(s.value) <= rounding) return 0.0;
        if (s.value < 0.0) {
            // Cancellation noise scales with the summed magnitudes.
            if (-s.value >= policy_.tail_tol * s.abs_sum) {
                throw NumericalError(not_converged(t, policy_.n_terms, s.value, s.abs_sum));
            }
            return 0.0;
        }
        return s.value;
    }

private:
    SeriesPolicy policy_;
    bool enabled_;
    std::vector<double> b_;
    std::vector<double> mu_;
};

}  // namespace

ReleaseCoefficients release_coefficients(const SystemConfig& config,
                                         const eigen::EigenSpectrum& spectrum,
                                         std::size_t n_terms) {
    require_terms(spectrum, n_terms);
    ReleaseCoefficients c;
    c.a.reserve(n_terms);
    c.mu.reserve(n_terms);
    const double r = config.r_tx;
    for (std::size_t n = 0; n < n_terms; ++n) {
        const double lambda = spectrum.lambdas[n];
        const double x = spectrum.x[n];
        const double a = 4.0 * r * r * config.k_f * lambda * eigen::j0(x) /
                         (config.d_v * (2.0 * x - std::sin(2.0 * x)));
        const double mu = config.d_v * lambda * lambda;
        c.a.push_back(a);
        c.mu.push_back(mu);
        c.partial_sum += a;
        c.partial_first_moment += a / mu;
        c.partial_second_moment += a / (mu * mu);
    }
    return c;
}

double mean_release_time(const SystemConfig& config) {
    return config.r_tx * config.r_tx / (6.0 * config.d_v) + config.r_tx / (3.0 * config.k_f);
}

double mean_square_release_time(const SystemConfig& config) {
    const double r = config.r_tx;
    const double dv = config.d_v;
    const double kf = config.k_f;
    return r * r * (40.0 * dv * dv + 28.0 * dv * r * kf + 7.0 * r * r * kf * kf) /
           (180.0 * dv * dv * kf * kf);
}

double release_density(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                       const SeriesPolicy& policy, double t) {
    if (t < 0.0) throw ValidationError({"release_density requires t >= 0"});
    if (config.k_f == 0.0 || t == 0.0) return 0.0;
    return DensitySeries(config, spectrum, policy)(t);
}

double release_fraction(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                        const SeriesPolicy& policy, double t) {
    if (t < 0.0) throw ValidationError({"release_fraction requires t >= 0"});
    if (config.k_f == 0.0 || t == 0.0) return 0.0;
    const auto c = release_coefficients(config, spectrum, policy.n_terms);
    const auto survival = exp_series(c.a, c.mu, t);
    if (survival.last > policy.tail_tol * survival.abs_sum) {
        throw NumericalError(not_converged(t, policy.n_terms, survival.last, survival.abs_sum));
    }
    const double fraction = 1.0 - survival.value;
    if (fraction < 0.0 || fraction > 1.0) {
        const double excess = fraction < 0.0 ? -fraction : fraction - 1.0;
        if (excess >= policy.tail_tol * survival.abs_sum) {
            throw NumericalError(not_converged(t, policy.n_terms, fraction, survival.abs_sum));
        }
        return std::clamp(fraction, 0.0, 1.0);
    }
    return fraction;
}

double point_hitting(const SystemConfig& config, double l_alpha, double t) {
    if (!(l_alpha > config.r_rx)) {
        throw ValidationError({"source inside receiver: l_alpha must exceed r_rx"});
    }
    if (t <= 0.0) return 0.0;
    const double gap = l_alpha - config.r_rx;
    return config.r_rx * gap / (l_alpha * std::sqrt(4.0 * kPi * config.d_sigma * t * t * t)) *
           std::exp(-gap * gap / (4.0 * config.d_sigma * t) - config.k_d * t);
}

double uniform_hitting(const SystemConfig& config, double t) {
    if (t <= 0.0) return 0.0;
    const auto d = validate(config);
    const double amplitude = 2.0 * d.rho * config.r_tx * config.r_rx / config.l *
                             std::sqrt(kPi * config.d_sigma / t);
    return amplitude * (std::exp(-d.beta1 / t - config.k_d * t) -
                        std::exp(-d.beta2 / t - config.k_d * t));
}

double uniform_hitting_derivative(const SystemConfig& config, double t) {
    if (t <= 0.0) return 0.0;
    const auto d = validate(config);
    const double amplitude =
        2.0 * d.rho * config.r_tx * config.r_rx / config.l * std::sqrt(kPi * config.d_sigma);
    const double decay = std::exp(-config.k_d * t);
    const double e1 = std::exp(-d.beta1 / t);
    const double e2 = std::exp(-d.beta2 / t);
    const double inv_sqrt = 1.0 / std::sqrt(t);
    const double shape = inv_sqrt * (e1 - e2);
    const double shape_dt = (-0.5 / t) * shape + inv_sqrt * (d.beta1 * e1 - d.beta2 * e2) / (t * t);
    return amplitude * decay * (shape_dt - config.k_d * shape);
}

double uniform_hitting_second_derivative(const SystemConfig& config, double t) {
    if (t <= 0.0) return 0.0;
    const auto d = validate(config);
    const double amplitude =
        2.0 * d.rho * config.r_tx * config.r_rx / config.l * std::sqrt(kPi * config.d_sigma);
    // g = t^{-1/2} exp(-beta / t - k_d t) = exp(phi), g'' = (phi'' + phi'^2) g.
    auto g2 = [&](double beta) {
        const double phi1 = -0.5 / t + beta / (t * t) - config.k_d;
        const double phi2 = 0.5 / (t * t) - 2.0 * beta / (t * t * t);
        return (phi2 + phi1 * phi1) * std::exp(-beta / t - config.k_d * t) / std::sqrt(t);
    };
    return amplitude * (g2(d.beta1) - g2(d.beta2));
}

namespace {

// Breakpoints clustering toward w = sqrt(t), where exp(-k (t - w^2)) peaks
// with width ~ 1 / (k sqrt t) for large k.
std::vector<double> epsilon_breakpoints(double k, double t) {
    std::vector<double> points;
    if (k <= 0.0) return points;
    for (double m : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0}) {
        const double u = m / k;
        if (u < t) points.push_back(std::sqrt(t - u));
    }
    return points;
}

double epsilon_difference(double beta1, double beta2, double k, double t,
                          const QuadraturePolicy& quad) {
    const auto integrand = [=](double w) {
        if (w <= 0.0) return 0.0;
        const double growth = -k * (t - w * w);
        const double w2 = w * w;
        return 2.0 * (std::exp(-beta1 / w2 + growth) - std::exp(-beta2 / w2 + growth));
    };
    const auto points = epsilon_breakpoints(k, t);
    return quad::integrate(integrand, 0.0, std::sqrt(t), quad, points).value;
}

}  // namespace

double epsilon_integral(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                        const QuadraturePolicy& quad, double zeta, std::size_t n, double t) {
    if (!(zeta > 0.0)) throw ValidationError({"epsilon_integral requires zeta > 0"});
    if (t < 0.0) throw ValidationError({"epsilon_integral requires t >= 0"});
    if (n == 0 || n > spectrum.size()) {
        throw ValidationError({"epsilon_integral mode index out of range"});
    }
    if (t == 0.0) return 0.0;
    const double lambda = spectrum.lambdas[n - 1];
    const double k = config.d_v * lambda * lambda - config.k_d;
    const auto integrand = [=](double w) {
        if (w <= 0.0) return 0.0;
        return 2.0 * std::exp(-zeta / (w * w) - k * (t - w * w));
    };
    const auto points = epsilon_breakpoints(k, t);
    return quad::integrate(integrand, 0.0, std::sqrt(t), quad, points).value;
}

E2eValue e2e_hitting_detail(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                            const SeriesPolicy& policy, const QuadraturePolicy& quad, double t) {
    if (t < 0.0) throw ValidationError({"e2e_hitting requires t >= 0"});
    if (config.k_f == 0.0 || t == 0.0) return {};
    const auto d = validate(config);
    const auto c = release_coefficients(config, spectrum, policy.n_terms);

    const double r = config.r_tx;
    const double prefactor = 8.0 * d.rho * r * r * r * config.r_rx * config.k_f *
                             std::sqrt(kPi * config.d_sigma) * std::exp(-config.k_d * t) / config.l;
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t n = 0; n < policy.n_terms; ++n) {
        const double lambda = spectrum.lambdas[n];
        const double x = spectrum.x[n];
        const double weight =
            lambda * lambda * lambda * eigen::j0(x) / (2.0 * x - std::sin(2.0 * x));
        const double k = c.mu[n] - config.k_d;
        const double term = weight * epsilon_difference(d.beta1, d.beta2, k, t, quad);
        sum += term;
        abs_sum += std::abs(term);
    }
    // Mode n contributes a_n * mu_n int p_u(t-u) exp(-mu_n u) du
    // = a_n [p_u(t) - p_u'(t) / mu_n + p_u''(t) / mu_n^2 - ...], so the
    // omitted modes sum to T0 p_u - T1 p_u' + T2 p_u'' with T_k the tails of
    // sum a_n / mu_n^k. The T2 term matters at early t, where p_u'' is large.
    const double t0 = (1.0 - c.partial_sum) * uniform_hitting(config, t);
    const double t1 = (mean_release_time(config) - c.partial_first_moment) *
                      uniform_hitting_derivative(config, t);
    const double t2 = (0.5 * mean_square_release_time(config) - c.partial_second_moment) *
                      uniform_hitting_second_derivative(config, t);

    E2eValue out;
    out.value = std::max(0.0, prefactor * sum + t0 - t1 + t2);
    out.small_difference = -std::expm1(-(d.beta2 - d.beta1) / t) < 1e-3;
    out.magnitude = prefactor * abs_sum + std::abs(t0) + std::abs(t1) + std::abs(t2);
    return out;
}

double e2e_hitting(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                   const SeriesPolicy& policy, const QuadraturePolicy& quad, double t) {
    return e2e_hitting_detail(config, spectrum, policy, quad, t).value;
}

double convolution_oracle(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                          const SeriesPolicy& policy, const QuadraturePolicy& quad, double t) {
    if (!(t > 0.0)) return 0.0;
    if (config.k_f == 0.0 || t <= policy.t_min) return 0.0;
    const auto d = validate(config);
    const DensitySeries density(config, spectrum, policy);
    const auto integrand = [&](double u) { return uniform_hitting(config, t - u) * density(u); };
    // p_u(s) rises over s ~ beta1 .. beta2; resolve that window near u = t.
    std::array<double, 5> points{t - 0.25 * d.beta1, t - d.beta1, t - d.beta2,
                                 t - 4.0 * d.beta2, t - 16.0 * d.beta2};
    return quad::integrate(integrand, policy.t_min, t, quad, points).value;
}

PeakSearch peak_release_time(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                             const SeriesPolicy& policy) {
    if (!(config.k_f > 0.0)) throw NumericalError("peak_release_time requires k_f > 0");
    const DensitySeries density(config, spectrum, policy);
    constexpr std::size_t kScan = 1000;

    double t_hi = 10.0 * mean_release_time(config);
    // Small radii need more terms at t_min; start the scan where the series
    // has converged and check below that the skipped stretch is negligible.
    double t_lo = policy.t_min;
    for (;;) {
        try {
            density(t_lo);
            break;
        } catch (const NumericalError&) {
            if (t_lo * 2.0 >= 0.1 * t_hi) throw;
            t_lo *= 2.0;
        }
    }
    std::vector<double> grid(kScan);
    std::vector<double> values(kScan);
    double grid_max = 0.0;
    std::size_t arg = 0;
    for (int attempt = 0; attempt < 20; ++attempt) {
        const double log_lo = std::log(t_lo);
        const double log_hi = std::log(t_hi);
        grid_max = 0.0;
        for (std::size_t i = 0; i < kScan; ++i) {
            grid[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / (kScan - 1));
            values[i] = density(grid[i]);
            if (values[i] > grid_max) {
                grid_max = values[i];
                arg = i;
            }
        }
        if (values.back() < 1e-6 * grid_max) break;
        t_hi *= 4.0;
    }

    std::size_t local_maxima = 0;
    const double floor = 1e-6 * grid_max;
    for (std::size_t i = 1; i + 1 < kScan; ++i) {
        if (values[i] > floor && values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            ++local_maxima;
        }
    }
    if (arg == 0 || arg == kScan - 1 || local_maxima != 1 || !(grid_max > 0.0) ||
        values.front() >= floor) {
        std::ostringstream msg;
        msg << "no unique interior maximum of f_r on [" << grid.front() << ", " << grid.back()
            << "]: argmax index " << arg << ", local maxima " << local_maxima << ", max "
            << grid_max << ", first value " << values.front();
        throw NumericalError(msg.str());
    }

    // Golden-section search on the cells around the scan maximum.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid[arg - 1];
    double b = grid[arg + 1];
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = density(x1);
    double f2 = density(x2);
    while (b - a > 1e-12 * b) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = density(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = density(x1);
        }
    }
    const double t_peak = 0.5 * (a + b);
    return {t_peak, density(t_peak), grid.back()};
}

Channel::Channel(SystemConfig config, SeriesPolicy series, QuadraturePolicy quad)
    : config_(config), derived_(validate(config)), series_(series), quad_(quad) {
    if (config_.k_f > 0.0) spectrum_ = eigen::solve_eigenvalues(config_, series_.n_terms);
}

double Channel::release_density(double t) const {
    return analytic::release_density(config_, spectrum_, series_, t);
}
double Channel::release_fraction(double t) const {
    return analytic::release_fraction(config_, spectrum_, series_, t);
}
double Channel::uniform_hitting(double t) const { return analytic::uniform_hitting(config_, t); }
double Channel::point_hitting(double l_alpha, double t) const {
    return analytic::point_hitting(config_, l_alpha, t);
}
double Channel::e2e_hitting(double t) const {
    return analytic::e2e_hitting(config_, spectrum_, series_, quad_, t);
}
double Channel::convolution_oracle(double t) const {
    return analytic::convolution_oracle(config_, spectrum_, series_, quad_, t);
}
PeakSearch Channel::peak_release_time() const {
    return analytic::peak_release_time(config_, spectrum_, series_);
}

}  // namespace mftx::analytic
