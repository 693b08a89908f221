#pragma once

#include <cstddef>
#include <vector>

#include "mftx/config.hpp"
#include "mftx/eigenmodes.hpp"
#include "mftx/quadrature.hpp"

/// Closed-form channel quantities of the membrane-fusion transmitter:
/// release density and fraction, point/uniform-source hitting densities and
/// the end-to-end hitting density, plus the direct convolution oracle.
namespace mftx::analytic {

using quad::QuadraturePolicy;

/// Truncation of the eigenfunction series.
struct SeriesPolicy {
    std::size_t n_terms = eigen::kDefaultTerms;
    double t_min = 1e-3;      ///< smallest time the default truncation is meant for, s
    double tail_tol = 1e-10;  ///< last-term / sum(|terms|) threshold
};

/// Per-mode coefficients shared by every series.
///   a_n  = 4 r_tx^2 k_f lambda_n j0(x_n) / (D_v (2 x_n - sin 2 x_n))
///   mu_n = D_v lambda_n^2
/// so f_r(t) = sum a_n mu_n exp(-mu_n t) and F_r(t) = sum a_n (1 - exp(-mu_n t)).
struct ReleaseCoefficients {
    std::vector<double> a;
    std::vector<double> mu;
    double partial_sum = 0.0;           ///< S_N = sum a_n, tends to 1
    double partial_first_moment = 0.0;  ///< sum a_n / mu_n, tends to the mean release time
    double partial_second_moment = 0.0;  ///< sum a_n / mu_n^2, tends to half the mean square
};

ReleaseCoefficients release_coefficients(const SystemConfig& config,
                                         const eigen::EigenSpectrum& spectrum,
                                         std::size_t n_terms);

/// Mean fusion time of a vesicle started at the TX center:
/// r_tx^2 / (6 D_v) + r_tx / (3 k_f).
double mean_release_time(const SystemConfig& config);

/// E[T^2] of the release time from the Laplace transform of f_r:
/// r_tx^2 (40 D_v^2 + 28 D_v r_tx k_f + 7 r_tx^2 k_f^2) / (180 D_v^2 k_f^2).
double mean_square_release_time(const SystemConfig& config);

/// f_r(t), 1/s. f_r(0) = 0. Throws NumericalError when the series has not
/// converged at t (only happens for t well below t_min).
double release_density(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                       const SeriesPolicy& policy, double t);

/// F_r(t) in [0, 1]. Evaluated as the truncated sum plus its exact
/// remainder 1 - S_N, i.e. 1 - sum a_n exp(-mu_n t).
double release_fraction(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                        const SeriesPolicy& policy, double t);

/// Hitting density at the RX for a molecule released at distance l_alpha
/// from the RX center, including degradation. Throws ValidationError for
/// l_alpha <= r_rx.
double point_hitting(const SystemConfig& config, double l_alpha, double t);

/// Hitting density for molecules released uniformly over the TX membrane.
double uniform_hitting(const SystemConfig& config, double t);
/// d/dt of uniform_hitting.
double uniform_hitting_derivative(const SystemConfig& config, double t);
/// d^2/dt^2 of uniform_hitting.
double uniform_hitting_second_derivative(const SystemConfig& config, double t);

/// epsilon(zeta, t) for mode n (1-based):
///   int_0^t (t-u)^{-1/2} exp(-zeta/(t-u) - (D_v lambda_n^2 - k_d) u) du
/// computed as int_0^{sqrt t} 2 exp(-zeta/w^2 - (D_v lambda_n^2 - k_d)(t - w^2)) dw.
double epsilon_integral(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                        const QuadraturePolicy& quad, double zeta, std::size_t n, double t);

struct E2eValue {
    double value = 0.0;
    /// exp(-beta1/t) and exp(-beta2/t) agree to better than 1e-3: the
    /// epsilon difference is small relative to either term.
    bool small_difference = false;
    /// Summed magnitudes of the modal terms and the remainder. At early t the
    /// value cancels down from this scale (~10 against values ~1e-12), so
    /// rounding alone limits its absolute accuracy to n_terms * eps * magnitude.
    double magnitude = 0.0;
};

/// End-to-end hitting density p_v(t): the spectral sum over
/// lambda_n^3 j0 / (2 x_n - sin 2 x_n) [eps(beta1, t) - eps(beta2, t)],
/// plus the remainder of the truncated sum to second order in 1 / mu_N.
E2eValue e2e_hitting_detail(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                            const SeriesPolicy& policy, const QuadraturePolicy& quad, double t);

double e2e_hitting(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                   const SeriesPolicy& policy, const QuadraturePolicy& quad, double t);

/// int_0^t p_u(t - u) f_r(u) du by adaptive quadrature. Test oracle only.
double convolution_oracle(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                          const SeriesPolicy& policy, const QuadraturePolicy& quad, double t);

struct PeakSearch {
    double t_peak = 0.0;
    double f_peak = 0.0;
    double t_max = 0.0;  ///< upper end of the scan
};

/// argmax_t f_r(t): 1000-point log-spaced scan over [t_min, T_max], then a
/// golden-section refinement in the bracketing cells. Throws NumericalError
/// when the scan shows no interior maximum or more than one.
PeakSearch peak_release_time(const SystemConfig& config, const eigen::EigenSpectrum& spectrum,
                             const SeriesPolicy& policy);

/// Convenience bundle: validated config, its spectrum and both policies.
class Channel {
public:
    explicit Channel(SystemConfig config, SeriesPolicy series = {}, QuadraturePolicy quad = {});

    const SystemConfig& config() const noexcept { return config_; }
    const DerivedConstants& derived() const noexcept { return derived_; }
    const eigen::EigenSpectrum& spectrum() const noexcept { return spectrum_; }
    const SeriesPolicy& series_policy() const noexcept { return series_; }
    const QuadraturePolicy& quadrature_policy() const noexcept { return quad_; }

    double release_density(double t) const;
    double release_fraction(double t) const;
    double uniform_hitting(double t) const;
    double point_hitting(double l_alpha, double t) const;
    double e2e_hitting(double t) const;
    double convolution_oracle(double t) const;
    PeakSearch peak_release_time() const;

private:
    SystemConfig config_;
    DerivedConstants derived_;
    SeriesPolicy series_;
    QuadraturePolicy quad_;
    eigen::EigenSpectrum spectrum_;
};

}  // namespace mftx::analytic
