#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mftx/config.hpp"

namespace mftx::eigen {

/// Zeroth-order spherical Bessel function of the first kind, sin z / z.
double j0(double z);
/// Its derivative, (z cos z - sin z) / z^2.
double j0_prime(double z);

/// Roots of the Robin condition D_v lambda j0'(lambda r_tx) = -k_f j0(lambda r_tx).
struct EigenSpectrum {
    std::vector<double> lambdas;    ///< lambda_n, 1/um, strictly increasing
    std::vector<double> x;          ///< x_n = lambda_n r_tx
    double robin_c = 1.0;
    std::vector<double> residuals;  ///< |D_v lambda_n j0'(x_n) + k_f j0(x_n)|

    std::size_t size() const noexcept { return lambdas.size(); }
    bool empty() const noexcept { return lambdas.empty(); }
};

inline constexpr std::size_t kDefaultTerms = 200;
inline constexpr double kDefaultTolerance = 1e-12;

/// Substituting j0 and j0' turns the Robin condition into x cot x = c with
/// c = 1 - k_f r_tx / D_v.
double reduce_to_scalar(const SystemConfig& config);

/// First n_terms roots of x cot x = c, each bisected inside its analytic
/// bracket down to adjacent doubles. Throws NumericalError for k_f = 0
/// (degenerate spectrum), when a bracket does not change sign, or when the
/// relative residual |x cos x - c sin x| / (x + |c|) still exceeds tol.
EigenSpectrum solve_eigenvalues(const SystemConfig& config,
                                std::size_t n_terms = kDefaultTerms,
                                double tol = kDefaultTolerance);

/// `n,x_n,lambda_n,residual` CSV for debugging.
std::string to_csv(const EigenSpectrum& spectrum);

}  // namespace mftx::eigen
