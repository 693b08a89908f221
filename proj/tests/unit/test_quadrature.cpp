#include <doctest.h>

#include <cmath>
#include <vector>

#include "mftx/errors.hpp"
#include "mftx/quadrature.hpp"

using namespace mftx;

TEST_CASE("polynomials are exact") {
    const auto e = quad::integrate([](double x) { return x * x; }, 0.0, 1.0, {});
    CHECK(e.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("endpoint singularity converges adaptively") {
    const auto e = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {});
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("breakpoints resolve a narrow peak") {
    auto f = [](double x) { return std::exp(-1e6 * (x - 0.7) * (x - 0.7)); };
    const std::vector<double> bp{0.69, 0.7, 0.71};
    const auto e = quad::integrate(f, 0.0, 1.0, {}, bp);
    CHECK(e.value == doctest::Approx(std::sqrt(3.14159265358979323846 / 1e6)).epsilon(1e-9));
}

TEST_CASE("non-convergence carries the estimate") {
    quad::QuadraturePolicy p;
    p.max_subdivisions = 3;
    p.rel_tol = 1e-14;
    try {
        quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, p);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("estimate") != std::string::npos);
        CHECK(msg.find("error") != std::string::npos);
    }
}

TEST_CASE("improper integrals") {
    const auto e = quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0, {});
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-9));
    const auto g = quad::integrate_to_infinity(
        [](double x) { return std::exp(-x * x); }, 0.0, 0.5, {});
    CHECK(g.value == doctest::Approx(0.5 * std::sqrt(3.14159265358979323846)).epsilon(1e-9));
}
