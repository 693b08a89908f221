#include <doctest.h>

#include <cmath>
#include <random>

#include "mftx/errors.hpp"
#include "mftx/geometry.hpp"

using namespace mftx;

namespace {

// Closed form for the fusion point parametrized by x (needs x1 != x0), with
//   Lambda_3 = (x1 y0 - x0 y1)^2 + (x1 z0 - x0 z1)^2 - R^2 (x1 - x0)^2.
Vec3 closed_form_fusion_point(const Vec3& p0, const Vec3& p1, double r) {
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    const double dz = p1.z - p0.z;
    const double by = p1.x * p0.y - p0.x * p1.y;
    const double bz = p1.x * p0.z - p0.x * p1.z;
    const double l1 = dx * dx + dy * dy + dz * dz;
    const double l2 = 2.0 * (dy * by + dz * bz);
    const double l3 = by * by + bz * bz - r * r * dx * dx;
    const double disc = std::sqrt(l2 * l2 - 4.0 * l1 * l3);
    double xf = (-l2 + disc) / (2.0 * l1);
    if ((xf - p0.x) * (xf - p1.x) > 0.0) xf = (-l2 - disc) / (2.0 * l1);
    return {xf, (dy * xf + by) / dx, (dz * xf + bz) / dx};
}

}  // namespace

TEST_CASE("axis-aligned crossings") {
    auto hit = detect_membrane_hit({0, 0, 0}, {20, 0, 0}, 10.0);
    REQUIRE(hit);
    CHECK(hit->point.x == doctest::Approx(10.0));
    CHECK(hit->time_fraction == doctest::Approx(0.25));

    hit = detect_membrane_hit({0, 0, 9.9}, {0, 0, 10.1}, 10.0);
    REQUIRE(hit);
    CHECK(hit->point.z == doctest::Approx(10.0));
    CHECK(hit->point.x == 0.0);
    CHECK(hit->time_fraction == doctest::Approx(0.25));
}

TEST_CASE("inside, boundary and degenerate endpoints") {
    CHECK_FALSE(detect_membrane_hit({0, 0, 0}, {9.99, 0, 0}, 10.0));
    const auto on = detect_membrane_hit({0, 0, 0}, {10, 0, 0}, 10.0);
    REQUIRE(on);
    CHECK(on->s == doctest::Approx(1.0));
    CHECK_THROWS_AS(detect_membrane_hit({0, 0, 0}, {NAN, 20, 0}, 10.0), NumericalError);
}

TEST_CASE("random crossings: on membrane, s in (0, 1], fraction s^2, closed form agrees") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = 10.0;
    int compared = 0;
    for (int i = 0; i < 10000; ++i) {
        Vec3 start{g(rng), g(rng), g(rng)};
        start = (r * std::cbrt(u(rng)) / norm(start)) * start;
        Vec3 end;
        do {
            const double scale = std::pow(10.0, -3.0 + 4.0 * u(rng));
            end = start + scale * Vec3{g(rng), g(rng), g(rng)};
        } while (norm2(end) <= r * r);
        const auto hit = detect_membrane_hit(start, end, r);
        REQUIRE(hit);
        CHECK(std::abs(norm(hit->point) - r) < 1e-9);
        CHECK(hit->s > 0.0);
        CHECK(hit->s <= 1.0);
        CHECK(hit->time_fraction == hit->s * hit->s);
        const Vec3 along = start + hit->s * (end - start);
        CHECK(norm(along - hit->point) < 1e-9);

        if (std::abs(end.x - start.x) > 1e-3) {
            const Vec3 closed = closed_form_fusion_point(start, end, r);
            CHECK(norm(closed - hit->point) < 1e-6);
            ++compared;
        }
    }
    CHECK(compared > 9000);
}
