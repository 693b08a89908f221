#include <doctest.h>

#include <cmath>
#include <random>

#include "mftx/config.hpp"

using namespace mftx;

namespace {

bool mentions(const ValidationError& e, std::string_view needle) {
    for (const auto& v : e.violations()) {
        if (v.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("defaults validate and give the expected derived constants") {
    const auto d = validate(SystemConfig{});
    CHECK(d.p_mf == doctest::Approx(0.37367).epsilon(1e-4));
    CHECK(d.p_mf == doctest::Approx(20.0 * std::sqrt(kPi * 0.001 / 9.0)).epsilon(1e-15));
    CHECK(d.robin_c == doctest::Approx(-21.2222222222).epsilon(1e-10));
    CHECK(d.beta1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.beta2 == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(d.rho == doctest::Approx(1.0 / (400.0 * kPi)));
}

TEST_CASE("overlapping spheres are rejected") {
    SystemConfig c;
    c.l = 15.0;
    try {
        validate(c);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(mentions(e, "overlap"));
    }
    c.l = 20.0;  // touching
    CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("every violated invariant is reported") {
    SystemConfig c;
    c.r_tx = -1.0;
    c.d_v = 0.0;
    c.k_d = -0.5;
    c.n_v = -3;
    try {
        validate(c);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(mentions(e, "r_tx"));
        CHECK(mentions(e, "d_v"));
        CHECK(mentions(e, "k_d"));
        CHECK(mentions(e, "n_v"));
    }
}

TEST_CASE("fusion probability above one is an error, exactly one is fine") {
    SystemConfig c;
    c.dt_s = 0.1;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = SystemConfig{};
    c.k_f = std::sqrt(c.d_v / (kPi * c.dt_s));
    CHECK(validate(c).p_mf == doctest::Approx(1.0));
}

TEST_CASE("beta2 - beta1 = r_tx (l - r_rx) / d_sigma for random configs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 20.0);
    for (int i = 0; i < 200; ++i) {
        SystemConfig c;
        c.r_tx = u(rng);
        c.r_rx = u(rng);
        c.l = c.r_tx + c.r_rx + u(rng);
        c.d_sigma = 50.0 * u(rng);
        c.k_f = 1.0;
        const auto d = validate(c);
        const double expected = c.r_tx * (c.l - c.r_rx) / c.d_sigma;
        CHECK(d.beta2 > d.beta1);
        CHECK(std::abs((d.beta2 - d.beta1) - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("validate is pure") {
    SystemConfig c;
    c.k_f = 7.5;
    CHECK(validate(c) == validate(c));
}

TEST_CASE("JSON round trip and strict keys") {
    SystemConfig c;
    c.k_f = 2.0;
    c.n_v = 7;
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(config_from_json("{}") == SystemConfig{});
    CHECK(config_from_json(R"({"d_v": 3})").d_v == 3.0);

    CHECK_THROWS_AS(config_from_json(R"({"kf": 2})"), ValidationError);
    CHECK_THROWS_AS(config_from_json(R"({"k_f": "2"})"), ValidationError);
    CHECK_THROWS_AS(config_from_json(R"({"n_v": 2.5})"), ValidationError);
    CHECK_THROWS_AS(config_from_json("[1, 2]"), ValidationError);
    CHECK_THROWS_AS(config_from_json("{"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("config hash is stable and sensitive") {
    SystemConfig a;
    SystemConfig b;
    CHECK(config_hash(a) == config_hash(b));
    b.eta = 101;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("fields by name") {
    SystemConfig c;
    for (auto name : kConfigFields) {
        set_config_field(c, name, get_config_field(c, name));
    }
    CHECK(c == SystemConfig{});
    set_config_field(c, "r_tx", 12.5);
    CHECK(c.r_tx == 12.5);
    CHECK_THROWS_AS(set_config_field(c, "radius", 1.0), ValidationError);
    CHECK_THROWS_AS(set_config_field(c, "eta", 0.5), ValidationError);
}
