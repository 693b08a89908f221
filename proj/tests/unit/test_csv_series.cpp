#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mftx/csv.hpp"
#include "mftx/errors.hpp"
#include "mftx/time_series.hpp"

using namespace mftx;

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 200);
        CHECK(std::stod(csv::format(v)) == v);
    }
    CHECK(csv::format(0.25) == "0.25");
}

TEST_CASE("tables round-trip through text and disk") {
    csv::Table t{{"t", "value"}, {{0.0, 1e-300}, {0.1, 0.30000000000000004}}};
    const auto text = csv::to_string(t);
    const auto back = csv::parse(text);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);

    const auto dir = std::filesystem::temp_directory_path() / "mftx_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "t.csv").string();
    csv::write_atomic(path, text);
    CHECK(csv::read(path).rows == t.rows);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        CHECK(entry.path().filename() == "t.csv");  // no temp file left behind
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed CSV is rejected") {
    CHECK_THROWS_AS(csv::parse(""), ValidationError);
    CHECK_THROWS_AS(csv::parse("t,value\n1,2,3\n"), ValidationError);
    CHECK_THROWS_AS(csv::parse("t,value\n1,abc\n"), ValidationError);
    CHECK_THROWS_AS(csv::parse("t\n1\n").column("value"), ValidationError);
}

TEST_CASE("quantity names") {
    for (auto q : {Quantity::release_density, Quantity::release_fraction, Quantity::uniform_hit,
                   Quantity::e2e_hit, Quantity::point_hit}) {
        CHECK(quantity_from_string(to_string(q)) == q);
    }
    CHECK_THROWS_AS(quantity_from_string("f_r"), ValidationError);
    CHECK_FALSE(is_density(Quantity::release_fraction));
}

TEST_CASE("time series invariants") {
    CHECK_NOTHROW(check_invariants({Quantity::release_fraction, {0, 1, 2}, {0, 0.5, 0.5}}));
    CHECK_THROWS_AS(check_invariants({Quantity::release_fraction, {0, 1}, {0.5, 0.4}}), ValidationError);
    CHECK_THROWS_AS(check_invariants({Quantity::release_fraction, {0, 1}, {0.5, 1.1}}), ValidationError);
    CHECK_THROWS_AS(check_invariants({Quantity::e2e_hit, {0, 1}, {0.0, -1e-3}}), ValidationError);
    CHECK_THROWS_AS(check_invariants({Quantity::e2e_hit, {1, 1}, {0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(check_invariants({Quantity::e2e_hit, {-1, 1}, {0.0, 0.0}}), ValidationError);
}

TEST_CASE("time series CSV and grids") {
    const TimeSeries s{Quantity::e2e_hit, linear_grid(0.0, 1.0, 11), std::vector<double>(11, 0.5)};
    CHECK(s.t.back() == 1.0);
    CHECK(s.t[1] == doctest::Approx(0.1));
    const auto back = time_series_from_csv(to_csv(s), Quantity::e2e_hit);
    CHECK(back.t == s.t);
    CHECK(back.v == s.v);
    CHECK(linear_grid(0.0, 1.0, 0).empty());
    CHECK_THROWS_AS(linear_grid(1.0, 0.0, 5), ValidationError);
}
