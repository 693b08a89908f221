#include <doctest.h>

#include <cmath>

#include "mftx/analytic.hpp"
#include "mftx/particle_sim.hpp"

using namespace mftx;
using namespace mftx::sim;

namespace {

SystemConfig small_config() {
    SystemConfig c;
    c.n_v = 20;
    c.eta = 10;
    return c;
}

RunSpec short_run(double t_end = 5.0) {
    RunSpec r;
    r.realizations = 3;
    r.seed = 42;
    r.t_end = t_end;
    r.workers = 1;
    return r;
}

}  // namespace

TEST_CASE("vesicle steps: moments and independence") {
    const SystemConfig c;
    RandomStream rng(1, 0);
    const VesicleState origin;
    const int n = 100000;
    double sx = 0, sy = 0, sz = 0, sxx = 0, syy = 0, szz = 0, sxy = 0, sxz = 0, syz = 0;
    for (int i = 0; i < n; ++i) {
        const Vec3 d = step_vesicle(origin, c, rng);
        sx += d.x, sy += d.y, sz += d.z;
        sxx += d.x * d.x, syy += d.y * d.y, szz += d.z * d.z;
        sxy += d.x * d.y, sxz += d.x * d.z, syz += d.y * d.z;
    }
    const double var = 2.0 * c.d_v * c.dt_s;
    for (double s2 : {sxx, syy, szz}) CHECK(std::abs(s2 / n - var) < 0.05 * var);
    for (double m : {sx, sy, sz}) CHECK(std::abs(m / n) < 5.0 * std::sqrt(var / n));
    for (double cross : {sxy, sxz, syz}) CHECK(std::abs(cross / n / var) < 0.01);

    SystemConfig frozen;
    frozen.d_v = 0.0;
    CHECK(step_vesicle(origin, frozen, rng) == Vec3{});
}

TEST_CASE("fusion trials") {
    SystemConfig c;
    RandomStream rng(5, 0);
    int fused = 0;
    for (int i = 0; i < 100000; ++i) fused += attempt_fusion(rng, c);
    CHECK(std::abs(fused / 1e5 - 0.3737) < 0.005);

    c.k_f = 0.0;
    for (int i = 0; i < 1000; ++i) CHECK_FALSE(attempt_fusion(rng, c));

    c.k_f = std::sqrt(c.d_v / (kPi * c.dt_s));
    for (int i = 0; i < 1000; ++i) CHECK(attempt_fusion(rng, c));
}

TEST_CASE("failed fusion reflects the vesicle to its start position") {
    SystemConfig c;
    c.k_f = 0.0;
    c.d_v = 2000.0;  // steps of ~2 um so the membrane is hit often
    RandomStream rng(8, 0);
    VesicleState v;
    int hits = 0;
    for (int i = 0; i < 20000; ++i) {
        const Vec3 before = v.pos;
        const auto step = advance_vesicle(v, c, rng);
        CHECK(norm(v.pos) <= c.r_tx);
        if (step.hit) {
            ++hits;
            CHECK_FALSE(step.fused);
            CHECK(v.pos == before);
        }
    }
    CHECK(hits > 100);
}

TEST_CASE("a fused vesicle reports its crossing") {
    SystemConfig c;
    c.k_f = std::sqrt(c.d_v / (kPi * c.dt_s));  // p_mf = 1
    RandomStream rng(9, 0);
    VesicleState v;
    VesicleStep step;
    for (int i = 0; i < 10000000 && !step.fused; ++i) step = advance_vesicle(v, c, rng);
    REQUIRE(step.fused);
    CHECK(v.status == VesicleStatus::fused);
    CHECK(std::abs(norm(step.hit->point) - c.r_tx) < 1e-9);
    CHECK_FALSE(advance_vesicle(v, c, rng).hit);
}

TEST_CASE("molecule steps: degradation and absorption rules") {
    const Vec3 rx{40, 0, 0};
    SystemConfig c;
    c.k_d = 0.0;
    RandomStream rng(3, 0);
    for (int m = 0; m < 200; ++m) {
        MoleculeState s{{10, 0, 0}, 0.0, MoleculeStatus::diffusing};
        for (int k = 0; k < 200; ++k) {
            s = propagate_molecule(s, c, rx, c.dt_s, rng);
            CHECK(s.status != MoleculeStatus::degraded);
        }
    }

    c = SystemConfig{};
    c.d_sigma = 0.0;
    MoleculeState still{{10, 0, 0}, 0.0, MoleculeStatus::diffusing};
    for (int k = 0; k < 1000; ++k) {
        still = propagate_molecule(still, c, rx, c.dt_s, rng);
        CHECK(still.status != MoleculeStatus::absorbed);
    }

    // Terminal states never change.
    c = SystemConfig{};
    for (auto status : {MoleculeStatus::absorbed, MoleculeStatus::degraded}) {
        const MoleculeState done{{25, 1, 2}, 0.3, status};
        const auto after = propagate_molecule(done, c, rx, c.dt_s, rng);
        CHECK(after.status == status);
        CHECK(after.pos == done.pos);
    }

    // The TX is transparent: a molecule starting at its center moves freely.
    MoleculeState inside{{0, 0, 0}, 0.0, MoleculeStatus::diffusing};
    c.k_d = 0.0;
    double travelled = 0.0;
    for (int k = 0; k < 1000; ++k) inside = propagate_molecule(inside, c, rx, c.dt_s, rng);
    travelled = norm(inside.pos);
    CHECK(travelled > 10.0);  // rms ~ sqrt(6 D t) = 77 um after 1 s
}

TEST_CASE("absorbed fraction from a point source matches the point-source density") {
    const SystemConfig c;
    const Vec3 rx{40, 0, 0};
    const double expected = quad::integrate_to_infinity(
        [&](double t) { return analytic::point_hitting(c, 30.0, t); }, 0.0, 0.1, {}).value;
    CHECK(expected == doctest::Approx(1.0 / 3.0 * std::exp(-20.0 * std::sqrt(0.8 / 1000.0))));

    RandomStream rng(17, 0);
    const int n = 20000;
    int absorbed = 0;
    for (int m = 0; m < n; ++m) {
        MoleculeState s{{10, 0, 0}, 0.0, MoleculeStatus::diffusing};
        for (int k = 0; k < 40000 && s.status == MoleculeStatus::diffusing; ++k) {
            s = propagate_molecule(s, c, rx, c.dt_s, rng);
        }
        absorbed += s.status == MoleculeStatus::absorbed;
    }
    const double p = static_cast<double>(absorbed) / n;
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    CAPTURE(p);
    CAPTURE(expected);
    CHECK(std::abs(p - expected) < 3.0 * se);
}

TEST_CASE("run spec validation") {
    RunSpec r;
    r.realizations = 0;
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = RunSpec{};
    r.bin_width = 0.0;
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = RunSpec{};
    r.t_end = 0.1;
    CHECK_THROWS_AS(validate(r), ValidationError);
    CHECK(rx_hit_test_from_string("endpoint") == RxHitTest::endpoint);
    CHECK_THROWS_AS(rx_hit_test_from_string("sometimes"), ValidationError);
}

TEST_CASE("no vesicles, no events") {
    SystemConfig c;
    c.n_v = 0;
    const auto r = run_campaign(c, short_run());
    CHECK(r.release.n_events == 0);
    CHECK(r.e2e.n_events == 0);
    CHECK(r.release.bins() == 20);
    for (double d : r.e2e.density) CHECK(d == 0.0);
}

TEST_CASE("event conservation and on-membrane fusion points") {
    const SystemConfig c = small_config();
    const RunSpec spec = short_run(1.5);  // short: some vesicles stay unfused
    std::int64_t unfused = 0;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto r = simulate_realization(c, spec, i, true);
        const auto& t = r.tally;
        CHECK(t.vesicles_fused + t.vesicles_diffusing == c.n_v);
        CHECK(t.molecules_absorbed + t.molecules_degraded + t.molecules_diffusing ==
              c.eta * t.vesicles_fused);
        CHECK(static_cast<std::int64_t>(r.fusions.size()) == t.vesicles_fused);
        for (const auto& f : r.fusions) {
            CHECK(std::abs(norm(f.point) - c.r_tx) < 1e-9);
            CHECK(f.time > 0.0);
            CHECK(f.time <= spec.t_end);
        }
        unfused += t.vesicles_diffusing;
    }
    CHECK(unfused > 0);

    const auto campaign = run_campaign(c, spec);
    CHECK(campaign.unfused_fraction > 0.0);
    CHECK(campaign.unfused_fraction < 1.0);
}

TEST_CASE("estimates: normalization and release standard errors") {
    const SystemConfig c = small_config();
    const RunSpec spec = short_run(20.0);
    const auto r = run_campaign(c, spec);
    double mass = 0.0;
    double var = 0.0;
    const double n = static_cast<double>(c.n_v * spec.realizations);
    for (std::size_t i = 0; i < r.release.bins(); ++i) {
        CHECK(r.release.density[i] >= 0.0);
        mass += r.release.density[i] * spec.bin_width;
        var += std::pow(r.release.std_error[i] * spec.bin_width, 2);
        // Vesicles are the units here, so stderr is the binomial one.
        const double p = static_cast<double>(r.release.counts[i]) / n;
        CHECK(r.release.std_error[i] ==
              doctest::Approx(std::sqrt(p * (1.0 - p) / n) / spec.bin_width));
    }
    CHECK(mass <= 1.0 + 3.0 * std::sqrt(var) + 1e-12);
    CHECK(r.release.n_source == c.n_v * spec.realizations);
    CHECK(r.e2e.n_source == c.n_v * c.eta * spec.realizations);

    double e2e_mass = 0.0;
    for (double d : r.e2e.density) e2e_mass += d * spec.bin_width;
    CHECK(e2e_mass <= 1.0);
}

TEST_CASE("seed determinism across worker counts") {
    const SystemConfig c = small_config();
    RunSpec spec = short_run(3.0);
    spec.realizations = 6;
    const auto one = run_campaign(c, spec);
    spec.workers = 3;
    const auto three = run_campaign(c, spec);
    CHECK(to_csv(one.release) == to_csv(three.release));
    CHECK(to_csv(one.e2e) == to_csv(three.e2e));
    CHECK(one.tally == three.tally);

    spec.seed = 43;
    const auto other = run_campaign(c, spec);
    CHECK(to_csv(one.e2e) != to_csv(other.e2e));

    const auto a = simulate_realization(c, spec, 2, true);
    const auto b = simulate_realization(c, spec, 2, true);
    CHECK(a.release == b.release);
    CHECK(a.e2e == b.e2e);
    REQUIRE(a.fusions.size() == b.fusions.size());
    for (std::size_t i = 0; i < a.fusions.size(); ++i) {
        CHECK(a.fusions[i].point == b.fusions[i].point);
        CHECK(a.fusions[i].time == b.fusions[i].time);
    }
}

TEST_CASE("streams differ by realization index") {
    RandomStream a(1, 0);
    RandomStream b(1, 1);
    CHECK(a.uniform() != b.uniform());
}

TEST_CASE("CSV and metadata sidecar") {
    const SystemConfig c = small_config();
    const RunSpec spec = short_run(1.0);
    const auto r = run_campaign(c, spec);
    const auto text = to_csv(r.release);
    CHECK(text.rfind("t_bin_center,density,stderr,n_events\n0.125,", 0) == 0);
    const auto meta = campaign_metadata_json(c, spec, r);
    CHECK(meta.find("\"seed\": 42") != std::string::npos);
    CHECK(meta.find("\"config_hash\"") != std::string::npos);
    CHECK(meta.find("\"wall_seconds\"") != std::string::npos);
}
