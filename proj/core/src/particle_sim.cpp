#include "mftx/particle_sim.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mftx/csv.hpp"
#include "mftx/errors.hpp"

namespace mftx::sim {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32), 0x6d667478u};
    engine_.seed(seq);
}

std::string_view to_string(RxHitTest mode) {
    return mode == RxHitTest::endpoint ? "endpoint" : "bridge";
}

RxHitTest rx_hit_test_from_string(std::string_view name) {
    if (name == "endpoint") return RxHitTest::endpoint;
    if (name == "bridge") return RxHitTest::bridge;
    throw ValidationError({"rx_hit_test must be 'endpoint' or 'bridge', got '" +
                           std::string(name) + "'"});
}

void validate(const RunSpec& r) {
    std::vector<std::string> bad;
    if (r.realizations < 1) bad.emplace_back("realizations must be >= 1");
    if (!(r.bin_width > 0.0)) bad.emplace_back("bin_width must be > 0");
    if (!(r.t_end > r.bin_width)) bad.emplace_back("t_end must exceed bin_width");
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

Tally& Tally::operator+=(const Tally& o) {
    vesicles_fused += o.vesicles_fused;
    vesicles_diffusing += o.vesicles_diffusing;
    molecules_absorbed += o.molecules_absorbed;
    molecules_degraded += o.molecules_degraded;
    molecules_diffusing += o.molecules_diffusing;
    return *this;
}

Histogram& Histogram::operator+=(const Histogram& o) {
    if (counts.empty()) {
        counts.assign(o.counts.size(), 0);
        cluster_sumsq.assign(o.cluster_sumsq.size(), 0);
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        counts[i] += o.counts[i];
        cluster_sumsq[i] += o.cluster_sumsq[i];
    }
    return *this;
}

std::string to_csv(const CirEstimate& e) {
    csv::Table table{{"t_bin_center", "density", "stderr", "n_events"}, {}};
    table.rows.reserve(e.bins());
    for (std::size_t i = 0; i < e.bins(); ++i) {
        table.rows.push_back(
            {e.bin_center(i), e.density[i], e.std_error[i], static_cast<double>(e.counts[i])});
    }
    return csv::to_string(table);
}

Vec3 step_vesicle(const VesicleState& state, const SystemConfig& config, RandomStream& rng) {
    const double sd = std::sqrt(2.0 * config.d_v * config.dt_s);
    const double dx = sd * rng.gaussian();
    const double dy = sd * rng.gaussian();
    const double dz = sd * rng.gaussian();
    return state.pos + Vec3{dx, dy, dz};
}

bool attempt_fusion(RandomStream& rng, const SystemConfig& config) {
    if (config.k_f == 0.0) return false;
    return rng.bernoulli(fusion_probability(config));
}

VesicleStep advance_vesicle(VesicleState& state, const SystemConfig& config, RandomStream& rng) {
    VesicleStep out;
    if (state.status != VesicleStatus::diffusing) return out;
    const Vec3 proposal = step_vesicle(state, config, rng);
    if (norm2(proposal) < config.r_tx * config.r_tx) {
        state.pos = proposal;
        return out;
    }
    out.hit = detect_membrane_hit(state.pos, proposal, config.r_tx);
    out.fused = attempt_fusion(rng, config);
    if (out.fused) state.status = VesicleStatus::fused;
    return out;
}

namespace {

// Above this exponent the crossing probability exp(-x) is not worth a draw.
constexpr double kBridgeCutoff = 40.0;

struct MoleculeStepper {
    Vec3 rx_center;
    double r_rx;
    double d_sigma;
    RxHitTest mode;

    double gap(const Vec3& pos) const { return norm(pos - rx_center) - r_rx; }

    void move(Vec3& pos, double step, RandomStream& rng) const {
        const double sd = std::sqrt(2.0 * d_sigma * step);
        const double dx = sd * rng.gaussian();
        const double dy = sd * rng.gaussian();
        const double dz = sd * rng.gaussian();
        pos += Vec3{dx, dy, dz};
    }

    bool absorbs(double gap_before, double gap_after, double step, RandomStream& rng) const {
        if (gap_after <= 0.0) return true;
        if (mode == RxHitTest::bridge) {
            const double exponent = gap_before * gap_after / (d_sigma * step);
            return exponent < kBridgeCutoff && rng.uniform() < std::exp(-exponent);
        }
        return false;
    }
};

double degrade_probability(double k_d, double step) { return -std::expm1(-k_d * step); }

}  // namespace

MoleculeState propagate_molecule(MoleculeState state, const SystemConfig& config,
                                 const Vec3& rx_center, double step_length, RandomStream& rng,
                                 RxHitTest mode) {
    if (state.status != MoleculeStatus::diffusing) return state;
    const MoleculeStepper stepper{rx_center, config.r_rx, config.d_sigma, mode};
    const double gap_before = stepper.gap(state.pos);
    stepper.move(state.pos, step_length, rng);
    if (config.k_d > 0.0 && rng.bernoulli(degrade_probability(config.k_d, step_length))) {
        state.status = MoleculeStatus::degraded;
    } else if (stepper.absorbs(gap_before, stepper.gap(state.pos), step_length, rng)) {
        state.status = MoleculeStatus::absorbed;
    }
    return state;
}

std::size_t bin_count(const RunSpec& runspec) {
    return static_cast<std::size_t>(std::ceil(runspec.t_end / runspec.bin_width - 1e-9));
}

RealizationResult simulate_realization(const SystemConfig& config, const RunSpec& runspec,
                                       std::uint64_t realization_index, bool keep_fusions) {
    RandomStream rng(runspec.seed, realization_index);
    const std::size_t bins = bin_count(runspec);
    const auto total_steps = static_cast<std::int64_t>(std::llround(runspec.t_end / config.dt_s));
    const double dt = config.dt_s;
    const double p_degrade_full = degrade_probability(config.k_d, dt);
    const MoleculeStepper stepper{{config.l, 0.0, 0.0}, config.r_rx, config.d_sigma,
                                  runspec.rx_hit_test};

    RealizationResult out;
    out.release.counts.assign(bins, 0);
    out.release.cluster_sumsq.assign(bins, 0);
    out.e2e.counts.assign(bins, 0);
    out.e2e.cluster_sumsq.assign(bins, 0);

    // Absorption happens at grid times k*dt; an event exactly on a bin edge
    // belongs to the bin that ends there.
    const auto absorption_bin = [&](std::int64_t step_index) -> std::size_t {
        double x = static_cast<double>(step_index) * dt / runspec.bin_width;
        const double nearest = std::round(x);
        if (std::abs(x - nearest) < 1e-9) x = nearest;
        const auto b = static_cast<std::int64_t>(std::ceil(x)) - 1;
        return b < 0 ? 0 : static_cast<std::size_t>(b);
    };

    std::vector<std::int64_t> vesicle_bins(bins, 0);
    std::vector<std::size_t> touched;

    for (std::int64_t v = 0; v < config.n_v; ++v) {
        VesicleState vesicle;
        std::int64_t fusion_step = -1;
        double fusion_fraction = 0.0;
        Vec3 fusion_point;
        for (std::int64_t step = 1; step <= total_steps; ++step) {
            const auto outcome = advance_vesicle(vesicle, config, rng);
            if (outcome.fused) {
                fusion_step = step;
                fusion_fraction = outcome.hit->time_fraction;
                fusion_point = outcome.hit->point;
                break;
            }
        }
        if (vesicle.status != VesicleStatus::fused) {
            ++out.tally.vesicles_diffusing;
            continue;
        }
        ++out.tally.vesicles_fused;
        const double fusion_time = (static_cast<double>(fusion_step - 1) + fusion_fraction) * dt;
        if (keep_fusions) out.fusions.push_back({fusion_point, fusion_time});
        const auto fbin = static_cast<std::size_t>(fusion_time / runspec.bin_width);
        if (fbin < bins) {
            ++out.release.counts[fbin];
            ++out.release.cluster_sumsq[fbin];
        }

        // Molecules: a partial step to the end of the fusion interval, then
        // full steps on the global grid.
        const double first_step = (1.0 - fusion_fraction) * dt;
        for (std::int64_t m = 0; m < config.eta; ++m) {
            Vec3 pos = fusion_point;
            double gap = stepper.gap(pos);
            MoleculeStatus status = MoleculeStatus::diffusing;
            std::int64_t step = fusion_step;
            if (first_step > 0.0) {
                stepper.move(pos, first_step, rng);
                if (config.k_d > 0.0 && rng.bernoulli(degrade_probability(config.k_d, first_step))) {
                    status = MoleculeStatus::degraded;
                } else {
                    const double after = stepper.gap(pos);
                    if (stepper.absorbs(gap, after, first_step, rng)) status = MoleculeStatus::absorbed;
                    gap = after;
                }
            }
            // Per-step degradation trials are i.i.d., so the number of full
            // steps survived is geometric and can be drawn once.
            std::int64_t survive = std::numeric_limits<std::int64_t>::max();
            if (status == MoleculeStatus::diffusing && p_degrade_full > 0.0) {
                survive = rng.geometric(p_degrade_full);
            }
            for (std::int64_t k = 1; status == MoleculeStatus::diffusing && step < total_steps; ++k) {
                ++step;
                if (k > survive) {
                    status = MoleculeStatus::degraded;
                    break;
                }
                stepper.move(pos, dt, rng);
                const double after = stepper.gap(pos);
                if (stepper.absorbs(gap, after, dt, rng)) status = MoleculeStatus::absorbed;
                gap = after;
            }
            switch (status) {
                case MoleculeStatus::absorbed: {
                    ++out.tally.molecules_absorbed;
                    const auto b = absorption_bin(step);
                    if (b < bins) {
                        if (vesicle_bins[b]++ == 0) touched.push_back(b);
                    }
                    break;
                }
                case MoleculeStatus::degraded: ++out.tally.molecules_degraded; break;
                case MoleculeStatus::diffusing: ++out.tally.molecules_diffusing; break;
            }
        }
        for (auto b : touched) {
            out.e2e.counts[b] += vesicle_bins[b];
            out.e2e.cluster_sumsq[b] += vesicle_bins[b] * vesicle_bins[b];
            vesicle_bins[b] = 0;
        }
        touched.clear();
    }
    return out;
}

CirEstimate make_estimate(const Histogram& h, const RunSpec& runspec, std::int64_t clusters,
                          std::int64_t units_per_cluster) {
    const std::size_t bins = bin_count(runspec);
    CirEstimate e;
    e.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        e.bin_edges[i] = runspec.bin_width * static_cast<double>(i);
    }
    e.density.assign(bins, 0.0);
    e.std_error.assign(bins, 0.0);
    e.counts.assign(bins, 0);
    e.n_source = clusters * units_per_cluster;
    if (e.n_source == 0) return e;

    const double n_clusters = static_cast<double>(clusters);
    const double units = static_cast<double>(units_per_cluster);
    for (std::size_t i = 0; i < bins; ++i) {
        const std::int64_t count = h.counts.empty() ? 0 : h.counts[i];
        const double p = static_cast<double>(count) / (n_clusters * units);
        // Mean of the per-cluster share and its second moment.
        const double second = h.counts.empty()
                                  ? 0.0
                                  : static_cast<double>(h.cluster_sumsq[i]) / (units * units) / n_clusters;
        const double var = std::max(0.0, second - p * p) / n_clusters;
        e.counts[i] = count;
        e.n_events += count;
        e.density[i] = p / runspec.bin_width;
        e.std_error[i] = std::sqrt(var) / runspec.bin_width;
    }
    return e;
}

CampaignResult run_campaign(const SystemConfig& config, const RunSpec& runspec) {
    validate(config);
    validate(runspec);
    const auto start = std::chrono::steady_clock::now();

    unsigned workers = runspec.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const auto realizations = static_cast<std::size_t>(runspec.realizations);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, realizations));

    std::vector<RealizationResult> results(realizations);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < realizations; i = next++) {
                results[i] = simulate_realization(config, runspec, i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = realizations;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    Histogram release;
    Histogram e2e;
    CampaignResult out;
    for (const auto& r : results) {
        release += r.release;
        e2e += r.e2e;
        out.tally += r.tally;
    }
    const std::int64_t clusters = config.n_v * runspec.realizations;
    out.release = make_estimate(release, runspec, clusters, 1);
    out.e2e = make_estimate(e2e, runspec, clusters, config.eta);
    out.unfused_fraction =
        clusters > 0 ? static_cast<double>(out.tally.vesicles_diffusing) / static_cast<double>(clusters)
                     : 0.0;
    out.workers = workers;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string campaign_metadata_json(const SystemConfig& config, const RunSpec& runspec,
                                   const CampaignResult& result) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    nlohmann::ordered_json doc;
    doc["config_hash"] = hash;
    doc["config"] = nlohmann::ordered_json::parse(config_to_json(config));
    doc["seed"] = runspec.seed;
    doc["realizations"] = runspec.realizations;
    doc["bin_width"] = runspec.bin_width;
    doc["t_end"] = runspec.t_end;
    doc["rx_hit_test"] = std::string(to_string(runspec.rx_hit_test));
    doc["workers"] = result.workers;
    doc["wall_seconds"] = result.wall_seconds;
    doc["unfused_fraction"] = result.unfused_fraction;
    doc["vesicles_fused"] = result.tally.vesicles_fused;
    doc["vesicles_diffusing"] = result.tally.vesicles_diffusing;
    doc["molecules_absorbed"] = result.tally.molecules_absorbed;
    doc["molecules_degraded"] = result.tally.molecules_degraded;
    doc["molecules_diffusing"] = result.tally.molecules_diffusing;
    doc["release_events"] = result.release.n_events;
    doc["e2e_events"] = result.e2e.n_events;
    return doc.dump(2) + "\n";
}

}  // namespace mftx::sim
