#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "mftx/config.hpp"
#include "mftx/geometry.hpp"

/// Particle-based Monte Carlo of vesicle release and molecule propagation.
namespace mftx::sim {

/// Per-realization random stream. Streams are keyed by (seed, realization
/// index) so results do not depend on which worker runs which realization.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Failures before the first success of Bernoulli(p) trials, 0 < p <= 1.
    std::int64_t geometric(double p) {
        return std::geometric_distribution<std::int64_t>(p)(engine_);
    }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

enum class VesicleStatus { diffusing, fused };
enum class MoleculeStatus { diffusing, absorbed, degraded };

struct VesicleState {
    Vec3 pos;  ///< relative to the TX center
    VesicleStatus status = VesicleStatus::diffusing;
};

struct FusionEvent {
    Vec3 point;
    double time = 0.0;  ///< absolute, s
};

struct MoleculeState {
    Vec3 pos;
    double birth = 0.0;
    MoleculeStatus status = MoleculeStatus::diffusing;
};

/// How a molecule's step is tested against the absorbing RX.
enum class RxHitTest {
    endpoint,  ///< end-of-step membership only
    bridge,    ///< also the Brownian-bridge crossing probability between steps
};

std::string_view to_string(RxHitTest mode);
RxHitTest rx_hit_test_from_string(std::string_view name);

struct RunSpec {
    std::int64_t realizations = 500;
    std::uint64_t seed = 1;
    double bin_width = 0.25;
    double t_end = 50.0;
    unsigned workers = 0;  ///< 0: hardware concurrency
    RxHitTest rx_hit_test = RxHitTest::bridge;
};

/// Throws ValidationError naming every violated RunSpec invariant.
void validate(const RunSpec& runspec);

/// Histogram estimate of a time density with per-bin standard errors.
struct CirEstimate {
    std::vector<double> bin_edges;        ///< size bins + 1
    std::vector<double> density;          ///< 1/s
    std::vector<double> std_error;        ///< 1/s
    std::vector<std::int64_t> counts;     ///< events per bin
    std::int64_t n_source = 0;            ///< molecules (or vesicles) launched
    std::int64_t n_events = 0;

    std::size_t bins() const noexcept { return density.size(); }
    double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

/// `t_bin_center,density,stderr,n_events`
std::string to_csv(const CirEstimate& estimate);

/// Gaussian displacement with per-axis variance 2 d_v dt_s.
Vec3 step_vesicle(const VesicleState& state, const SystemConfig& config, RandomStream& rng);

/// Bernoulli trial with the per-hit fusion probability k_f sqrt(pi dt_s / d_v).
bool attempt_fusion(RandomStream& rng, const SystemConfig& config);

/// Outcome of one vesicle interval.
struct VesicleStep {
    std::optional<MembraneHit> hit;  ///< set when the proposal left the TX
    bool fused = false;
};

/// One interval of a diffusing vesicle: propose a step, and if it leaves the
/// TX try to fuse at the crossing point. A failed attempt leaves the vesicle
/// at its start-of-interval position.
VesicleStep advance_vesicle(VesicleState& state, const SystemConfig& config, RandomStream& rng);

/// One molecule step of the given length (dt_s, or the shorter first step
/// that aligns a newborn molecule with the global time grid): Gaussian move,
/// then degradation with probability 1 - exp(-k_d step), then absorption.
/// The TX is transparent. Non-diffusing molecules are returned unchanged.
MoleculeState propagate_molecule(MoleculeState state, const SystemConfig& config,
                                 const Vec3& rx_center, double step_length, RandomStream& rng,
                                 RxHitTest mode = RxHitTest::bridge);

struct Tally {
    std::int64_t vesicles_fused = 0;
    std::int64_t vesicles_diffusing = 0;
    std::int64_t molecules_absorbed = 0;
    std::int64_t molecules_degraded = 0;
    std::int64_t molecules_diffusing = 0;

    Tally& operator+=(const Tally& o);
    bool operator==(const Tally&) const = default;
};

/// Raw histogram sums; every launched vesicle is one cluster.
struct Histogram {
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> cluster_sumsq;  ///< sum over vesicles of (per-vesicle count)^2

    Histogram& operator+=(const Histogram& o);
    bool operator==(const Histogram&) const = default;
};

struct RealizationResult {
    std::vector<FusionEvent> fusions;  ///< only filled when requested
    Histogram release;
    Histogram e2e;
    Tally tally;
};

/// Number of histogram bins for a run.
std::size_t bin_count(const RunSpec& runspec);

/// One impulse of n_v vesicles from the TX center and all their molecules.
RealizationResult simulate_realization(const SystemConfig& config, const RunSpec& runspec,
                                       std::uint64_t realization_index, bool keep_fusions = false);

struct CampaignResult {
    CirEstimate release;
    CirEstimate e2e;
    Tally tally;
    double unfused_fraction = 0.0;  ///< vesicles still diffusing at t_end
    double wall_seconds = 0.0;
    unsigned workers = 1;
};

/// Runs all realizations (concurrently when workers > 1) and merges them.
/// Output is identical for any worker count.
CampaignResult run_campaign(const SystemConfig& config, const RunSpec& runspec);

/// Builds a CirEstimate from merged histogram sums. `units_per_cluster` is 1
/// for fusion times and eta for molecule absorption times.
CirEstimate make_estimate(const Histogram& histogram, const RunSpec& runspec,
                          std::int64_t clusters, std::int64_t units_per_cluster);

/// JSON sidecar: config hash, seed, realizations, wall time and tallies.
std::string campaign_metadata_json(const SystemConfig& config, const RunSpec& runspec,
                                   const CampaignResult& result);

}  // namespace mftx::sim
