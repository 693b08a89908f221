#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mftx/analytic.hpp"
#include "mftx/config.hpp"
#include "mftx/csv.hpp"
#include "mftx/particle_sim.hpp"
#include "mftx/time_series.hpp"

/// Experiment harness behind the `mftx` command line: analytic grids,
/// campaign output, comparison reports and figure recipes.
namespace mftx::harness {

/// Process exit codes. Stable contract for scripts and CI.
enum class ExitCode : int {
    ok = 0,
    validation = 1,  ///< bad config, recipe, flags or input files
    numerical = 2,   ///< series or quadrature failure
    compare_fail = 3,
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 20.0;
    std::size_t n_points = 401;
};

/// Grid points; throws ValidationError on an empty or reversed grid.
std::vector<double> grid_points(const TimeGrid& grid);

/// Samples an analytic quantity at the given times. With bin_width > 0 each
/// value is the mean over [t - w/2, t + w/2] clipped at 0, which is what a
/// histogram with bins centered on t estimates. point_hit uses l_alpha
/// (defaults to the TX-RX distance).
TimeSeries evaluate(const analytic::Channel& channel, Quantity quantity,
                    const std::vector<double>& t, double bin_width = 0.0,
                    std::optional<double> l_alpha = std::nullopt);

/// Reference curve vs simulation histogram, bin by bin.
struct ComparisonReport {
    std::vector<double> t;
    std::vector<double> z;  ///< (reference - estimate) / sigma
    double fraction_within = 0.0;  ///< share of bins with |z| <= 3
    double sup_norm = 0.0;
    double rmse = 0.0;
    bool pass = false;  ///< fraction_within >= 0.95
};

inline constexpr double kZLimit = 3.0;
inline constexpr double kPassFraction = 0.95;

/// The reference is an analytic `t,value` table or another simulation table.
/// sigma is the bin stderr, floored at the density one event would produce,
/// so that empty bins are not infinitely certain. Throws ValidationError when
/// the two time grids do not align.
ComparisonReport compare(const csv::Table& reference, const csv::Table& simulation);
std::string to_json(const ComparisonReport& report);

enum class RecipeKind { fig2_release, fig3_peak_time, fig4_e2e };

std::string_view to_string(RecipeKind kind);
RecipeKind recipe_kind_from_string(std::string_view name);

struct Sweep {
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentRecipe {
    RecipeKind kind = RecipeKind::fig2_release;
    SystemConfig base_config;
    std::vector<Sweep> sweeps;
    TimeGrid time_grid;
    std::optional<sim::RunSpec> runspec;  ///< present: also simulate
};

/// Parses and validates a recipe (every swept value must give a valid config;
/// fig3 needs an r_tx sweep).
ExperimentRecipe recipe_from_json(std::string_view text);
ExperimentRecipe load_recipe(const std::string& path);

/// One parameter set. Sweeps are applied one at a time around the base
/// config; values equal to the base (or to an earlier point) are dropped.
struct SweepPoint {
    std::string label;      ///< "base" or "k_f=2"
    std::string parameter;  ///< empty for the base point
    double value = 0.0;
    SystemConfig config;
};

/// For fig3 the r_tx sweep is the abscissa and does not produce points.
std::vector<SweepPoint> sweep_points(const ExperimentRecipe& recipe);

struct ManifestEntry {
    std::string file;  ///< relative to the output directory
    std::string quantity;
    SweepPoint point;
};

struct RecipeOutcome {
    std::vector<ManifestEntry> entries;
    bool complete = false;
    std::string error;
};

/// Writes every CSV and `manifest.json` under out_dir. On failure the
/// manifest still lists what was written, then the error is rethrown.
RecipeOutcome run_recipe(const ExperimentRecipe& recipe, const std::filesystem::path& out_dir,
                         std::ostream& log);

std::string manifest_json(const ExperimentRecipe& recipe, const RecipeOutcome& outcome);

/// Entry point of the `mftx` executable; never throws. Error JSON goes to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mftx::harness
