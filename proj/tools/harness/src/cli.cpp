#include "mftx/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "mftx/eigenmodes.hpp"

namespace mftx::harness {

namespace {

int fail(std::ostream& err, ExitCode code, std::string_view kind, const std::string& message,
         const std::vector<std::string>& violations = {}) {
    nlohmann::ordered_json doc;
    doc["error"]["kind"] = kind;
    doc["error"]["message"] = message;
    if (!violations.empty()) doc["error"]["violations"] = violations;
    doc["error"]["exit_code"] = static_cast<int>(code);
    err << doc.dump() << "\n";
    return static_cast<int>(code);
}

SystemConfig config_or_default(const std::string& path) {
    SystemConfig c = path.empty() ? SystemConfig{} : load_config(path);
    validate(c);
    return c;
}

struct AnalyticArgs {
    std::string config, quantity, out;
    TimeGrid grid;
    double bin_average = 0.0;
    std::optional<double> l_alpha;
    std::size_t n_terms = eigen::kDefaultTerms;
};

struct SimulateArgs {
    std::string config, out, rx_hit_test = "bridge";
    sim::RunSpec runspec;
};

struct CompareArgs {
    std::string analytic, sim, out;
};

struct RecipeArgs {
    std::string recipe, out;
    std::optional<std::int64_t> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

struct EigensArgs {
    std::string config, out;
    std::size_t n_terms = eigen::kDefaultTerms;
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out) {
    const auto config = config_or_default(a.config);
    const auto quantity = quantity_from_string(a.quantity);
    analytic::SeriesPolicy series;
    series.n_terms = a.n_terms;
    const analytic::Channel channel(config, series);
    const auto series_out = evaluate(channel, quantity, grid_points(a.grid), a.bin_average, a.l_alpha);
    csv::write_atomic(a.out, to_csv(series_out));
    out << "wrote " << a.out << " (" << series_out.t.size() << " rows, " << a.quantity << ")\n";
    return 0;
}

int cmd_simulate(SimulateArgs a, std::ostream& out) {
    const auto config = config_or_default(a.config);
    a.runspec.rx_hit_test = sim::rx_hit_test_from_string(a.rx_hit_test);
    const auto result = sim::run_campaign(config, a.runspec);
    csv::write_atomic(a.out + ".release.csv", sim::to_csv(result.release));
    csv::write_atomic(a.out + ".e2e.csv", sim::to_csv(result.e2e));
    csv::write_atomic(a.out + ".json", sim::campaign_metadata_json(config, a.runspec, result));
    out << "wrote " << a.out << ".{release.csv,e2e.csv,json}: " << a.runspec.realizations
        << " realizations in " << result.wall_seconds << " s, unfused fraction "
        << result.unfused_fraction << "\n";
    return 0;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const auto report = compare(csv::read(a.analytic), csv::read(a.sim));
    csv::write_atomic(a.out, to_json(report));
    out << (report.pass ? "PASS" : "FAIL") << ": " << report.fraction_within * 100.0
        << "% of " << report.t.size() << " bins within 3 stderr, sup " << report.sup_norm
        << ", rmse " << report.rmse << "\n";
    return report.pass ? 0 : static_cast<int>(ExitCode::compare_fail);
}

int cmd_recipe(const RecipeArgs& a, std::ostream& out) {
    auto recipe = load_recipe(a.recipe);
    if (a.realizations || a.seed || a.workers) {
        if (!recipe.runspec) recipe.runspec = sim::RunSpec{};
        if (a.realizations) recipe.runspec->realizations = *a.realizations;
        if (a.seed) recipe.runspec->seed = *a.seed;
        if (a.workers) recipe.runspec->workers = *a.workers;
        sim::validate(*recipe.runspec);
    }
    const auto outcome = run_recipe(recipe, a.out, out);
    out << "wrote " << outcome.entries.size() << " files and manifest.json to " << a.out << "\n";
    return 0;
}

int cmd_eigens(const EigensArgs& a, std::ostream& out) {
    const auto config = config_or_default(a.config);
    const auto spectrum = eigen::solve_eigenvalues(config, a.n_terms);
    csv::write_atomic(a.out, eigen::to_csv(spectrum));
    out << "wrote " << a.out << " (" << spectrum.x.size() << " roots, c = "
        << spectrum.robin_c << ")\n";
    return 0;
}

void add_grid(CLI::App* cmd, TimeGrid& grid) {
    cmd->add_option("--t-start", grid.t_start, "First grid time, s")->capture_default_str();
    cmd->add_option("--t-end", grid.t_end, "Last grid time, s")->capture_default_str();
    cmd->add_option("--t-steps", grid.n_points, "Number of grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Membrane-fusion transmitter channel toolkit"};
    app.require_subcommand(1);

    AnalyticArgs analytic_args;
    auto* analytic_cmd = app.add_subcommand("analytic", "Evaluate a closed-form quantity on a time grid");
    analytic_cmd->add_option("--config", analytic_args.config, "SystemConfig JSON (defaults if omitted)");
    analytic_cmd->add_option("--quantity", analytic_args.quantity,
                             "release_density|release_fraction|uniform_hit|e2e_hit|point_hit")
        ->required();
    analytic_cmd->add_option("--out", analytic_args.out, "Output CSV (t,value)")->required();
    add_grid(analytic_cmd, analytic_args.grid);
    analytic_cmd->add_option("--bin-average", analytic_args.bin_average,
                             "Average over bins of this width centered on each time");
    analytic_cmd->add_option("--l-alpha", analytic_args.l_alpha, "Source distance for point_hit, um");
    analytic_cmd->add_option("--n-terms", analytic_args.n_terms, "Series terms")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo campaign");
    sim_cmd->add_option("--config", sim_args.config, "SystemConfig JSON (defaults if omitted)");
    sim_cmd->add_option("--out", sim_args.out, "Output base path")->required();
    sim_cmd->add_option("--seed", sim_args.runspec.seed)->capture_default_str();
    sim_cmd->add_option("--realizations", sim_args.runspec.realizations)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--bin-width", sim_args.runspec.bin_width, "Histogram bin width, s")
        ->capture_default_str();
    sim_cmd->add_option("--t-end", sim_args.runspec.t_end, "Simulated time span, s")
        ->capture_default_str();
    sim_cmd->add_option("--workers", sim_args.runspec.workers, "Worker threads (0: all cores)")
        ->capture_default_str();
    sim_cmd->add_option("--rx-hit-test", sim_args.rx_hit_test, "endpoint|bridge")
        ->capture_default_str();

    CompareArgs cmp_args;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare a reference curve with a simulation CSV");
    cmp_cmd->add_option("--analytic", cmp_args.analytic, "Reference CSV")->required();
    cmp_cmd->add_option("--sim", cmp_args.sim, "Simulation CSV")->required();
    cmp_cmd->add_option("--out", cmp_args.out, "Report JSON")->required();

    RecipeArgs recipe_args;
    auto* recipe_cmd = app.add_subcommand("recipe", "Run a figure recipe");
    recipe_cmd->add_option("--recipe", recipe_args.recipe, "Recipe JSON")->required();
    recipe_cmd->add_option("--out", recipe_args.out, "Output directory")->required();
    recipe_cmd->add_option("--realizations", recipe_args.realizations)->check(CLI::PositiveNumber);
    recipe_cmd->add_option("--seed", recipe_args.seed);
    recipe_cmd->add_option("--workers", recipe_args.workers);

    EigensArgs eig_args;
    auto* eig_cmd = app.add_subcommand("eigens", "Dump the eigenvalue spectrum");
    eig_cmd->add_option("--config", eig_args.config, "SystemConfig JSON (defaults if omitted)");
    eig_cmd->add_option("--n-terms", eig_args.n_terms)->capture_default_str();
    eig_cmd->add_option("--out", eig_args.out, "Output CSV")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail(err, ExitCode::validation, "usage", e.what());
    }

    try {
        if (*analytic_cmd) return cmd_analytic(analytic_args, out);
        if (*sim_cmd) return cmd_simulate(sim_args, out);
        if (*cmp_cmd) return cmd_compare(cmp_args, out);
        if (*recipe_cmd) return cmd_recipe(recipe_args, out);
        if (*eig_cmd) return cmd_eigens(eig_args, out);
    } catch (const ValidationError& e) {
        return fail(err, ExitCode::validation, "validation", e.what(), e.violations());
    } catch (const NumericalError& e) {
        return fail(err, ExitCode::numerical, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(err, ExitCode::validation, "io", e.what());
    }
    return fail(err, ExitCode::validation, "usage", "no subcommand");
}

}  // namespace mftx::harness
