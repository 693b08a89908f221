#include "mftx/harness.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mftx::harness {

using nlohmann::json;

std::string_view to_string(RecipeKind kind) {
    switch (kind) {
        case RecipeKind::fig2_release: return "fig2_release";
        case RecipeKind::fig3_peak_time: return "fig3_peak_time";
        case RecipeKind::fig4_e2e: return "fig4_e2e";
    }
    return "?";
}

RecipeKind recipe_kind_from_string(std::string_view name) {
    if (name == "fig2_release") return RecipeKind::fig2_release;
    if (name == "fig3_peak_time") return RecipeKind::fig3_peak_time;
    if (name == "fig4_e2e") return RecipeKind::fig4_e2e;
    throw ValidationError({"unknown recipe kind '" + std::string(name) +
                           "' (fig2_release, fig3_peak_time, fig4_e2e)"});
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where, std::vector<std::string>& bad) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) bad.push_back(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, double fallback, const std::string& where,
              std::vector<std::string>& bad) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        bad.push_back(where + "." + key + " must be a number");
        return fallback;
    }
    return obj[key].get<double>();
}

sim::RunSpec runspec_from(const json& j, std::vector<std::string>& bad) {
    sim::RunSpec r;
    if (!j.is_object()) {
        bad.emplace_back("runspec must be an object");
        return r;
    }
    reject_unknown(j, {"realizations", "seed", "bin_width", "t_end", "workers", "rx_hit_test"},
                   "runspec", bad);
    const double n = number(j, "realizations", static_cast<double>(r.realizations), "runspec", bad);
    if (n != std::floor(n)) bad.emplace_back("runspec.realizations must be an integer");
    r.realizations = static_cast<std::int64_t>(n);
    if (j.contains("seed")) {
        if (j["seed"].is_number_unsigned()) {
            r.seed = j["seed"].get<std::uint64_t>();
        } else {
            bad.emplace_back("runspec.seed must be a non-negative integer");
        }
    }
    r.bin_width = number(j, "bin_width", r.bin_width, "runspec", bad);
    r.t_end = number(j, "t_end", r.t_end, "runspec", bad);
    r.workers = static_cast<unsigned>(number(j, "workers", r.workers, "runspec", bad));
    if (j.contains("rx_hit_test")) {
        try {
            r.rx_hit_test = sim::rx_hit_test_from_string(j["rx_hit_test"].get<std::string>());
        } catch (const std::exception& e) {
            bad.emplace_back(std::string("runspec.rx_hit_test: ") + e.what());
        }
    }
    try {
        sim::validate(r);
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations()) bad.push_back("runspec: " + v);
    }
    return r;
}

std::string slug(const SweepPoint& p) {
    if (p.parameter.empty()) return "base";
    return p.parameter + "-" + csv::format(p.value);
}

json point_json(const SweepPoint& p) {
    json j;
    j["label"] = p.label;
    if (p.parameter.empty()) {
        j["parameter"] = nullptr;
        j["value"] = nullptr;
    } else {
        j["parameter"] = p.parameter;
        j["value"] = p.value;
    }
    j["config"] = json::parse(config_to_json(p.config));
    return j;
}

}  // namespace

ExperimentRecipe recipe_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("recipe is not valid JSON: ") + e.what()});
    }
    if (!doc.is_object()) throw ValidationError({"recipe must be a JSON object"});

    std::vector<std::string> bad;
    reject_unknown(doc, {"kind", "base_config", "sweeps", "time_grid", "runspec"}, "recipe", bad);

    ExperimentRecipe r;
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        bad.emplace_back("recipe.kind is required");
    } else {
        try {
            r.kind = recipe_kind_from_string(doc["kind"].get<std::string>());
        } catch (const ValidationError& e) {
            bad.insert(bad.end(), e.violations().begin(), e.violations().end());
        }
    }
    if (doc.contains("base_config")) {
        try {
            r.base_config = config_from_json(doc["base_config"].dump());
            validate(r.base_config);
        } catch (const ValidationError& e) {
            for (const auto& v : e.violations()) bad.push_back("base_config: " + v);
        }
    }
    if (doc.contains("time_grid")) {
        const auto& g = doc["time_grid"];
        if (!g.is_object()) {
            bad.emplace_back("time_grid must be an object");
        } else {
            reject_unknown(g, {"t_start", "t_end", "n_points"}, "time_grid", bad);
            r.time_grid.t_start = number(g, "t_start", r.time_grid.t_start, "time_grid", bad);
            r.time_grid.t_end = number(g, "t_end", r.time_grid.t_end, "time_grid", bad);
            const double n =
                number(g, "n_points", static_cast<double>(r.time_grid.n_points), "time_grid", bad);
            if (!(n >= 1.0) || n != std::floor(n)) {
                bad.emplace_back("time_grid.n_points must be a positive integer");
            } else {
                r.time_grid.n_points = static_cast<std::size_t>(n);
            }
            try {
                grid_points(r.time_grid);
            } catch (const ValidationError& e) {
                for (const auto& v : e.violations()) bad.push_back("time_grid: " + v);
            }
        }
    }
    if (doc.contains("sweeps")) {
        if (!doc["sweeps"].is_array()) {
            bad.emplace_back("sweeps must be an array");
        } else {
            for (const auto& s : doc["sweeps"]) {
                Sweep sw;
                if (!s.is_object() || !s.contains("parameter") || !s["parameter"].is_string() ||
                    !s.contains("values") || !s["values"].is_array()) {
                    bad.emplace_back("each sweep needs a string 'parameter' and a 'values' array");
                    continue;
                }
                reject_unknown(s, {"parameter", "values"}, "sweep", bad);
                sw.parameter = s["parameter"].get<std::string>();
                if (s["values"].empty()) {
                    bad.push_back("sweep '" + sw.parameter + "' has no values");
                }
                for (const auto& v : s["values"]) {
                    if (!v.is_number()) {
                        bad.push_back("sweep '" + sw.parameter + "' values must be numbers");
                        continue;
                    }
                    sw.values.push_back(v.get<double>());
                    SystemConfig c = r.base_config;
                    try {
                        set_config_field(c, sw.parameter, sw.values.back());
                        validate(c);
                    } catch (const ValidationError& e) {
                        for (const auto& msg : e.violations()) {
                            bad.push_back("sweep " + sw.parameter + "=" +
                                          csv::format(sw.values.back()) + ": " + msg);
                        }
                    }
                }
                r.sweeps.push_back(std::move(sw));
            }
        }
    }
    if (r.kind == RecipeKind::fig3_peak_time) {
        bool has_rtx = false;
        for (const auto& s : r.sweeps) has_rtx = has_rtx || s.parameter == "r_tx";
        if (!has_rtx) bad.emplace_back("fig3_peak_time needs an r_tx sweep (the abscissa)");
    }
    if (doc.contains("runspec")) r.runspec = runspec_from(doc["runspec"], bad);
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return r;
}

ExperimentRecipe load_recipe(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot open recipe file '" + path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return recipe_from_json(buf.str());
}

std::vector<SweepPoint> sweep_points(const ExperimentRecipe& recipe) {
    std::vector<SweepPoint> points;
    points.push_back({"base", "", 0.0, recipe.base_config});
    for (const auto& s : recipe.sweeps) {
        if (recipe.kind == RecipeKind::fig3_peak_time && s.parameter == "r_tx") continue;
        for (double v : s.values) {
            SystemConfig c = recipe.base_config;
            set_config_field(c, s.parameter, v);
            bool seen = false;
            for (const auto& p : points) seen = seen || p.config == c;
            if (seen) continue;
            points.push_back({s.parameter + "=" + csv::format(v), s.parameter, v, c});
        }
    }
    return points;
}

std::string manifest_json(const ExperimentRecipe& recipe, const RecipeOutcome& outcome) {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(recipe.kind);
    doc["complete"] = outcome.complete;
    if (!outcome.complete) doc["error"] = outcome.error;
    if (recipe.runspec) {
        doc["runspec"] = {{"realizations", recipe.runspec->realizations},
                          {"seed", recipe.runspec->seed},
                          {"bin_width", recipe.runspec->bin_width},
                          {"t_end", recipe.runspec->t_end},
                          {"rx_hit_test", to_string(recipe.runspec->rx_hit_test)}};
    }
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : outcome.entries) {
        nlohmann::ordered_json j;
        j["file"] = e.file;
        j["quantity"] = e.quantity;
        j["sweep_point"] = point_json(e.point);
        entries.push_back(std::move(j));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

RecipeOutcome run_recipe(const ExperimentRecipe& recipe, const std::filesystem::path& out_dir,
                         std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    RecipeOutcome outcome;
    const auto prefix = recipe.kind == RecipeKind::fig2_release   ? std::string("fig2_")
                        : recipe.kind == RecipeKind::fig3_peak_time ? std::string("fig3_")
                                                                    : std::string("fig4_");
    auto emit = [&](const std::string& name, const std::string& content, const std::string& quantity,
                    const SweepPoint& point) {
        csv::write_atomic((out_dir / name).string(), content);
        outcome.entries.push_back({name, quantity, point});
    };
    auto write_manifest = [&] {
        csv::write_atomic((out_dir / "manifest.json").string(), manifest_json(recipe, outcome));
    };

    try {
        const auto points = sweep_points(recipe);
        const auto grid = grid_points(recipe.time_grid);
        std::vector<double> r_tx_values;
        for (const auto& s : recipe.sweeps) {
            if (s.parameter == "r_tx") r_tx_values = s.values;
        }

        if (recipe.kind == RecipeKind::fig4_e2e) {
            // Ideal point TX at the TX center: instantaneous release at distance l.
            const analytic::Channel ch(points.front().config);
            const auto series = evaluate(ch, Quantity::point_hit, grid);
            emit(prefix + "point_tx.point_hit.csv", to_csv(series), "point_hit", points.front());
        }

        for (const auto& p : points) {
            log << to_string(recipe.kind) << ": " << p.label << "\n";
            const std::string stem = prefix + slug(p);
            if (recipe.kind == RecipeKind::fig3_peak_time) {
                csv::Table table{{"r_tx", "t_pr"}, {}};
                for (double r : r_tx_values) {
                    SystemConfig c = p.config;
                    c.r_tx = r;
                    const analytic::Channel ch(c);
                    table.rows.push_back({r, ch.peak_release_time().t_peak});
                }
                emit(stem + ".csv", csv::to_string(table), "peak_time", p);
                continue;
            }

            const analytic::Channel ch(p.config);
            if (recipe.kind == RecipeKind::fig2_release) {
                emit(stem + ".release_density.csv",
                     to_csv(evaluate(ch, Quantity::release_density, grid)), "release_density", p);
                auto count = evaluate(ch, Quantity::release_fraction, grid);
                const double scale = static_cast<double>(p.config.n_v * p.config.eta);
                for (auto& v : count.v) v *= scale;
                emit(stem + ".released_count.csv", to_csv(count), "released_count", p);
            } else {
                emit(stem + ".e2e_hit.csv", to_csv(evaluate(ch, Quantity::e2e_hit, grid)),
                     "e2e_hit", p);
            }

            if (recipe.runspec) {
                const auto result = sim::run_campaign(p.config, *recipe.runspec);
                if (recipe.kind == RecipeKind::fig2_release) {
                    emit(stem + ".release_sim.csv", sim::to_csv(result.release), "release_sim", p);
                } else {
                    emit(stem + ".e2e_sim.csv", sim::to_csv(result.e2e), "e2e_sim", p);
                }
            }
        }
    } catch (const std::exception& e) {
        outcome.error = e.what();
        write_manifest();
        throw;
    }
    outcome.complete = true;
    write_manifest();
    return outcome;
}

}  // namespace mftx::harness
