#include "mftx/harness.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace mftx::harness {

namespace {

std::string first_present(const csv::Table& table, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        for (const auto& h : table.header) {
            if (h == n) return n;
        }
    }
    std::string want;
    for (const char* n : names) want += (want.empty() ? "" : " or ") + std::string(n);
    throw ValidationError({"CSV has no column " + want});
}

std::string describe(const std::vector<double>& t) {
    if (t.empty()) return "[] x 0";
    return "[" + csv::format(t.front()) + ", " + csv::format(t.back()) + "] x " +
           std::to_string(t.size());
}

}  // namespace

ComparisonReport compare(const csv::Table& reference, const csv::Table& simulation) {
    const auto ref_t = reference.column_values(first_present(reference, {"t", "t_bin_center"}));
    const auto ref_v = reference.column_values(first_present(reference, {"value", "density"}));
    const auto t = simulation.column_values("t_bin_center");
    const auto density = simulation.column_values("density");
    const auto stderrs = simulation.column_values("stderr");
    const auto events = simulation.column_values("n_events");

    bool aligned = ref_t.size() == t.size() && !t.empty();
    for (std::size_t i = 0; aligned && i < t.size(); ++i) {
        aligned = std::abs(ref_t[i] - t[i]) <= 1e-9 * std::max(1.0, std::abs(t[i]));
    }
    if (!aligned) {
        throw ValidationError({"grids misaligned: reference grid " + describe(ref_t) +
                               " vs simulation grid " + describe(t) +
                               "; evaluate the reference at the simulation bin centers"});
    }

    // Density carried by a single event; the same for every bin of a run.
    double one_event = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (events[i] > 0.0) {
            one_event = density[i] / events[i];
            break;
        }
    }

    ComparisonReport r;
    r.t = t;
    r.z.resize(t.size());
    std::size_t within = 0;
    double sumsq = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double diff = ref_v[i] - density[i];
        const double sigma = std::max(stderrs[i], one_event);
        if (diff == 0.0) {
            r.z[i] = 0.0;
        } else if (sigma > 0.0) {
            r.z[i] = diff / sigma;
        } else {
            r.z[i] = std::copysign(std::numeric_limits<double>::infinity(), diff);
        }
        if (std::abs(r.z[i]) <= kZLimit) ++within;
        r.sup_norm = std::max(r.sup_norm, std::abs(diff));
        sumsq += diff * diff;
    }
    r.fraction_within = static_cast<double>(within) / static_cast<double>(t.size());
    r.rmse = std::sqrt(sumsq / static_cast<double>(t.size()));
    r.pass = r.fraction_within >= kPassFraction;
    return r;
}

std::string to_json(const ComparisonReport& r) {
    nlohmann::ordered_json doc;
    doc["pass"] = r.pass;
    doc["bins"] = r.t.size();
    doc["fraction_within_3_stderr"] = r.fraction_within;
    doc["required_fraction"] = kPassFraction;
    doc["sup_norm"] = r.sup_norm;
    doc["rmse"] = r.rmse;
    auto bins = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        nlohmann::ordered_json b;
        b["t"] = r.t[i];
        // Infinite z (nonzero gap, zero uncertainty) serializes as null.
        if (std::isfinite(r.z[i])) {
            b["z"] = r.z[i];
        } else {
            b["z"] = nullptr;
        }
        bins.push_back(std::move(b));
    }
    doc["per_bin"] = std::move(bins);
    return doc.dump(2) + "\n";
}

}  // namespace mftx::harness
