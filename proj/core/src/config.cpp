#include "mftx/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mftx {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

double fusion_probability(const SystemConfig& c) {
    return c.k_f * std::sqrt(kPi * c.dt_s / c.d_v);
}

DerivedConstants validate(const SystemConfig& c) {
    std::vector<std::string> bad;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(std::string(name) + " must be > 0");
    };
    auto non_negative = [&](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) bad.push_back(std::string(name) + " must be >= 0");
    };
    positive(c.r_tx, "r_tx");
    positive(c.r_rx, "r_rx");
    positive(c.d_v, "d_v");
    positive(c.d_sigma, "d_sigma");
    positive(c.dt_s, "dt_s");
    non_negative(c.k_f, "k_f");
    non_negative(c.k_d, "k_d");
    if (c.n_v < 0) bad.emplace_back("n_v must be >= 0");
    if (c.eta < 0) bad.emplace_back("eta must be >= 0");
    if (!(c.l > c.r_tx + c.r_rx) || !std::isfinite(c.l)) {
        bad.emplace_back("l must exceed r_tx + r_rx (spheres overlap)");
    }
    if (c.k_f >= 0.0 && c.d_v > 0.0 && c.dt_s > 0.0 && fusion_probability(c) > 1.0) {
        bad.emplace_back("p_mf = k_f*sqrt(pi*dt_s/d_v) exceeds 1 (dt_s too coarse)");
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));

    DerivedConstants d{};
    d.rho = 1.0 / (4.0 * kPi * c.r_tx * c.r_tx);
    d.beta1 = (c.r_tx + c.r_rx) * (c.r_tx + c.r_rx - 2.0 * c.l) + c.l * c.l;
    d.beta1 /= 4.0 * c.d_sigma;
    d.beta2 = (c.r_tx - c.r_rx) * (c.r_tx - c.r_rx + 2.0 * c.l) + c.l * c.l;
    d.beta2 /= 4.0 * c.d_sigma;
    d.p_mf = fusion_probability(c);
    d.robin_c = 1.0 - c.k_f * c.r_tx / c.d_v;
    return d;
}

void set_config_field(SystemConfig& c, std::string_view name, double value) {
    auto count = [&](std::int64_t& field) {
        if (!is_integral(value)) {
            throw ValidationError({std::string(name) + " must be an integer count"});
        }
        field = static_cast<std::int64_t>(value);
    };
    if (name == "r_tx") c.r_tx = value;
    else if (name == "r_rx") c.r_rx = value;
    else if (name == "l") c.l = value;
    else if (name == "d_v") c.d_v = value;
    else if (name == "d_sigma") c.d_sigma = value;
    else if (name == "k_f") c.k_f = value;
    else if (name == "k_d") c.k_d = value;
    else if (name == "n_v") count(c.n_v);
    else if (name == "eta") count(c.eta);
    else if (name == "dt_s") c.dt_s = value;
    else throw ValidationError({"unknown SystemConfig field '" + std::string(name) + "'"});
}

double get_config_field(const SystemConfig& c, std::string_view name) {
    if (name == "r_tx") return c.r_tx;
    if (name == "r_rx") return c.r_rx;
    if (name == "l") return c.l;
    if (name == "d_v") return c.d_v;
    if (name == "d_sigma") return c.d_sigma;
    if (name == "k_f") return c.k_f;
    if (name == "k_d") return c.k_d;
    if (name == "n_v") return static_cast<double>(c.n_v);
    if (name == "eta") return static_cast<double>(c.eta);
    if (name == "dt_s") return c.dt_s;
    throw ValidationError({"unknown SystemConfig field '" + std::string(name) + "'"});
}

SystemConfig config_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError({std::string("config is not valid JSON: ") + e.what()});
    }
    if (!doc.is_object()) throw ValidationError({"config must be a JSON object"});

    SystemConfig c;
    std::vector<std::string> bad;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number()) {
            bad.push_back("field '" + key + "' must be a number");
            continue;
        }
        try {
            set_config_field(c, key, value.get<double>());
        } catch (const ValidationError& e) {
            bad.insert(bad.end(), e.violations().begin(), e.violations().end());
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return c;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot open config file '" + path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

std::string config_to_json(const SystemConfig& c) {
    // ordered_json keeps declaration order so the hash is stable.
    nlohmann::ordered_json doc;
    doc["r_tx"] = c.r_tx;
    doc["r_rx"] = c.r_rx;
    doc["l"] = c.l;
    doc["d_v"] = c.d_v;
    doc["d_sigma"] = c.d_sigma;
    doc["k_f"] = c.k_f;
    doc["k_d"] = c.k_d;
    doc["n_v"] = c.n_v;
    doc["eta"] = c.eta;
    doc["dt_s"] = c.dt_s;
    return doc.dump(2);
}

std::uint64_t config_hash(const SystemConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_to_json(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace mftx
