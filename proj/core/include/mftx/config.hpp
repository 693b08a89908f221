#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mftx/errors.hpp"

namespace mftx {

inline constexpr double kPi = 3.14159265358979323846;

/// Physical parameters of the MF-based transmitter, the channel and the
/// absorbing receiver. Lengths in um, times in s, diffusivities in um^2/s.
struct SystemConfig {
    double r_tx = 10.0;      ///< TX radius
    double r_rx = 10.0;      ///< RX radius
    double l = 40.0;         ///< TX-center to RX-center distance
    double d_v = 9.0;        ///< vesicle diffusion coefficient
    double d_sigma = 1000.0; ///< molecule diffusion coefficient
    double k_f = 20.0;       ///< forward fusion reaction rate, um/s
    double k_d = 0.8;        ///< degradation rate, 1/s
    std::int64_t n_v = 100;  ///< vesicles per impulse
    std::int64_t eta = 100;  ///< molecules per vesicle
    double dt_s = 0.001;     ///< simulation step

    bool operator==(const SystemConfig&) const = default;
};

/// Quantities every other module derives from a valid SystemConfig.
struct DerivedConstants {
    double rho;      ///< 1 / (4 pi r_tx^2), um^-2
    double beta1;    ///< (l - r_tx - r_rx)^2 / (4 D_sigma), s
    double beta2;    ///< (l + r_tx - r_rx)^2 / (4 D_sigma), s
    double p_mf;     ///< per-hit fusion probability k_f sqrt(pi dt_s / D_v)
    double robin_c;  ///< 1 - k_f r_tx / D_v

    bool operator==(const DerivedConstants&) const = default;
};

/// Checks every SystemConfig invariant and returns the derived constants.
/// Throws ValidationError listing all violated invariants by name.
DerivedConstants validate(const SystemConfig& config);

/// Per-hit membrane fusion probability; no validation.
double fusion_probability(const SystemConfig& config);

/// Parses a SystemConfig JSON document. Every field is optional (missing
/// fields keep the default), unknown keys are rejected. Does not validate
/// physical invariants; call validate() for that.
SystemConfig config_from_json(std::string_view text);
SystemConfig load_config(const std::string& path);

/// Serializes with exactly the SystemConfig field names.
std::string config_to_json(const SystemConfig& config);

/// Stable 64-bit FNV-1a hash of the canonical JSON form.
std::uint64_t config_hash(const SystemConfig& config);

/// Names of all SystemConfig fields in declaration order.
inline constexpr std::string_view kConfigFields[] = {
    "r_tx", "r_rx", "l", "d_v", "d_sigma", "k_f", "k_d", "n_v", "eta", "dt_s"};

/// Sets a field by name. Count fields must hold an integral value.
/// Throws ValidationError on an unknown name or a non-integral count.
void set_config_field(SystemConfig& config, std::string_view name, double value);
double get_config_field(const SystemConfig& config, std::string_view name);

}  // namespace mftx
