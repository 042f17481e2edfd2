#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmar/cover.hpp"
#include "nmar/kernels.hpp"
#include "nmar/models.hpp"

namespace nmar {

/// Experiment settings. Text form: one `key = value` per line, `#` starts a
/// comment, lists are comma separated; model.z_coords numbers coordinates from 1. Keys:
///
///   model.name model.d model.z_coords model.amplitude model.noise model.gamma
///   model.g_slope model.g_shift model.level
///   estimators n_grid replications split_alpha p n_eval seed threads
///   cover.kind (exp|tabulated) cover.M cover.B cover.epsilon_mode (fixed|n_power)
///   cover.epsilon cover.table
///   kernel.family kernel.param bandwidth.mode (fixed|power) bandwidth.h0 bandwidth.beta
///   aux_kernel.family aux_kernel.param aux_bandwidth.mode aux_bandwidth.h0 aux_bandwidth.beta
///   ht.pi0 ht.use_lambda plugin.gamma
///   output.results output.plot output.timing
///
/// The auxiliary kernel and bandwidth default to the regression ones; plugin.gamma
/// defaults to the model's own exponent.
struct ExperimentConfig {
    ModelParams model;
    std::vector<std::string> estimators{"select_phi"};
    std::vector<std::size_t> n_grid{500, 2000, 8000};
    std::size_t replications = 10;
    double split_alpha = 0.5;
    double p = 2.0;
    std::size_t n_eval = 20000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    std::string cover_kind = "exp";
    double cover_M = 1.5;
    std::optional<double> cover_B;
    EpsilonMode epsilon_mode = EpsilonMode::n_power;
    double epsilon = 0.1;
    std::string cover_table;

    std::string kernel_family = "box";
    double kernel_param = 0.0;
    BandwidthPolicy bandwidth = BandwidthPolicy::power_rule(0.5, 0.2);
    std::optional<std::string> aux_kernel_family;
    double aux_kernel_param = 0.0;
    std::optional<BandwidthPolicy> aux_bandwidth;

    double ht_pi0 = 1e-3;
    bool ht_use_lambda = false;
    std::optional<double> plugin_gamma;

    std::string output_results = "results.csv";
    std::string output_plot;
    bool output_timing = false;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

inline const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> names{"plugin_gamma", "select_phi", "ht_tilde",
                                                "ht_breve",     "complete_case", "nw_full"};
    return names;
}

/// Applies one `key = value` assignment; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

KernelSpec regression_kernel(const ExperimentConfig& config);
KernelSpec auxiliary_kernel(const ExperimentConfig& config);
BandwidthPolicy auxiliary_bandwidth(const ExperimentConfig& config);

}  // namespace nmar
