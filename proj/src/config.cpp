#include "nmar/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nmar/errors.hpp"

namespace nmar {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> items(std::string_view v) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key) + ": not a nonnegative integer: '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(std::string(key) + ": expected true or false");
}

BandwidthMode to_mode(std::string_view key, std::string_view v) {
    if (v == "fixed") return BandwidthMode::fixed;
    if (v == "power") return BandwidthMode::power_rule;
    throw ConfigError(std::string(key) + ": expected fixed or power");
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
    const auto v = trim(value);
    auto aux = [&c]() -> BandwidthPolicy& {
        if (!c.aux_bandwidth) c.aux_bandwidth = c.bandwidth;
        return *c.aux_bandwidth;
    };
    if (key == "model.name") {
        c.model.name = std::string(v);
    } else if (key == "model.d") {
        c.model.d = to_uint(key, v);
    } else if (key == "model.z_coords") {
        c.model.z_coords.clear();
        // 1-based in the text form, matching the x1..xd CSV columns.
        for (auto item : items(v)) {
            const auto k = to_uint(key, item);
            if (k == 0) throw ConfigError("model.z_coords: coordinates are numbered from 1");
            c.model.z_coords.push_back(k - 1);
        }
    } else if (key == "model.amplitude") {
        c.model.amplitude = to_double(key, v);
    } else if (key == "model.noise") {
        c.model.noise = to_double(key, v);
    } else if (key == "model.gamma") {
        c.model.gamma = to_double(key, v);
    } else if (key == "model.g_slope") {
        c.model.g_slope = to_double(key, v);
    } else if (key == "model.g_shift") {
        c.model.g_shift = to_double(key, v);
    } else if (key == "model.level") {
        c.model.level = to_double(key, v);
    } else if (key == "estimators") {
        c.estimators.clear();
        for (auto item : items(v)) c.estimators.emplace_back(item);
    } else if (key == "n_grid") {
        c.n_grid.clear();
        for (auto item : items(v)) c.n_grid.push_back(to_uint(key, item));
    } else if (key == "replications") {
        c.replications = to_uint(key, v);
    } else if (key == "split_alpha") {
        c.split_alpha = to_double(key, v);
    } else if (key == "p") {
        c.p = to_double(key, v);
    } else if (key == "n_eval") {
        c.n_eval = to_uint(key, v);
    } else if (key == "seed") {
        c.seed = to_uint(key, v);
    } else if (key == "threads") {
        c.threads = to_uint(key, v);
    } else if (key == "cover.kind") {
        c.cover_kind = std::string(v);
    } else if (key == "cover.M") {
        c.cover_M = to_double(key, v);
    } else if (key == "cover.B") {
        c.cover_B = to_double(key, v);
    } else if (key == "cover.epsilon_mode") {
        if (v == "fixed") {
            c.epsilon_mode = EpsilonMode::fixed;
        } else if (v == "n_power") {
            c.epsilon_mode = EpsilonMode::n_power;
        } else {
            throw ConfigError("cover.epsilon_mode: expected fixed or n_power");
        }
    } else if (key == "cover.epsilon") {
        c.epsilon = to_double(key, v);
    } else if (key == "cover.table") {
        c.cover_table = std::string(v);
    } else if (key == "kernel.family") {
        c.kernel_family = std::string(v);
    } else if (key == "kernel.param") {
        c.kernel_param = to_double(key, v);
    } else if (key == "bandwidth.mode") {
        c.bandwidth.mode = to_mode(key, v);
    } else if (key == "bandwidth.h0") {
        c.bandwidth.h0 = to_double(key, v);
    } else if (key == "bandwidth.beta") {
        c.bandwidth.beta = to_double(key, v);
    } else if (key == "aux_kernel.family") {
        c.aux_kernel_family = std::string(v);
    } else if (key == "aux_kernel.param") {
        c.aux_kernel_param = to_double(key, v);
    } else if (key == "aux_bandwidth.mode") {
        aux().mode = to_mode(key, v);
    } else if (key == "aux_bandwidth.h0") {
        aux().h0 = to_double(key, v);
    } else if (key == "aux_bandwidth.beta") {
        aux().beta = to_double(key, v);
    } else if (key == "ht.pi0") {
        c.ht_pi0 = to_double(key, v);
    } else if (key == "ht.use_lambda") {
        c.ht_use_lambda = to_bool(key, v);
    } else if (key == "plugin.gamma") {
        c.plugin_gamma = to_double(key, v);
    } else if (key == "output.results") {
        c.output_results = std::string(v);
    } else if (key == "output.plot") {
        c.output_plot = std::string(v);
    } else if (key == "output.timing") {
        c.output_timing = to_bool(key, v);
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        }
        try {
            apply_setting(c, trim(s.substr(0, eq)), s.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    return parse_config(in);
}

void ExperimentConfig::validate() const {
    if (estimators.empty()) throw ConfigError("estimators: at least one estimator required");
    for (const auto& e : estimators) {
        const auto& known = known_estimators();
        if (std::find(known.begin(), known.end(), e) == known.end()) {
            throw ConfigError("estimators: unknown estimator '" + e + "'");
        }
    }
    if (n_grid.empty()) throw ConfigError("n_grid: at least one sample size required");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw ConfigError("n_grid: sample sizes must be at least 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid: must be strictly increasing");
    }
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (!(split_alpha > 0.0 && split_alpha < 1.0)) throw ConfigError("split_alpha must lie in (0, 1)");
    if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
    if (n_eval < 1000) throw ConfigError("n_eval must be at least 1000");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (cover_kind != "exp" && cover_kind != "tabulated") throw ConfigError("cover.kind must be exp or tabulated");
    if (cover_kind == "tabulated" && cover_table.empty()) throw ConfigError("cover.kind = tabulated needs cover.table");
    if (cover_kind == "tabulated" && !cover_B) throw ConfigError("cover.kind = tabulated needs cover.B");
    if (!(cover_M > 0.0)) throw ConfigError("cover.M must be positive");
    if (cover_B && !(*cover_B > 0.0)) throw ConfigError("cover.B must be positive");
    if (epsilon_mode == EpsilonMode::fixed && !(epsilon > 0.0)) throw ConfigError("cover.epsilon must be positive");
    if (!(ht_pi0 > 0.0 && ht_pi0 < 1.0)) throw ConfigError("ht.pi0 must lie in (0, 1)");
    (void)regression_kernel(*this);
    (void)auxiliary_kernel(*this);
    (void)nmar::bandwidth(bandwidth, n_grid.front(), model.d);
    (void)nmar::bandwidth(auxiliary_bandwidth(*this), n_grid.front(), model.z_coords.size());
    (void)make_model(model);
}

KernelSpec regression_kernel(const ExperimentConfig& c) { return KernelSpec::from_name(c.kernel_family, c.kernel_param); }

KernelSpec auxiliary_kernel(const ExperimentConfig& c) {
    if (!c.aux_kernel_family) return regression_kernel(c);
    return KernelSpec::from_name(*c.aux_kernel_family, c.aux_kernel_param);
}

BandwidthPolicy auxiliary_bandwidth(const ExperimentConfig& c) { return c.aux_bandwidth.value_or(c.bandwidth); }

}  // namespace nmar
