// Plain-text scenario files: one `key = value` per line, `#` comments,
// dotted section names. Unknown keys are hard errors so a typo cannot
// silently fall back to a default.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "agingmimo/channel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/rng.hpp"

namespace agingmimo {

enum class engine_choice { mc, de, both };

struct scenario {
    int M = 60;
    int K = 10;
    int tau = 0; // 0 means "equal to K"
    int T_c = 196;

    double cell_radius_m = 1000.0;
    double guard_m = 100.0;
    double pathloss_exponent = 3.8;
    double shadow_sigma_db = 8.0;

    double p_u_dbm = 46.0;
    double p_d_dbm = 46.0;
    double noise_density_dbm_hz = -174.0;
    double bandwidth_hz = 20.0e6;

    double fd_ts = 0.0;
    oscillator_mode mode = oscillator_mode::clo;
    double bs_sigma_deg = 0.0;
    double ue_sigma_deg = 0.0;

    double rzf_alpha = 0.1;
    double rzf_z = 0.0;

    std::string sweep_axis; // empty: single point at current settings
    std::vector<double> sweep_values;

    engine_choice engine = engine_choice::both;
    std::vector<precoder_kind> precoders = {precoder_kind::mrt};

    int n_mc = 2000;
    std::uint64_t seed = 1;
    std::uint64_t profile_seed = 1;

    int cells = 1;
    bool standard_combiner = false;

    bool per_user = false;
    std::string out_path;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw config_error("scenario: bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw config_error("scenario: bad number for " + key + ": '" + v + "'");
    return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw config_error("scenario: bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw config_error("scenario: bad integer for " + key + ": '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("scenario: bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw config_error("scenario: empty entry in " + key);
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw config_error("scenario: empty list for " + key);
    return out;
}

} // namespace detail

inline void apply_scenario_key(scenario& sc, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;

    if (key == "system.M") sc.M = static_cast<int>(parse_int(key, value));
    else if (key == "system.K") sc.K = static_cast<int>(parse_int(key, value));
    else if (key == "system.tau") sc.tau = static_cast<int>(parse_int(key, value));
    else if (key == "system.T_c") sc.T_c = static_cast<int>(parse_int(key, value));
    else if (key == "cell.radius_m") sc.cell_radius_m = parse_double(key, value);
    else if (key == "cell.guard_m") sc.guard_m = parse_double(key, value);
    else if (key == "cell.pathloss_exponent") sc.pathloss_exponent = parse_double(key, value);
    else if (key == "cell.shadow_sigma_db") sc.shadow_sigma_db = parse_double(key, value);
    else if (key == "power.p_u_dbm") sc.p_u_dbm = parse_double(key, value);
    else if (key == "power.p_d_dbm") sc.p_d_dbm = parse_double(key, value);
    else if (key == "noise.density_dbm_hz") sc.noise_density_dbm_hz = parse_double(key, value);
    else if (key == "noise.bandwidth_hz") sc.bandwidth_hz = parse_double(key, value);
    else if (key == "channel.fd_ts") sc.fd_ts = parse_double(key, value);
    else if (key == "phase.mode") {
        if (value == "clo") sc.mode = oscillator_mode::clo;
        else if (value == "slo_identical") sc.mode = oscillator_mode::slo_identical;
        else if (value == "slo_distinct") sc.mode = oscillator_mode::slo_distinct;
        else throw config_error("scenario: unknown phase.mode '" + value + "'");
    } else if (key == "phase.bs_sigma_deg") sc.bs_sigma_deg = parse_double(key, value);
    else if (key == "phase.ue_sigma_deg") sc.ue_sigma_deg = parse_double(key, value);
    else if (key == "rzf.alpha") sc.rzf_alpha = parse_double(key, value);
    else if (key == "rzf.z") sc.rzf_z = parse_double(key, value);
    else if (key == "sweep.axis") sc.sweep_axis = value;
    else if (key == "sweep.values") sc.sweep_values = detail::parse_list(key, value);
    else if (key == "engine") {
        if (value == "mc") sc.engine = engine_choice::mc;
        else if (value == "de") sc.engine = engine_choice::de;
        else if (value == "both") sc.engine = engine_choice::both;
        else throw config_error("scenario: unknown engine '" + value + "'");
    } else if (key == "precoder") {
        if (value == "mrt") sc.precoders = {precoder_kind::mrt};
        else if (value == "rzf") sc.precoders = {precoder_kind::rzf};
        else if (value == "both") sc.precoders = {precoder_kind::mrt, precoder_kind::rzf};
        else throw config_error("scenario: unknown precoder '" + value + "'");
    } else if (key == "mc.trials") sc.n_mc = static_cast<int>(parse_int(key, value));
    else if (key == "seed") sc.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "profile.seed") sc.profile_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "multicell.cells") sc.cells = static_cast<int>(parse_int(key, value));
    else if (key == "multicell.estimator") {
        if (value == "inverse_sum") sc.standard_combiner = false;
        else if (value == "standard") sc.standard_combiner = true;
        else throw config_error("scenario: unknown multicell.estimator '" + value + "'");
    } else if (key == "output.per_user") sc.per_user = parse_bool(key, value);
    else if (key == "output.path") sc.out_path = value;
    else throw config_error("scenario: unknown key '" + key + "'");
}

inline void validate_scenario(const scenario& sc) {
    if (sc.M < 1 || sc.K < 1) throw config_error("scenario: M and K must be positive");
    if (sc.tau < 0) throw config_error("scenario: tau must be nonnegative");
    if (sc.n_mc < 2) throw config_error("scenario: mc.trials must be at least 2");
    if (sc.cells < 1 || sc.cells > 7) throw config_error("scenario: multicell.cells must be 1..7");
    if (!sc.sweep_axis.empty()) {
        if (sc.sweep_axis != "M" && sc.sweep_axis != "fd_ts" && sc.sweep_axis != "sigma_deg" &&
            sc.sweep_axis != "p_d_dbm")
            throw config_error("scenario: unknown sweep.axis '" + sc.sweep_axis + "'");
        if (sc.sweep_values.empty()) throw config_error("scenario: sweep.values is required");
        for (std::size_t i = 1; i < sc.sweep_values.size(); ++i)
            if (!(sc.sweep_values[i] > sc.sweep_values[i - 1]))
                throw config_error("scenario: sweep.values must be strictly increasing");
        if (sc.sweep_axis == "M")
            for (double v : sc.sweep_values)
                if (v < 1.0 || v != std::floor(v))
                    throw config_error("scenario: sweep over M needs positive integers");
    } else if (!sc.sweep_values.empty()) {
        throw config_error("scenario: sweep.values given without sweep.axis");
    }
}

inline scenario parse_scenario(std::istream& in) {
    scenario sc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("scenario: line " + std::to_string(lineno) +
                               " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("scenario: line " + std::to_string(lineno) +
                               " is not 'key = value'");
        apply_scenario_key(sc, key, value);
    }
    validate_scenario(sc);
    return sc;
}

inline scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    return parse_scenario(in);
}

// System configuration at one sweep point. The axis value overrides the
// matching base field; sigma_deg drives both oscillator strengths.
inline system_config scenario_config(const scenario& sc, const std::string& axis, double value) {
    int M = sc.M;
    double fd = sc.fd_ts, bs_deg = sc.bs_sigma_deg, ue_deg = sc.ue_sigma_deg;
    double p_d_dbm = sc.p_d_dbm;
    if (axis == "M") M = static_cast<int>(value);
    else if (axis == "fd_ts") fd = value;
    else if (axis == "sigma_deg") { bs_deg = value; ue_deg = value; }
    else if (axis == "p_d_dbm") p_d_dbm = value;
    else if (!axis.empty()) throw config_error("unknown sweep axis '" + axis + "'");

    system_config cfg = default_config(M, sc.K);
    cfg.tau = sc.tau == 0 ? sc.K : sc.tau;
    cfg.T_c = sc.T_c;
    cfg.p_u = dbm_to_watts(sc.p_u_dbm);
    cfg.p_d = dbm_to_watts(p_d_dbm);
    cfg.sigma_b2 = noise_power_watts(sc.noise_density_dbm_hz, sc.bandwidth_hz);
    cfg.sigma_k2.setConstant(cfg.sigma_b2);
    cfg.fD_Ts = fd;
    cfg.mode = sc.mode;
    if (sc.mode == oscillator_mode::slo_distinct) {
        // Per-antenna strengths ramp linearly from 0 to the configured value.
        for (int m = 0; m < M; ++m)
            cfg.sigma_phi2[m] = deg_to_rad2(bs_deg * m / std::max(1, M - 1));
        for (int k = 0; k < sc.K; ++k) cfg.sigma_varphi2[k] = deg_to_rad2(ue_deg);
    } else {
        set_phase_noise_deg(cfg, bs_deg, ue_deg);
    }
    cfg.rzf_alpha = sc.rzf_alpha;
    if (sc.rzf_z != 0.0)
        cfg.rzf_Z = sc.rzf_z * Eigen::MatrixXcd::Identity(M, M);
    cfg.validate();
    return cfg;
}

inline large_scale_profile scenario_profile(const scenario& sc) {
    rng_stream rng(sc.profile_seed);
    return draw_large_scale(sc.cell_radius_m, sc.guard_m, sc.pathloss_exponent,
                            sc.shadow_sigma_db, sc.K, rng);
}

} // namespace agingmimo
