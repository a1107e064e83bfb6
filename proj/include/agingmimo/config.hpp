// System-level parameters and unit conversions. All powers are stored in
// linear watts and all phase-noise increment variances in radians squared;
// conversion from the dB / degree units used in configuration files happens
// exactly once, at construction.
#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "agingmimo/errors.hpp"

namespace agingmimo {

enum class oscillator_mode {
    clo,           // one common oscillator for all BS antennas
    slo_identical, // separate oscillators, identical increment statistics
    slo_distinct   // separate oscillators, per-antenna statistics
};

enum class precoder_kind { mrt, rzf };

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

// Phase-noise levels are quoted in degrees (per-slot increment standard
// deviation); internally everything is an increment variance in rad^2.
inline double deg_to_rad2(double deg) {
    const double rad = deg * M_PI / 180.0;
    return rad * rad;
}

// Thermal noise power over a bandwidth, from a density in dBm/Hz.
inline double noise_power_watts(double density_dbm_per_hz, double bandwidth_hz) {
    return dbm_to_watts(density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

struct system_config {
    int M = 60;   // BS antennas
    int K = 10;   // single-antenna users
    int tau = 10; // training symbols, >= K
    int T_c = 196; // coherence block length in symbols

    double p_u = dbm_to_watts(46.0); // uplink power per user
    double p_d = dbm_to_watts(46.0); // downlink power
    double sigma_b2 = noise_power_watts(-174.0, 20e6); // BS noise variance
    Eigen::VectorXd sigma_k2; // per-user downlink noise variance, length K

    double fD_Ts = 0.0; // normalized Doppler shift

    oscillator_mode mode = oscillator_mode::clo;
    Eigen::VectorXd sigma_phi2;    // BS per-antenna increment variance, rad^2, length M
    Eigen::VectorXd sigma_varphi2; // per-user increment variance, rad^2, length K

    double rzf_alpha = 0.1;  // regularization a, > 0
    Eigen::MatrixXcd rzf_Z;  // Hermitian PSD M x M; empty means zero

    double pilot_power() const { return static_cast<double>(tau) * p_u; }

    bool scalar_aging() const {
        return mode == oscillator_mode::clo || mode == oscillator_mode::slo_identical;
    }

    void validate() const {
        if (M < 1) throw config_error("system.M must be >= 1");
        if (K < 1) throw config_error("system.K must be >= 1");
        if (tau < K) throw config_error("system.tau must be >= K (orthogonal pilots)");
        if (T_c <= tau) throw config_error("system.T_c must exceed tau");
        if (!(p_u > 0.0) || !(p_d > 0.0)) throw config_error("powers must be positive");
        if (!(sigma_b2 > 0.0)) throw config_error("BS noise variance must be positive");
        if (sigma_k2.size() != K) throw config_error("sigma_k2 must have one entry per user");
        if ((sigma_k2.array() <= 0.0).any()) throw config_error("user noise variances must be positive");
        if (sigma_phi2.size() != M) throw config_error("sigma_phi2 must have one entry per antenna");
        if (sigma_varphi2.size() != K) throw config_error("sigma_varphi2 must have one entry per user");
        if ((sigma_phi2.array() < 0.0).any() || (sigma_varphi2.array() < 0.0).any())
            throw config_error("phase-noise variances must be nonnegative");
        if (scalar_aging() && M > 1) {
            // Scalar aging requires a single BS-side variance.
            const double v0 = sigma_phi2[0];
            if ((sigma_phi2.array() != v0).any())
                throw config_error("CLO / identical-oscillator modes need equal BS phase variances");
        }
        if (!(rzf_alpha > 0.0)) throw config_error("rzf.alpha must be positive");
        if (rzf_Z.size() != 0 && (rzf_Z.rows() != M || rzf_Z.cols() != M))
            throw config_error("rzf.Z must be M x M");
    }
};

// Baseline configuration: LTE-flavored single cell, 46 dBm powers, -174
// dBm/Hz noise density over 20 MHz, tau = K training symbols, a 196-symbol
// coherence block, no Doppler, no phase noise, common oscillator.
inline system_config default_config(int M, int K) {
    system_config cfg;
    cfg.M = M;
    cfg.K = K;
    cfg.tau = K;
    cfg.sigma_k2 = Eigen::VectorXd::Constant(K, cfg.sigma_b2);
    cfg.sigma_phi2 = Eigen::VectorXd::Zero(M);
    cfg.sigma_varphi2 = Eigen::VectorXd::Zero(K);
    return cfg;
}

// Uniform phase-noise level in degrees applied to both ends of the link.
inline void set_phase_noise_deg(system_config& cfg, double bs_deg, double ue_deg) {
    cfg.sigma_phi2.setConstant(deg_to_rad2(bs_deg));
    cfg.sigma_varphi2.setConstant(deg_to_rad2(ue_deg));
}

} // namespace agingmimo
