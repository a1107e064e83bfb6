// Physical-layer state generation: large-scale fading profiles, Rayleigh
// channel vectors, Wiener oscillator phase trajectories, the channel-aging
// operator, and the Gauss-Markov aged-channel draw.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "agingmimo/bessel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/rng.hpp"

namespace agingmimo {

// Per-user large-scale gains l_k. Covariances are l_k * I throughout; the
// distances and shadowing draws are kept for diagnostics.
struct large_scale_profile {
    Eigen::VectorXd l;         // length K, strictly positive
    Eigen::VectorXd r_m;       // user distance from the BS, meters
    Eigen::VectorXd shadow_db; // 10*log10 of the log-normal shadowing factor
};

// Users uniform on the annulus [guard_radius, cell_radius] (uniform in area),
// log-normal shadowing with the given dB standard deviation, power-law path
// loss normalized to the guard distance: l = q / (r / guard)^exponent.
// A degenerate annulus (guard == cell radius) pins every user at the guard
// distance, which is handy for unit-gain test profiles.
inline large_scale_profile draw_large_scale(double cell_radius, double guard_radius,
                                            double pathloss_exp, double shadow_sigma_db,
                                            int K, rng_stream& rng) {
    if (!(cell_radius > 0.0) || !(guard_radius > 0.0))
        throw config_error("cell and guard radii must be positive");
    if (guard_radius > cell_radius)
        throw config_error("guard radius must not exceed the cell radius");
    if (K < 1) throw config_error("need at least one user");

    large_scale_profile p;
    p.l.resize(K);
    p.r_m.resize(K);
    p.shadow_db.resize(K);
    const double r0sq = guard_radius * guard_radius;
    const double span = cell_radius * cell_radius - r0sq;
    for (int k = 0; k < K; ++k) {
        const double r = std::sqrt(r0sq + rng.uniform() * span);
        const double sh_db = shadow_sigma_db * rng.gaussian();
        p.r_m[k] = r;
        p.shadow_db[k] = sh_db;
        p.l[k] = std::pow(10.0, sh_db / 10.0) / std::pow(r / guard_radius, pathloss_exp);
    }
    return p;
}

// h = sqrt(l) * w, w ~ CN(0, I).
inline Eigen::VectorXcd sample_channel(double l, int M, rng_stream& rng) {
    if (l < 0.0) throw numeric_error("channel variance must be nonnegative");
    Eigen::VectorXcd h(M);
    const double s = std::sqrt(l);
    for (int m = 0; m < M; ++m) h[m] = s * rng.cgaussian();
    return h;
}

// Diagonal covariance: entrywise square roots.
inline Eigen::VectorXcd sample_channel(const Eigen::VectorXd& r_diag, rng_stream& rng) {
    Eigen::VectorXcd h(r_diag.size());
    for (Eigen::Index m = 0; m < r_diag.size(); ++m) {
        if (r_diag[m] < 0.0) throw numeric_error("channel covariance has a negative diagonal entry");
        h[m] = std::sqrt(r_diag[m]) * rng.cgaussian();
    }
    return h;
}

// General Hermitian PSD covariance via eigendecomposition. Eigenvalues in
// [-1e-12 * max, 0) are treated as rounding noise and clamped to zero;
// anything more negative is rejected.
inline Eigen::VectorXcd sample_channel(const Eigen::MatrixXcd& R, rng_stream& rng) {
    const Eigen::Index M = R.rows();
    if (R.cols() != M) throw numeric_error("covariance must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    if (es.info() != Eigen::Success) throw numeric_error("covariance eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double floor = -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXcd w(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        if (ev[i] < floor) throw numeric_error("covariance is not positive semidefinite");
        w[i] = std::sqrt(std::max(ev[i], 0.0)) * rng.cgaussian();
    }
    return es.eigenvectors() * w;
}

// Oscillator phases at a given slot. Under CLO all BS entries stay equal.
struct phase_state {
    Eigen::VectorXd phi;    // BS antennas, radians, length M
    Eigen::VectorXd varphi; // users, radians, length K
    int n = 0;
};

inline phase_state initial_phase_state(const system_config& cfg) {
    phase_state st;
    st.phi = Eigen::VectorXd::Zero(cfg.M);
    st.varphi = Eigen::VectorXd::Zero(cfg.K);
    st.n = 0;
    return st;
}

// One Wiener step: phi_m += N(0, sigma_phi2[m]), varphi_k += N(0, sigma_varphi2[k]).
// CLO draws a single shared BS increment.
inline void advance_phase(phase_state& st, const system_config& cfg, rng_stream& rng) {
    if (cfg.mode == oscillator_mode::clo) {
        const double d = std::sqrt(cfg.sigma_phi2[0]) * rng.gaussian();
        st.phi.array() += d;
    } else {
        for (int m = 0; m < cfg.M; ++m)
            st.phi[m] += std::sqrt(cfg.sigma_phi2[m]) * rng.gaussian();
    }
    for (int k = 0; k < cfg.K; ++k)
        st.varphi[k] += std::sqrt(cfg.sigma_varphi2[k]) * rng.gaussian();
    st.n += 1;
}

// Effective channel g = Theta h for user k: per-antenna rotation by the BS
// phase plus the user's own oscillator phase. Diagonal entries are exactly
// unimodular.
inline Eigen::VectorXcd apply_phase(const Eigen::VectorXcd& h, const phase_state& st, int k) {
    Eigen::VectorXcd g(h.size());
    for (Eigen::Index m = 0; m < h.size(); ++m)
        g[m] = std::polar(1.0, st.phi[m] + st.varphi[k]) * h[m];
    return g;
}

// The aging operator factors into a Doppler term, a user-oscillator decay,
// and a per-antenna BS-oscillator decay. The factors are kept separate so
// each is testable on its own; entry(m) multiplies them back together.
struct aging_operator {
    double doppler = 1.0;       // J0(2 pi fD_Ts n)
    double user_decay = 1.0;    // exp(-sigma_varphi2[k] n / 2)
    Eigen::VectorXd antenna_decay; // exp(-sigma_phi2[m] n / 2); size 1 when scalar
    bool scalar = true;         // CLO or identical oscillators
    int n = 0;

    double as_scalar() const { return doppler * user_decay * antenna_decay[0]; }
    double entry(int m) const {
        return doppler * user_decay * antenna_decay[scalar ? 0 : m];
    }
    Eigen::VectorXd diag(int M) const {
        if (scalar) return Eigen::VectorXd::Constant(M, as_scalar());
        return doppler * user_decay * antenna_decay;
    }
};

inline aging_operator make_aging_operator(int n, int k, const system_config& cfg) {
    if (n < 0) throw std::domain_error("aging delay must be nonnegative");
    aging_operator a;
    a.n = n;
    a.doppler = bessel_j0(2.0 * M_PI * cfg.fD_Ts * n);
    a.user_decay = std::exp(-0.5 * cfg.sigma_varphi2[k] * n);
    a.scalar = cfg.scalar_aging();
    if (a.scalar) {
        a.antenna_decay = Eigen::VectorXd::Constant(1, std::exp(-0.5 * cfg.sigma_phi2[0] * n));
    } else {
        a.antenna_decay = (-0.5 * static_cast<double>(n) * cfg.sigma_phi2).array().exp().matrix();
    }
    return a;
}

// g_n = A_n g_0 + e, e ~ CN(0, R - A R A). Diagonal covariance path.
inline Eigen::VectorXcd aged_channel(const Eigen::VectorXcd& g0, const aging_operator& A,
                                     const Eigen::VectorXd& r_diag, rng_stream& rng) {
    Eigen::VectorXcd g(g0.size());
    for (Eigen::Index m = 0; m < g0.size(); ++m) {
        const double am = A.entry(static_cast<int>(m));
        const double innov = r_diag[m] * (1.0 - am * am);
        if (innov < -1e-12) throw numeric_error("negative innovation variance");
        g[m] = am * g0[m] + std::sqrt(std::max(innov, 0.0)) * rng.cgaussian();
    }
    return g;
}

// Dense-covariance path: innovation covariance R - A R A drawn through the
// eigendecomposition sampler.
inline Eigen::VectorXcd aged_channel(const Eigen::VectorXcd& g0, const aging_operator& A,
                                     const Eigen::MatrixXcd& R, rng_stream& rng) {
    const Eigen::Index M = R.rows();
    const Eigen::VectorXd a = A.diag(static_cast<int>(M));
    const Eigen::MatrixXcd innov = R - a.asDiagonal() * R * a.asDiagonal();
    const Eigen::VectorXcd e = sample_channel(innov, rng);
    return g0.cwiseProduct(a.cast<std::complex<double>>()) + e;
}

// Covariance of the combined error A g~ + e, equal to R - A D A. Diagonal
// path; requires D <= R entrywise.
inline Eigen::VectorXd combined_error_cov(const aging_operator& A, const Eigen::VectorXd& d_diag,
                                          const Eigen::VectorXd& r_diag) {
    Eigen::VectorXd c(r_diag.size());
    for (Eigen::Index m = 0; m < r_diag.size(); ++m) {
        const double am = A.entry(static_cast<int>(m));
        c[m] = r_diag[m] - am * am * d_diag[m];
        if (c[m] < -1e-12) throw numeric_error("combined error covariance is negative");
        c[m] = std::max(c[m], 0.0);
    }
    return c;
}

inline Eigen::MatrixXcd combined_error_cov(const aging_operator& A, const Eigen::MatrixXcd& D,
                                           const Eigen::MatrixXcd& R) {
    const Eigen::VectorXd a = A.diag(static_cast<int>(R.rows()));
    Eigen::MatrixXcd C = R - a.asDiagonal() * D * a.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
        throw numeric_error("combined error covariance is not positive semidefinite");
    return C;
}

} // namespace agingmimo
