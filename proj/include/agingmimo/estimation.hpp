// Uplink training: the decorrelated pilot observation and the joint
// channel/phase LMMSE estimator.
//
// With orthogonal pilots the matched-filtered observation for user k is
//   y~ = g_0 + z / sqrt(p_p),  z ~ CN(0, sigma_b^2 I),  p_p = tau * p_u,
// and the estimate is g^ = (I + (sigma_b^2 / p_p) R^{-1})^{-1} y~ with
// estimate covariance D = (I + (sigma_b^2 / p_p) R^{-1})^{-1} R. Both are
// evaluated without forming R^{-1}: entrywise for diagonal R, through an
// eigendecomposition otherwise, so singular covariances restrict the
// estimate to the support of R instead of failing.
#pragma once

#include <Eigen/Dense>

#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/rng.hpp"

namespace agingmimo {

struct pilot_observation {
    Eigen::VectorXcd y_tilde;
    double p_p = 0.0;
};

inline pilot_observation pilot_observe(const Eigen::VectorXcd& g0, const system_config& cfg,
                                       rng_stream& rng) {
    const double p_p = cfg.pilot_power();
    if (!(p_p > 0.0)) throw config_error("pilot power must be positive");
    pilot_observation obs;
    obs.p_p = p_p;
    obs.y_tilde.resize(g0.size());
    const double s = std::sqrt(cfg.sigma_b2 / p_p);
    for (Eigen::Index m = 0; m < g0.size(); ++m)
        obs.y_tilde[m] = g0[m] + s * rng.cgaussian();
    return obs;
}

struct channel_estimate {
    Eigen::VectorXcd g_hat;
    Eigen::VectorXd d_diag;  // diagonal of D when R is diagonal
    Eigen::MatrixXcd D;      // dense D (left empty on the diagonal paths)
    bool support_restricted = false; // observation had energy outside supp(R)
};

// Diagonal entry of the estimate covariance D for R = l I, equal to
// p_p l^2 / (p_p l + sigma_b^2). The closed-form SINR pipeline and the
// sampler both reduce the diagonal world to this scalar.
inline double lmmse_d_entry(double l, double p_p, double sigma_b2) {
    if (l == 0.0) return 0.0;
    return p_p * l * l / (p_p * l + sigma_b2);
}

// Scalar covariance R = l * I. The per-entry gain is p_p l / (p_p l + sigma_b^2).
inline channel_estimate lmmse_estimate(const pilot_observation& obs, double l,
                                       const system_config& cfg) {
    channel_estimate est;
    const Eigen::Index M = obs.y_tilde.size();
    if (l == 0.0) {
        est.g_hat = Eigen::VectorXcd::Zero(M);
        est.d_diag = Eigen::VectorXd::Zero(M);
        est.support_restricted = obs.y_tilde.norm() > 0.0;
        return est;
    }
    const double w = obs.p_p * l / (obs.p_p * l + cfg.sigma_b2);
    est.g_hat = w * obs.y_tilde;
    est.d_diag = Eigen::VectorXd::Constant(M, w * l);
    return est;
}

// Diagonal covariance, applied entrywise. Zero diagonal entries force a zero
// estimate there; a nonzero observation on such an entry is flagged.
inline channel_estimate lmmse_estimate(const pilot_observation& obs,
                                       const Eigen::VectorXd& r_diag,
                                       const system_config& cfg) {
    channel_estimate est;
    const Eigen::Index M = obs.y_tilde.size();
    est.g_hat.resize(M);
    est.d_diag.resize(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double r = r_diag[m];
        if (r == 0.0) {
            est.g_hat[m] = 0.0;
            est.d_diag[m] = 0.0;
            if (std::abs(obs.y_tilde[m]) > 0.0) est.support_restricted = true;
            continue;
        }
        const double w = obs.p_p * r / (obs.p_p * r + cfg.sigma_b2);
        est.g_hat[m] = w * obs.y_tilde[m];
        est.d_diag[m] = w * r;
    }
    return est;
}

// General Hermitian PSD covariance. Writing the estimator as R (R + c I)^{-1}
// with c = sigma_b^2 / p_p avoids R^{-1} entirely; the eigenbasis gives D and
// the support restriction in one pass.
inline channel_estimate lmmse_estimate(const pilot_observation& obs,
                                       const Eigen::MatrixXcd& R,
                                       const system_config& cfg) {
    channel_estimate est;
    const Eigen::Index M = obs.y_tilde.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    if (es.info() != Eigen::Success) throw numeric_error("covariance eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = std::max(0.0, ev.maxCoeff());
    if (ev.minCoeff() < -1e-12 * std::max(1.0, lmax))
        throw numeric_error("covariance is not positive semidefinite");
    const double c = cfg.sigma_b2 / obs.p_p;
    const double null_tol = 1e-14 * std::max(1.0, lmax);

    const Eigen::VectorXcd y_in_basis = es.eigenvectors().adjoint() * obs.y_tilde;
    Eigen::VectorXcd ghat_basis(M);
    Eigen::VectorXd d_basis(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        const double lam = std::max(ev[i], 0.0);
        if (lam <= null_tol) {
            ghat_basis[i] = 0.0;
            d_basis[i] = 0.0;
            if (std::abs(y_in_basis[i]) > 1e-8 * std::max(1.0, obs.y_tilde.norm()))
                est.support_restricted = true;
            continue;
        }
        const double w = lam / (lam + c);
        ghat_basis[i] = w * y_in_basis[i];
        d_basis[i] = w * lam;
    }
    est.g_hat = es.eigenvectors() * ghat_basis;
    est.D = es.eigenvectors() * d_basis.asDiagonal() * es.eigenvectors().adjoint();
    return est;
}

} // namespace agingmimo
