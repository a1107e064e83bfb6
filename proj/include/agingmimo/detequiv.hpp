// Closed-form SINR machinery built on large-random-matrix resolvent
// approximations: the fixed-point solver for T(rho), its matrix derivative,
// and the MRT / RZF SINR assemblies they feed. Dense and diagonal paths are
// both provided; every scenario driven by the harness is diagonal, while the
// dense path serves general covariances and the cross-validation suite.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "agingmimo/channel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/estimation.hpp"
#include "agingmimo/rates.hpp"

namespace agingmimo {

// ---------------------------------------------------------------------------
// Fixed point: T(rho) = ( (1/M) sum_k R_k / (1 + e_k) + S + rho I )^{-1},
// e_k = (1/M) tr R_k T. Iteration from e_k = 1/rho converges geometrically
// for rho > 0; the residual is max_k |e_k - e_k_prev|.
// ---------------------------------------------------------------------------

struct fixed_point_solution {
    Eigen::VectorXd e;
    Eigen::MatrixXcd T;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

struct fixed_point_solution_diag {
    Eigen::VectorXd e;
    Eigen::VectorXd T; // diagonal of T
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

namespace detail {
inline double real_trace_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    // tr(A B) = sum_ij A_ij B_ji; both Hermitian in our uses, trace is real.
    return (A.array() * B.transpose().array()).sum().real();
}
} // namespace detail

inline fixed_point_solution solve_fixed_point(const std::vector<Eigen::MatrixXcd>& R,
                                              const Eigen::MatrixXcd& S, double rho,
                                              double tol = 1e-9, int max_iter = 10000) {
    if (!(rho > 0.0)) throw std::domain_error("fixed point requires rho > 0");
    if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
    const Eigen::Index M = S.rows();
    if (S.cols() != M) throw numeric_error("S must be square");
    const int K = static_cast<int>(R.size());

    fixed_point_solution sol;
    sol.e = Eigen::VectorXd::Constant(K, 1.0 / rho);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);

    auto build_T = [&](const Eigen::VectorXd& e) {
        Eigen::MatrixXcd B = S + rho * I;
        for (int k = 0; k < K; ++k) B += R[k] / (static_cast<double>(M) * (1.0 + e[k]));
        return Eigen::MatrixXcd(B.llt().solve(I));
    };

    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::MatrixXcd T = build_T(sol.e);
        Eigen::VectorXd e_next(K);
        for (int k = 0; k < K; ++k)
            e_next[k] = detail::real_trace_product(R[k], T) / static_cast<double>(M);
        sol.residual = K > 0 ? (e_next - sol.e).cwiseAbs().maxCoeff() : 0.0;
        sol.residual_history.push_back(sol.residual);
        sol.e = e_next;
        sol.iterations = it;
        if (sol.residual < tol) {
            sol.T = build_T(sol.e);
            return sol;
        }
    }
    throw nonconvergence_error("fixed point did not converge", sol.residual);
}

inline fixed_point_solution_diag solve_fixed_point(const std::vector<Eigen::VectorXd>& R,
                                                   const Eigen::VectorXd& S, double rho,
                                                   double tol = 1e-9, int max_iter = 10000) {
    if (!(rho > 0.0)) throw std::domain_error("fixed point requires rho > 0");
    if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
    const Eigen::Index M = S.size();
    const int K = static_cast<int>(R.size());

    fixed_point_solution_diag sol;
    sol.e = Eigen::VectorXd::Constant(K, 1.0 / rho);

    auto build_T = [&](const Eigen::VectorXd& e) {
        Eigen::VectorXd B = (S.array() + rho).matrix();
        for (int k = 0; k < K; ++k) B += R[k] / (static_cast<double>(M) * (1.0 + e[k]));
        return Eigen::VectorXd(B.cwiseInverse());
    };

    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd T = build_T(sol.e);
        Eigen::VectorXd e_next(K);
        for (int k = 0; k < K; ++k) e_next[k] = R[k].dot(T) / static_cast<double>(M);
        sol.residual = K > 0 ? (e_next - sol.e).cwiseAbs().maxCoeff() : 0.0;
        sol.residual_history.push_back(sol.residual);
        sol.e = e_next;
        sol.iterations = it;
        if (sol.residual < tol) {
            sol.T = build_T(sol.e);
            return sol;
        }
    }
    throw nonconvergence_error("fixed point did not converge", sol.residual);
}

// ---------------------------------------------------------------------------
// Derivative: T'(rho) = T K T + T [ (1/M) sum_k R_k e'_k / (1+e_k)^2 ] T with
// e' = (I - J)^{-1} v, J_kl = (1/M) tr(R_k T R_l T) / (M (1+e_k)^2),
// v_k = (1/M) tr(R_k T K T).
// ---------------------------------------------------------------------------

struct derivative_solution {
    Eigen::VectorXd e_prime;
    Eigen::MatrixXcd T_prime;
};

struct derivative_solution_diag {
    Eigen::VectorXd e_prime;
    Eigen::VectorXd T_prime; // diagonal of T'
};

namespace detail {
inline Eigen::VectorXd solve_linear_checked(const Eigen::MatrixXd& J, const Eigen::VectorXd& v) {
    const int K = static_cast<int>(J.rows());
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(K, K) - J;
    // The iteration matrix must be a strict contraction for the derivative
    // system to be well posed.
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(J, false).eigenvalues();
    if (ev.cwiseAbs().maxCoeff() >= 1.0)
        throw numeric_error("derivative system: spectral radius of J is not below 1");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 1e-12 * std::max(1.0, smax))
        throw numeric_error("derivative system: I - J is singular");
    return svd.solve(v);
}
} // namespace detail

inline derivative_solution solve_derivative(const std::vector<Eigen::MatrixXcd>& R,
                                            const Eigen::MatrixXcd& K_mat,
                                            const fixed_point_solution& base) {
    const int K = static_cast<int>(R.size());
    const Eigen::Index M = base.T.rows();
    const double Md = static_cast<double>(M);

    std::vector<Eigen::MatrixXcd> RT(K);
    for (int k = 0; k < K; ++k) RT[k] = R[k] * base.T;

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            J(k, l) = detail::real_trace_product(RT[k], RT[l]) /
                      (Md * Md * (1.0 + base.e[l]) * (1.0 + base.e[l]));

    const Eigen::MatrixXcd KT = K_mat * base.T;
    Eigen::VectorXd v(K);
    for (int k = 0; k < K; ++k)
        v[k] = detail::real_trace_product(RT[k], KT) / Md;

    derivative_solution out;
    out.e_prime = K > 0 ? detail::solve_linear_checked(J, v) : Eigen::VectorXd();

    Eigen::MatrixXcd mid = K_mat;
    for (int k = 0; k < K; ++k)
        mid += R[k] * (out.e_prime[k] / (Md * (1.0 + base.e[k]) * (1.0 + base.e[k])));
    out.T_prime = base.T * mid * base.T;
    return out;
}

inline derivative_solution_diag solve_derivative(const std::vector<Eigen::VectorXd>& R,
                                                 const Eigen::VectorXd& K_diag,
                                                 const fixed_point_solution_diag& base) {
    const int K = static_cast<int>(R.size());
    const double Md = static_cast<double>(base.T.size());

    std::vector<Eigen::VectorXd> RT(K);
    for (int k = 0; k < K; ++k) RT[k] = R[k].cwiseProduct(base.T);

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            J(k, l) = RT[k].dot(RT[l]) /
                      (Md * Md * (1.0 + base.e[l]) * (1.0 + base.e[l]));

    Eigen::VectorXd v(K);
    for (int k = 0; k < K; ++k) v[k] = RT[k].dot(K_diag.cwiseProduct(base.T)) / Md;

    derivative_solution_diag out;
    out.e_prime = K > 0 ? detail::solve_linear_checked(J, v) : Eigen::VectorXd();

    Eigen::VectorXd mid = K_diag;
    for (int k = 0; k < K; ++k)
        mid += R[k] * (out.e_prime[k] / (Md * (1.0 + base.e[k]) * (1.0 + base.e[k])));
    out.T_prime = (base.T.array().square() * mid.array()).matrix();
    return out;
}

// ---------------------------------------------------------------------------
// SINR assemblies. Everything below works in the diagonal world R_k = l_k I,
// which covers every driven scenario; the per-user estimate covariance entry
// is p_p l^2 / (p_p l + sigma_b^2).
// ---------------------------------------------------------------------------

struct de_sinr {
    Eigen::VectorXd gamma_bar;   // per user
    Eigen::VectorXd delta;       // delta_k
    Eigen::VectorXd delta_prime; // delta'_k
    Eigen::MatrixXd cross;       // (i, k): delta''-type / Q-type cross terms
    double lambda_bar = 0.0;
};

namespace detail {
// Phase-decay exponent of the desired-signal power. For distinct per-antenna
// statistics the BS term is the arithmetic mean of the per-antenna variances.
inline double phase_decay(const system_config& cfg, int k, int n) {
    const double bs = cfg.sigma_phi2.mean();
    return std::exp(-2.0 * (cfg.sigma_varphi2[k] + bs) * n);
}
} // namespace detail

// Matched-filter SINR. delta_k = (1/M) tr A_k^2 D_k and friends collapse to
// scalar means of the aging profile here.
inline de_sinr de_sinr_mrt(const system_config& cfg, const large_scale_profile& profile, int n) {
    if (n < 0) throw std::domain_error("slot index must be nonnegative");
    const int K = cfg.K, M = cfg.M;
    const double p_p = cfg.pilot_power();

    Eigen::VectorXd a2mean(K), dent(K);
    for (int k = 0; k < K; ++k) {
        const aging_operator A = make_aging_operator(n, k, cfg);
        a2mean[k] = A.diag(M).array().square().mean();
        dent[k] = lmmse_d_entry(profile.l[k], p_p, cfg.sigma_b2);
    }

    de_sinr out;
    out.delta = a2mean.cwiseProduct(dent);
    if (out.delta.sum() <= 0.0) throw numeric_error("degenerate precoder: all estimates vanish");
    out.lambda_bar = 1.0 / out.delta.mean();

    out.delta_prime.resize(K);
    out.cross.resize(K, K);
    for (int k = 0; k < K; ++k) {
        const aging_operator A = make_aging_operator(n, k, cfg);
        const Eigen::ArrayXd a2 = A.diag(M).array().square();
        out.delta_prime[k] = (a2 * dent[k] * (profile.l[k] - a2 * dent[k])).mean();
    }
    for (int i = 0; i < K; ++i)
        for (int k = 0; k < K; ++k) out.cross(i, k) = out.delta[i] * profile.l[k];

    out.gamma_bar.resize(K);
    for (int k = 0; k < K; ++k) {
        double interf = 0.0;
        for (int i = 0; i < K; ++i)
            if (i != k) interf += out.cross(i, k) / M;
        const double denom = out.delta_prime[k] / M +
                             cfg.sigma_k2[k] / (cfg.p_d * out.lambda_bar * M) + interf;
        out.gamma_bar[k] = detail::phase_decay(cfg, k, n) * out.delta[k] * out.delta[k] / denom;
    }
    return out;
}

// The unit-covariance specialization with scalar aging.
inline de_sinr de_sinr_mrt_iid(const system_config& cfg, int n) {
    if (!cfg.scalar_aging())
        throw config_error("the unit-covariance closed form needs scalar aging");
    const int K = cfg.K, M = cfg.M;
    const double d = cfg.pilot_power() / (cfg.pilot_power() + cfg.sigma_b2);

    de_sinr out;
    out.gamma_bar.resize(K);
    out.delta.resize(K);
    out.delta_prime.resize(K);
    out.cross.resize(K, K);
    Eigen::VectorXd alpha(K);
    for (int k = 0; k < K; ++k) {
        alpha[k] = make_aging_operator(n, k, cfg).as_scalar();
        out.delta[k] = alpha[k] * alpha[k] * d;
        out.delta_prime[k] = out.delta[k] * (1.0 - out.delta[k]);
    }
    for (int i = 0; i < K; ++i)
        for (int k = 0; k < K; ++k) out.cross(i, k) = out.delta[i];
    out.lambda_bar = 1.0 / out.delta.mean();
    for (int k = 0; k < K; ++k) {
        const double a2d = out.delta[k];
        const double denom = (1.0 - a2d) / M + cfg.sigma_k2[k] / (cfg.p_d * M) +
                             static_cast<double>(K - 1) / M;
        out.gamma_bar[k] = a2d * detail::phase_decay(cfg, k, n) / denom;
    }
    return out;
}

// Large-M limit of the matched-filter SINR when both link powers shrink as
// 1/M^q: gamma = tau E_d E_u / (sigma_b^2 sigma_k^2 M^{2q-1}) J0^2 exp(-3 s n) [R^2]_mm.
// Finite and M-independent exactly at q = 1/2.
inline double power_scaled_sinr_mrt(const system_config& cfg, double q, double E_u, double E_d,
                                    int n, int M, int k = 0, double r2_mm = 1.0) {
    if (!(q > 0.0)) throw std::domain_error("scaling exponent must be positive");
    if (!cfg.scalar_aging())
        throw config_error("the power-scaling law assumes scalar aging");
    const double j0 = bessel_j0(2.0 * M_PI * cfg.fD_Ts * n);
    const double s = cfg.sigma_varphi2[k] + cfg.sigma_phi2[0];
    return cfg.tau * E_d * E_u / (cfg.sigma_b2 * cfg.sigma_k2[k] * std::pow(M, 2.0 * q - 1.0)) *
           j0 * j0 * std::exp(-3.0 * s * n) * r2_mm;
}

// Unique positive root of the scalar RZF fixed point
//   delta = ra / ( beta ra / (1 + delta) + s + a ),   ra = alpha_n^2 d,
// i.e. of (s+a) delta^2 + ((s+a) + ra (beta - 1)) delta - ra = 0.
inline double rzf_delta_closed_form(double ra, double beta, double s, double a) {
    const double c = s + a;
    if (!(c > 0.0)) throw std::domain_error("regularization must be positive");
    if (ra <= 0.0) return 0.0;
    const double b = c + ra * (beta - 1.0);
    return (-b + std::sqrt(b * b + 4.0 * c * ra)) / (2.0 * c);
}

namespace detail {
// Z must be zero, a scaled identity, or diagonal for the closed-form RZF
// pipeline; returns its diagonal divided by M.
inline Eigen::VectorXd rzf_s_diag(const system_config& cfg) {
    if (cfg.rzf_Z.size() == 0) return Eigen::VectorXd::Zero(cfg.M);
    if (!cfg.rzf_Z.isDiagonal(1e-14))
        throw config_error("the closed-form RZF pipeline needs a diagonal Z");
    return cfg.rzf_Z.diagonal().real() / static_cast<double>(cfg.M);
}
} // namespace detail

// Regularized zero-forcing SINR through the resolvent machinery: one fixed
// point with effective covariances A_k^2 D_k, then one derivative solve per
// perturbation direction. cross(i, k) holds the Q-type pair term.
inline de_sinr de_sinr_rzf(const system_config& cfg, const large_scale_profile& profile, int n) {
    if (n < 0) throw std::domain_error("slot index must be nonnegative");
    const int K = cfg.K, M = cfg.M;
    const double Md = static_cast<double>(M);
    const double a = cfg.rzf_alpha;
    const double p_p = cfg.pilot_power();

    std::vector<Eigen::VectorXd> RA(K); // A_k^2 D_k diagonals
    Eigen::VectorXd dent(K);
    for (int k = 0; k < K; ++k) {
        const aging_operator A = make_aging_operator(n, k, cfg);
        dent[k] = lmmse_d_entry(profile.l[k], p_p, cfg.sigma_b2);
        RA[k] = (A.diag(M).array().square() * dent[k]).matrix();
    }
    const Eigen::VectorXd S = detail::rzf_s_diag(cfg);

    // Solved well below the default tolerance so the specialization checks
    // against the scalar route are limited by algebra, not iteration error.
    const fixed_point_solution_diag base = solve_fixed_point(RA, S, a, 1e-13);

    de_sinr out;
    out.delta = base.e;
    out.delta_prime.resize(K);
    out.cross.resize(K, K);

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(M);
    const derivative_solution_diag C = solve_derivative(RA, ones, base);

    // delta'_k uses the direction R_k - A_k^2 D_k; the pair table needs the
    // directions A_i^2 D_i (for the delta'' factors) and R_k (traced against
    // A_i^2 D_i).
    std::vector<derivative_solution_diag> Cpp(K);
    for (int i = 0; i < K; ++i) Cpp[i] = solve_derivative(RA, RA[i], base);

    for (int k = 0; k < K; ++k) {
        const Eigen::VectorXd dir = profile.l[k] * ones - RA[k];
        const derivative_solution_diag Cp = solve_derivative(RA, dir, base);
        out.delta_prime[k] = RA[k].dot(Cp.T_prime) / Md;
    }

    out.lambda_bar = K / (base.T.mean() - (S.array() + a).matrix().dot(C.T_prime) / Md);

    Eigen::MatrixXd dpp(K, K); // delta''_{k,i} = (1/M) tr(A_k^2 D_k C''_i)
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i) dpp(k, i) = RA[k].dot(Cpp[i].T_prime) / Md;

    for (int k = 0; k < K; ++k) {
        const derivative_solution_diag Cppp = solve_derivative(RA, profile.l[k] * ones, base);
        for (int i = 0; i < K; ++i) {
            if (i == k) { out.cross(i, k) = 0.0; continue; }
            const double dk = out.delta[k];
            const double q = RA[i].dot(Cppp.T_prime) / Md +
                             dk * dk * dpp(k, i) / ((1.0 + dk) * (1.0 + dk)) -
                             2.0 * dk * dpp(k, i) / (1.0 + dk);
            out.cross(i, k) = q;
        }
    }

    out.gamma_bar.resize(K);
    for (int k = 0; k < K; ++k) {
        const double dk = out.delta[k];
        double interf = 0.0;
        for (int i = 0; i < K; ++i) {
            if (i == k) continue;
            const double di = out.delta[i];
            interf += out.cross(i, k) * (1.0 + dk) * (1.0 + dk) /
                      (Md * (1.0 + di) * (1.0 + di));
        }
        const double denom = out.delta_prime[k] / Md +
                             cfg.sigma_k2[k] * (1.0 + dk) * (1.0 + dk) / (cfg.p_d * out.lambda_bar) +
                             interf;
        out.gamma_bar[k] = detail::phase_decay(cfg, k, n) * dk * dk / denom;
    }
    return out;
}

// Equal-covariance RZF, fully scalar: a quadratic-root delta and closed-form
// derivative traces. Must agree with de_sinr_rzf on equal-gain profiles; the
// two routes cross-check each other.
inline de_sinr de_sinr_rzf_equal(const system_config& cfg, double l_common, int n) {
    if (!cfg.scalar_aging())
        throw config_error("the equal-covariance closed form needs scalar aging");
    for (int k = 1; k < cfg.K; ++k)
        if (cfg.sigma_varphi2[k] != cfg.sigma_varphi2[0])
            throw config_error("the equal-covariance closed form needs identical user phase statistics");

    const int K = cfg.K, M = cfg.M;
    const double beta = static_cast<double>(K) / M;
    const double a = cfg.rzf_alpha;
    const double p_p = cfg.pilot_power();

    double s = 0.0;
    if (cfg.rzf_Z.size() != 0) {
        const Eigen::VectorXd zd = cfg.rzf_Z.diagonal().real();
        if (!cfg.rzf_Z.isDiagonal(1e-14) || (zd.array() != zd[0]).any())
            throw config_error("the equal-covariance closed form needs Z as a scaled identity");
        s = zd[0] / M;
    }

    const double alpha = make_aging_operator(n, 0, cfg).as_scalar();
    const double d = lmmse_d_entry(l_common, p_p, cfg.sigma_b2);
    const double ra = alpha * alpha * d;

    const double delta = rzf_delta_closed_form(ra, beta, s, a);
    const double t = ra > 0.0 ? delta / ra : 1.0 / (s + a);

    // Scalar derivative: for a direction kappa I the coupling system is one
    // dimensional, e'(kappa) = v / (1 - j0) with j0 = beta (ra t)^2 / (1+delta)^2.
    const double j0 = beta * ra * ra * t * t / ((1.0 + delta) * (1.0 + delta));
    if (j0 >= 1.0) throw numeric_error("scalar derivative: contraction factor not below 1");
    auto t_prime = [&](double kappa) {
        const double v = ra * t * t * kappa;
        const double ep = v / (1.0 - j0);
        return t * t * (kappa + beta * ra * ep / ((1.0 + delta) * (1.0 + delta)));
    };

    const double C = t_prime(1.0);
    const double Cp = t_prime(l_common - ra);
    const double Cpp = t_prime(ra);
    const double Cppp = t_prime(l_common);

    const double delta_prime = ra * Cp;
    const double dpp = ra * Cpp;
    const double lambda_bar = K / (t - (s + a) * C);
    const double Q = ra * Cppp + delta * delta * dpp / ((1.0 + delta) * (1.0 + delta)) -
                     2.0 * delta * dpp / (1.0 + delta);

    de_sinr out;
    out.delta = Eigen::VectorXd::Constant(K, delta);
    out.delta_prime = Eigen::VectorXd::Constant(K, delta_prime);
    out.cross = Eigen::MatrixXd::Constant(K, K, Q);
    out.cross.diagonal().setZero();
    out.lambda_bar = lambda_bar;
    out.gamma_bar.resize(K);
    for (int k = 0; k < K; ++k) {
        const double denom = delta_prime / M +
                             cfg.sigma_k2[k] * (1.0 + delta) * (1.0 + delta) / (cfg.p_d * lambda_bar) +
                             (K - 1) * Q / M;
        out.gamma_bar[k] = detail::phase_decay(cfg, k, n) * delta * delta / denom;
    }
    return out;
}

// Closed-form rate over the data slots of one coherence block.
inline rate_result de_rate(const system_config& cfg, const large_scale_profile& profile,
                           precoder_kind kind) {
    const int slots = cfg.T_c - cfg.tau;
    Eigen::MatrixXd gamma(slots, cfg.K);
    for (int n = 1; n <= slots; ++n) {
        const de_sinr s = kind == precoder_kind::mrt ? de_sinr_mrt(cfg, profile, n)
                                                     : de_sinr_rzf(cfg, profile, n);
        gamma.row(n - 1) = s.gamma_bar.transpose();
    }
    return ergodic_rate(gamma, cfg.T_c, cfg.tau);
}

} // namespace agingmimo
