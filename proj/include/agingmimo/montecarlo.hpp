// Monte Carlo SINR engine. One engine serves single-cell and multicell runs;
// a run draws channels, pilot noise, and oscillator trajectories per trial,
// precodes at every base station, and accumulates conditional moment
// estimates per evaluation slot. Estimation-error and aging-innovation
// contributions are integrated analytically inside each trial, which removes
// the dominant variance source; only quantities without a closed conditional
// mean stay sampled.
//
// Reduction is deterministic: trials are accumulated into fixed-size blocks
// and block results are merged pairwise in index order, so the output is a
// pure function of (config, profile, options, seed) regardless of how many
// workers ran the blocks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "agingmimo/channel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/estimation.hpp"
#include "agingmimo/precoding.hpp"
#include "agingmimo/rates.hpp"
#include "agingmimo/reduce.hpp"
#include "agingmimo/rng.hpp"

namespace agingmimo {

// Large-scale geometry of an L-cell network. gain[i][l][k] is the link gain
// from base station i to user k of cell l; cell 0 is the evaluated cell.
struct multicell_profile {
    int L = 1;
    int K = 0;
    std::vector<std::vector<Eigen::VectorXd>> gain;

    void validate() const {
        if (L < 1) throw config_error("network needs at least one cell");
        if (K < 1) throw config_error("network needs at least one user per cell");
        if (static_cast<int>(gain.size()) != L)
            throw config_error("gain table must have one row per base station");
        for (const auto& row : gain) {
            if (static_cast<int>(row.size()) != L)
                throw config_error("gain table must have one column per cell");
            for (const auto& v : row) {
                if (v.size() != K) throw config_error("gain vectors must have K entries");
                if ((v.array() < 0.0).any()) throw config_error("link gains must be nonnegative");
            }
        }
    }
};

inline multicell_profile single_cell(const large_scale_profile& p) {
    multicell_profile net;
    net.L = 1;
    net.K = static_cast<int>(p.l.size());
    net.gain = {{p.l}};
    return net;
}

// Central cell plus a ring of equally spaced neighbors at hexagonal packing
// distance sqrt(3) R. Users are dropped uniformly in the annulus
// [guard, radius] around their own base station; shadowing is drawn per link.
inline multicell_profile make_hex_network(int cells, double cell_radius, double guard_radius,
                                          double pathloss_exp, double shadow_sigma_db, int K,
                                          rng_stream& rng) {
    if (cells < 1 || cells > 7) throw config_error("the hex network supports 1 to 7 cells");
    if (!(guard_radius > 0.0) || guard_radius > cell_radius)
        throw config_error("need 0 < guard radius <= cell radius");
    if (K < 1) throw config_error("network needs at least one user per cell");

    std::vector<std::array<double, 2>> centers(cells, {0.0, 0.0});
    const double spacing = std::sqrt(3.0) * cell_radius;
    for (int j = 1; j < cells; ++j) {
        const double ang = 2.0 * M_PI * (j - 1) / std::max(1, cells - 1);
        centers[j] = {spacing * std::cos(ang), spacing * std::sin(ang)};
    }

    multicell_profile net;
    net.L = cells;
    net.K = K;
    net.gain.assign(cells, std::vector<Eigen::VectorXd>(cells, Eigen::VectorXd::Zero(K)));

    for (int l = 0; l < cells; ++l) {
        for (int k = 0; k < K; ++k) {
            const double r = std::sqrt(guard_radius * guard_radius +
                                       rng.uniform() * (cell_radius * cell_radius -
                                                        guard_radius * guard_radius));
            const double phi = 2.0 * M_PI * rng.uniform();
            const double ux = centers[l][0] + r * std::cos(phi);
            const double uy = centers[l][1] + r * std::sin(phi);
            for (int i = 0; i < cells; ++i) {
                const double shadow = std::pow(10.0, shadow_sigma_db * rng.gaussian() / 10.0);
                const double dx = ux - centers[i][0], dy = uy - centers[i][1];
                const double dist = std::max(std::hypot(dx, dy), guard_radius);
                net.gain[i][l][k] = shadow * std::pow(dist / guard_radius, -pathloss_exp);
            }
        }
    }
    return net;
}

// Shape of the contaminated pilot combiner. inverse_sum applies
// (I + c (sum_l R_l^{-1}))^{-1} with zero-gain cells dropped from the sum;
// standard applies the plain LMMSE weight R_own (sum_l R_l + c I)^{-1}.
// Both reduce to single-cell LMMSE at L = 1.
enum class contamination_form { inverse_sum, standard };

struct mc_options {
    int n_mc = 2000;
    std::vector<int> slots; // strictly increasing, each >= 1
    precoder_kind kind = precoder_kind::mrt;
    contamination_form form = contamination_form::inverse_sum;
    int block_size = 16;
    int threads = 1;
};

struct sinr_breakdown {
    double S = 0.0;
    double var_term = 0.0;
    double noise_term = 0.0;
    double interference = 0.0;
    double gamma = 0.0;
};

struct mc_result {
    std::vector<int> slots;
    std::vector<std::vector<sinr_breakdown>> per_slot; // [slot index][user]
    std::vector<double> lambda_hat;                    // per slot index
};

namespace detail {

struct mc_block {
    Eigen::MatrixXcd x;      // S x K, sum of desired-signal brackets
    Eigen::MatrixXd var_an;  // S x K, analytic variance contributions
    Eigen::MatrixXd intf;    // S x K, interference contributions
    Eigen::VectorXd trf;     // S, sum of (1/K) ||F_0||_F^2

    static mc_block zero(int S, int K) {
        mc_block b;
        b.x = Eigen::MatrixXcd::Zero(S, K);
        b.var_an = Eigen::MatrixXd::Zero(S, K);
        b.intf = Eigen::MatrixXd::Zero(S, K);
        b.trf = Eigen::VectorXd::Zero(S);
        return b;
    }
    mc_block operator+(const mc_block& o) const {
        mc_block r;
        r.x = x + o.x;
        r.var_an = var_an + o.var_an;
        r.intf = intf + o.intf;
        r.trf = trf + o.trf;
        return r;
    }
};

} // namespace detail

inline mc_result run_mc(const system_config& cfg, const multicell_profile& net,
                        const mc_options& opt, const rng_stream& master) {
    cfg.validate();
    net.validate();
    if (net.K != cfg.K) throw config_error("network K must match the configuration");
    if (opt.n_mc < 2) throw config_error("need at least two trials");
    if (opt.slots.empty()) throw config_error("need at least one evaluation slot");
    for (std::size_t s = 0; s < opt.slots.size(); ++s) {
        if (opt.slots[s] < 1) throw config_error("evaluation slots start at 1");
        if (s > 0 && opt.slots[s] <= opt.slots[s - 1])
            throw config_error("evaluation slots must be strictly increasing");
    }

    const int L = net.L, K = cfg.K, M = cfg.M;
    const int S = static_cast<int>(opt.slots.size());
    const double c_pilot = cfg.sigma_b2 / cfg.pilot_power();
    const bool clo = cfg.mode == oscillator_mode::clo;
    const bool single = L == 1;

    // Combiner weights per (station, user); trial independent.
    Eigen::MatrixXd w(L, K);
    for (int i = 0; i < L; ++i) {
        for (int k = 0; k < K; ++k) {
            const double own = net.gain[i][i][k];
            if (own == 0.0) { w(i, k) = 0.0; continue; }
            if (opt.form == contamination_form::inverse_sum) {
                double inv_sum = 0.0;
                for (int l = 0; l < L; ++l)
                    if (net.gain[i][l][k] > 0.0) inv_sum += 1.0 / net.gain[i][l][k];
                w(i, k) = 1.0 / (1.0 + c_pilot * inv_sum);
            } else {
                double sum = 0.0;
                for (int l = 0; l < L; ++l) sum += net.gain[i][l][k];
                w(i, k) = own / (sum + c_pilot);
            }
        }
    }

    // Per-slot aging diagonals and analytic error diagonals.
    std::vector<std::vector<aging_operator>> Aops(S);
    std::vector<std::vector<Eigen::VectorXd>> a2(S); // squared aging diag per user
    for (int s = 0; s < S; ++s) {
        Aops[s].reserve(K);
        a2[s].resize(K);
        for (int k = 0; k < K; ++k) {
            Aops[s].push_back(make_aging_operator(opt.slots[s], k, cfg));
            a2[s][k] = Aops[s][k].diag(M).array().square().matrix();
        }
    }
    // err_own[s][k](m) = l_k - A^2 d_k: conditional variance of the evaluated
    // cell's own-channel bracket given its pilot estimate, aged to the slot.
    // Pilot sharing shrinks the estimate power from the clean LMMSE value to
    // d_k = p_p l_k^2 / (p_p sum_l gain_l + sigma_b^2).
    std::vector<std::vector<Eigen::VectorXd>> err_own(S);
    for (int s = 0; s < S; ++s) {
        err_own[s].resize(K);
        for (int k = 0; k < K; ++k) {
            const double l = net.gain[0][0][k];
            double d = 0.0;
            if (single) {
                d = lmmse_d_entry(l, cfg.pilot_power(), cfg.sigma_b2);
            } else if (l > 0.0) {
                double sum = 0.0;
                for (int j = 0; j < L; ++j) sum += net.gain[0][j][k];
                d = cfg.pilot_power() * l * l / (cfg.pilot_power() * sum + cfg.sigma_b2);
            }
            err_own[s][k] = ((l - (a2[s][k].array() * d)).max(0.0)).matrix();
        }
    }

    const double sphi_clo = clo ? std::sqrt(cfg.sigma_phi2[0]) : 0.0;
    Eigen::VectorXd sphi_vec(M), svarphi(K);
    for (int m = 0; m < M; ++m) sphi_vec[m] = std::sqrt(cfg.sigma_phi2[m]);
    for (int k = 0; k < K; ++k) svarphi[k] = std::sqrt(cfg.sigma_varphi2[k]);

    const int n_blocks = (opt.n_mc + opt.block_size - 1) / opt.block_size;
    std::vector<detail::mc_block> blocks(n_blocks);

    auto run_trial = [&](std::uint64_t t, detail::mc_block& acc) {
        rng_stream trial = master.derive(t);
        rng_stream rng_chan = trial.derive(1);
        rng_stream rng_pilot = trial.derive(2);
        rng_stream rng_phase = trial.derive(3);

        // Channels, ordered (station, cell, user, antenna).
        std::vector<std::vector<Eigen::MatrixXcd>> g0(L, std::vector<Eigen::MatrixXcd>(L));
        for (int i = 0; i < L; ++i)
            for (int l = 0; l < L; ++l) {
                g0[i][l].resize(M, K);
                for (int k = 0; k < K; ++k) {
                    const double amp = std::sqrt(net.gain[i][l][k]);
                    for (int m = 0; m < M; ++m) g0[i][l](m, k) = amp * rng_chan.cgaussian();
                }
            }

        // Pilot observations and combiner output, ordered (station, user).
        std::vector<Eigen::MatrixXcd> ghat(L, Eigen::MatrixXcd(M, K));
        const double namp = std::sqrt(c_pilot);
        for (int i = 0; i < L; ++i)
            for (int k = 0; k < K; ++k) {
                Eigen::VectorXcd y = Eigen::VectorXcd::Zero(M);
                for (int l = 0; l < L; ++l) y += g0[i][l].col(k);
                for (int m = 0; m < M; ++m) y[m] += namp * rng_pilot.cgaussian();
                ghat[i].col(k) = w(i, k) * y;
            }

        // Oscillator trajectories, advanced slot by slot. Per step the draw
        // order is stations first (one draw under a common oscillator, M
        // otherwise), then the evaluated cell's users.
        std::vector<double> bs_scalar(L, 0.0);
        std::vector<Eigen::VectorXd> bs_vec;
        if (!clo) bs_vec.assign(L, Eigen::VectorXd::Zero(M));
        Eigen::VectorXd ue(K);
        ue.setZero();
        auto step_phases = [&]() {
            for (int i = 0; i < L; ++i) {
                if (clo) {
                    bs_scalar[i] += sphi_clo * rng_phase.gaussian();
                } else {
                    for (int m = 0; m < M; ++m) bs_vec[i][m] += sphi_vec[m] * rng_phase.gaussian();
                }
            }
            for (int k = 0; k < K; ++k) ue[k] += svarphi[k] * rng_phase.gaussian();
        };

        int cur = 0;
        for (int s = 0; s < S; ++s) {
            while (cur < opt.slots[s]) {
                step_phases();
                ++cur;
            }

            // Precode at every station from its own aged estimates.
            std::vector<Eigen::MatrixXcd> F(L);
            std::vector<Eigen::MatrixXd> Fabs2(L);
            std::vector<Eigen::VectorXd> rowsq(L);
            for (int i = 0; i < L; ++i) {
                F[i] = make_precoder(ghat[i], Aops[s], cfg, opt.kind).F;
                Fabs2[i] = F[i].cwiseAbs2();
                rowsq[i] = Fabs2[i].rowwise().sum();
            }
            acc.trf[s] += rowsq[0].sum() / K;

            for (int k = 0; k < K; ++k) {
                const Eigen::ArrayXd& ak2 = a2[s][k].array();
                const Eigen::VectorXd adiag = Aops[s][k].diag(M);

                // Doubled phase drift of the link (station l, user k).
                auto theta = [&](int l) -> Eigen::VectorXcd {
                    Eigen::VectorXcd th(M);
                    if (clo) {
                        th.setConstant(std::polar(1.0, 2.0 * (bs_scalar[l] + ue[k])));
                    } else {
                        for (int m = 0; m < M; ++m)
                            th[m] = std::polar(1.0, 2.0 * (bs_vec[l][m] + ue[k]));
                    }
                    return th;
                };

                if (single) {
                    const Eigen::VectorXcd th = theta(0);
                    const Eigen::VectorXcd ag =
                        g0[0][0].col(k).cwiseProduct(adiag.cast<std::complex<double>>());
                    const std::complex<double> x = ag.dot(th.cwiseProduct(F[0].col(k)));
                    acc.x(s, k) += x;
                    acc.var_an(s, k) += err_own[s][k].dot(Fabs2[0].col(k));

                    // Residual interference: sampled estimate part plus the
                    // analytic combined-error part over the other columns.
                    const Eigen::VectorXcd agh =
                        ghat[0].col(k).cwiseProduct(adiag.cast<std::complex<double>>());
                    const Eigen::RowVectorXcd u =
                        agh.conjugate().cwiseProduct(th).transpose();
                    const Eigen::RowVectorXcd row = u * F[0];
                    double intf = 0.0;
                    for (int i = 0; i < K; ++i)
                        if (i != k) intf += std::norm(row[i]);
                    intf += err_own[s][k].dot(
                        (rowsq[0] - Fabs2[0].col(k)).cwiseMax(0.0));
                    acc.intf(s, k) += intf;
                } else {
                    double intf = 0.0;
                    for (int l = 0; l < L; ++l) {
                        const Eigen::VectorXcd th = theta(l);
                        const Eigen::VectorXcd ag =
                            g0[l][0].col(k).cwiseProduct(adiag.cast<std::complex<double>>());
                        const Eigen::RowVectorXcd row =
                            (ag.conjugate().cwiseProduct(th).transpose() * F[l]).eval();
                        // Innovation power of the link from station l.
                        const Eigen::VectorXd err_l =
                            (net.gain[l][0][k] * (1.0 - ak2)).max(0.0).matrix();
                        if (l == 0) {
                            acc.x(s, k) += row[k];
                            acc.var_an(s, k) += err_own[s][k].dot(Fabs2[0].col(k));
                            for (int i = 0; i < K; ++i)
                                if (i != k) intf += std::norm(row[i]);
                            intf += err_l.dot((rowsq[0] - Fabs2[0].col(k)).cwiseMax(0.0));
                        } else {
                            for (int i = 0; i < K; ++i) intf += std::norm(row[i]);
                            intf += err_l.dot(rowsq[l]);
                        }
                    }
                    acc.intf(s, k) += intf;
                }
            }
        }
    };

    auto run_block_range = [&](int b_lo, int b_hi) {
        for (int b = b_lo; b < b_hi; ++b) {
            detail::mc_block acc = detail::mc_block::zero(S, K);
            const int t_lo = b * opt.block_size;
            const int t_hi = std::min(opt.n_mc, (b + 1) * opt.block_size);
            for (int t = t_lo; t < t_hi; ++t) run_trial(static_cast<std::uint64_t>(t), acc);
            blocks[b] = acc;
        }
    };

    const int workers = std::max(1, std::min(opt.threads, n_blocks));
    if (workers == 1) {
        run_block_range(0, n_blocks);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) {
            const int lo = t * n_blocks / workers;
            const int hi = (t + 1) * n_blocks / workers;
            pool.emplace_back(run_block_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    const detail::mc_block total = pairwise_sum(blocks);
    const double N = static_cast<double>(opt.n_mc);

    mc_result out;
    out.slots = opt.slots;
    out.per_slot.assign(S, std::vector<sinr_breakdown>(K));
    out.lambda_hat.resize(S);
    for (int s = 0; s < S; ++s) {
        const double trf_mean = total.trf[s] / N;
        if (!(trf_mean > 0.0)) throw numeric_error("degenerate precoder: zero transmit power");
        const double lam = 1.0 / trf_mean;
        out.lambda_hat[s] = lam;
        for (int k = 0; k < K; ++k) {
            const std::complex<double> xbar = total.x(s, k) / N;
            sinr_breakdown& b = out.per_slot[s][k];
            b.S = lam * std::norm(xbar);
            b.var_term = lam * total.var_an(s, k) / N;
            b.interference = lam * total.intf(s, k) / N;
            b.noise_term = cfg.sigma_k2[k] / cfg.p_d;
            b.gamma = b.S / (b.var_term + b.noise_term + b.interference);
        }
    }
    return out;
}

// Single-cell SINR at one data slot.
inline std::vector<sinr_breakdown> mc_sinr(const system_config& cfg,
                                           const large_scale_profile& profile, precoder_kind kind,
                                           int n, int n_mc, const rng_stream& rng) {
    mc_options opt;
    opt.n_mc = n_mc;
    opt.slots = {n};
    opt.kind = kind;
    const mc_result r = run_mc(cfg, single_cell(profile), opt, rng);
    return r.per_slot[0];
}

namespace detail {
inline rate_result rate_from_mc(const system_config& cfg, const mc_result& r) {
    const int slots = cfg.T_c - cfg.tau;
    Eigen::MatrixXd gamma(slots, cfg.K);
    for (int s = 0; s < slots; ++s)
        for (int k = 0; k < cfg.K; ++k) gamma(s, k) = r.per_slot[s][k].gamma;
    return ergodic_rate(gamma, cfg.T_c, cfg.tau);
}

inline std::vector<int> all_data_slots(const system_config& cfg) {
    std::vector<int> slots(cfg.T_c - cfg.tau);
    for (int n = 0; n < cfg.T_c - cfg.tau; ++n) slots[n] = n + 1;
    return slots;
}
} // namespace detail

// Ergodic rate over one coherence block, single cell.
inline rate_result mc_rate(const system_config& cfg, const large_scale_profile& profile,
                           precoder_kind kind, int n_mc, const rng_stream& rng) {
    mc_options opt;
    opt.n_mc = n_mc;
    opt.slots = detail::all_data_slots(cfg);
    opt.kind = kind;
    return detail::rate_from_mc(cfg, run_mc(cfg, single_cell(profile), opt, rng));
}

// Ergodic rate of the evaluated cell inside an L-cell network. At L = 1 the
// engine takes the single-cell path, so the result is bit identical to
// mc_rate on the same profile and seed.
inline rate_result multicell_mc_sumrate(const system_config& cfg, const multicell_profile& net,
                                        precoder_kind kind, int n_mc, const rng_stream& rng,
                                        contamination_form form = contamination_form::inverse_sum) {
    mc_options opt;
    opt.n_mc = n_mc;
    opt.slots = detail::all_data_slots(cfg);
    opt.kind = kind;
    opt.form = form;
    return detail::rate_from_mc(cfg, run_mc(cfg, net, opt, rng));
}

} // namespace agingmimo
