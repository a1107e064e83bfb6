#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "agingmimo/detequiv.hpp"
#include "agingmimo/montecarlo.hpp"

using namespace agingmimo;

namespace {

large_scale_profile flat_profile(int K, double l) {
    large_scale_profile p;
    p.l = Eigen::VectorXd::Constant(K, l);
    p.r_m = Eigen::VectorXd::Zero(K);
    p.shadow_db = Eigen::VectorXd::Zero(K);
    return p;
}

system_config aged_config(int M, int K, double fd, double deg) {
    system_config cfg = default_config(M, K);
    cfg.fD_Ts = fd;
    set_phase_noise_deg(cfg, deg, deg);
    return cfg;
}

} // namespace

TEST_CASE("sampled matched-filter SINR lands on the closed form") {
    const system_config cfg = aged_config(64, 8, 0.05, 2.0);
    const large_scale_profile p = flat_profile(8, 1.0);
    const de_sinr de = de_sinr_mrt(cfg, p, 1);
    const auto mc = mc_sinr(cfg, p, precoder_kind::mrt, 1, 2000, rng_stream(61));
    for (int k = 0; k < 8; ++k)
        CHECK(mc[k].gamma == Catch::Approx(de.gamma_bar[k]).epsilon(0.05));
}

TEST_CASE("sampled RZF SINR lands on the closed form") {
    const system_config cfg = aged_config(32, 4, 0.05, 2.0);
    const large_scale_profile p = flat_profile(4, 1.0);
    const de_sinr de = de_sinr_rzf(cfg, p, 1);
    const auto mc = mc_sinr(cfg, p, precoder_kind::rzf, 1, 500, rng_stream(62));
    for (int k = 0; k < 4; ++k)
        CHECK(mc[k].gamma == Catch::Approx(de.gamma_bar[k]).epsilon(0.10));
}

TEST_CASE("SINR breakdown is internally consistent") {
    const system_config cfg = aged_config(16, 2, 0.02, 1.0);
    const large_scale_profile p = flat_profile(2, 0.8);
    const auto mc = mc_sinr(cfg, p, precoder_kind::mrt, 2, 64, rng_stream(63));
    for (const sinr_breakdown& b : mc) {
        CHECK(b.S > 0.0);
        CHECK(b.var_term >= 0.0);
        CHECK(b.interference >= 0.0);
        CHECK(b.noise_term == cfg.sigma_k2[0] / cfg.p_d);
        CHECK(b.gamma == b.S / (b.var_term + b.noise_term + b.interference));
    }
}

TEST_CASE("sampled SINR decays along the coherence block") {
    const system_config cfg = aged_config(32, 4, 0.02, 2.0);
    const large_scale_profile p = flat_profile(4, 1.0);
    mc_options opt;
    opt.n_mc = 500;
    opt.slots = {1, 8};
    const mc_result r = run_mc(cfg, single_cell(p), opt, rng_stream(64));
    double g1 = 0.0, g8 = 0.0;
    for (int k = 0; k < 4; ++k) {
        g1 += r.per_slot[0][k].gamma;
        g8 += r.per_slot[1][k].gamma;
    }
    CHECK(g8 < g1);
}

TEST_CASE("evaluating a slot subset does not change its values") {
    // Oscillator increments are consumed in slot order, so any subset of
    // evaluation slots sees the same trajectories.
    const system_config cfg = aged_config(12, 3, 0.05, 2.0);
    const large_scale_profile p = flat_profile(3, 1.0);
    mc_options all;
    all.n_mc = 40;
    all.slots = {1, 2, 3};
    mc_options last;
    last.n_mc = 40;
    last.slots = {3};
    const mc_result ra = run_mc(cfg, single_cell(p), all, rng_stream(65));
    const mc_result rl = run_mc(cfg, single_cell(p), last, rng_stream(65));
    CHECK(ra.lambda_hat[2] == rl.lambda_hat[0]);
    for (int k = 0; k < 3; ++k) {
        CHECK(ra.per_slot[2][k].gamma == rl.per_slot[0][k].gamma);
        CHECK(ra.per_slot[2][k].S == rl.per_slot[0][k].S);
    }
}

TEST_CASE("regularization beats plain matched filtering at moderate load") {
    system_config cfg = aged_config(32, 4, 0.02, 1.0);
    cfg.T_c = 20;
    cfg.tau = 4;
    const large_scale_profile p = flat_profile(4, 1.0);
    const rate_result mrt = mc_rate(cfg, p, precoder_kind::mrt, 200, rng_stream(66));
    const rate_result rzf = mc_rate(cfg, p, precoder_kind::rzf, 200, rng_stream(66));
    CHECK(rzf.sum_rate > mrt.sum_rate);
}

TEST_CASE("one-cell network is bit-identical to the single-cell engine") {
    system_config cfg = aged_config(16, 3, 0.05, 2.0);
    cfg.T_c = 12;
    cfg.tau = 3;
    const large_scale_profile p = flat_profile(3, 0.9);
    const rate_result a = mc_rate(cfg, p, precoder_kind::mrt, 50, rng_stream(67));
    const rate_result b = multicell_mc_sumrate(cfg, single_cell(p), precoder_kind::mrt, 50,
                                               rng_stream(67));
    CHECK(a.sum_rate == b.sum_rate);
    CHECK((a.per_user_rate - b.per_user_rate).norm() == 0.0);
    CHECK((a.per_slot_sinr - b.per_slot_sinr).norm() == 0.0);
}

TEST_CASE("both combiner forms coincide in a single cell") {
    system_config cfg = aged_config(16, 3, 0.05, 2.0);
    cfg.T_c = 12;
    cfg.tau = 3;
    const large_scale_profile p = flat_profile(3, 0.9);
    const rate_result a = multicell_mc_sumrate(cfg, single_cell(p), precoder_kind::mrt, 50,
                                               rng_stream(68), contamination_form::inverse_sum);
    const rate_result b = multicell_mc_sumrate(cfg, single_cell(p), precoder_kind::mrt, 50,
                                               rng_stream(68), contamination_form::standard);
    CHECK(a.sum_rate == b.sum_rate);
}

TEST_CASE("a silent far cell leaves the SINR unchanged in law") {
    // Two cells with zero cross gains and no oscillator drift: contamination
    // and inter-cell interference vanish, so the network run must agree with
    // the single-cell run up to sampling noise (the two runs consume their
    // random streams differently and sample residual interference with
    // different but equally unbiased brackets).
    system_config cfg = aged_config(24, 3, 0.05, 0.0);
    const large_scale_profile p = flat_profile(3, 1.0);

    multicell_profile net;
    net.L = 2;
    net.K = 3;
    net.gain.assign(2, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(3)));
    net.gain[0][0] = p.l;
    net.gain[1][1] = p.l;

    mc_options opt;
    opt.n_mc = 500;
    opt.slots = {1};
    const mc_result two = run_mc(cfg, net, opt, rng_stream(69));
    const mc_result one = run_mc(cfg, single_cell(p), opt, rng_stream(69));
    for (int k = 0; k < 3; ++k)
        CHECK(two.per_slot[0][k].gamma ==
              Catch::Approx(one.per_slot[0][k].gamma).epsilon(0.10));
}

TEST_CASE("pilot contamination costs rate") {
    system_config cfg = aged_config(16, 4, 0.02, 1.0);
    cfg.T_c = 12;
    cfg.tau = 4;
    const large_scale_profile p = flat_profile(4, 1.0);

    // Fully symmetric two-cell network with cross gains as strong as the
    // own-cell gains: the worst contamination case.
    multicell_profile net;
    net.L = 2;
    net.K = 4;
    net.gain.assign(2, std::vector<Eigen::VectorXd>(2, p.l));

    const rate_result contaminated =
        multicell_mc_sumrate(cfg, net, precoder_kind::mrt, 200, rng_stream(70));
    const rate_result clean = mc_rate(cfg, p, precoder_kind::mrt, 200, rng_stream(70));
    CHECK(contaminated.sum_rate < clean.sum_rate);
}

TEST_CASE("engine input validation") {
    const system_config cfg = aged_config(8, 2, 0.0, 0.0);
    const large_scale_profile p = flat_profile(2, 1.0);
    mc_options opt;
    opt.slots = {1};

    SECTION("too few trials") {
        opt.n_mc = 1;
        CHECK_THROWS_AS(run_mc(cfg, single_cell(p), opt, rng_stream(1)), config_error);
    }
    SECTION("no evaluation slots") {
        opt.slots.clear();
        CHECK_THROWS_AS(run_mc(cfg, single_cell(p), opt, rng_stream(1)), config_error);
    }
    SECTION("slots out of order") {
        opt.slots = {2, 2};
        CHECK_THROWS_AS(run_mc(cfg, single_cell(p), opt, rng_stream(1)), config_error);
        opt.slots = {0};
        CHECK_THROWS_AS(run_mc(cfg, single_cell(p), opt, rng_stream(1)), config_error);
    }
    SECTION("user count mismatch") {
        CHECK_THROWS_AS(run_mc(cfg, single_cell(flat_profile(3, 1.0)), opt, rng_stream(1)),
                        config_error);
    }
    SECTION("network table shape") {
        multicell_profile bad;
        bad.L = 2;
        bad.K = 2;
        bad.gain.assign(1, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Ones(2)));
        CHECK_THROWS_AS(bad.validate(), config_error);
    }
}

TEST_CASE("hex network geometry") {
    rng_stream rng(71);
    const multicell_profile net = make_hex_network(7, 1000.0, 100.0, 3.8, 8.0, 4, rng);
    CHECK_NOTHROW(net.validate());
    CHECK(net.L == 7);
    CHECK(net.K == 4);

    // Own-cell links are on average stronger than cross links.
    double own = 0.0, cross = 0.0;
    int n_cross = 0;
    for (int i = 0; i < 7; ++i) {
        own += net.gain[i][i].mean();
        for (int l = 0; l < 7; ++l)
            if (l != i) {
                cross += net.gain[i][l].mean();
                ++n_cross;
            }
    }
    CHECK(own / 7 > cross / n_cross);

    CHECK_THROWS_AS(make_hex_network(8, 1000.0, 100.0, 3.8, 8.0, 4, rng), config_error);
    CHECK_THROWS_AS(make_hex_network(2, 100.0, 200.0, 3.8, 8.0, 4, rng), config_error);
}

TEST_CASE("threaded runs reproduce the serial reduction") {
    const system_config cfg = aged_config(12, 3, 0.05, 2.0);
    const large_scale_profile p = flat_profile(3, 1.0);
    mc_options serial;
    serial.n_mc = 96;
    serial.slots = {1, 2};
    mc_options threaded = serial;
    threaded.threads = 4;
    const mc_result a = run_mc(cfg, single_cell(p), serial, rng_stream(72));
    const mc_result b = run_mc(cfg, single_cell(p), threaded, rng_stream(72));
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 3; ++k)
            CHECK(a.per_slot[s][k].gamma == b.per_slot[s][k].gamma);
}
