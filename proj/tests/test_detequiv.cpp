#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "agingmimo/detequiv.hpp"
#include "oracles.hpp"

using namespace agingmimo;

namespace {

std::vector<Eigen::MatrixXcd> random_psd_set(int K, int M, rng_stream& rng) {
    std::vector<Eigen::MatrixXcd> R(K);
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXcd B(M, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) B(i, j) = rng.cgaussian();
        Eigen::MatrixXcd W = B * B.adjoint();
        R[k] = W * (static_cast<double>(M) / W.trace().real());
    }
    return R;
}

large_scale_profile flat_profile(int K, double l) {
    large_scale_profile p;
    p.l = Eigen::VectorXd::Constant(K, l);
    p.r_m = Eigen::VectorXd::Zero(K);
    p.shadow_db = Eigen::VectorXd::Zero(K);
    return p;
}

} // namespace

TEST_CASE("fixed point with no users inverts the loading alone") {
    const double rho = 0.7;
    const fixed_point_solution dense = solve_fixed_point(
        std::vector<Eigen::MatrixXcd>{}, Eigen::MatrixXcd::Zero(3, 3), rho);
    CHECK((dense.T - (1.0 / rho) * Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-14);

    const fixed_point_solution_diag diag = solve_fixed_point(
        std::vector<Eigen::VectorXd>{}, Eigen::VectorXd::Zero(3), rho);
    CHECK((diag.T.array() - 1.0 / rho).abs().maxCoeff() < 1e-14);
}

TEST_CASE("equal covariances reduce to a scalar equation") {
    const int K = 5, M = 24;
    const double c = 1.3, rho = 0.25;
    const double e_ref = oracles::equal_covariance_fixed_point(c, K, M, rho);

    std::vector<Eigen::VectorXd> Rd(K, Eigen::VectorXd::Constant(M, c));
    const fixed_point_solution_diag sol =
        solve_fixed_point(Rd, Eigen::VectorXd::Zero(M), rho, 1e-12);
    for (int k = 0; k < K; ++k) CHECK(sol.e[k] == Catch::Approx(e_ref).epsilon(1e-9));
    CHECK(sol.residual < 1e-12);
    CHECK(sol.residual_history.back() < sol.residual_history.front());

    std::vector<Eigen::MatrixXcd> Rm(
        K, Eigen::MatrixXcd(c * Eigen::MatrixXcd::Identity(M, M)));
    const fixed_point_solution dsol =
        solve_fixed_point(Rm, Eigen::MatrixXcd::Zero(M, M), rho, 1e-12);
    for (int k = 0; k < K; ++k) CHECK(dsol.e[k] == Catch::Approx(sol.e[k]).epsilon(1e-9));
}

TEST_CASE("fixed point shrinks with stronger regularization") {
    rng_stream rng(41);
    const auto R = random_psd_set(3, 10, rng);
    const Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(10, 10);
    double prev = 1e300;
    for (double rho : {0.1, 0.3, 1.0, 3.0}) {
        const double e0 = solve_fixed_point(R, S, rho).e[0];
        CHECK(e0 < prev);
        prev = e0;
    }
}

TEST_CASE("fixed point input validation and nonconvergence") {
    std::vector<Eigen::VectorXd> R(2, Eigen::VectorXd::Ones(4));
    const Eigen::VectorXd S = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(solve_fixed_point(R, S, 0.0), std::domain_error);
    CHECK_THROWS_AS(solve_fixed_point(R, S, -1.0), std::domain_error);
    CHECK_THROWS_AS(solve_fixed_point(R, S, 1.0, -1e-9), std::domain_error);
    try {
        solve_fixed_point(R, S, 0.5, 1e-9, 1);
        FAIL("expected nonconvergence");
    } catch (const nonconvergence_error& ex) {
        CHECK(ex.last_residual > 0.0);
    }
}

TEST_CASE("diagonal derivative matches finite differences") {
    rng_stream rng(42);
    const int K = 3, M = 8;
    const double rho = 0.4, h = 1e-6, tol = 1e-13;
    std::vector<Eigen::VectorXd> R(K);
    for (int k = 0; k < K; ++k) {
        R[k].resize(M);
        for (int m = 0; m < M; ++m) R[k][m] = 0.2 + 2.0 * rng.uniform();
    }
    const Eigen::VectorXd S = Eigen::VectorXd::Zero(M);
    const fixed_point_solution_diag base = solve_fixed_point(R, S, rho, tol);

    SECTION("regularization direction") {
        const fixed_point_solution_diag up = solve_fixed_point(R, S, rho + h, tol);
        const fixed_point_solution_diag dn = solve_fixed_point(R, S, rho - h, tol);
        const Eigen::VectorXd fd = (up.T - dn.T) / (2.0 * h);
        const derivative_solution_diag d = solve_derivative(R, Eigen::VectorXd::Ones(M), base);
        CHECK((fd + d.T_prime).cwiseAbs().maxCoeff() < 1e-6);
    }
    SECTION("random diagonal direction through the loading") {
        Eigen::VectorXd dir(M);
        for (int m = 0; m < M; ++m) dir[m] = rng.gaussian();
        const fixed_point_solution_diag up =
            solve_fixed_point(R, Eigen::VectorXd(S - h * dir), rho, tol);
        const fixed_point_solution_diag dn =
            solve_fixed_point(R, Eigen::VectorXd(S + h * dir), rho, tol);
        const Eigen::VectorXd fd = (up.T - dn.T) / (2.0 * h);
        const derivative_solution_diag d = solve_derivative(R, dir, base);
        CHECK((fd - d.T_prime).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("matched-filter SINR at one user assembles the scalar pieces") {
    system_config cfg = default_config(16, 1);
    cfg.tau = 1;
    cfg.p_u = 0.8;
    cfg.p_d = 1.6;
    cfg.sigma_b2 = 0.9;
    cfg.sigma_k2.setConstant(1.1);
    cfg.fD_Ts = 0.04;
    set_phase_noise_deg(cfg, 2.0, 1.5);

    const double l = 0.6;
    const double a = bessel_j0(2.0 * M_PI * 0.04) * std::exp(-0.5 * deg_to_rad2(1.5)) *
                     std::exp(-0.5 * deg_to_rad2(2.0));
    const double d = cfg.pilot_power() * l * l / (cfg.pilot_power() * l + 0.9);
    const double delta = a * a * d;
    const double delta_p = a * a * d * (l - a * a * d);
    const double lambda = 1.0 / delta;
    const double decay = std::exp(-2.0 * (deg_to_rad2(1.5) + deg_to_rad2(2.0)));
    const double gamma =
        decay * delta * delta / (delta_p / 16.0 + 1.1 / (1.6 * lambda * 16.0));

    const de_sinr s = de_sinr_mrt(cfg, flat_profile(1, l), 1);
    CHECK(s.delta[0] == Catch::Approx(delta).epsilon(1e-13));
    CHECK(s.delta_prime[0] == Catch::Approx(delta_p).epsilon(1e-13));
    CHECK(s.lambda_bar == Catch::Approx(lambda).epsilon(1e-13));
    CHECK(s.gamma_bar[0] == Catch::Approx(gamma).epsilon(1e-12));
}

TEST_CASE("equal-gain profile collapses the matched-filter form") {
    system_config cfg = default_config(32, 4);
    cfg.fD_Ts = 0.05;
    set_phase_noise_deg(cfg, 2.0, 2.0);
    const de_sinr gen = de_sinr_mrt(cfg, flat_profile(4, 1.0), 1);
    const de_sinr iid = de_sinr_mrt_iid(cfg, 1);
    for (int k = 0; k < 4; ++k)
        CHECK(gen.gamma_bar[k] == Catch::Approx(iid.gamma_bar[k]).epsilon(1e-12));

    // The collapsed form itself, assembled by hand.
    const double a = make_aging_operator(1, 0, cfg).as_scalar();
    const double d = cfg.pilot_power() / (cfg.pilot_power() + cfg.sigma_b2);
    const double a2d = a * a * d;
    const double decay = std::exp(-4.0 * deg_to_rad2(2.0));
    const double gamma =
        a2d * decay / ((1.0 - a2d) / 32.0 + cfg.sigma_k2[0] / (cfg.p_d * 32.0) + 3.0 / 32.0);
    CHECK(iid.gamma_bar[0] == Catch::Approx(gamma).epsilon(1e-13));
}

TEST_CASE("matched-filter SINR falls apart when every gain is zero") {
    const system_config cfg = default_config(8, 2);
    CHECK_THROWS_AS(de_sinr_mrt(cfg, flat_profile(2, 0.0), 1), numeric_error);
}

TEST_CASE("regularized zero-forcing collapses on equal gains") {
    system_config cfg = default_config(16, 4);
    cfg.fD_Ts = 0.05;
    set_phase_noise_deg(cfg, 2.0, 2.0);
    const de_sinr gen = de_sinr_rzf(cfg, flat_profile(4, 1.0), 1);
    const de_sinr eq = de_sinr_rzf_equal(cfg, 1.0, 1);
    for (int k = 0; k < 4; ++k)
        CHECK(gen.gamma_bar[k] == Catch::Approx(eq.gamma_bar[k]).epsilon(1e-10));
    CHECK(gen.delta[0] == Catch::Approx(eq.delta[0]).epsilon(1e-10));
}

TEST_CASE("scalar RZF fixed point root") {
    SECTION("root satisfies its quadratic") {
        for (double ra : {0.2, 0.9, 3.0}) {
            for (double beta : {0.05, 0.5, 1.5}) {
                const double s = 0.1, a = 0.3;
                const double delta = rzf_delta_closed_form(ra, beta, s, a);
                REQUIRE(delta > 0.0);
                const double resid = (s + a) * delta * delta +
                                     ((s + a) + ra * (beta - 1.0)) * delta - ra;
                CHECK(std::abs(resid) < 1e-12 * (1.0 + ra));
            }
        }
    }
    SECTION("degenerate inputs") {
        CHECK(rzf_delta_closed_form(0.0, 0.5, 0.1, 0.3) == 0.0);
        CHECK_THROWS_AS(rzf_delta_closed_form(1.0, 0.5, 0.0, 0.0), std::domain_error);
    }
}

TEST_CASE("closed-form RZF pipeline needs a diagonal Z") {
    system_config cfg = default_config(4, 2);
    cfg.rzf_Z = Eigen::MatrixXcd::Identity(4, 4);
    cfg.rzf_Z(0, 1) = 0.5;
    cfg.rzf_Z(1, 0) = 0.5;
    CHECK_THROWS_AS(de_sinr_rzf(cfg, flat_profile(2, 1.0), 1), config_error);

    // A scaled identity is fine on both routes.
    cfg.rzf_Z = 2.0 * Eigen::MatrixXcd::Identity(4, 4);
    const de_sinr gen = de_sinr_rzf(cfg, flat_profile(2, 1.0), 1);
    const de_sinr eq = de_sinr_rzf_equal(cfg, 1.0, 1);
    CHECK(gen.gamma_bar[0] == Catch::Approx(eq.gamma_bar[0]).epsilon(1e-10));
}

TEST_CASE("power-scaled SINR law") {
    system_config cfg = default_config(4, 10);
    cfg.fD_Ts = 0.05;
    set_phase_noise_deg(cfg, 2.0, 2.0);
    cfg.sigma_b2 = 1.0;
    cfg.sigma_k2.setConstant(1.0);

    SECTION("hand-assembled value") {
        const double j0 = bessel_j0(2.0 * M_PI * 0.05);
        const double s = deg_to_rad2(2.0) + deg_to_rad2(2.0);
        const double expect = 10.0 * 1.0 * 1.0 / std::pow(64.0, 0.5) * j0 * j0 *
                              std::exp(-3.0 * s);
        CHECK(power_scaled_sinr_mrt(cfg, 0.75, 1.0, 1.0, 1, 64) ==
              Catch::Approx(expect).epsilon(1e-13));
    }
    SECTION("exact antenna independence at the critical exponent") {
        const double g1 = power_scaled_sinr_mrt(cfg, 0.5, 1.0, 1.0, 2, 16);
        const double g2 = power_scaled_sinr_mrt(cfg, 0.5, 1.0, 1.0, 2, 1024);
        CHECK(g1 == g2);
    }
    SECTION("bad exponent") {
        CHECK_THROWS_AS(power_scaled_sinr_mrt(cfg, 0.0, 1.0, 1.0, 1, 16), std::domain_error);
    }
}

TEST_CASE("closed-form rate equals the per-slot assembly") {
    system_config cfg = default_config(12, 2);
    cfg.tau = 2;
    cfg.T_c = 12;
    cfg.fD_Ts = 0.03;
    set_phase_noise_deg(cfg, 1.0, 1.0);
    const large_scale_profile p = flat_profile(2, 0.7);

    Eigen::MatrixXd gamma(10, 2);
    for (int n = 1; n <= 10; ++n) gamma.row(n - 1) = de_sinr_mrt(cfg, p, n).gamma_bar.transpose();
    const rate_result manual = ergodic_rate(gamma, 12, 2);
    const rate_result lib = de_rate(cfg, p, precoder_kind::mrt);
    CHECK(lib.sum_rate == manual.sum_rate);
    CHECK((lib.per_user_rate - manual.per_user_rate).norm() == 0.0);
}

TEST_CASE("rate aggregation") {
    SECTION("constant unit SINR") {
        const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(8, 1);
        const rate_result r = ergodic_rate(g, 10, 2);
        CHECK(r.per_user_rate[0] == Catch::Approx(0.8).epsilon(1e-15));
        CHECK(r.sum_rate == r.per_user_rate[0]);
    }
    SECTION("row count must match the data slots") {
        CHECK_THROWS_AS(ergodic_rate(Eigen::MatrixXd::Ones(7, 1), 10, 2), std::domain_error);
    }
    SECTION("negative SINR is rejected") {
        Eigen::MatrixXd g = Eigen::MatrixXd::Ones(8, 1);
        g(3, 0) = -0.1;
        CHECK_THROWS_AS(ergodic_rate(g, 10, 2), std::domain_error);
    }
}
