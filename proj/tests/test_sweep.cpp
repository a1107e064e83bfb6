#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "agingmimo/sweep.hpp"

using namespace agingmimo;

namespace {

scenario small_scenario(const std::string& extra = "") {
    const std::string text = "system.M = 8\n"
                             "system.K = 2\n"
                             "system.T_c = 8\n"
                             "system.tau = 2\n"
                             "mc.trials = 50\n" +
                             extra;
    std::istringstream in(text);
    return parse_scenario(in);
}

} // namespace

TEST_CASE("sweep emits one sum row per point and engine") {
    const scenario sc =
        small_scenario("sweep.axis = fd_ts\nsweep.values = 0, 0.05, 0.1\n");
    const sweep_result res = run_sweep(sc);
    REQUIRE(res.rows.size() == 6);

    // Per point: closed form first, then the sampler.
    for (int i = 0; i < 3; ++i) {
        const sweep_row& de = res.rows[2 * i];
        const sweep_row& mc = res.rows[2 * i + 1];
        CHECK(de.engine == "de");
        CHECK(mc.engine == "mc");
        CHECK(de.sweep_axis == "fd_ts");
        CHECK(de.sweep_value == sc.sweep_values[i]);
        CHECK(mc.sweep_value == sc.sweep_values[i]);
        CHECK(de.precoder == "mrt");
        CHECK(de.user_index == "sum");
        CHECK(mc.user_index == "sum");
        CHECK(de.n_mc == 0);
        CHECK(mc.n_mc == 50);
        CHECK(de.rate_bps_hz > 0.0);
        CHECK(mc.rate_bps_hz > 0.0);

        // Gap is filled symmetrically once both engines ran.
        CHECK_FALSE(std::isnan(de.mc_de_gap_rel));
        CHECK(de.mc_de_gap_rel == mc.mc_de_gap_rel);
        CHECK(de.mc_de_gap_rel >= 0.0);
    }

    // Rates fall with Doppler on both engines.
    CHECK(res.rows[4].rate_bps_hz < res.rows[0].rate_bps_hz);
}

TEST_CASE("per-user rows follow the sum row") {
    scenario sc = small_scenario("engine = de\noutput.per_user = true\n");
    const sweep_result res = run_sweep(sc);
    REQUIRE(res.rows.size() == 3); // sum + one row per user
    CHECK(res.rows[0].user_index == "sum");
    CHECK(res.rows[1].user_index == "0");
    CHECK(res.rows[2].user_index == "1");
    CHECK(res.rows[0].rate_bps_hz ==
          Catch::Approx(res.rows[1].rate_bps_hz + res.rows[2].rate_bps_hz).epsilon(1e-12));
}

TEST_CASE("a single point runs under the axis name none") {
    const scenario sc = small_scenario("engine = de\n");
    const sweep_result res = run_sweep(sc);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].sweep_axis == "none");
    CHECK(res.rows[0].sweep_value == 0.0);
}

TEST_CASE("sweep output is reproducible and round-trips through the CSV writer") {
    const scenario sc = small_scenario("sweep.axis = fd_ts\nsweep.values = 0, 0.1\n");
    const sweep_result a = run_sweep(sc);
    const sweep_result b = run_sweep(sc);

    std::ostringstream csv_a, csv_b;
    write_sweep_csv(csv_a, a.rows);
    write_sweep_csv(csv_b, b.rows);
    CHECK(csv_a.str() == csv_b.str());

    std::istringstream lines(csv_a.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "sweep_axis,sweep_value,engine,precoder,user_index,rate_bps_hz,gamma_mean,"
          "mc_de_gap_rel,seed,n_mc");
    int count = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++count;
    CHECK(count == static_cast<int>(a.rows.size()));
}

TEST_CASE("seeds steer the sampler rows only") {
    scenario sc = small_scenario("engine = both\n");
    const sweep_result a = run_sweep(sc);
    sc.seed = 2;
    const sweep_result b = run_sweep(sc);
    REQUIRE(a.rows.size() == 2);
    REQUIRE(b.rows.size() == 2);
    CHECK(a.rows[0].rate_bps_hz == b.rows[0].rate_bps_hz); // closed form
    CHECK(a.rows[1].rate_bps_hz != b.rows[1].rate_bps_hz); // sampler
}

TEST_CASE("multicell sweeps require the sampling engine") {
    const scenario sc = small_scenario("multicell.cells = 2\n");
    CHECK_THROWS_AS(run_sweep(sc), config_error);

    const scenario ok = small_scenario("multicell.cells = 2\nengine = mc\n");
    const sweep_result res = run_sweep(ok);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].engine == "mc");
}

TEST_CASE("power search") {
    const scenario sc = small_scenario("");

    SECTION("tighter targets need more power") {
        const auto lo = required_power(sc, 0.2);
        const auto hi = required_power(sc, 1.0);
        REQUIRE(lo.size() == 1);
        REQUIRE(hi.size() == 1);
        CHECK(lo[0].required_p_dbm <= hi[0].required_p_dbm);
        CHECK(lo[0].target_rate_bps_hz == 0.2);
    }
    SECTION("unreachable targets saturate at the cap") {
        const auto rows = required_power(sc, 1e5);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].saturated);
        CHECK(rows[0].required_p_dbm == 60.0);
    }
    SECTION("trivial targets sit at the floor") {
        const auto rows = required_power(sc, 1e-9);
        REQUIRE(rows.size() == 1);
        CHECK_FALSE(rows[0].saturated);
        CHECK(rows[0].required_p_dbm == -20.0);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(required_power(sc, 0.0), config_error);
        const scenario multi = small_scenario("multicell.cells = 2\nengine = mc\n");
        CHECK_THROWS_AS(required_power(multi, 1.0), config_error);
    }
    SECTION("deterministic and serializable") {
        const auto a = required_power(sc, 0.5);
        const auto b = required_power(sc, 0.5);
        REQUIRE(a.size() == b.size());
        CHECK(a[0].required_p_dbm == b[0].required_p_dbm);

        std::ostringstream csv;
        write_power_csv(csv, a, sc.seed);
        std::istringstream lines(csv.str());
        std::string header;
        std::getline(lines, header);
        CHECK(header ==
              "sweep_axis,sweep_value,precoder,target_rate_bps_hz,required_p_dbm,saturated,seed");
    }
}
