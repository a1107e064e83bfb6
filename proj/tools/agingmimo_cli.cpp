// Command-line front end.
//
//   agingmimo simulate <scenario> [--seed N] [--engine mc|de|both] [--out FILE]
//   agingmimo power    <scenario> --target-rate R [--out FILE]
//   agingmimo validate [<scenario>] [--seed N]
//
// Exit codes: 0 success, 2 usage or configuration problem, 3 numeric
// failure, 4 validation gate failure.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "agingmimo/sweep.hpp"
#include "agingmimo/validation.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_gate = 4;

// Writes to the --out file when given, to stdout otherwise.
template <typename WriteFn>
void deliver(const std::string& out_path, WriteFn&& write) {
    if (out_path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw agingmimo::config_error("cannot open output file: " + out_path);
    write(out);
    std::cerr << "wrote " << out_path << "\n";
}

int run_simulate(const std::string& scenario_path, bool seed_set, std::uint64_t seed,
                 const std::string& engine, const std::string& out_flag) {
    agingmimo::scenario sc = agingmimo::load_scenario(scenario_path);
    if (seed_set) sc.seed = seed;
    if (engine == "mc") sc.engine = agingmimo::engine_choice::mc;
    else if (engine == "de") sc.engine = agingmimo::engine_choice::de;
    else if (engine == "both") sc.engine = agingmimo::engine_choice::both;
    else if (!engine.empty())
        throw agingmimo::config_error("unknown engine '" + engine + "'");

    const agingmimo::sweep_result res = agingmimo::run_sweep(sc);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

    const std::string out_path = out_flag.empty() ? sc.out_path : out_flag;
    deliver(out_path, [&](std::ostream& os) { agingmimo::write_sweep_csv(os, res.rows); });
    return exit_ok;
}

int run_power(const std::string& scenario_path, double target_rate, const std::string& out_flag) {
    const agingmimo::scenario sc = agingmimo::load_scenario(scenario_path);
    const auto rows = agingmimo::required_power(sc, target_rate);
    const std::string out_path = out_flag.empty() ? sc.out_path : out_flag;
    deliver(out_path, [&](std::ostream& os) { agingmimo::write_power_csv(os, rows, sc.seed); });
    for (const auto& r : rows)
        if (r.saturated)
            std::cerr << "warning: target unreachable at " << r.sweep_axis << "="
                      << r.sweep_value << " (" << r.precoder << "), capped at 60 dBm\n";
    return exit_ok;
}

int run_validate(const std::string& scenario_path, bool seed_set, std::uint64_t seed) {
    std::uint64_t gate_seed = 1;
    if (!scenario_path.empty()) gate_seed = agingmimo::load_scenario(scenario_path).seed;
    if (seed_set) gate_seed = seed;

    const auto results = agingmimo::run_acceptance(gate_seed, &std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed) {
        std::cout << failed << " of " << results.size() << " checks failed (seed " << gate_seed
                  << ")\n";
        return exit_gate;
    }
    std::cout << "all " << results.size() << " checks passed (seed " << gate_seed << ")\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"channel-aging downlink simulator"};
    app.require_subcommand(1);

    std::string sim_scenario, sim_engine, sim_out;
    std::uint64_t sim_seed = 0;
    CLI::App* sim = app.add_subcommand("simulate", "run a scenario sweep and emit CSV");
    sim->add_option("scenario", sim_scenario, "scenario file")->required();
    CLI::Option* sim_seed_opt = sim->add_option("--seed", sim_seed, "override the scenario seed");
    sim->add_option("--engine", sim_engine, "mc, de, or both");
    sim->add_option("--out", sim_out, "output CSV path (default: stdout)");

    std::string pow_scenario, pow_out;
    double pow_target = 0.0;
    CLI::App* pow = app.add_subcommand("power", "minimum link power meeting a per-user rate");
    pow->add_option("scenario", pow_scenario, "scenario file")->required();
    pow->add_option("--target-rate", pow_target, "per-user rate target, b/s/Hz")->required();
    pow->add_option("--out", pow_out, "output CSV path (default: stdout)");

    std::string val_scenario;
    std::uint64_t val_seed = 0;
    CLI::App* val = app.add_subcommand("validate", "run the acceptance checks");
    val->add_option("scenario", val_scenario, "scenario file (its seed drives the checks)");
    CLI::Option* val_seed_opt = val->add_option("--seed", val_seed, "override the check seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_scenario, sim_seed_opt->count() > 0, sim_seed, sim_engine,
                                sim_out);
        if (pow->parsed()) return run_power(pow_scenario, pow_target, pow_out);
        if (val->parsed())
            return run_validate(val_scenario, val_seed_opt->count() > 0, val_seed);
    } catch (const agingmimo::numeric_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_numeric;
    } catch (const agingmimo::config_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_config;
    } catch (const std::domain_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_config;
    }
    return exit_config;
}
