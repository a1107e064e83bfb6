// Sweep driver behind the command line: runs the requested engines over the
// sweep axis, pairs closed-form and sampled results, and serializes rows in
// a fixed CSV layout. Also hosts the power search (smallest symmetric link
// power meeting a per-user rate target).
#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "agingmimo/config.hpp"
#include "agingmimo/detequiv.hpp"
#include "agingmimo/montecarlo.hpp"
#include "agingmimo/scenario.hpp"

namespace agingmimo {

struct sweep_row {
    std::string sweep_axis;
    double sweep_value = 0.0;
    std::string engine;
    std::string precoder;
    std::string user_index; // "sum" or a zero-based index
    double rate_bps_hz = std::numeric_limits<double>::quiet_NaN();
    double gamma_mean = std::numeric_limits<double>::quiet_NaN();
    double mc_de_gap_rel = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    int n_mc = 0;
};

struct sweep_result {
    std::vector<sweep_row> rows;
    std::vector<std::string> warnings;
};

namespace detail {

inline const char* precoder_name(precoder_kind k) {
    return k == precoder_kind::mrt ? "mrt" : "rzf";
}

inline double grand_mean(const Eigen::MatrixXd& m) { return m.mean(); }

// Rows for one engine run at one sweep point: the sum row, then per-user
// rows when requested.
inline void emit_rows(sweep_result& out, const scenario& sc, const std::string& axis,
                      double value, const char* engine, precoder_kind kind,
                      const rate_result& r, int n_mc_used) {
    sweep_row base;
    base.sweep_axis = axis;
    base.sweep_value = value;
    base.engine = engine;
    base.precoder = precoder_name(kind);
    base.seed = sc.seed;
    base.n_mc = n_mc_used;

    sweep_row sum = base;
    sum.user_index = "sum";
    sum.rate_bps_hz = r.sum_rate;
    sum.gamma_mean = grand_mean(r.per_slot_sinr);
    out.rows.push_back(sum);

    if (sc.per_user) {
        for (int k = 0; k < r.per_user_rate.size(); ++k) {
            sweep_row u = base;
            u.user_index = std::to_string(k);
            u.rate_bps_hz = r.per_user_rate[k];
            u.gamma_mean = r.per_slot_sinr.col(k).mean();
            out.rows.push_back(u);
        }
    }
}

// Pair mc rows with de rows at the same (value, precoder, user) and fill the
// relative gap of the mean SINR on both sides.
inline void fill_gaps(sweep_result& out) {
    for (auto& a : out.rows) {
        if (a.engine != "mc") continue;
        for (auto& b : out.rows) {
            if (b.engine != "de") continue;
            if (a.sweep_value != b.sweep_value || a.precoder != b.precoder ||
                a.user_index != b.user_index || a.sweep_axis != b.sweep_axis)
                continue;
            if (std::isnan(a.gamma_mean) || std::isnan(b.gamma_mean) || b.gamma_mean == 0.0)
                continue;
            const double gap = std::abs(a.gamma_mean - b.gamma_mean) / b.gamma_mean;
            a.mc_de_gap_rel = gap;
            b.mc_de_gap_rel = gap;
        }
    }
}

} // namespace detail

inline sweep_result run_sweep(const scenario& sc) {
    validate_scenario(sc);
    sweep_result out;

    const large_scale_profile profile = scenario_profile(sc);
    multicell_profile net;
    if (sc.cells > 1) {
        if (sc.engine != engine_choice::mc)
            throw config_error("multicell runs have no closed-form engine; set engine = mc");
        rng_stream net_rng(sc.profile_seed);
        net = make_hex_network(sc.cells, sc.cell_radius_m, sc.guard_m, sc.pathloss_exponent,
                               sc.shadow_sigma_db, sc.K, net_rng);
    }

    const std::string axis = sc.sweep_axis.empty() ? "none" : sc.sweep_axis;
    const std::vector<double> values =
        sc.sweep_axis.empty() ? std::vector<double>{0.0} : sc.sweep_values;

    const rng_stream master(sc.seed);
    for (std::size_t pi = 0; pi < values.size(); ++pi) {
        const double value = values[pi];
        system_config cfg;
        try {
            cfg = scenario_config(sc, sc.sweep_axis, value);
        } catch (const std::exception& ex) {
            out.warnings.push_back(axis + "=" + std::to_string(value) + ": " + ex.what());
            continue;
        }
        const rng_stream point_rng = master.derive(pi);

        for (precoder_kind kind : sc.precoders) {
            if (sc.engine == engine_choice::de || sc.engine == engine_choice::both) {
                try {
                    const rate_result r = de_rate(cfg, profile, kind);
                    detail::emit_rows(out, sc, axis, value, "de", kind, r, 0);
                } catch (const std::exception& ex) {
                    out.warnings.push_back(axis + "=" + std::to_string(value) + " de/" +
                                           detail::precoder_name(kind) + ": " + ex.what());
                }
            }
            if (sc.engine == engine_choice::mc || sc.engine == engine_choice::both) {
                try {
                    const rate_result r =
                        sc.cells > 1
                            ? multicell_mc_sumrate(cfg, net, kind, sc.n_mc, point_rng,
                                                   sc.standard_combiner
                                                       ? contamination_form::standard
                                                       : contamination_form::inverse_sum)
                            : mc_rate(cfg, profile, kind, sc.n_mc, point_rng);
                    detail::emit_rows(out, sc, axis, value, "mc", kind, r, sc.n_mc);
                } catch (const std::exception& ex) {
                    out.warnings.push_back(axis + "=" + std::to_string(value) + " mc/" +
                                           detail::precoder_name(kind) + ": " + ex.what());
                }
            }
        }
    }

    detail::fill_gaps(out);
    for (const auto& row : out.rows)
        if (!std::isnan(row.mc_de_gap_rel) && row.mc_de_gap_rel > 0.05)
            out.warnings.push_back("gap above 5% at " + row.sweep_axis + "=" +
                                   std::to_string(row.sweep_value) + " " + row.engine + "/" +
                                   row.precoder + "/" + row.user_index);
    return out;
}

namespace detail {
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace detail

inline void write_sweep_csv(std::ostream& os, const std::vector<sweep_row>& rows) {
    os << "sweep_axis,sweep_value,engine,precoder,user_index,rate_bps_hz,gamma_mean,"
          "mc_de_gap_rel,seed,n_mc\n";
    for (const auto& r : rows) {
        os << r.sweep_axis << ',' << detail::fmt_double(r.sweep_value) << ',' << r.engine << ','
           << r.precoder << ',' << r.user_index << ',' << detail::fmt_double(r.rate_bps_hz) << ','
           << detail::fmt_double(r.gamma_mean) << ','
           << (std::isnan(r.mc_de_gap_rel) ? "" : detail::fmt_double(r.mc_de_gap_rel)) << ','
           << r.seed << ',' << r.n_mc << '\n';
    }
}

// ---------------------------------------------------------------------------
// Power search: smallest symmetric uplink/downlink power (in dBm, joint
// p_u = p_d) for which the closed-form minimum per-user rate meets the
// target. Saturates at the 60 dBm cap.
// ---------------------------------------------------------------------------

struct power_row {
    std::string sweep_axis;
    double sweep_value = 0.0;
    std::string precoder;
    double target_rate_bps_hz = 0.0;
    double required_p_dbm = 0.0;
    bool saturated = false;
};

inline std::vector<power_row> required_power(const scenario& sc, double target_rate,
                                             double lo_dbm = -20.0, double hi_dbm = 60.0,
                                             double rate_tol = 1e-4) {
    validate_scenario(sc);
    if (!(target_rate > 0.0)) throw config_error("target rate must be positive");
    if (sc.cells > 1) throw config_error("the power search uses the closed-form engine; cells must be 1");

    const large_scale_profile profile = scenario_profile(sc);
    const std::string axis = sc.sweep_axis.empty() ? "none" : sc.sweep_axis;
    const std::vector<double> values =
        sc.sweep_axis.empty() ? std::vector<double>{0.0} : sc.sweep_values;

    std::vector<power_row> out;
    for (double value : values) {
        const system_config base_cfg = scenario_config(sc, sc.sweep_axis, value);
        for (precoder_kind kind : sc.precoders) {
            auto min_rate_at = [&](double p_dbm) {
                system_config cfg = base_cfg;
                cfg.p_u = dbm_to_watts(p_dbm);
                cfg.p_d = cfg.p_u;
                return de_rate(cfg, profile, kind).per_user_rate.minCoeff();
            };

            power_row row;
            row.sweep_axis = axis;
            row.sweep_value = value;
            row.precoder = detail::precoder_name(kind);
            row.target_rate_bps_hz = target_rate;

            const double r_lo = min_rate_at(lo_dbm);
            const double r_hi = min_rate_at(hi_dbm);
            if (r_hi < r_lo)
                throw numeric_error("rate is not increasing in power on the search window");
            if (r_hi < target_rate) {
                row.required_p_dbm = hi_dbm;
                row.saturated = true;
                out.push_back(row);
                continue;
            }
            if (r_lo >= target_rate) {
                row.required_p_dbm = lo_dbm;
                out.push_back(row);
                continue;
            }

            double lo = lo_dbm, hi = hi_dbm;
            double mid = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                mid = 0.5 * (lo + hi);
                const double r = min_rate_at(mid);
                if (std::abs(r - target_rate) <= rate_tol) break;
                (r < target_rate ? lo : hi) = mid;
                if (hi - lo < 1e-9) break;
            }
            row.required_p_dbm = mid;
            out.push_back(row);
        }
    }
    return out;
}

inline void write_power_csv(std::ostream& os, const std::vector<power_row>& rows,
                            std::uint64_t seed) {
    os << "sweep_axis,sweep_value,precoder,target_rate_bps_hz,required_p_dbm,saturated,seed\n";
    for (const auto& r : rows) {
        os << r.sweep_axis << ',' << detail::fmt_double(r.sweep_value) << ',' << r.precoder << ','
           << detail::fmt_double(r.target_rate_bps_hz) << ','
           << detail::fmt_double(r.required_p_dbm) << ',' << (r.saturated ? "true" : "false")
           << ',' << seed << '\n';
    }
}

} // namespace agingmimo
