#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hylo/common.hpp"
#include "hylo/flow.hpp"
#include "hylo/functionals.hpp"
#include "hylo/io.hpp"
#include "hylo/orbit.hpp"
#include "hylo/run.hpp"

namespace hylo {

// --- profile parameter sweeps ---------------------------------------------

// One row per (h, ell) cell, h outer ascending, ell inner ascending. Cells
// are independent jobs (HYLO_THREADS bounds concurrency); a failed cell is
// recorded with converged = 0 and the sweep continues.
inline std::vector<SweepRow> sweep_profiles(const PotentialSpec& pot, std::vector<double> h_list,
                                            std::vector<int> ell_list, const FlowConfig& cfg) {
    std::sort(h_list.begin(), h_list.end());
    std::sort(ell_list.begin(), ell_list.end());
    std::vector<SweepRow> rows(h_list.size() * ell_list.size());
    parallel_jobs(rows.size(), [&](std::size_t idx) {
        double h = h_list[idx / ell_list.size()];
        int ell = ell_list[idx % ell_list.size()];
        SweepRow row;
        row.h = h;
        row.ell = ell;
        try {
            FlowTrace tr = ell == 0 ? solve_soliton(pot, h, cfg) : solve_profile(pot, ell, h, cfg);
            const RadialProfile& p = tr.final;
            row.omega = p.omega;
            row.lambda = hylomorphy_ratio(p, pot);
            for (int j = 0; j <= p.grid.J; ++j)
                if (p.u[j] > row.peak_u) {
                    row.peak_u = p.u[j];
                    row.peak_r = p.grid.r(j);
                }
            row.converged = tr.converged;
        } catch (const std::exception&) {
            row.converged = false;
            row.omega = row.lambda = row.peak_u = row.peak_r =
                std::numeric_limits<double>::quiet_NaN();
        }
        rows[idx] = row;
    });
    return rows;
}

// --- geometry policies ------------------------------------------------------

// Torus for a translating soliton: wide enough for the support (at the 1e-8
// level) plus the full translation distance, soliton starting left of center.
struct TorusSetup {
    TorusGrid grid;
    double cx = 0.0, cy = 0.0;
};

inline TorusSetup torus_for_soliton(const RadialProfile& p, double v, double horizon_time,
                                    double dx) {
    ProfileInterpolant ip(p.u, p.grid.dr, p.ell);
    double R = ip.support_radius(1e-8);
    double travel = std::abs(v) * horizon_time;
    TorusSetup ts;
    ts.grid = make_torus_grid(2.2 * R + travel, dx);
    ts.cx = 0.5 * (ts.grid.L() - travel);
    ts.cy = 0.5 * ts.grid.L();
    return ts;
}

// Polar annulus for a rotating vortex: the inner radius rises to where the
// profile is still below 1e-4 of its peak (keeping the explicit scheme stable
// at dt = dr/50), the outer one contains the 1e-8 support.
inline PolarGrid polar_for_vortex(const RadialProfile& p, double dr) {
    ProfileInterpolant ip(p.u, p.grid.dr, p.ell);
    double r_in = ip.inner_rise_radius(1e-4);
    double r_out = ip.support_radius(1e-8) + 2.0;
    return make_polar_grid(dr, r_out, r_in);
}

// --- stability experiments ---------------------------------------------------

struct StabilityRunConfig {
    double v = 0.5;
    double periods = 10.0;
    double dt_ratio = 10.0;  // dt = dx / dt_ratio (torus) or dr / dt_ratio (polar)
    int monitors_per_period = 20;
    double rupture_threshold = 0.5;
    bool stop_after_rupture = false;
    std::string out_dir = ".";
};

struct StabilitySummaryRow {
    double spacing = 0.0;
    double period = 0.0;
    double final_delta_os = 0.0;
    double max_delta_os = 0.0;
    std::optional<double> rupture_time;
    bool blew_up = false;
    std::string csv_path;
    std::string error;  // nonempty when the grid could not be run at all
};

namespace expdetail {

inline std::string spacing_tag(double v) {
    std::string s = fmt_g17(v);
    return s;
}

inline Metadata run_metadata(const StabilityRunConfig& cfg, const RadialProfile& p,
                             const char* grid_kind, double spacing, double dt, double L_or_rmax,
                             double T) {
    Metadata m;
    m.emplace_back("grid", grid_kind);
    m.emplace_back("spacing", fmt_g17(spacing));
    m.emplace_back("dt", fmt_g17(dt));
    m.emplace_back("dt_ratio", fmt_g17(cfg.dt_ratio));
    m.emplace_back("h", fmt_g17(p.h));
    m.emplace_back("ell", std::to_string(p.ell));
    m.emplace_back("omega", fmt_g17(p.omega));
    m.emplace_back("period", fmt_g17(T));
    m.emplace_back("periods", fmt_g17(cfg.periods));
    m.emplace_back("v", fmt_g17(cfg.v));
    m.emplace_back("extent", fmt_g17(L_or_rmax));
    m.emplace_back("monitors_per_period", std::to_string(cfg.monitors_per_period));
    m.emplace_back("rupture_threshold", fmt_g17(cfg.rupture_threshold));
    m.emplace_back("time_unit_note", "t/T uses T = 2*pi/|omega|");
    return m;
}

template <class Grid>
StabilitySummaryRow summarize(const RunResult<Grid>& rr, double spacing, double T,
                              double threshold) {
    StabilitySummaryRow row;
    row.spacing = spacing;
    row.period = T;
    row.blew_up = rr.blew_up;
    for (const auto& rec : rr.records) {
        row.max_delta_os = std::max(row.max_delta_os, rec.delta_os);
        if (!row.rupture_time && rec.delta_os > threshold) row.rupture_time = rec.t;
    }
    if (!rr.records.empty()) row.final_delta_os = rr.records.back().delta_os;
    return row;
}

}  // namespace expdetail

// Boosted-soliton orbital stability scan over grid spacings: one leap-frog
// run per dx, each seeded from the same profile, writing run_dx<dx>.csv.
inline std::vector<StabilitySummaryRow> experiment_soliton_stability(
    const RadialProfile& soliton, const PotentialSpec& pot, const std::vector<double>& dx_list,
    const StabilityRunConfig& cfg) {
    std::vector<StabilitySummaryRow> summary(dx_list.size());
    parallel_jobs(dx_list.size(), [&](std::size_t i) {
        double dx = dx_list[i];
        summary[i].spacing = dx;
        try {
        double T = two_pi / std::abs(soliton.omega);
        double horizon = cfg.periods * T;
        TorusSetup ts = torus_for_soliton(soliton, cfg.v, horizon, dx);
        TheoreticalOrbit orbit = make_translating_orbit(soliton, cfg.v, ts.cx, ts.cy);
        double dt = dx / cfg.dt_ratio;
        std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon / dt));
        TorusState st = init_from_orbit(orbit, ts.grid, dt);
        DiagnosticsPlan plan;
        plan.cadence = std::max<std::int64_t>(1, std::llround(T / (cfg.monitors_per_period * dt)));
        plan.orbit = &orbit;
        if (cfg.stop_after_rupture) plan.stop_threshold = cfg.rupture_threshold;
        RunResult<TorusGrid> rr = run(std::move(st), pot, steps, plan);
        StabilitySummaryRow row = expdetail::summarize(rr, dx, T, cfg.rupture_threshold);
        row.csv_path = cfg.out_dir + "/run_dx" + expdetail::spacing_tag(dx) + ".csv";
        write_run_csv(row.csv_path, rr.records,
                      expdetail::run_metadata(cfg, soliton, "torus", dx, dt, ts.grid.L(), T));
        summary[i] = row;
        } catch (const std::exception& e) {
            summary[i].blew_up = true;
            summary[i].error = e.what();
        }
    });
    return summary;
}

// Vortex stability scan over radial spacings on the polar grid; detects
// rupture (delta_OS crossing the threshold) per grid.
inline std::vector<StabilitySummaryRow> experiment_vortex_stability(
    const RadialProfile& vortex, const PotentialSpec& pot, const std::vector<double>& dr_list,
    const StabilityRunConfig& cfg) {
    std::vector<StabilitySummaryRow> summary(dr_list.size());
    parallel_jobs(dr_list.size(), [&](std::size_t i) {
        double dr = dr_list[i];
        summary[i].spacing = dr;
        try {
        double T = two_pi / std::abs(vortex.omega);
        double horizon = cfg.periods * T;
        PolarGrid grid = polar_for_vortex(vortex, dr);
        TheoreticalOrbit orbit = make_rotating_orbit(vortex);
        double dt = dr / cfg.dt_ratio;
        std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon / dt));
        PolarState st = init_from_orbit(orbit, grid, dt);
        DiagnosticsPlan plan;
        plan.cadence = std::max<std::int64_t>(1, std::llround(T / (cfg.monitors_per_period * dt)));
        plan.orbit = &orbit;
        if (cfg.stop_after_rupture) plan.stop_threshold = cfg.rupture_threshold;
        RunResult<PolarGrid> rr = run(std::move(st), pot, steps, plan);
        StabilitySummaryRow row = expdetail::summarize(rr, dr, T, cfg.rupture_threshold);
        row.csv_path = cfg.out_dir + "/run_dr" + expdetail::spacing_tag(dr) + ".csv";
        write_run_csv(row.csv_path, rr.records,
                      expdetail::run_metadata(cfg, vortex, "polar", dr, dt, grid.r_max(), T));
        summary[i] = row;
        } catch (const std::exception& e) {
            summary[i].blew_up = true;
            summary[i].error = e.what();
        }
    });
    return summary;
}

inline void write_stability_summary(const std::string& path,
                                    const std::vector<StabilitySummaryRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "spacing,period,final_delta_os,max_delta_os,rupture_time,rupture_time_over_T,blew_up,"
           "error\n";
    for (const auto& r : rows) {
        out << fmt_g17(r.spacing) << "," << fmt_g17(r.period) << "," << fmt_g17(r.final_delta_os)
            << "," << fmt_g17(r.max_delta_os) << ",";
        if (r.rupture_time)
            out << fmt_g17(*r.rupture_time) << "," << fmt_g17(*r.rupture_time / r.period);
        else
            out << "none,none";
        out << "," << (r.blew_up ? 1 : 0) << "," << r.error << "\n";
    }
}

}  // namespace hylo
