// hylo — numerical experiments on solitons and vortices of the nonlinear
// Klein-Gordon equation: charge-constrained profile construction, leap-frog
// evolution on torus/polar grids, conservation and orbital-stability
// diagnostics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <deque>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hylo/hylo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hylo;

namespace {

struct FlowOptions {
    std::string potential = "log";
    double m = 1.0;
    double rtilde = 60.0;
    double dr = 0.1;
    double dtau = 0.0;
    double e_omega = 1e-11;
    double e_lambda = 1e-12;
    std::int64_t max_steps = 6'000'000;
    std::string init_kind = "gaussian-ring";
    double init_amplitude = 1.0;
    double init_rc = 0.0;
    double init_sigma = 0.0;
    std::string init_file;

    // `grid_prefix` renames the solver's grid flags (e.g. --profile-dr) on
    // subcommands whose own flags would otherwise collide
    void attach(CLI::App* cmd, const std::string& grid_prefix = "") {
        auto flag = [&](const char* name) { return "--" + grid_prefix + name; };
        cmd->add_option("--potential", potential, "potential name (log|linear)");
        cmd->add_option("--m", m, "mass parameter for the linear potential");
        cmd->add_option(flag("rtilde"), rtilde, "outer radius of the flow domain");
        cmd->add_option(flag("dr"), dr, "radial grid spacing of the flow");
        cmd->add_option("--dtau", dtau, "pseudo-time step (0 = auto)");
        cmd->add_option("--e-omega", e_omega, "relative omega stopping threshold");
        cmd->add_option("--e-lambda", e_lambda, "relative lambda stopping threshold");
        cmd->add_option("--max-steps", max_steps, "flow step budget");
        cmd->add_option("--init", init_kind, "initial guess: gaussian-ring|annulus-bump|file");
        cmd->add_option("--init-amplitude", init_amplitude, "guess amplitude");
        cmd->add_option("--init-rc", init_rc, "guess ring radius (0 = auto)");
        cmd->add_option("--init-sigma", init_sigma, "guess ring width (0 = auto)");
        cmd->add_option("--init-file", init_file, "profile csv for --init file");
    }

    FlowConfig flow_config() const {
        FlowConfig cfg;
        cfg.r_tilde = rtilde;
        cfg.dr = dr;
        cfg.dtau = dtau;
        cfg.e_omega = e_omega;
        cfg.e_lambda = e_lambda;
        cfg.max_steps = max_steps;
        cfg.init.amplitude = init_amplitude;
        cfg.init.rc = init_rc;
        cfg.init.sigma = init_sigma;
        cfg.init.file_path = init_file;
        if (init_kind == "gaussian-ring") cfg.init.kind = InitialGuessSpec::Kind::gaussian_ring;
        else if (init_kind == "annulus-bump") cfg.init.kind = InitialGuessSpec::Kind::annulus_bump;
        else if (init_kind == "file") cfg.init.kind = InitialGuessSpec::Kind::file;
        else throw CLI::ValidationError("--init", "unknown initial guess kind " + init_kind);
        return cfg;
    }

    PotentialSpec make_potential() const { return make_potential_by_name(potential, m); }

    Metadata metadata() const {
        Metadata md;
        md.emplace_back("potential", potential);
        md.emplace_back("m", fmt_g17(m));
        md.emplace_back("rtilde", fmt_g17(rtilde));
        md.emplace_back("dr", fmt_g17(dr));
        md.emplace_back("dtau", fmt_g17(dtau));
        md.emplace_back("e_omega", fmt_g17(e_omega));
        md.emplace_back("e_lambda", fmt_g17(e_lambda));
        md.emplace_back("max_steps", std::to_string(max_steps));
        md.emplace_back("init", init_kind);
        return md;
    }
};

// Registered per subcommand: `--config <file>` reads key=value lines whose
// keys mirror the long flag names. Command-line flags override config
// values; unknown keys are rejected.
std::deque<std::pair<CLI::App*, std::string>>& config_slots() {
    static std::deque<std::pair<CLI::App*, std::string>> slots;
    return slots;
}

void enable_config(CLI::App* cmd) {
    // plain --help only: the short -h would clash with the --h charge flag
    cmd->set_help_flag("--help", "print help");
    config_slots().emplace_back(cmd, std::string{});
    std::string* slot = &config_slots().back().second;
    cmd->add_option("--config", *slot, "key=value config file (flags override)");
}

std::string trim_ws(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::string body = trim_ws(line);
        if (body.empty() || body[0] == '#') continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("malformed config line (want key=value): " + line);
        std::string key = trim_ws(body.substr(0, eq));
        std::string val = trim_ws(body.substr(eq + 1));
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr || key == "config")
            throw std::runtime_error("unknown config key: " + key);
        if (op->count() == 0) {  // flags given on the command line win
            op->add_result(val);
            op->run_callback();
        }
    }
}

void apply_parsed_configs() {
    for (auto& [cmd, path] : config_slots())
        if (cmd->parsed()) apply_config_file(cmd, path);
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(csv);
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
    }
    if (out.empty()) throw CLI::ValidationError("list", "empty list: " + csv);
    return out;
}

RadialProfile load_or_solve(const std::string& profile_path, const FlowOptions& fopt, int ell,
                            double h) {
    if (!profile_path.empty()) {
        ProfileFile pf = read_profile_csv(profile_path);
        if (pf.profile.ell != ell)
            throw std::runtime_error("profile file has ell=" + std::to_string(pf.profile.ell) +
                                     ", expected " + std::to_string(ell));
        return pf.profile;
    }
    PotentialSpec pot = fopt.make_potential();
    FlowTrace tr = ell == 0 ? solve_soliton(pot, h, fopt.flow_config())
                            : solve_profile(pot, ell, h, fopt.flow_config());
    if (!tr.converged) throw std::runtime_error("profile construction did not converge");
    return tr.final;
}

int cmd_check_potential(const std::string& name, double m, double smax, int samples, double eps,
                        double pg, double qg) {
    PotentialSpec pot = make_potential_by_name(name, m);
    AssumptionReport rep = check_assumptions(pot, smax, samples, eps, pg, qg);
    std::fputs(format_report(rep).c_str(), stdout);
    return rep.core_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlinear Klein-Gordon vortex/soliton laboratory"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    // --- check-potential ---
    auto* cp = app.add_subcommand("check-potential",
                                  "evaluate the structural assumptions of a potential");
    enable_config(cp);
    std::string cp_name = "log";
    double cp_m = 1.0, cp_smax = 10.0, cp_eps = 1.5, cp_p = 3.0, cp_q = 3.0;
    int cp_samples = 1000;
    cp->add_option("--name", cp_name, "potential name");
    cp->add_option("--m", cp_m, "mass for the linear potential");
    cp->add_option("--smax", cp_smax, "sampling range upper end");
    cp->add_option("--samples", cp_samples, "sample count (>= 100)");
    cp->add_option("--eps", cp_eps, "exponent for the small-s bound, in (0,2)");
    cp->add_option("--p", cp_p, "lower growth exponent");
    cp->add_option("--q", cp_q, "upper growth exponent");

    // --- profile ---
    auto* pr = app.add_subcommand("profile",
                                  "construct a vortex or soliton profile by gradient flow");
    enable_config(pr);
    FlowOptions pr_flow;
    pr_flow.attach(pr);
    int pr_ell = 1;
    double pr_h = 500.0;
    std::string pr_out = "profile.csv", pr_trace;
    pr->add_option("--ell", pr_ell, "winding number (0 = soliton)");
    auto* pr_h_opt = pr->add_option("--h", pr_h, "charge");
    pr->add_option("--out", pr_out, "output profile csv");
    pr->add_option("--trace", pr_trace, "optional flow trace csv");

    // --- sweep ---
    auto* sw = app.add_subcommand("sweep", "profile sweep over charge and winding lists");
    enable_config(sw);
    FlowOptions sw_flow;
    sw_flow.attach(sw);
    std::string sw_h = "100,500", sw_ell = "1", sw_out = "sweep.csv";
    sw->add_option("--h-list", sw_h, "comma-separated charges");
    sw->add_option("--ell-list", sw_ell, "comma-separated winding numbers");
    sw->add_option("--out", sw_out, "output csv");

    // --- evolve-soliton ---
    auto* es = app.add_subcommand("evolve-soliton", "boost a soliton and evolve it on the torus");
    enable_config(es);
    FlowOptions es_flow;
    es_flow.attach(es, "profile-");
    double es_h = 500.0, es_v = 0.5, es_dx = 1.0, es_ratio = 10.0, es_periods = 10.0;
    std::int64_t es_monitor = 0;
    std::string es_out = "run.csv", es_profile;
    es->add_option("--h", es_h, "charge");
    es->add_option("--v", es_v, "boost speed, |v| < 1");
    es->add_option("--dx", es_dx, "torus spacing");
    es->add_option("--dt-ratio", es_ratio, "dt = dx / dt-ratio");
    es->add_option("--periods", es_periods, "horizon in periods T = 2 pi/|omega|");
    es->add_option("--monitor-every", es_monitor, "record every k steps (0 = ~20 per period)");
    es->add_option("--out", es_out, "run csv path");
    es->add_option("--profile", es_profile, "precomputed profile csv (skips the solve)");

    // --- evolve-vortex ---
    auto* ev = app.add_subcommand("evolve-vortex", "evolve a rotating vortex on the polar grid");
    enable_config(ev);
    FlowOptions ev_flow;
    ev_flow.attach(ev, "profile-");
    double ev_h = 500.0, ev_dr = 1.0, ev_ratio = 50.0, ev_periods = 5.0;
    int ev_ell = 4;
    std::int64_t ev_monitor = 0;
    std::string ev_out = "run.csv", ev_profile;
    ev->add_option("--h", ev_h, "charge");
    ev->add_option("--ell", ev_ell, "winding number (nonzero)");
    ev->add_option("--dr", ev_dr, "radial spacing");
    ev->add_option("--dt-ratio", ev_ratio, "dt = dr / dt-ratio");
    ev->add_option("--periods", ev_periods, "horizon in periods");
    ev->add_option("--monitor-every", ev_monitor, "record every k steps (0 = ~20 per period)");
    ev->add_option("--out", ev_out, "run csv path");
    ev->add_option("--profile", ev_profile, "precomputed profile csv (skips the solve)");

    // --- drift-report ---
    auto* dr_cmd = app.add_subcommand("drift-report",
                                      "conservation statistics and rupture detection");
    enable_config(dr_cmd);
    std::string dr_in = "run.csv", dr_json = "report.json";
    double dr_threshold = 0.5;
    dr_cmd->add_option("--in", dr_in, "run csv to analyze")->required();
    dr_cmd->add_option("--threshold", dr_threshold, "rupture threshold on delta_OS");
    dr_cmd->add_option("--json", dr_json, "structured report output path");

    // --- experiment ---
    auto* ex = app.add_subcommand("experiment", "figure-style multi-grid experiments");
    ex->set_help_flag("--help", "print help");
    ex->require_subcommand(1);

    auto* exs = ex->add_subcommand("soliton-stability",
                                   "delta_OS trends for a boosted soliton across grids");
    enable_config(exs);
    FlowOptions exs_flow;
    exs_flow.attach(exs, "profile-");
    std::string exs_dx = "5,1,0.5", exs_dir = "soliton-stability", exs_profile;
    double exs_h = 500.0, exs_v = 0.5, exs_periods = 10.0, exs_ratio = 10.0;
    bool exs_paper = false;
    exs->add_option("--h", exs_h, "charge");
    exs->add_option("--v", exs_v, "boost speed");
    exs->add_option("--dx-list", exs_dx, "grid spacings");
    exs->add_option("--periods", exs_periods, "horizon in periods");
    exs->add_option("--dt-ratio", exs_ratio, "dt = dx / dt-ratio");
    exs->add_option("--out-dir", exs_dir, "output directory");
    exs->add_option("--profile", exs_profile, "precomputed soliton profile csv");
    exs->add_flag("--exact-paper", exs_paper, "use the full grid list 5,2,1,0.5,0.2,0.1");

    auto* exv = ex->add_subcommand("vortex-stability",
                                   "rupture detection for a vortex across grids");
    enable_config(exv);
    FlowOptions exv_flow;
    exv_flow.attach(exv, "profile-");
    std::string exv_dr = "5,2,1,0.5", exv_dir = "vortex-stability", exv_profile;
    double exv_h = 500.0, exv_periods = 150.0, exv_ratio = 50.0, exv_threshold = 0.5;
    int exv_ell = 4;
    bool exv_paper = false;
    exv->add_option("--h", exv_h, "charge");
    exv->add_option("--ell", exv_ell, "winding number");
    exv->add_option("--dr-list", exv_dr, "radial spacings");
    exv->add_option("--periods", exv_periods, "horizon cap in periods");
    exv->add_option("--dt-ratio", exv_ratio, "dt = dr / dt-ratio");
    exv->add_option("--threshold", exv_threshold, "rupture threshold on delta_OS");
    exv->add_option("--out-dir", exv_dir, "output directory");
    exv->add_option("--profile", exv_profile, "precomputed vortex profile csv");
    exv->add_flag("--exact-paper", exv_paper, "use the full grid list 5,2,1,0.5,0.1,0.05,0.01");

    CLI11_PARSE(app, argc, argv);

    try {
        apply_parsed_configs();
        if (pr->parsed() && pr_h_opt->count() == 0)
            throw std::runtime_error("profile requires --h (flag or config)");

        if (cp->parsed())
            return cmd_check_potential(cp_name, cp_m, cp_smax, cp_samples, cp_eps, cp_p, cp_q);

        if (pr->parsed()) {
            PotentialSpec pot = pr_flow.make_potential();
            FlowConfig cfg = pr_flow.flow_config();
            FlowTrace tr = pr_ell == 0 ? solve_soliton(pot, pr_h, cfg)
                                       : solve_profile(pot, pr_ell, pr_h, cfg);
            write_profile_csv(pr_out, tr.final, pot.m);
            if (!pr_trace.empty()) {
                Metadata md = pr_flow.metadata();
                md.emplace_back("ell", std::to_string(pr_ell));
                md.emplace_back("h", fmt_g17(pr_h));
                write_trace_csv(pr_trace, tr, md);
            }
            std::printf("converged=%d steps=%lld omega=%s lambda=%s residual=%s%s\n",
                        (int)tr.converged, (long long)tr.steps_used,
                        fmt_g17(tr.final.omega).c_str(),
                        fmt_g17(hylomorphy_ratio(tr.final, pot)).c_str(),
                        fmt_g17(tr.final_residual).c_str(),
                        tr.boundary_warning ? " warning=support-touches-boundary" : "");
            return tr.converged ? 0 : 2;
        }

        if (sw->parsed()) {
            PotentialSpec pot = sw_flow.make_potential();
            std::vector<double> hs = parse_list(sw_h);
            std::vector<int> ells;
            for (double v : parse_list(sw_ell)) ells.push_back(static_cast<int>(v));
            auto rows = sweep_profiles(pot, hs, ells, sw_flow.flow_config());
            Metadata md = sw_flow.metadata();
            md.emplace_back("h_list", sw_h);
            md.emplace_back("ell_list", sw_ell);
            write_sweep_csv(sw_out, rows, md);
            std::printf("wrote %zu rows to %s\n", rows.size(), sw_out.c_str());
            return 0;
        }

        if (es->parsed()) {
            PotentialSpec pot = es_flow.make_potential();
            RadialProfile prof = load_or_solve(es_profile, es_flow, 0, es_h);
            double T = two_pi / std::abs(prof.omega);
            double horizon = es_periods * T;
            TorusSetup ts = torus_for_soliton(prof, es_v, horizon, es_dx);
            TheoreticalOrbit orbit = make_translating_orbit(prof, es_v, ts.cx, ts.cy);
            double dt = es_dx / es_ratio;
            TorusState st = init_from_orbit(orbit, ts.grid, dt);
            DiagnosticsPlan plan;
            plan.orbit = &orbit;
            plan.cadence = es_monitor > 0
                               ? es_monitor
                               : std::max<std::int64_t>(1, std::llround(T / (20.0 * dt)));
            auto rr = run(std::move(st), pot, std::llround(horizon / dt), plan);
            Metadata md;
            md.emplace_back("grid", "torus");
            md.emplace_back("dx", fmt_g17(es_dx));
            md.emplace_back("dt", fmt_g17(dt));
            md.emplace_back("L", fmt_g17(ts.grid.L()));
            md.emplace_back("h", fmt_g17(es_h));
            md.emplace_back("v", fmt_g17(es_v));
            md.emplace_back("omega", fmt_g17(prof.omega));
            md.emplace_back("period", fmt_g17(T));
            md.emplace_back("periods", fmt_g17(es_periods));
            md.emplace_back("monitor_every", std::to_string(plan.cadence));
            write_run_csv(es_out, rr.records, md);
            std::printf("wrote %zu records to %s%s\n", rr.records.size(), es_out.c_str(),
                        rr.blew_up ? " (blow-up)" : "");
            return rr.blew_up ? 3 : 0;
        }

        if (ev->parsed()) {
            if (ev_ell == 0) throw std::runtime_error("evolve-vortex requires ell != 0");
            PotentialSpec pot = ev_flow.make_potential();
            RadialProfile prof = load_or_solve(ev_profile, ev_flow, ev_ell, ev_h);
            double T = two_pi / std::abs(prof.omega);
            double horizon = ev_periods * T;
            PolarGrid grid = polar_for_vortex(prof, ev_dr);
            TheoreticalOrbit orbit = make_rotating_orbit(prof);
            double dt = ev_dr / ev_ratio;
            PolarState st = init_from_orbit(orbit, grid, dt);
            DiagnosticsPlan plan;
            plan.orbit = &orbit;
            plan.cadence = ev_monitor > 0
                               ? ev_monitor
                               : std::max<std::int64_t>(1, std::llround(T / (20.0 * dt)));
            auto rr = run(std::move(st), pot, std::llround(horizon / dt), plan);
            Metadata md;
            md.emplace_back("grid", "polar");
            md.emplace_back("dr", fmt_g17(ev_dr));
            md.emplace_back("dt", fmt_g17(dt));
            md.emplace_back("r_min", fmt_g17(grid.r_min));
            md.emplace_back("r_max", fmt_g17(grid.r_max()));
            md.emplace_back("ntheta", std::to_string(grid.Ntheta));
            md.emplace_back("h", fmt_g17(ev_h));
            md.emplace_back("ell", std::to_string(ev_ell));
            md.emplace_back("omega", fmt_g17(prof.omega));
            md.emplace_back("period", fmt_g17(T));
            md.emplace_back("periods", fmt_g17(ev_periods));
            md.emplace_back("monitor_every", std::to_string(plan.cadence));
            write_run_csv(ev_out, rr.records, md);
            std::printf("wrote %zu records to %s%s\n", rr.records.size(), ev_out.c_str(),
                        rr.blew_up ? " (blow-up)" : "");
            return rr.blew_up ? 3 : 0;
        }

        if (dr_cmd->parsed()) {
            RunCsv rc = read_run_csv(dr_in);
            DriftReport rep = drift_report(rc.records, dr_threshold);
            std::fputs(format_drift_report(rep).c_str(), stdout);
            json j;
            auto put = [&](const char* name, const DriftStat& s) {
                j[name] = {{"mean", s.mean},
                           {"min_rel_dev", s.min_rel_dev},
                           {"max_rel_dev", s.max_rel_dev}};
            };
            put("energy", rep.energy);
            put("charge", rep.charge);
            put("angmom", rep.angmom);
            j["rupture_threshold"] = rep.rupture_threshold;
            if (rep.rupture_time) j["rupture_time"] = *rep.rupture_time;
            else j["rupture_time"] = nullptr;
            std::ofstream jf(dr_json);
            jf << j.dump(2) << "\n";
            return 0;
        }

        if (exs->parsed()) {
            PotentialSpec pot = exs_flow.make_potential();
            RadialProfile prof = load_or_solve(exs_profile, exs_flow, 0, exs_h);
            fs::create_directories(exs_dir);
            StabilityRunConfig cfg;
            cfg.v = exs_v;
            cfg.periods = exs_periods;
            cfg.dt_ratio = exs_ratio;
            cfg.out_dir = exs_dir;
            std::vector<double> dxs =
                exs_paper ? std::vector<double>{5.0, 2.0, 1.0, 0.5, 0.2, 0.1} : parse_list(exs_dx);
            auto rows = experiment_soliton_stability(prof, pot, dxs, cfg);
            write_stability_summary(exs_dir + "/summary.csv", rows);
            for (const auto& r : rows)
                std::printf("dx=%g final_delta_os=%s%s\n", r.spacing,
                            fmt_g17(r.final_delta_os).c_str(), r.blew_up ? " (blow-up)" : "");
            std::printf("summary: %s/summary.csv\n", exs_dir.c_str());
            return 0;
        }

        if (exv->parsed()) {
            PotentialSpec pot = exv_flow.make_potential();
            RadialProfile prof = load_or_solve(exv_profile, exv_flow, exv_ell, exv_h);
            fs::create_directories(exv_dir);
            StabilityRunConfig cfg;
            cfg.periods = exv_periods;
            cfg.dt_ratio = exv_ratio;
            cfg.rupture_threshold = exv_threshold;
            cfg.stop_after_rupture = true;
            cfg.out_dir = exv_dir;
            std::vector<double> drs = exv_paper
                                          ? std::vector<double>{5.0, 2.0, 1.0, 0.5, 0.1, 0.05, 0.01}
                                          : parse_list(exv_dr);
            auto rows = experiment_vortex_stability(prof, pot, drs, cfg);
            write_stability_summary(exv_dir + "/summary.csv", rows);
            for (const auto& r : rows) {
                if (r.rupture_time)
                    std::printf("dr=%g rupture at t=%s (t/T=%s)\n", r.spacing,
                                fmt_g17(*r.rupture_time).c_str(),
                                fmt_g17(*r.rupture_time / r.period).c_str());
                else
                    std::printf("dr=%g no rupture within horizon%s\n", r.spacing,
                                r.blew_up ? " (blow-up)" : "");
            }
            std::printf("summary: %s/summary.csv\n", exv_dir.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
