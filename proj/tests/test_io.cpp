#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hylo/hylo.hpp"

using namespace hylo;
namespace fs = std::filesystem;

namespace {

std::vector<DiagnosticsRecord> sample_records() {
    std::vector<DiagnosticsRecord> recs;
    for (int k = 0; k < 7; ++k) {
        DiagnosticsRecord r;
        r.t = 0.123456789012345 * k;
        r.energy = 100.0 / 3.0 + 1e-12 * k;
        r.charge = -500.0 / 7.0;
        r.angmom = 4.0 * r.charge;
        r.delta_os = 0.01 * k * k;
        recs.push_back(r);
    }
    return recs;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run csv round-trips records and metadata") {
    auto recs = sample_records();
    Metadata md;
    md.emplace_back("grid", "torus");
    md.emplace_back("dx", fmt_g17(0.5));
    std::string path = "io_run_test.csv";
    write_run_csv(path, recs, md);
    RunCsv back = read_run_csv(path);
    REQUIRE(back.records.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back.records[i].t == recs[i].t);
        CHECK(back.records[i].energy == recs[i].energy);
        CHECK(back.records[i].charge == recs[i].charge);
        CHECK(back.records[i].angmom == recs[i].angmom);
        CHECK(back.records[i].delta_os == recs[i].delta_os);
    }
    CHECK(back.meta.at("grid") == "torus");
    CHECK(back.meta.at("dx") == fmt_g17(0.5));
    std::remove(path.c_str());
}

TEST_CASE("drift report formatting lists every integral and the rupture") {
    auto recs = sample_records();
    DriftReport rep = drift_report(recs, 0.2);
    std::string text = format_drift_report(rep);
    for (const char* key :
         {"energy.mean", "charge.mean", "angmom.mean", "rupture_threshold", "rupture_time"})
        CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("sweep csv layout") {
    std::vector<SweepRow> rows(2);
    rows[0] = {100.0, 1, -0.84, 0.899, 0.83, 5.2, true};
    rows[1] = {500.0, 4, -0.81, 0.878, 1.02, 17.6, false};
    std::string path = "io_sweep_test.csv";
    write_sweep_csv(path, rows, {{"potential", "log"}});
    std::string text = slurp(path);
    CHECK(text.find("h,ell,omega,lambda,peak_u,peak_r,converged") != std::string::npos);
    CHECK(text.find("# potential=log") != std::string::npos);
    CHECK(text.find(",1\n") != std::string::npos);
    CHECK(text.find(",0\n") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli: check-potential output and exit codes") {
    std::string bin = HYLO_CLI_PATH;
    CHECK(std::system((bin + " check-potential --name log --smax 10 --eps 1.5 > io_cp.txt").c_str()) == 0);
    std::string text = slurp("io_cp.txt");
    CHECK(text.find("W-i: true") != std::string::npos);
    CHECK(text.find("W-iii: true") != std::string::npos);
    // linear potential has no hylomorphy point -> nonzero exit
    CHECK(std::system((bin + " check-potential --name linear --smax 10 --eps 1.5 > io_cp2.txt").c_str()) != 0);
    std::string text2 = slurp("io_cp2.txt");
    CHECK(text2.find("W-iii: false") != std::string::npos);
    std::remove("io_cp.txt");
    std::remove("io_cp2.txt");
}

TEST_CASE("cli: profile -> drift pipeline with config file and overrides") {
    std::string bin = HYLO_CLI_PATH;
    {
        std::ofstream cfg("io_cfg.ini");
        cfg << "potential=log\n" << "rtilde=30\n" << "dr=0.25\n" << "e-omega=1e-9\n"
            << "e-lambda=1e-11\n" << "h=50\n" << "out=io_profile.csv\n";
    }
    CHECK(std::system((bin + " profile --config io_cfg.ini --ell 1 --trace io_trace.csv"
                             " > io_prof.log").c_str()) == 0);
    ProfileFile pf = read_profile_csv("io_profile.csv");
    std::string trace_text = slurp("io_trace.csv");
    CHECK(trace_text.find("step,omega,lambda,residual") != std::string::npos);
    CHECK(pf.profile.ell == 1);
    CHECK(pf.profile.h == 50.0);
    CHECK(pf.profile.omega < 0.0);

    // flags override config values
    CHECK(std::system((bin + " profile --config io_cfg.ini --ell 1 --h 60 --out io_profile2.csv"
                             " > io_prof2.log").c_str()) == 0);
    ProfileFile pf2 = read_profile_csv("io_profile2.csv");
    CHECK(pf2.profile.h == 60.0);
    CHECK(std::abs(pf2.profile.omega) < std::abs(pf.profile.omega));

    // unknown config keys are rejected
    {
        std::ofstream cfg("io_bad.ini");
        cfg << "rtilde=30\n" << "no-such-key=1\n";
    }
    CHECK(std::system((bin + " profile --config io_bad.ini --ell 1 --h 50 2> io_err.log").c_str()) != 0);

    for (const char* f : {"io_cfg.ini", "io_bad.ini", "io_profile.csv", "io_profile2.csv",
                          "io_prof.log", "io_prof2.log", "io_err.log", "io_trace.csv"})
        std::remove(f);
}

TEST_CASE("cli: single-cell sweep matches the profile subcommand bit-exactly") {
    std::string bin = HYLO_CLI_PATH;
    std::string common = " --potential log --rtilde 30 --dr 0.25 --e-omega 1e-9 --e-lambda 1e-11";
    CHECK(std::system((bin + " profile --ell 1 --h 50 --out io_single.csv" + common +
                       " > io_s1.log").c_str()) == 0);
    CHECK(std::system((bin + " sweep --ell-list 1 --h-list 50 --out io_sweep.csv" + common +
                       " > io_s2.log").c_str()) == 0);
    ProfileFile pf = read_profile_csv("io_single.csv");
    std::string sweep_text = slurp("io_sweep.csv");
    CHECK(sweep_text.find(fmt_g17(pf.profile.omega)) != std::string::npos);
    for (const char* f : {"io_single.csv", "io_sweep.csv", "io_s1.log", "io_s2.log"})
        std::remove(f);
}

TEST_CASE("cli: evolve-vortex emits a parseable run csv and drift-report reads it") {
    std::string bin = HYLO_CLI_PATH;
    // tiny vortex run: ell=4, h=50, coarse grid, one period
    CHECK(std::system((bin + " profile --ell 4 --h 50 --rtilde 40 --dr 0.2 --e-omega 1e-8"
                             " --e-lambda 1e-11 --out io_vort.csv > io_v0.log").c_str()) == 0);
    CHECK(std::system((bin + " evolve-vortex --ell 4 --h 50 --profile io_vort.csv --dr 1"
                             " --periods 1 --out io_vrun.csv > io_v1.log").c_str()) == 0);
    RunCsv rc = read_run_csv("io_vrun.csv");
    CHECK(rc.records.size() > 10);
    CHECK(rc.meta.at("grid") == "polar");
    CHECK(std::system((bin + " drift-report --in io_vrun.csv --threshold 0.5 --json io_vrep.json"
                             " > io_v2.log").c_str()) == 0);
    std::string j = slurp("io_vrep.json");
    CHECK(j.find("\"charge\"") != std::string::npos);
    CHECK(j.find("\"rupture_time\"") != std::string::npos);
    for (const char* f : {"io_vort.csv", "io_vrun.csv", "io_vrep.json", "io_v0.log", "io_v1.log",
                          "io_v2.log"})
        std::remove(f);
}

TEST_CASE("cli: experiment subcommands write per-grid runs and a summary") {
    std::string bin = HYLO_CLI_PATH;
    CHECK(std::system((bin + " profile --ell 0 --h 50 --rtilde 30 --dr 0.25 --e-omega 1e-8"
                             " --e-lambda 1e-11 --out io_sol.csv > io_e0.log").c_str()) == 0);
    CHECK(std::system((bin + " experiment soliton-stability --profile io_sol.csv --h 50"
                             " --dx-list 5 --periods 2 --out-dir io_expdir > io_e1.log").c_str()) ==
          0);
    CHECK(fs::exists("io_expdir/summary.csv"));
    CHECK(fs::exists("io_expdir/run_dx5.csv"));

    CHECK(std::system((bin + " profile --ell 4 --h 50 --rtilde 40 --dr 0.2 --e-omega 1e-8"
                             " --e-lambda 1e-11 --out io_vrt.csv > io_e2.log").c_str()) == 0);
    CHECK(std::system((bin + " experiment vortex-stability --profile io_vrt.csv --h 50 --ell 4"
                             " --dr-list 2 --periods 2 --out-dir io_expdir2 > io_e3.log").c_str()) ==
          0);
    CHECK(fs::exists("io_expdir2/summary.csv"));
    std::string summary = slurp("io_expdir2/summary.csv");
    CHECK(summary.find("spacing,period,final_delta_os") != std::string::npos);

    fs::remove_all("io_expdir");
    fs::remove_all("io_expdir2");
    for (const char* f : {"io_sol.csv", "io_vrt.csv", "io_e0.log", "io_e1.log", "io_e2.log",
                          "io_e3.log"})
        std::remove(f);
}

TEST_CASE("thread count does not change sweep bytes") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 25.0;
    cfg.dr = 0.25;
    cfg.e_omega = 1e-8;
    cfg.e_lambda = 1e-10;
    auto run_with = [&](const char* threads) {
        setenv("HYLO_THREADS", threads, 1);
        auto rows = sweep_profiles(pot, {20.0, 40.0}, {1, 2}, cfg);
        std::string path = std::string("io_threads_") + threads + ".csv";
        write_sweep_csv(path, rows, {});
        return path;
    };
    std::string p1 = run_with("1");
    std::string p8 = run_with("8");
    CHECK(slurp(p1) == slurp(p8));
    unsetenv("HYLO_THREADS");
    std::remove(p1.c_str());
    std::remove(p8.c_str());
}
