#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hylo/common.hpp"
#include "hylo/diagnostics.hpp"
#include "hylo/flow.hpp"

namespace hylo {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// run.csv: `# key=value` metadata lines, a column header, then one row per
// diagnostics record at full double precision.
inline void write_run_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs,
                          const Metadata& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "t,energy,charge,angmom,delta_os\n";
    for (const auto& r : recs)
        out << fmt_g17(r.t) << "," << fmt_g17(r.energy) << "," << fmt_g17(r.charge) << ","
            << fmt_g17(r.angmom) << "," << fmt_g17(r.delta_os) << "\n";
}

struct RunCsv {
    std::vector<DiagnosticsRecord> records;
    std::map<std::string, std::string> meta;
};

inline RunCsv read_run_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    RunCsv out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            auto eq = body.find('=');
            if (eq != std::string::npos) {
                std::string key = body.substr(0, eq);
                key.erase(0, key.find_first_not_of(' '));
                out.meta[key] = body.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("t,", 0) != 0)
                throw std::runtime_error(path + ": missing run.csv column header");
            header_seen = true;
            continue;
        }
        DiagnosticsRecord r;
        const char* p = line.c_str();
        char* end = nullptr;
        double* fields[5] = {&r.t, &r.energy, &r.charge, &r.angmom, &r.delta_os};
        for (int i = 0; i < 5; ++i) {
            *fields[i] = std::strtod(p, &end);
            if (p == end) throw std::runtime_error(path + ": malformed row: " + line);
            p = *end == ',' ? end + 1 : end;
        }
        out.records.push_back(r);
    }
    if (!header_seen) throw std::runtime_error(path + ": empty run.csv");
    return out;
}

// trace.csv: `step,omega,lambda,residual` per recorded flow step.
inline void write_trace_csv(const std::string& path, const FlowTrace& trace, const Metadata& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "step,omega,lambda,residual\n";
    for (const auto& row : trace.rows)
        out << row.step << "," << fmt_g17(row.omega) << "," << fmt_g17(row.lambda) << ","
            << fmt_g17(row.max_residual) << "\n";
}

struct SweepRow {
    double h = 0.0;
    int ell = 0;
    double omega = 0.0;
    double lambda = 0.0;
    double peak_u = 0.0;
    double peak_r = 0.0;
    bool converged = false;
};

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                            const Metadata& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "h,ell,omega,lambda,peak_u,peak_r,converged\n";
    for (const auto& r : rows)
        out << fmt_g17(r.h) << "," << r.ell << "," << fmt_g17(r.omega) << "," << fmt_g17(r.lambda)
            << "," << fmt_g17(r.peak_u) << "," << fmt_g17(r.peak_r) << ","
            << (r.converged ? 1 : 0) << "\n";
}

inline std::string format_drift_report(const DriftReport& rep) {
    std::ostringstream os;
    auto stat = [&](const char* name, const DriftStat& s) {
        os << name << ".mean        " << fmt_g17(s.mean) << "\n"
           << name << ".min_rel_dev " << fmt_g17(s.min_rel_dev) << "\n"
           << name << ".max_rel_dev " << fmt_g17(s.max_rel_dev) << "\n";
    };
    stat("energy", rep.energy);
    stat("charge", rep.charge);
    stat("angmom", rep.angmom);
    os << "rupture_threshold  " << fmt_g17(rep.rupture_threshold) << "\n";
    os << "rupture_time       " << (rep.rupture_time ? fmt_g17(*rep.rupture_time) : "none") << "\n";
    return os.str();
}

}  // namespace hylo
