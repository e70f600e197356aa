#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hylo/diagnostics.hpp"
#include "hylo/evolve.hpp"

namespace hylo {

// Monitoring plan for a leap-frog run. With an orbit attached, delta_OS is
// evaluated against it at every monitored step (denominators cached from the
// t = 0 samples). stop_threshold lets long instability searches end a few
// records after the norm has crossed it.
struct DiagnosticsPlan {
    std::int64_t cadence = 1;
    const TheoreticalOrbit* orbit = nullptr;
    double stop_threshold = std::numeric_limits<double>::infinity();
    int grace_records = 10;
};

template <class Grid>
struct RunResult {
    FieldState<Grid> state;
    std::vector<DiagnosticsRecord> records;
    bool blew_up = false;
    std::int64_t blowup_step = -1;
    bool stopped_early = false;
};

// Advances `steps` leap-frog steps, recording diagnostics every
// plan.cadence steps (and at the final step). Deterministic: identical
// inputs produce bit-identical outputs. A non-finite state ends the run with
// partial diagnostics.
template <class Grid>
RunResult<Grid> run(FieldState<Grid> s, const PotentialSpec& pot, std::int64_t steps,
                    const DiagnosticsPlan& plan) {
    if (plan.cadence < 1) throw std::invalid_argument("run: monitor cadence must be >= 1");
    RunResult<Grid> out;
    double den_field = 0.0, den_vel = 0.0;
    if (plan.orbit) {
        OrbitSample<Grid> ref0 = eval_orbit(*plan.orbit, s.grid, 0.0);
        OrbitSample<Grid> ref0h = eval_orbit(*plan.orbit, s.grid, -0.5 * s.dt);
        den_field = discrete_h1_norm(s.grid, ref0.psi);
        den_vel = discrete_l2_norm(s.grid, ref0h.psi_t);
        if (!(den_field > 0.0) || !(den_vel > 0.0))
            throw std::runtime_error("degenerate orbit normalization");
    }

    int records_past_threshold = 0;
    auto monitor = [&](bool& stop) {
        if (!state_finite(s)) {
            out.blew_up = true;
            out.blowup_step = s.n;
            stop = true;
            return;
        }
        FirstIntegrals fi = first_integrals(s, pot);
        DiagnosticsRecord rec;
        rec.t = s.t();
        rec.energy = fi.energy;
        rec.charge = fi.charge;
        rec.angmom = fi.angmom;
        rec.momentum_x = fi.momentum_x;
        rec.momentum_y = fi.momentum_y;
        if (plan.orbit) {
            OrbitSample<Grid> ref_now = eval_orbit(*plan.orbit, s.grid, s.t());
            OrbitSample<Grid> ref_half = eval_orbit(*plan.orbit, s.grid, (s.n - 0.5) * s.dt);
            rec.delta_os = (discrete_h1_dist(s.grid, s.psi, ref_now.psi) +
                            discrete_l2_dist(s.grid, s.psi_t, ref_half.psi_t)) /
                           (den_field + den_vel);
        }
        out.records.push_back(rec);
        if (rec.delta_os > plan.stop_threshold) {
            if (++records_past_threshold > plan.grace_records) {
                out.stopped_early = true;
                stop = true;
            }
        }
    };

    std::vector<Complex> scratch;
    with_fast_potential(pot, [&](auto f) {
        for (std::int64_t k = 0; k < steps; ++k) {
            if (s.n % plan.cadence == 0) {
                bool stop = false;
                monitor(stop);
                if (stop) return;
            }
            leapfrog_step_inplace(s, f, scratch);
        }
        bool stop = false;
        monitor(stop);
    });
    out.state = std::move(s);
    return out;
}

}  // namespace hylo
