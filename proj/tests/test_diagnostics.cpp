#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hylo/hylo.hpp"

using namespace hylo;

namespace {

const RadialProfile& soliton100() {
    static RadialProfile p = [] {
        FlowConfig cfg;
        cfg.r_tilde = 45.0;
        cfg.dr = 0.1;
        cfg.e_omega = 1e-10;
        cfg.e_lambda = 1e-13;
        FlowTrace tr = solve_soliton(make_log_potential(), 100.0, cfg);
        REQUIRE(tr.converged);
        return tr.final;
    }();
    return p;
}

const RadialProfile& vortex4() {
    static RadialProfile p = [] {
        FlowConfig cfg;
        cfg.r_tilde = 55.0;
        cfg.dr = 0.2;
        cfg.e_omega = 1e-10;
        cfg.e_lambda = 1e-13;
        FlowTrace tr = solve_profile(make_log_potential(), 4, 100.0, cfg);
        REQUIRE(tr.converged);
        return tr.final;
    }();
    return p;
}

}  // namespace

TEST_CASE("real static field has zero charge, angular momentum and momentum") {
    PotentialSpec pot = make_log_potential();
    TorusGrid g = make_torus_grid(12.0, 0.5);
    TorusState s;
    s.grid = g;
    s.psi.resize(g.size());
    s.psi_t.assign(g.size(), Complex{0.0, 0.0});
    s.dt = 0.05;
    for (int iy = 0; iy < g.Nx; ++iy)
        for (int ix = 0; ix < g.Nx; ++ix) {
            double X = g.x(ix) - 6.0, Y = g.y(iy) - 6.0;
            s.psi[g.idx(ix, iy)] = Complex{std::exp(-(X * X + Y * Y) / 4.0), 0.0};
        }
    // psi real, psi_t = 0: the centered velocity is dt/2 * (real accel), so
    // every sesquilinear integrand is real * real -> the integrals vanish
    FirstIntegrals fi = first_integrals(s, pot);
    CHECK(fi.charge == 0.0);  // Im of real products vanishes identically
    // the remaining integrals cancel by parity, surviving only at roundoff
    CHECK(std::abs(fi.angmom) <= 1e-14 * fi.energy);
    CHECK(std::abs(fi.momentum_x) <= 1e-14 * fi.energy);
    CHECK(std::abs(fi.momentum_y) <= 1e-14 * fi.energy);
    CHECK(fi.energy > 0.0);
}

TEST_CASE("standing soliton: charge equals h within quadrature error") {
    PotentialSpec pot = make_log_potential();
    const RadialProfile& sol = soliton100();
    auto charge_at = [&](double dx) {
        TorusGrid g = make_torus_grid(64.0, dx);
        TheoreticalOrbit orb = make_translating_orbit(sol, 0.0, 32.0, 32.0);
        TorusState st = init_from_orbit(orb, g, dx / 10.0);
        return first_integrals(st, pot).charge;
    };
    double q1 = charge_at(1.0), q2 = charge_at(0.5);
    CHECK(q1 == doctest::Approx(sol.h).epsilon(1e-3));
    CHECK(q2 == doctest::Approx(sol.h).epsilon(1e-3));
    // refinement shrinks the defect (dt enters at second order through the
    // centered velocity)
    CHECK(std::abs(q1 - sol.h) / std::abs(q2 - sol.h) >= 3.0);
}

TEST_CASE("rotating vortex: angular momentum equals ell times charge") {
    PotentialSpec pot = make_log_potential();
    const RadialProfile& v = vortex4();
    TheoreticalOrbit orb = make_rotating_orbit(v);
    auto ratio_defect = [&](double dr) {
        PolarGrid g = polar_for_vortex(v, dr);
        PolarState st = init_from_orbit(orb, g, dr / 50.0);
        FirstIntegrals fi = first_integrals(st, pot);
        CHECK(fi.charge == doctest::Approx(v.h).epsilon(2e-3));
        return std::abs(fi.angmom - v.ell * fi.charge) / std::abs(fi.angmom);
    };
    double d1 = ratio_defect(1.0);
    double d2 = ratio_defect(0.5);
    CHECK(d1 < 0.01);
    CHECK(d2 < d1);
}

TEST_CASE("delta_OS: zero at init, scale invariance, phase flip") {
    const RadialProfile& sol = soliton100();
    TorusGrid g = make_torus_grid(64.0, 0.5);
    TheoreticalOrbit orb = make_translating_orbit(sol, 0.0, 32.0, 32.0);
    TorusState st = init_from_orbit(orb, g, 0.05);
    CHECK(orbital_stability_norm(st, orb) == 0.0);

    // rescaling state and orbit by a common factor leaves delta_OS unchanged
    TorusState scaled = st;
    for (auto& v : scaled.psi) v *= 2.0;
    for (auto& v : scaled.psi_t) v *= 2.0;
    RadialProfile sol2 = sol;
    for (auto& u : sol2.u) u *= 2.0;
    TheoreticalOrbit orb2 = make_translating_orbit(sol2, 0.0, 32.0, 32.0);
    orb2.omega = sol.omega;
    CHECK(orbital_stability_norm(scaled, orb2) <= 1e-13);

    // a half-period phase flip drives the field fraction to exactly 2
    TorusState flipped = st;
    for (auto& v : flipped.psi) v = -v;
    OsNormTerms terms = orbital_stability_terms(flipped, orb);
    CHECK(terms.field_fraction() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("first integrals are invariant under whole-cell translations") {
    PotentialSpec pot = make_log_potential();
    const RadialProfile& sol = soliton100();
    TorusGrid g = make_torus_grid(64.0, 1.0);
    TheoreticalOrbit orb = make_translating_orbit(sol, 0.5, 32.0, 32.0);
    TorusState st = init_from_orbit(orb, g, 0.1);
    FirstIntegrals a = first_integrals(st, pot);

    TorusState shifted = st;
    const int sx = 13, sy = 7;
    for (int iy = 0; iy < g.Nx; ++iy)
        for (int ix = 0; ix < g.Nx; ++ix) {
            int jx = (ix + sx) % g.Nx, jy = (iy + sy) % g.Nx;
            shifted.psi[g.idx(jx, jy)] = st.psi[g.idx(ix, iy)];
            shifted.psi_t[g.idx(jx, jy)] = st.psi_t[g.idx(ix, iy)];
        }
    FirstIntegrals b = first_integrals(shifted, pot);
    CHECK(b.energy == doctest::Approx(a.energy).epsilon(1e-13));
    CHECK(b.charge == doctest::Approx(a.charge).epsilon(1e-13));
    CHECK(b.momentum_x == doctest::Approx(a.momentum_x).epsilon(1e-13));
    // angular momentum is taken about the fixed domain center, so it is the
    // one integral a translation may change
}

TEST_CASE("drift report: constant series, synthetic rupture, empty guard") {
    std::vector<DiagnosticsRecord> recs;
    for (int k = 0; k < 10; ++k) {
        DiagnosticsRecord r;
        r.t = 0.5 * k;
        r.energy = 5.0;
        r.charge = 2.0;
        r.angmom = -1.0;
        r.delta_os = k >= 4 ? 0.7 : 0.1;  // crosses 0.5 at the 5th record
        recs.push_back(r);
    }
    DriftReport rep = drift_report(recs, 0.5);
    CHECK(rep.energy.min_rel_dev == 0.0);
    CHECK(rep.energy.max_rel_dev == 0.0);
    CHECK(rep.charge.min_rel_dev == 0.0);
    REQUIRE(rep.rupture_time.has_value());
    CHECK(*rep.rupture_time == doctest::Approx(recs[4].t));

    CHECK_THROWS_AS(drift_report({recs[0]}, 0.5), std::invalid_argument);
}

TEST_CASE("degenerate orbit normalization is reported") {
    RadialProfile zero = soliton100();
    for (auto& u : zero.u) u = 0.0;
    zero.u[1] = 1e-300;  // effectively vanishing orbit
    TorusGrid g = make_torus_grid(32.0, 1.0);
    TheoreticalOrbit orb = make_translating_orbit(zero, 0.0, 16.0, 16.0);
    TorusState st;
    st.grid = g;
    st.psi.assign(g.size(), Complex{0.0, 0.0});
    st.psi_t.assign(g.size(), Complex{0.0, 0.0});
    st.dt = 0.1;
    CHECK_THROWS_WITH_AS(orbital_stability_norm(st, orb),
                         doctest::Contains("degenerate orbit normalization"), std::runtime_error);
}

TEST_CASE("disjoint supports: delta_OS plateaus near sqrt(2)") {
    // synthetic decorrelation: the state is the orbit sampled far away
    const RadialProfile& sol = soliton100();
    TorusGrid g = make_torus_grid(96.0, 1.0);
    TheoreticalOrbit center = make_translating_orbit(sol, 0.0, 48.0, 48.0);
    TheoreticalOrbit offset = make_translating_orbit(sol, 0.0, 8.0, 8.0);
    TorusState st = init_from_orbit(offset, g, 0.1);
    double dos = orbital_stability_norm(st, center);
    CHECK(dos > 1.2);
    CHECK(dos < 1.7);
}
