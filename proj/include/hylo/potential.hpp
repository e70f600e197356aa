#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hylo/common.hpp"

namespace hylo {

// Scalar nonlinearity W(psi) = F(|psi|) with F(s) = m^2 s^2 / 2 + N(s).
// F must satisfy F(0) = F'(0) = 0 and F''(0) = m^2 > 0.
struct PotentialSpec {
    std::string name;
    double m = 1.0;
    std::function<double(double)> F;
    std::function<double(double)> Fprime;
    // F'(s)/s with its limit m^2 at s = 0; this is what the field update
    // needs, since W'(psi) = [F'(|psi|)/|psi|] psi.
    std::function<double(double)> Fprime_over_s;

    double N(double s) const { return F(s) - 0.5 * m * m * s * s; }
};

inline PotentialSpec make_log_potential() {
    PotentialSpec p;
    p.name = "log";
    p.m = 1.0;
    p.F = [](double s) { return s - std::log1p(s); };
    p.Fprime = [](double s) { return s / (1.0 + s); };
    p.Fprime_over_s = [](double s) { return 1.0 / (1.0 + s); };
    return p;
}

// Pure Klein-Gordon mass term, N == 0.
inline PotentialSpec make_linear_potential(double m = 1.0) {
    PotentialSpec p;
    p.name = "linear";
    p.m = m;
    double m2 = m * m;
    p.F = [m2](double s) { return 0.5 * m2 * s * s; };
    p.Fprime = [m2](double s) { return m2 * s; };
    p.Fprime_over_s = [m2](double) { return m2; };
    return p;
}

inline PotentialSpec make_potential_by_name(const std::string& name, double m = 1.0) {
    if (name == "log") return make_log_potential();
    if (name == "linear" || name == "free") return make_linear_potential(m);
    throw std::invalid_argument("unknown potential: " + name);
}

// Inlined evaluators for the builtin potentials; hot loops dispatch through
// these instead of the std::function members.
namespace fastpot {

struct Log {
    static double m2() { return 1.0; }
    static double F(double s) { return s - std::log1p(s); }
    static double Fprime(double s) { return s / (1.0 + s); }
    static double Fprime_over_s(double s) { return 1.0 / (1.0 + s); }
    static double N(double s) { return s - std::log1p(s) - 0.5 * s * s; }
};

struct Linear {
    double m2_;
    double m2() const { return m2_; }
    double F(double s) const { return 0.5 * m2_ * s * s; }
    double Fprime(double s) const { return m2_ * s; }
    double Fprime_over_s(double) const { return m2_; }
    double N(double) const { return 0.0; }
};

struct Generic {
    const PotentialSpec* p;
    double m2() const { return p->m * p->m; }
    double F(double s) const { return p->F(s); }
    double Fprime(double s) const { return p->Fprime(s); }
    double Fprime_over_s(double s) const { return p->Fprime_over_s(s); }
    double N(double s) const { return p->N(s); }
};

}  // namespace fastpot

template <class Fn>
decltype(auto) with_fast_potential(const PotentialSpec& pot, Fn&& fn) {
    if (pot.name == "log") return fn(fastpot::Log{});
    if (pot.name == "linear" || pot.name == "free") return fn(fastpot::Linear{pot.m * pot.m});
    return fn(fastpot::Generic{&pot});
}

struct AssumptionReport {
    // (W-i) positivity: F(s) >= 0 on the sample grid
    bool w1 = false;
    double w1_min_F = 0.0, w1_argmin = 0.0;
    // (W-ii) nondegeneracy: F(0) = F'(0) = 0, F''(0) = m^2 > 0
    bool w2 = false;
    double w2_F0 = 0.0, w2_Fprime0 = 0.0, w2_Fsecond0 = 0.0;
    // (W-iii) hylomorphy: some s0 > 0 with N(s0) < 0
    bool w3 = false;
    double w3_s0 = 0.0, w3_N_s0 = 0.0;
    // (W-iv)(a) growth |N'(s)| <= a s^(p-1) + b s^(q-1), least-squares fit
    // inflated by `headroom` to dominate all samples
    bool w4a = false;
    double w4a_a = 0.0, w4a_b = 0.0, w4a_p = 0.0, w4a_q = 0.0;
    double w4a_headroom = 0.0;
    // (W-iv)(b) some s1 > s0 with N'(s1) >= 0
    bool w4b = false;
    double w4b_s1 = 0.0;
    bool w4 = false;
    // (W-v) N(s) <= -s^(2+eps) on a sampled interval (0, s_small]
    bool w5 = false;
    double w5_s_small = 0.0, w5_eps = 0.0;

    bool core_ok() const { return w1 && w2 && w3; }
};

namespace detail {

inline void require_finite(double v, double s) {
    if (!std::isfinite(v)) {
        throw std::runtime_error("potential evaluation failure at s=" + fmt_g17(s));
    }
}

// Central second difference of F at 0. F extends analytically below 0 for
// the builtins; if F(-h) is not finite, falls back to an even extension
// (then only first-order accurate in h).
inline double second_diff_at_zero(const PotentialSpec& p, double h) {
    double fp = p.F(h);
    double f0 = p.F(0.0);
    double fm = p.F(-h);
    if (!std::isfinite(fm)) fm = fp;
    return (fp - 2.0 * f0 + fm) / (h * h);
}

}  // namespace detail

// Samples F and N over [0, s_max] and evaluates assumptions (W-i)-(W-v).
// p_growth/q_growth are the exponents used for the (W-iv)(a) fit.
inline AssumptionReport check_assumptions(const PotentialSpec& p, double s_max, int samples,
                                          double eps, double p_growth = 3.0,
                                          double q_growth = 3.0) {
    if (samples < 100) throw std::invalid_argument("check_assumptions: samples must be >= 100");
    if (!(s_max > 0.0)) throw std::invalid_argument("check_assumptions: s_max must be positive");
    if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("check_assumptions: eps must lie in (0,2)");

    AssumptionReport rep;
    const double ds = s_max / samples;
    std::vector<double> s(samples + 1), f(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        s[i] = i * ds;
        f[i] = p.F(s[i]);
        detail::require_finite(f[i], s[i]);
    }

    // (W-i)
    rep.w1_min_F = f[0];
    rep.w1_argmin = s[0];
    for (int i = 0; i <= samples; ++i) {
        if (f[i] < rep.w1_min_F) {
            rep.w1_min_F = f[i];
            rep.w1_argmin = s[i];
        }
    }
    rep.w1 = rep.w1_min_F >= -1e-12;

    // (W-ii): Richardson extrapolation of the central second difference,
    // steps 1e-3 and 5e-4.
    rep.w2_F0 = p.F(0.0);
    rep.w2_Fprime0 = p.Fprime(0.0);
    {
        const double h = 1e-3;
        double d1 = detail::second_diff_at_zero(p, h);
        double d2 = detail::second_diff_at_zero(p, 0.5 * h);
        rep.w2_Fsecond0 = (4.0 * d2 - d1) / 3.0;
    }
    const double m2 = p.m * p.m;
    rep.w2 = std::abs(rep.w2_F0) <= 1e-12 && std::abs(rep.w2_Fprime0) <= 1e-12 &&
             rep.w2_Fsecond0 > 0.0 && std::abs(rep.w2_Fsecond0 - m2) <= 1e-4 * std::max(1.0, m2);

    // (W-iii): scan N on the positive sample grid.
    rep.w3_N_s0 = 0.0;
    for (int i = 1; i <= samples; ++i) {
        double n = f[i] - 0.5 * m2 * s[i] * s[i];
        if (n < rep.w3_N_s0) {
            rep.w3_N_s0 = n;
            rep.w3_s0 = s[i];
        }
    }
    rep.w3 = rep.w3_N_s0 < 0.0;

    // N' on interior nodes by central differences.
    std::vector<double> sd, nd;
    sd.reserve(samples);
    nd.reserve(samples);
    for (int i = 1; i < samples; ++i) {
        double nprime = (f[i + 1] - f[i - 1]) / (2.0 * ds) - m2 * s[i];
        sd.push_back(s[i]);
        nd.push_back(nprime);
    }

    // (W-iv)(b)
    rep.w4b = false;
    for (std::size_t i = 0; i < sd.size(); ++i) {
        if (sd[i] > rep.w3_s0 && nd[i] >= 0.0) {
            rep.w4b = true;
            rep.w4b_s1 = sd[i];
            break;
        }
    }

    // (W-iv)(a): least-squares fit of |N'| by a s^(p-1) + b s^(q-1) with
    // a,b >= 0, then inflate until the bound dominates every sample. The
    // branch passes when the needed headroom is moderate (<= 100).
    {
        rep.w4a_p = p_growth;
        rep.w4a_q = q_growth;
        std::vector<double> d(sd.size());
        double dmax = 0.0;
        for (std::size_t i = 0; i < sd.size(); ++i) {
            d[i] = std::abs(nd[i]);
            dmax = std::max(dmax, d[i]);
        }
        if (dmax == 0.0) {
            rep.w4a = true;  // |N'| == 0, bound holds trivially
            rep.w4a_headroom = 1.0;
        } else {
            auto basis1 = [&](double x) { return std::pow(x, p_growth - 1.0); };
            auto basis2 = [&](double x) { return std::pow(x, q_growth - 1.0); };
            double a = 0.0, b = 0.0;
            if (p_growth == q_growth) {
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < sd.size(); ++i) {
                    double phi = basis1(sd[i]);
                    num += d[i] * phi;
                    den += phi * phi;
                }
                a = den > 0.0 ? std::max(0.0, num / den) : 0.0;
            } else {
                double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
                for (std::size_t i = 0; i < sd.size(); ++i) {
                    double f1 = basis1(sd[i]), f2 = basis2(sd[i]);
                    a11 += f1 * f1;
                    a12 += f1 * f2;
                    a22 += f2 * f2;
                    r1 += d[i] * f1;
                    r2 += d[i] * f2;
                }
                double det = a11 * a22 - a12 * a12;
                if (std::abs(det) > 1e-300) {
                    a = (r1 * a22 - r2 * a12) / det;
                    b = (r2 * a11 - r1 * a12) / det;
                }
                if (a < 0.0) {
                    a = 0.0;
                    b = a22 > 0 ? std::max(0.0, r2 / a22) : 0.0;
                } else if (b < 0.0) {
                    b = 0.0;
                    a = a11 > 0 ? std::max(0.0, r1 / a11) : 0.0;
                }
            }
            double kappa = 0.0;
            bool dominated_somewhere = false;
            for (std::size_t i = 0; i < sd.size(); ++i) {
                double model = a * basis1(sd[i]) + b * basis2(sd[i]);
                if (model > 0.0) {
                    kappa = std::max(kappa, d[i] / model);
                    dominated_somewhere = true;
                } else if (d[i] > 0.0) {
                    kappa = std::numeric_limits<double>::infinity();
                }
            }
            if (!dominated_somewhere) kappa = std::numeric_limits<double>::infinity();
            rep.w4a_a = a;
            rep.w4a_b = b;
            rep.w4a_headroom = kappa;
            rep.w4a = std::isfinite(kappa) && kappa <= 100.0;
        }
    }
    rep.w4 = rep.w4a || rep.w4b;

    // (W-v): find the largest s* on a fine log grid such that
    // N(s) <= -s^(2+eps) for every grid point in (0, s*].
    {
        rep.w5_eps = eps;
        const int nfine = std::max(400, 4 * samples);
        const double s_lo = std::max(1e-7, 1e-7 * s_max);
        const double ratio = std::log(s_max / s_lo) / (nfine - 1);
        int ok_prefix = -1;  // last index (from the bottom) of the valid prefix
        for (int i = 0; i < nfine; ++i) {
            double si = s_lo * std::exp(i * ratio);
            double n = p.F(si) - 0.5 * m2 * si * si;
            detail::require_finite(n, si);
            if (n <= -std::pow(si, 2.0 + eps)) {
                if (ok_prefix == i - 1) ok_prefix = i;
            } else if (ok_prefix == i - 1) {
                break;
            }
        }
        if (ok_prefix >= 10) {
            rep.w5 = true;
            rep.w5_s_small = s_lo * std::exp(ok_prefix * ratio);
        }
    }
    return rep;
}

inline std::string format_report(const AssumptionReport& r) {
    auto line = [](const std::string& k, bool v, const std::string& extra) {
        return k + ": " + (v ? "true" : "false") + (extra.empty() ? "" : " (" + extra + ")") + "\n";
    };
    std::string out;
    out += line("W-i", r.w1, "min F = " + fmt_g17(r.w1_min_F) + " at s = " + fmt_g17(r.w1_argmin));
    out += line("W-ii", r.w2, "F''(0) = " + fmt_g17(r.w2_Fsecond0));
    out += line("W-iii", r.w3, "s0 = " + fmt_g17(r.w3_s0) + ", N(s0) = " + fmt_g17(r.w3_N_s0));
    out += line("W-iv(a)", r.w4a,
                "p = " + fmt_g17(r.w4a_p) + ", q = " + fmt_g17(r.w4a_q) + ", a = " + fmt_g17(r.w4a_a) +
                    ", b = " + fmt_g17(r.w4a_b) + ", headroom = " + fmt_g17(r.w4a_headroom));
    out += line("W-iv(b)", r.w4b, r.w4b ? "s1 = " + fmt_g17(r.w4b_s1) : std::string());
    out += line("W-iv", r.w4, "");
    out += line("W-v", r.w5, r.w5 ? "s_small = " + fmt_g17(r.w5_s_small) : std::string());
    return out;
}

}  // namespace hylo
