#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hylo/common.hpp"

namespace hylo {

// Uniform radial grid r_j = j dr, j = 0..J. J must be even so composite
// Simpson quadrature applies.
struct RadialGrid {
    double dr = 0.0;
    int J = 0;

    double r(int j) const { return j * dr; }
    double r_tilde() const { return J * dr; }

    void validate() const {
        if (!(dr > 0.0)) throw std::invalid_argument("RadialGrid: dr must be positive");
        if (J < 4) throw std::invalid_argument("RadialGrid: J must be >= 4");
        if (J % 2 != 0) throw std::runtime_error("quadrature parity error: J must be even");
    }
};

inline RadialGrid make_radial_grid(double r_tilde, double dr) {
    int J = 2 * static_cast<int>(std::lround(r_tilde / (2.0 * dr)));
    if (J < 4) J = 4;
    RadialGrid g{dr, J};
    g.validate();
    return g;
}

// A vortex/soliton candidate: amplitude samples u_j >= 0 on the grid,
// winding number ell, charge h and frequency omega < 0.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> u;
    int ell = 0;
    double h = 0.0;
    double omega = 0.0;
};

inline void validate_profile(const RadialProfile& p) {
    p.grid.validate();
    if (static_cast<int>(p.u.size()) != p.grid.J + 1)
        throw std::invalid_argument("RadialProfile: u size does not match grid");
    for (double v : p.u)
        if (!(v >= 0.0)) throw std::invalid_argument("RadialProfile: u must be non-negative");
    if (p.u.back() != 0.0) throw std::invalid_argument("RadialProfile: u must vanish at r_tilde");
    if (p.ell != 0 && p.u.front() != 0.0)
        throw std::invalid_argument("RadialProfile: u must vanish at r = 0 when ell != 0");
    if (!(p.h > 0.0)) throw std::invalid_argument("RadialProfile: h must be positive");
}

// Composite Simpson sum of nodal values with uniform spacing. The number of
// intervals (values.size() - 1) must be even.
inline double simpson_1d(const std::vector<double>& values, double spacing) {
    const std::size_t n = values.size();
    if (n < 3 || (n - 1) % 2 != 0)
        throw std::runtime_error("quadrature parity error: interval count must be even");
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < n; i += 2) odd += values[i];
    for (std::size_t i = 2; i + 1 < n; i += 2) even += values[i];
    return spacing / 3.0 * (values.front() + values.back() + 4.0 * odd + 2.0 * even);
}

// 2D polar integral of a radial density: 2 pi * Simpson over r of g(r) r dr.
template <class DensityFn>
double integrate_radial(const RadialGrid& grid, DensityFn&& g) {
    std::vector<double> vals(grid.J + 1);
    for (int j = 0; j <= grid.J; ++j) vals[j] = g(j) * grid.r(j);
    return two_pi * simpson_1d(vals, grid.dr);
}

// Radial derivative: 2nd-order central differences, 2nd-order one-sided at
// the endpoints.
inline std::vector<double> radial_derivative(const std::vector<double>& u, double dr) {
    const int n = static_cast<int>(u.size());
    std::vector<double> d(n);
    if (n < 3) throw std::invalid_argument("radial_derivative: need at least 3 nodes");
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr);
    for (int j = 1; j + 1 < n; ++j) d[j] = (u[j + 1] - u[j - 1]) / (2.0 * dr);
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dr);
    return d;
}

// --- profile file format -------------------------------------------------
// One header line `# h=<v> ell=<v> omega=<v> m=<v> dr=<v> J=<v>`, then rows
// `r,u` at full double precision. Round-trips bit-exactly.

inline void write_profile_csv(const std::string& path, const RadialProfile& p, double m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# h=" << fmt_g17(p.h) << " ell=" << p.ell << " omega=" << fmt_g17(p.omega)
        << " m=" << fmt_g17(m) << " dr=" << fmt_g17(p.grid.dr) << " J=" << p.grid.J << "\n";
    for (int j = 0; j <= p.grid.J; ++j)
        out << fmt_g17(p.grid.r(j)) << "," << fmt_g17(p.u[j]) << "\n";
}

struct ProfileFile {
    RadialProfile profile;
    double m = 1.0;
};

inline ProfileFile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#')
        throw std::runtime_error("profile file " + path + ": missing header");
    ProfileFile out;
    {
        std::istringstream hs(header.substr(1));
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            std::string key = tok.substr(0, eq);
            std::string val = tok.substr(eq + 1);
            if (key == "h") out.profile.h = std::strtod(val.c_str(), nullptr);
            else if (key == "ell") out.profile.ell = std::atoi(val.c_str());
            else if (key == "omega") out.profile.omega = std::strtod(val.c_str(), nullptr);
            else if (key == "m") out.m = std::strtod(val.c_str(), nullptr);
            else if (key == "dr") out.profile.grid.dr = std::strtod(val.c_str(), nullptr);
            else if (key == "J") out.profile.grid.J = std::atoi(val.c_str());
            else throw std::runtime_error("profile file " + path + ": unknown header key " + key);
        }
    }
    out.profile.grid.validate();
    out.profile.u.reserve(out.profile.grid.J + 1);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("profile file " + path + ": malformed row");
        out.profile.u.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
    }
    if (static_cast<int>(out.profile.u.size()) != out.profile.grid.J + 1)
        throw std::runtime_error("profile file " + path + ": row count does not match J");
    return out;
}

}  // namespace hylo
