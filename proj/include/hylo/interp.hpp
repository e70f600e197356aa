#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hylo/radial.hpp"

namespace hylo {

// Cubic (4-point Lagrange) interpolation of a radial profile on its uniform
// grid. Queries beyond the outer node return 0; near the axis the stencil is
// reflected evenly for ell = 0 profiles and clamped one-sided otherwise.
class ProfileInterpolant {
  public:
    ProfileInterpolant() = default;
    ProfileInterpolant(std::vector<double> u, double dr, int ell)
        : u_(std::move(u)), dr_(dr), ell_(ell) {
        if (u_.size() < 4) throw std::invalid_argument("ProfileInterpolant: need >= 4 nodes");
    }

    double r_max() const { return dr_ * (static_cast<double>(u_.size()) - 1.0); }
    double dr() const { return dr_; }
    int ell() const { return ell_; }
    const std::vector<double>& samples() const { return u_; }

    double value(double r) const {
        double t;
        double s[4];
        if (!stencil(r, s, t)) return 0.0;
        // Lagrange basis on nodes t = -1, 0, 1, 2
        double a = -t * (t - 1.0) * (t - 2.0) / 6.0;
        double b = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        double c = -(t + 1.0) * t * (t - 2.0) / 2.0;
        double d = (t + 1.0) * t * (t - 1.0) / 6.0;
        return a * s[0] + b * s[1] + c * s[2] + d * s[3];
    }

    double derivative(double r) const {
        double t;
        double s[4];
        if (!stencil(r, s, t)) return 0.0;
        double a = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0;
        double b = (3.0 * t * t - 4.0 * t - 1.0) / 2.0;
        double c = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0;
        double d = (3.0 * t * t - 1.0) / 6.0;
        return (a * s[0] + b * s[1] + c * s[2] + d * s[3]) / dr_;
    }

    double peak_value() const {
        double m = 0.0;
        for (double v : u_) m = std::max(m, v);
        return m;
    }

    // Largest radius where the profile still exceeds frac * max(u).
    double support_radius(double frac) const {
        double thr = frac * peak_value();
        for (std::size_t j = u_.size(); j-- > 0;)
            if (u_[j] > thr) return dr_ * static_cast<double>(j);
        return 0.0;
    }

    // First radius (from the axis) where the profile exceeds frac * max(u).
    double inner_rise_radius(double frac) const {
        double thr = frac * peak_value();
        for (std::size_t j = 0; j < u_.size(); ++j)
            if (u_[j] > thr) return dr_ * static_cast<double>(j);
        return r_max();
    }

  private:
    bool stencil(double r, double s[4], double& t) const {
        if (r < 0.0) r = -r;
        const int n = static_cast<int>(u_.size());
        if (r >= r_max()) return false;
        double x = r / dr_;
        int j = static_cast<int>(std::floor(x));
        if (j > n - 2) j = n - 2;
        t = x - j;
        for (int k = 0; k < 4; ++k) {
            int idx = j - 1 + k;
            if (idx < 0) {
                // even reflection for axis-regular profiles, clamp otherwise
                s[k] = ell_ == 0 ? u_[-idx] : u_[0];
            } else if (idx >= n) {
                s[k] = 0.0;
            } else {
                s[k] = u_[idx];
            }
        }
        return true;
    }

    std::vector<double> u_;
    double dr_ = 1.0;
    int ell_ = 0;
};

}  // namespace hylo
