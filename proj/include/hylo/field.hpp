#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hylo/common.hpp"
#include "hylo/grids.hpp"

namespace hylo {

// Leap-frog field state: psi at t = n dt, psi_t staggered at t = (n - 1/2) dt.
template <class Grid>
struct FieldState {
    Grid grid;
    std::vector<Complex> psi;
    std::vector<Complex> psi_t;
    std::int64_t n = 0;
    double dt = 0.0;

    double t() const { return n * dt; }
};

using TorusState = FieldState<TorusGrid>;
using PolarState = FieldState<PolarGrid>;

template <class Grid>
bool state_finite(const FieldState<Grid>& s) {
    for (const Complex& v : s.psi)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    for (const Complex& v : s.psi_t)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace hylo
