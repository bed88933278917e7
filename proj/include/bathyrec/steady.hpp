#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bathyrec/grid.hpp"
#include "bathyrec/measurement.hpp"

namespace bathyrec {

struct SteadyReconstruction {
    std::vector<double> h;
    std::vector<double> b;
};

/// Closed-form steady reconstruction: 1/h^2 = 1/h(a1)^2 - (2g/q^2)(zeta - zeta(a1)),
/// then b = zeta - h. The surface is anchored at its extrapolated inlet value.
inline SteadyReconstruction steady_analytic(const std::vector<double>& zeta, double q_in,
                                            double h_a1, const Grid& grid, double g,
                                            double zeta_a1) {
    if (q_in == 0.0) throw std::invalid_argument("steady_analytic: zero discharge");
    if (!(h_a1 > 0.0)) throw std::invalid_argument("steady_analytic: nonpositive inlet depth");
    const int n = grid.n_cells;
    if (static_cast<int>(zeta.size()) != n)
        throw std::invalid_argument("steady_analytic: surface not grid-aligned");
    SteadyReconstruction r;
    r.h.resize(n);
    r.b.resize(n);
    const double inv_h1_sq = 1.0 / (h_a1 * h_a1);
    const double coef = 2.0 * g / (q_in * q_in);
    for (int j = 0; j < n; ++j) {
        const double radicand = inv_h1_sq - coef * (zeta[j] - zeta_a1);
        if (!(radicand > 0.0))
            throw std::runtime_error("steady_analytic: nonpositive radicand at cell " + std::to_string(j) +
                                     " (data inconsistent with a steady flow)");
        r.h[j] = 1.0 / std::sqrt(radicand);
        r.b[j] = zeta[j] - r.h[j];
    }
    return r;
}

/// Overload anchoring the surface at its extrapolated inlet value.
inline SteadyReconstruction steady_analytic(const std::vector<double>& zeta, double q_in,
                                            double h_a1, const Grid& grid, double g) {
    return steady_analytic(zeta, q_in, h_a1, grid, g, extrapolate_to_inlet(zeta, grid));
}

/// Discharge-free steady variant: the inlet discharge is recovered from the
/// bed being known at a second point x_ref, then the closed form applies.
/// q^2 = -2g (zeta(x_ref) - zeta(a1)) h(a1)^2 h_ref^2 / (h(a1)^2 - h_ref^2).
inline SteadyReconstruction steady_discharge_free(const std::vector<double>& zeta, double h_a1,
                                                  double x_ref, double h_ref, const Grid& grid,
                                                  double g, double zeta_a1) {
    const int n = grid.n_cells;
    if (static_cast<int>(zeta.size()) != n)
        throw std::invalid_argument("steady_discharge_free: surface not grid-aligned");
    int j_ref = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double d = std::abs(grid.center(j) - x_ref);
        if (d < best) { best = d; j_ref = j; }
    }
    const double dz = zeta[j_ref] - zeta_a1;
    if (dz == 0.0)
        throw std::invalid_argument("steady_discharge_free: zeta(x_ref) equals zeta(a1)");
    if (h_a1 == h_ref)
        throw std::invalid_argument("steady_discharge_free: h(a1) equals h(x_ref)");
    const double q_sq = -2.0 * g * dz * h_a1 * h_a1 * h_ref * h_ref / (h_a1 * h_a1 - h_ref * h_ref);
    if (!(q_sq > 0.0))
        throw std::runtime_error("steady_discharge_free: recovered q^2 is nonpositive (inconsistent data)");
    return steady_analytic(zeta, std::sqrt(q_sq), h_a1, grid, g, zeta_a1);
}

inline SteadyReconstruction steady_discharge_free(const std::vector<double>& zeta, double h_a1,
                                                  double x_ref, double h_ref, const Grid& grid,
                                                  double g) {
    return steady_discharge_free(zeta, h_a1, x_ref, h_ref, grid, g, extrapolate_to_inlet(zeta, grid));
}

} // namespace bathyrec
