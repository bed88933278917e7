#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bathyrec/bathymetry.hpp"
#include "bathyrec/flow.hpp"
#include "bathyrec/forcing.hpp"
#include "bathyrec/grid.hpp"

namespace bathyrec {

/// Nonuniform three-point first derivative at the middle sample.
/// Exact on quadratics for any positive spacings dm, dp.
inline double dt_nonuniform(double f_prev, double f_curr, double f_next, double dm, double dp) {
    if (!(dm > 0.0) || !(dp > 0.0))
        throw std::invalid_argument("dt_nonuniform: spacings must be positive");
    return (-dp * dp * f_prev + (dp * dp - dm * dm) * f_curr + dm * dm * f_next) /
           (dm * dp * (dm + dp));
}

/// Value at t of the unique quadratic through (t0,f0), (t1,f1), (t2,f2).
inline double ghost_extrapolate(double t0, double t1, double t2,
                                double f0, double f1, double f2, double t) {
    const double d01 = t0 - t1, d02 = t0 - t2, d12 = t1 - t2;
    if (d01 == 0.0 || d02 == 0.0 || d12 == 0.0)
        throw std::invalid_argument("ghost_extrapolate: coincident abscissae");
    const double l0 = (t - t1) * (t - t2) / (d01 * d02);
    const double l1 = (t - t0) * (t - t2) / (-d01 * d12);
    const double l2 = (t - t0) * (t - t1) / (d02 * d12);
    return l0 * f0 + l1 * f1 + l2 * f2;
}

/// Single-instant measurement set: the surface, its first two time
/// derivatives per cell, the inlet discharge data and the upstream bed value.
struct SurfaceSnapshot {
    double t_star = 0.0;
    std::vector<double> zeta;
    std::vector<double> dzeta_dt;
    std::vector<double> d2zeta_dt2;
    double q_in = 0.0;
    double dq_in_dt = 0.0;
    double b_a1 = 0.0;
};

namespace detail {

/// d(zeta)/dt for every cell at stored level n, using one ghost level just
/// outside each end of the mesh (quadratic extrapolation from the three
/// adjacent interior levels).
template <class Accessor>
std::vector<double> level_time_derivative(const std::vector<double>& t, Accessor&& value,
                                          int n_cells, int n) {
    const int last = static_cast<int>(t.size()) - 1;
    std::vector<double> out(n_cells);
    if (n > 0 && n < last) {
        const double dm = t[n] - t[n - 1], dp = t[n + 1] - t[n];
        for (int j = 0; j < n_cells; ++j)
            out[j] = dt_nonuniform(value(n - 1, j), value(n, j), value(n + 1, j), dm, dp);
    } else if (n == last) {
        const double tg = 2.0 * t[last] - t[last - 1];
        const double dm = t[last] - t[last - 1], dp = tg - t[last];
        for (int j = 0; j < n_cells; ++j) {
            const double fg = ghost_extrapolate(t[last - 2], t[last - 1], t[last],
                                                value(last - 2, j), value(last - 1, j), value(last, j), tg);
            out[j] = dt_nonuniform(value(last - 1, j), value(last, j), fg, dm, dp);
        }
    } else { // n == 0
        const double tg = 2.0 * t[0] - t[1];
        const double dm = t[0] - tg, dp = t[1] - t[0];
        for (int j = 0; j < n_cells; ++j) {
            const double fg = ghost_extrapolate(t[0], t[1], t[2],
                                                value(0, j), value(1, j), value(2, j), tg);
            out[j] = dt_nonuniform(fg, value(0, j), value(1, j), dm, dp);
        }
    }
    return out;
}

} // namespace detail

/// Builds the measurement set at a stored time level: d(zeta)/dt via the
/// nonuniform stencil, d2(zeta)/dt2 by differencing the d(zeta)/dt series,
/// and the inlet data from the forcing law through the same stencil.
inline SurfaceSnapshot extract_snapshot(const FlowHistory& hist, double t_star,
                                        const BathymetryField& bed, const BoundaryForcing& forcing,
                                        const Grid& grid) {
    if (hist.levels() < 3)
        throw std::invalid_argument("extract_snapshot: history needs at least 3 levels");
    if (!forcing.inlet_q)
        throw std::invalid_argument("extract_snapshot: scenario lacks an inlet discharge law");
    const auto& t = hist.times;
    const int last = hist.levels() - 1;
    const double tol = 1e-9 * std::max(1.0, std::abs(t.back()));
    const int ns = hist.index_of_time(t_star, tol);
    const int n_cells = grid.n_cells;
    if (static_cast<int>(hist.frames[ns].zeta.size()) != n_cells)
        throw std::invalid_argument("extract_snapshot: history is not aligned with the grid");

    auto zeta_at = [&](int n, int j) { return hist.frames[n].zeta[j]; };

    SurfaceSnapshot s;
    s.t_star = t[ns];
    s.zeta = hist.frames[ns].zeta;
    s.dzeta_dt = detail::level_time_derivative(t, zeta_at, n_cells, ns);

    // second derivative: the same stencil applied to the dzeta/dt series
    if (ns > 0 && ns < last) {
        const auto dzm = detail::level_time_derivative(t, zeta_at, n_cells, ns - 1);
        const auto dzp = detail::level_time_derivative(t, zeta_at, n_cells, ns + 1);
        const double dm = t[ns] - t[ns - 1], dp = t[ns + 1] - t[ns];
        s.d2zeta_dt2.resize(n_cells);
        for (int j = 0; j < n_cells; ++j)
            s.d2zeta_dt2[j] = dt_nonuniform(dzm[j], s.dzeta_dt[j], dzp[j], dm, dp);
    } else if (ns == last) {
        if (hist.levels() < 4)
            throw std::invalid_argument("extract_snapshot: history too short for an endpoint snapshot");
        const auto dzm2 = detail::level_time_derivative(t, zeta_at, n_cells, last - 2);
        const auto dzm1 = detail::level_time_derivative(t, zeta_at, n_cells, last - 1);
        const double tg = 2.0 * t[last] - t[last - 1];
        const double dm = t[last] - t[last - 1], dp = tg - t[last];
        s.d2zeta_dt2.resize(n_cells);
        for (int j = 0; j < n_cells; ++j) {
            const double dzg = ghost_extrapolate(t[last - 2], t[last - 1], t[last],
                                                 dzm2[j], dzm1[j], s.dzeta_dt[j], tg);
            s.d2zeta_dt2[j] = dt_nonuniform(dzm1[j], s.dzeta_dt[j], dzg, dm, dp);
        }
    } else {
        if (hist.levels() < 4)
            throw std::invalid_argument("extract_snapshot: history too short for an endpoint snapshot");
        const auto dzp1 = detail::level_time_derivative(t, zeta_at, n_cells, 1);
        const auto dzp2 = detail::level_time_derivative(t, zeta_at, n_cells, 2);
        const double tg = 2.0 * t[0] - t[1];
        const double dm = t[0] - tg, dp = t[1] - t[0];
        s.d2zeta_dt2.resize(n_cells);
        for (int j = 0; j < n_cells; ++j) {
            const double dzg = ghost_extrapolate(t[0], t[1], t[2],
                                                 s.dzeta_dt[j], dzp1[j], dzp2[j], tg);
            s.d2zeta_dt2[j] = dt_nonuniform(dzg, s.dzeta_dt[j], dzp1[j], dm, dp);
        }
    }

    // inlet data from the forcing law through the same time stencil
    const auto& qin = *forcing.inlet_q;
    s.q_in = qin(t[ns]);
    double tm, tp;
    if (ns > 0 && ns < last) {
        tm = t[ns - 1]; tp = t[ns + 1];
    } else if (ns == last) {
        tm = t[last - 1]; tp = 2.0 * t[last] - t[last - 1];
    } else {
        tm = 2.0 * t[0] - t[1]; tp = t[1];
    }
    s.dq_in_dt = dt_nonuniform(qin(tm), s.q_in, qin(tp), t[ns] - tm, tp - t[ns]);
    s.b_a1 = bed.b_iface.front();
    return s;
}

/// Same stencil with the roles of time and space switched: centered interior
/// differences on the uniform mesh, ghost values by quadratic extrapolation.
inline std::vector<double> dx_spatial(const std::vector<double>& f, double dx) {
    const int n = static_cast<int>(f.size());
    if (n < 3) throw std::invalid_argument("dx_spatial: need at least 3 cells");
    std::vector<double> out(n);
    for (int j = 1; j + 1 < n; ++j) out[j] = (f[j + 1] - f[j - 1]) / (2.0 * dx);
    const double gl = ghost_extrapolate(0.0, 1.0, 2.0, f[0], f[1], f[2], -1.0);
    const double gr = ghost_extrapolate(0.0, 1.0, 2.0, f[n - 3], f[n - 2], f[n - 1], 3.0);
    out[0] = (f[1] - gl) / (2.0 * dx);
    out[n - 1] = (gr - f[n - 2]) / (2.0 * dx);
    return out;
}

/// Quadratic extrapolation of the first three cell values to the upstream
/// boundary a1 (the inverse marches anchor there).
inline double extrapolate_to_inlet(const std::vector<double>& f, const Grid& grid) {
    if (f.size() < 3) throw std::invalid_argument("extrapolate_to_inlet: need at least 3 cells");
    return ghost_extrapolate(grid.center(0), grid.center(1), grid.center(2),
                             f[0], f[1], f[2], grid.a1);
}

} // namespace bathyrec
