#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bathyrec/grid.hpp"
#include "bathyrec/measurement.hpp"

namespace bathyrec {

struct ReconstructOptions {
    double beta_warn = 0.1; // nondegeneracy advisory threshold on min q
};

struct ReconstructionResult {
    std::vector<double> q_rec;
    std::vector<double> dq_dt_rec;
    std::vector<double> phi;
    std::vector<double> b_rec;
    double t_star = 0.0;
    double min_q = 0.0;
    bool nondegeneracy_warning = false;
    bool degenerate = false;
    int degenerate_cell = -1;
};

/// Marches the continuity relation q_x = -dzeta/dt from the inlet value:
/// a trapezoidal half-step from a1 to the first center (boundary integrand
/// extrapolated), then trapezoidal full steps between centers.
inline std::vector<double> reconstruct_discharge(const SurfaceSnapshot& s, const Grid& grid) {
    const int n = grid.n_cells;
    if (static_cast<int>(s.dzeta_dt.size()) != n)
        throw std::invalid_argument("reconstruct_discharge: snapshot not grid-aligned");
    std::vector<double> q(n);
    const double d_a1 = extrapolate_to_inlet(s.dzeta_dt, grid);
    q[0] = s.q_in - 0.5 * grid.dx * 0.5 * (d_a1 + s.dzeta_dt[0]);
    for (int j = 0; j + 1 < n; ++j)
        q[j + 1] = q[j] - 0.5 * grid.dx * (s.dzeta_dt[j] + s.dzeta_dt[j + 1]);
    return q;
}

/// Same march with d2zeta/dt2 as the integrand, anchored at dq/dt(t*, a1).
inline std::vector<double> reconstruct_dq_dt(const SurfaceSnapshot& s, const Grid& grid) {
    const int n = grid.n_cells;
    if (static_cast<int>(s.d2zeta_dt2.size()) != n)
        throw std::invalid_argument("reconstruct_dq_dt: snapshot not grid-aligned");
    std::vector<double> dq(n);
    const double d_a1 = extrapolate_to_inlet(s.d2zeta_dt2, grid);
    dq[0] = s.dq_in_dt - 0.5 * grid.dx * 0.5 * (d_a1 + s.d2zeta_dt2[0]);
    for (int j = 0; j + 1 < n; ++j)
        dq[j + 1] = dq[j] - 0.5 * grid.dx * (s.d2zeta_dt2[j] + s.d2zeta_dt2[j + 1]);
    return dq;
}

struct PhiMarch {
    std::vector<double> phi;
    bool degenerate = false;
    int degenerate_cell = -1;
};

/// Heun predictor-corrector march of phi_x = -g zeta_x q^2 / phi - q_t,
/// anchored at phi(a1) = q(a1)^2 / h(a1). A phi at or below the guard value
/// flags the reconstruction degenerate instead of dividing onward.
inline PhiMarch solve_phi(const SurfaceSnapshot& s, const std::vector<double>& q_rec,
                          const std::vector<double>& dq_dt_rec, const Grid& grid, double g) {
    const int n = grid.n_cells;
    const std::vector<double> dzeta_dx = dx_spatial(s.zeta, grid.dx);
    const double zeta_a1 = extrapolate_to_inlet(s.zeta, grid);
    const double dzdx_a1 = extrapolate_to_inlet(dzeta_dx, grid);
    const double h_a1 = zeta_a1 - s.b_a1;
    if (!(h_a1 > 0.0))
        throw std::invalid_argument("solve_phi: nonpositive inlet depth");

    PhiMarch m;
    m.phi.assign(n, 0.0);
    const double phi_a1 = s.q_in * s.q_in / h_a1;
    const double phi_min = 1e-12 * std::max(phi_a1, 1.0);
    auto rhs = [&](double dzdx, double qq, double dqq, double phi) {
        return -g * dzdx * qq * qq / phi - dqq;
    };
    auto degenerate_at = [&](int cell) {
        m.degenerate = true;
        m.degenerate_cell = cell;
    };

    if (phi_a1 <= phi_min) {
        degenerate_at(0);
        return m;
    }
    // half-step a1 -> first center
    {
        const double f1 = rhs(dzdx_a1, s.q_in, s.dq_in_dt, phi_a1);
        const double pred = phi_a1 + 0.5 * grid.dx * f1;
        if (pred <= phi_min) { degenerate_at(0); return m; }
        const double f2 = rhs(dzeta_dx[0], q_rec[0], dq_dt_rec[0], pred);
        m.phi[0] = phi_a1 + 0.25 * grid.dx * (f1 + f2);
        if (m.phi[0] <= phi_min) { degenerate_at(0); return m; }
    }
    for (int j = 0; j + 1 < n; ++j) {
        const double f1 = rhs(dzeta_dx[j], q_rec[j], dq_dt_rec[j], m.phi[j]);
        const double pred = m.phi[j] + grid.dx * f1;
        if (pred <= phi_min) { degenerate_at(j + 1); return m; }
        const double f2 = rhs(dzeta_dx[j + 1], q_rec[j + 1], dq_dt_rec[j + 1], pred);
        m.phi[j + 1] = m.phi[j] + 0.5 * grid.dx * (f1 + f2);
        if (m.phi[j + 1] <= phi_min) { degenerate_at(j + 1); return m; }
    }
    return m;
}

/// b = zeta - q^2 / phi per cell.
inline std::vector<double> assemble_bed(const SurfaceSnapshot& s, const std::vector<double>& q_rec,
                                        const std::vector<double>& phi) {
    std::vector<double> b(s.zeta.size());
    for (std::size_t j = 0; j < b.size(); ++j)
        b[j] = s.zeta[j] - q_rec[j] * q_rec[j] / phi[j];
    return b;
}

/// Full one-shot chain: discharge march, dq/dt march, phi march, bed assembly.
inline ReconstructionResult reconstruct(const SurfaceSnapshot& s, const Grid& grid, double g,
                                        const ReconstructOptions& opts = {}) {
    ReconstructionResult r;
    r.t_star = s.t_star;
    r.q_rec = reconstruct_discharge(s, grid);
    r.dq_dt_rec = reconstruct_dq_dt(s, grid);
    r.min_q = r.q_rec[0];
    for (double v : r.q_rec) r.min_q = std::min(r.min_q, v);
    r.nondegeneracy_warning = r.min_q < opts.beta_warn;
    auto m = solve_phi(s, r.q_rec, r.dq_dt_rec, grid, g);
    r.degenerate = m.degenerate;
    r.degenerate_cell = m.degenerate_cell;
    if (m.degenerate) return r;
    r.phi = std::move(m.phi);
    r.b_rec = assemble_bed(s, r.q_rec, r.phi);
    return r;
}

} // namespace bathyrec
