#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bathyrec/bathymetry.hpp"
#include "bathyrec/flow.hpp"
#include "bathyrec/scenario.hpp"

namespace bathyrec {

/// Generalized minmod of three already-scaled slope candidates.
inline double minmod_slope(double left, double center, double right) {
    if (left > 0.0 && center > 0.0 && right > 0.0) return std::min({left, center, right});
    if (left < 0.0 && center < 0.0 && right < 0.0) return std::max({left, center, right});
    return 0.0;
}

/// One-sided reconstructions at every interface, after the positivity fix.
struct EdgeStates {
    std::vector<double> zeta_m, zeta_p; // left/right limits at interfaces 0..n
    std::vector<double> q_m, q_p;
    std::vector<double> h_m, h_p;
    std::vector<double> u_m, u_p;       // desingularized velocities
};

/// One-sided local propagation speeds at every interface.
struct LocalSpeeds {
    std::vector<double> a_plus;  // >= 0
    std::vector<double> a_minus; // <= 0
};

struct InterfaceFluxes {
    std::vector<double> mass, momentum;
};

inline double cfl_timestep(double a_max, double dx, double c, double dt_max) {
    if (a_max <= 0.0) return dt_max;
    return c * dx / (2.0 * a_max);
}

/// Three-stage strong-stability-preserving Runge-Kutta step on a flat state
/// vector. rhs(u, t, out) must fill out with du/dt; stage states reuse the
/// caller-provided scratch buffers. A precomputed stage-1 slope may be passed
/// through k0 (the CFL probe already evaluated it).
template <class RhsFn>
void ssp_rk3_step(std::vector<double>& u, double t, double dt, RhsFn&& rhs,
                  std::vector<double>& u1, std::vector<double>& u2, std::vector<double>& k,
                  const std::vector<double>* k0 = nullptr) {
    const std::size_t m = u.size();
    u1.resize(m); u2.resize(m); k.resize(m);
    if (k0 == nullptr) {
        rhs(u, t, k);
        k0 = &k;
    }
    for (std::size_t i = 0; i < m; ++i) u1[i] = u[i] + dt * (*k0)[i];
    rhs(u1, t + dt, k);
    for (std::size_t i = 0; i < m; ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * k[i]);
    rhs(u2, t + 0.5 * dt, k);
    for (std::size_t i = 0; i < m; ++i) u[i] = (u[i] + 2.0 * (u2[i] + dt * k[i])) / 3.0;
}

/// Central-upwind spatial discretization of the (zeta, q) shallow-water
/// system over a piecewise-linear bed, with MUSCL minmod reconstruction,
/// a surface-clamp positivity fix and desingularized edge velocities.
class CentralUpwindSolver {
public:
    CentralUpwindSolver(const Grid& grid, const BedSpec& bed, const BoundaryForcing& forcing,
                        double gravity, double theta)
        : grid_(grid), forcing_(forcing), g_(gravity), theta_(theta),
          bed_(extend_bed(bed, grid, 2)) {
        const int n = grid_.n_cells;
        kappa_ = std::pow(grid_.dx, 4);
        ze_.assign(n + 4, 0.0);
        qe_.assign(n + 4, 0.0);
        sz_.assign(n + 4, 0.0);
        sq_.assign(n + 4, 0.0);
        edges_.zeta_m.assign(n + 1, 0.0); edges_.zeta_p.assign(n + 1, 0.0);
        edges_.q_m.assign(n + 1, 0.0);    edges_.q_p.assign(n + 1, 0.0);
        edges_.h_m.assign(n + 1, 0.0);    edges_.h_p.assign(n + 1, 0.0);
        edges_.u_m.assign(n + 1, 0.0);    edges_.u_p.assign(n + 1, 0.0);
        speeds_.a_plus.assign(n + 1, 0.0);
        speeds_.a_minus.assign(n + 1, 0.0);
        flux_.mass.assign(n + 1, 0.0);
        flux_.momentum.assign(n + 1, 0.0);
    }

    const Grid& grid() const { return grid_; }
    const ExtendedBed& bed() const { return bed_; }
    double gravity() const { return g_; }

    /// Ghost population. Prescribed inlet discharge fills both ghost cells;
    /// the inlet surface is linearly extrapolated unless a depth law pins it.
    /// A prescribed outlet depth is imposed by mirroring the surface about
    /// its boundary value; free sides copy the adjacent interior cell.
    void populate_ghosts(double t) {
        const int n = grid_.n_cells;
        if (forcing_.inlet_q) {
            const double qin = (*forcing_.inlet_q)(t);
            qe_[0] = qe_[1] = qin;
            if (forcing_.inlet_h) {
                const double hin = (*forcing_.inlet_h)(t);
                ze_[0] = hin + bed_.center[0];
                ze_[1] = hin + bed_.center[1];
            } else {
                ze_[1] = 2.0 * ze_[2] - ze_[3];
                ze_[0] = 3.0 * ze_[2] - 2.0 * ze_[3];
            }
        } else {
            qe_[0] = qe_[1] = qe_[2];
            ze_[0] = ze_[1] = ze_[2];
        }
        if (forcing_.outlet_h) {
            const double zb = (*forcing_.outlet_h)(t) + bed_.iface[n + 2]; // surface at a2
            ze_[n + 2] = 2.0 * zb - ze_[n + 1];
            ze_[n + 3] = 2.0 * zb - ze_[n];
            qe_[n + 2] = qe_[n + 3] = qe_[n + 1];
        } else {
            ze_[n + 2] = ze_[n + 3] = ze_[n + 1];
            qe_[n + 2] = qe_[n + 3] = qe_[n + 1];
        }
    }

    /// MUSCL reconstruction of (zeta, q) plus the positivity fix: an edge
    /// surface below the bed is clamped to it and the opposite edge shifted
    /// to keep the cell average.
    void reconstruct_edges() {
        const int n = grid_.n_cells;
        const double dx = grid_.dx;
        for (int i = 1; i <= n + 2; ++i) {
            const double dzl = (ze_[i] - ze_[i - 1]) / dx;
            const double dzr = (ze_[i + 1] - ze_[i]) / dx;
            sz_[i] = minmod_slope(theta_ * dzl, 0.5 * (dzl + dzr), theta_ * dzr);
            const double dql = (qe_[i] - qe_[i - 1]) / dx;
            const double dqr = (qe_[i + 1] - qe_[i]) / dx;
            sq_[i] = minmod_slope(theta_ * dql, 0.5 * (dql + dqr), theta_ * dqr);
        }
        // per extended cell i (1..n+2): left/right edge surfaces with clamp
        for (int i = 1; i <= n + 2; ++i) {
            double zl = ze_[i] - 0.5 * dx * sz_[i];
            double zr = ze_[i] + 0.5 * dx * sz_[i];
            const double bl = bed_.iface[i];
            const double br = bed_.iface[i + 1];
            if (zr < br) { zl = 2.0 * ze_[i] - br; zr = br; }
            if (zl < bl) { zr = 2.0 * ze_[i] - bl; zl = bl; }
            const double ql = qe_[i] - 0.5 * dx * sq_[i];
            const double qr = qe_[i] + 0.5 * dx * sq_[i];
            // interface i-1 (cell's left edge) takes the plus state; interface i the minus state
            if (i >= 2) { edges_.zeta_p[i - 2] = zl; edges_.q_p[i - 2] = ql; }
            if (i <= n + 1) { edges_.zeta_m[i - 1] = zr; edges_.q_m[i - 1] = qr; }
        }
        for (int i = 0; i <= n; ++i) {
            const double b = bed_.iface[i + 2];
            const double hm = std::max(edges_.zeta_m[i] - b, 0.0);
            const double hp = std::max(edges_.zeta_p[i] - b, 0.0);
            edges_.h_m[i] = hm;
            edges_.h_p[i] = hp;
            edges_.u_m[i] = desingularized_velocity(hm, edges_.q_m[i]);
            edges_.u_p[i] = desingularized_velocity(hp, edges_.q_p[i]);
            edges_.q_m[i] = hm * edges_.u_m[i];
            edges_.q_p[i] = hp * edges_.u_p[i];
        }
    }

    double desingularized_velocity(double h, double q) const {
        const double h4 = h * h * h * h;
        return std::sqrt(2.0) * h * q / std::sqrt(h4 + std::max(h4, kappa_));
    }

    void local_speeds() {
        const int n = grid_.n_cells;
        for (int i = 0; i <= n; ++i) {
            const double cm = std::sqrt(g_ * edges_.h_m[i]);
            const double cp = std::sqrt(g_ * edges_.h_p[i]);
            speeds_.a_plus[i] = std::max({edges_.u_p[i] + cp, edges_.u_m[i] + cm, 0.0});
            speeds_.a_minus[i] = std::min({edges_.u_p[i] - cp, edges_.u_m[i] - cm, 0.0});
        }
    }

    void numerical_flux() {
        const int n = grid_.n_cells;
        for (int i = 0; i <= n; ++i) {
            const double ap = speeds_.a_plus[i];
            const double am = speeds_.a_minus[i];
            const double f1m = edges_.q_m[i];
            const double f1p = edges_.q_p[i];
            const double f2m = edges_.q_m[i] * edges_.u_m[i] + 0.5 * g_ * edges_.h_m[i] * edges_.h_m[i];
            const double f2p = edges_.q_p[i] * edges_.u_p[i] + 0.5 * g_ * edges_.h_p[i] * edges_.h_p[i];
            const double d = ap - am;
            if (d > 0.0) {
                const double w = ap * am / d;
                flux_.mass[i] = (ap * f1m - am * f1p) / d + w * (edges_.zeta_p[i] - edges_.zeta_m[i]);
                flux_.momentum[i] = (ap * f2m - am * f2p) / d + w * (edges_.q_p[i] - edges_.q_m[i]);
            } else {
                flux_.mass[i] = 0.5 * (f1m + f1p);
                flux_.momentum[i] = 0.5 * (f2m + f2p);
            }
        }
    }

    /// Momentum source -g (zeta_j - b_j)(b_{j+1/2} - b_{j-1/2}) / dx for one cell.
    double source_term(double zeta_cell, int j) const {
        return -g_ * (zeta_cell - bed_.center[j + 2]) *
               (bed_.iface[j + 3] - bed_.iface[j + 2]) / grid_.dx;
    }

    struct RhsInfo {
        double a_max = 0.0;
        double flux_mass_in = 0.0;  // mass flux through a1
        double flux_mass_out = 0.0; // mass flux through a2
    };

    /// Semi-discrete right-hand side for the flat state [zeta..., q...].
    RhsInfo semi_discrete_rhs(const std::vector<double>& u, double t, std::vector<double>& out) {
        const int n = grid_.n_cells;
        for (int j = 0; j < n; ++j) {
            ze_[j + 2] = u[j];
            qe_[j + 2] = u[n + j];
        }
        populate_ghosts(t);
        reconstruct_edges();
        local_speeds();
        numerical_flux();
        out.resize(2 * n);
        const double dx = grid_.dx;
        for (int j = 0; j < n; ++j) {
            out[j] = -(flux_.mass[j + 1] - flux_.mass[j]) / dx;
            out[n + j] = -(flux_.momentum[j + 1] - flux_.momentum[j]) / dx + source_term(u[j], j);
        }
        RhsInfo info;
        for (int i = 0; i <= n; ++i)
            info.a_max = std::max({info.a_max, speeds_.a_plus[i], -speeds_.a_minus[i]});
        info.flux_mass_in = flux_.mass[0];
        info.flux_mass_out = flux_.mass[n];
        return info;
    }

    const EdgeStates& edges() const { return edges_; }
    const LocalSpeeds& speeds() const { return speeds_; }
    const InterfaceFluxes& fluxes() const { return flux_; }

private:
    Grid grid_;
    BoundaryForcing forcing_;
    double g_;
    double theta_;
    double kappa_;
    ExtendedBed bed_;
    std::vector<double> ze_, qe_; // extended cell values (2 ghosts per side)
    std::vector<double> sz_, sq_;
    EdgeStates edges_;
    LocalSpeeds speeds_;
    InterfaceFluxes flux_;
};

struct ForwardRunReport {
    FlowHistory history;
    long long steps = 0;
    double min_depth = 0.0;
    double max_speed = 0.0;
    double wall_seconds = 0.0;
};

namespace detail {

constexpr double dry_tolerance = 1e-10;

inline double startup_dt_max(const ScenarioConfig& cfg) {
    const Grid grid = cfg.grid();
    const BathymetryField bed = sample_bed(cfg.bed, grid);
    double h_max = dry_tolerance;
    for (int j = 0; j < grid.n_cells; ++j) {
        const double h = cfg.initial.zeta_at(grid.center(j)) - bed.b_center[j];
        h_max = std::max(h_max, h);
    }
    return 0.1 * grid.dx / std::sqrt(cfg.gravity * h_max);
}

} // namespace detail

/// Integrates a scenario from t = 0 to t_final, recording the flow history
/// according to the configured retention policy. The last step is shortened
/// so the final stored level lands exactly on t_final.
inline ForwardRunReport run_forward(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = cfg.grid();
    const int n = grid.n_cells;
    CentralUpwindSolver solver(grid, cfg.bed, cfg.boundary, cfg.gravity, cfg.theta);

    std::vector<double> u(2 * n), u1, u2, k;
    for (int j = 0; j < n; ++j) {
        u[j] = cfg.initial.zeta_at(grid.center(j));
        u[n + j] = cfg.initial.q;
    }

    ForwardRunReport report;
    report.min_depth = std::numeric_limits<double>::infinity();
    const std::size_t tail_keep = 8;
    auto record = [&](double t) {
        FlowField f;
        f.t = t;
        f.zeta.assign(u.begin(), u.begin() + n);
        f.q.assign(u.begin() + n, u.end());
        report.history.times.push_back(t);
        report.history.frames.push_back(std::move(f));
        if (cfg.history == HistoryPolicy::Tail && report.history.frames.size() > tail_keep) {
            report.history.frames.erase(report.history.frames.begin());
            report.history.times.erase(report.history.times.begin());
            report.history.complete_from_start = false;
        }
    };
    auto scan_state = [&]() {
        double min_h = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            const double h = u[j] - solver.bed().center[j + 2];
            min_h = std::min(min_h, h);
            if (!std::isfinite(u[j]) || !std::isfinite(u[n + j]))
                throw std::runtime_error("run_forward: non-finite state at cell " + std::to_string(j));
        }
        report.min_depth = std::min(report.min_depth, min_h);
    };

    scan_state();
    record(0.0);
    const double dt_max = detail::startup_dt_max(cfg);
    double t = 0.0;
    std::vector<double> rhs_probe;
    auto rhs = [&](const std::vector<double>& s, double ts, std::vector<double>& out) {
        solver.semi_discrete_rhs(s, ts, out);
    };
    while (t < cfg.t_final - 1e-14 * cfg.t_final) {
        const auto info = solver.semi_discrete_rhs(u, t, rhs_probe);
        report.max_speed = std::max(report.max_speed, info.a_max);
        double dt = cfl_timestep(info.a_max, grid.dx, cfg.cfl_c, dt_max);
        if (!(dt > 0.0) || dt < 1e-13 * cfg.t_final)
            throw std::runtime_error("run_forward: time step collapsed");
        if (t + dt > cfg.t_final) dt = cfg.t_final - t;
        ssp_rk3_step(u, t, dt, rhs, u1, u2, k, &rhs_probe);
        t += dt;
        ++report.steps;
        scan_state();
        record(t);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace bathyrec
