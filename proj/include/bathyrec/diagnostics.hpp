#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bathyrec/bathymetry.hpp"
#include "bathyrec/flow.hpp"
#include "bathyrec/grid.hpp"
#include "bathyrec/inverse.hpp"
#include "bathyrec/measurement.hpp"

namespace bathyrec {

/// Characteristic-speed extrema over a time window.
struct RegimeReport {
    double t_lo = 0.0, t_hi = 0.0;
    double c1 = 0.0; // inf of lambda1 = u + sqrt(gh)
    double c2 = 0.0; // -sup of lambda2 = u - sqrt(gh)
    double min_depth = 0.0;
    double max_depth = 0.0;
    bool strongly_subcritical = false; // c1 > 0 and c2 > 0
};

struct ConditionReport {
    std::string condition;    // "theorem" | "corollary" | "nondegeneracy"
    bool holds = false;
    std::string reason;       // populated when holds is false
    double rho = 0.0;         // infimum margin when holds
    double c1 = 0.0, c2 = 0.0;
    double bed_rise_sum = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double certified_from = 0.0;   // nondegeneracy guaranteed on (certified_from, window_hi)
    double certified_q_lower = 0.0;
    double epsilon_depth = 0.0;    // observed depth lower bound used as epsilon
};

/// Lipschitz stability constants and both sides of the L1 estimate.
struct StabilityBudget {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double c12 = 0.0; // (e^{C2 L} - 1) / C1
    double e_term = 0.0;
    double beta = 0.0;
    double bound = 0.0;    // right-hand side of the estimate
    double observed = 0.0; // L1 distance of the reconstructed beds
    bool holds = false;
};

inline std::vector<double> froude_field(const FlowField& f, const BathymetryField& bed, double g) {
    const std::size_t n = f.zeta.size();
    std::vector<double> fr(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = f.zeta[j] - bed.b_center[j];
        if (!(h > 0.0)) throw std::runtime_error("froude_field: dry cell " + std::to_string(j));
        fr[j] = (f.q[j] / h) / std::sqrt(g * h);
    }
    return fr;
}

namespace detail {

struct LevelExtrema {
    double min_l1, max_l2, r1_in, r2_out, max_h, min_h, min_q, u_in, h_in, u_out, h_out;
};

inline LevelExtrema level_extrema(const FlowField& f, const BathymetryField& bed, double g) {
    LevelExtrema e;
    e.min_l1 = std::numeric_limits<double>::infinity();
    e.max_l2 = -std::numeric_limits<double>::infinity();
    e.max_h = -std::numeric_limits<double>::infinity();
    e.min_h = std::numeric_limits<double>::infinity();
    e.min_q = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(f.zeta.size());
    for (int j = 0; j < n; ++j) {
        const double h = f.zeta[j] - bed.b_center[j];
        if (!(h > 0.0)) throw std::runtime_error("wave bounds: dry cell " + std::to_string(j));
        const double u = f.q[j] / h;
        const double c = std::sqrt(g * h);
        e.min_l1 = std::min(e.min_l1, u + c);
        e.max_l2 = std::max(e.max_l2, u - c);
        e.max_h = std::max(e.max_h, h);
        e.min_h = std::min(e.min_h, h);
        e.min_q = std::min(e.min_q, f.q[j]);
    }
    const double h0 = f.zeta[0] - bed.b_center[0];
    const double hn = f.zeta[n - 1] - bed.b_center[n - 1];
    e.u_in = f.q[0] / h0;
    e.h_in = h0;
    e.u_out = f.q[n - 1] / hn;
    e.h_out = hn;
    e.r1_in = e.u_in + 2.0 * std::sqrt(g * h0);
    e.r2_out = e.u_out - 2.0 * std::sqrt(g * hn);
    return e;
}

inline std::pair<int, int> window_indices(const FlowHistory& hist, double t_lo, double t_hi) {
    int lo = -1, hi = -1;
    for (int n = 0; n < hist.levels(); ++n) {
        if (hist.times[n] >= t_lo - 1e-12 && lo < 0) lo = n;
        if (hist.times[n] <= t_hi + 1e-12) hi = n;
    }
    if (lo < 0 || hi < lo) throw std::invalid_argument("wave bounds: empty time window");
    return {lo, hi};
}

} // namespace detail

/// Extrema of the characteristic speeds over all stored levels and cells in
/// the window (boundary traces taken from the first/last cells).
inline RegimeReport estimate_wave_bounds(const FlowHistory& hist, const BathymetryField& bed,
                                         double t_lo, double t_hi, double g) {
    const auto [lo, hi] = detail::window_indices(hist, t_lo, t_hi);
    RegimeReport r;
    r.t_lo = hist.times[lo];
    r.t_hi = hist.times[hi];
    double min_l1 = std::numeric_limits<double>::infinity();
    double max_l2 = -std::numeric_limits<double>::infinity();
    r.min_depth = std::numeric_limits<double>::infinity();
    r.max_depth = -std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        const auto e = detail::level_extrema(hist.frames[n], bed, g);
        min_l1 = std::min(min_l1, e.min_l1);
        max_l2 = std::max(max_l2, e.max_l2);
        r.min_depth = std::min(r.min_depth, e.min_h);
        r.max_depth = std::max(r.max_depth, e.max_h);
    }
    r.c1 = min_l1;
    r.c2 = -max_l2;
    r.strongly_subcritical = (r.c1 > 0.0 && r.c2 > 0.0);
    return r;
}

/// Nondegeneracy: min over cells of q at one instant against a threshold.
struct NondegeneracyReport {
    bool holds = false;
    double min_q = 0.0;
    int argmin_cell = -1;
};

inline NondegeneracyReport nondegeneracy(const std::vector<double>& q, double beta) {
    NondegeneracyReport r;
    r.min_q = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(q.size()); ++j) {
        if (q[j] < r.min_q) { r.min_q = q[j]; r.argmin_cell = j; }
    }
    r.holds = r.min_q >= beta;
    return r;
}

/// Sum of bed rises: detects maximal strictly-increasing runs of the
/// interface values (first differences above a tolerance) and adds up
/// run end minus run start.
inline double bed_rise_sum(const BathymetryField& bed) {
    const auto& b = bed.b_iface;
    double max_abs = 0.0;
    for (double v : b) max_abs = std::max(max_abs, std::abs(v));
    const double tol = 1e-12 * std::max(max_abs, 1.0);
    double total = 0.0;
    std::size_t i = 0;
    while (i + 1 < b.size()) {
        if (b[i + 1] - b[i] > tol) {
            const double start = b[i];
            while (i + 1 < b.size() && b[i + 1] - b[i] > tol) ++i;
            total += b[i] - start;
        } else {
            ++i;
        }
    }
    return total;
}

/// Theorem-style sufficient condition over a window: for all stored pairs
/// (s, tau), u(s,a1) + u(tau,a2) + 2 sqrt(g)(sqrt(h(s,a1)) - sqrt(h(tau,a2)))
/// must exceed g(1/c1 + 1/c2) * bed_rise_sum by rho > 0. The pair infimum
/// separates into boundary Riemann-invariant minima. The window must be
/// longer than the characteristic transit time of the channel.
inline ConditionReport check_theorem_condition(const FlowHistory& hist, const BathymetryField& bed,
                                               double t_lo, double t_hi, double g,
                                               double channel_length) {
    const auto [lo, hi] = detail::window_indices(hist, t_lo, t_hi);
    ConditionReport r;
    r.condition = "theorem";
    r.window_lo = hist.times[lo];
    r.window_hi = hist.times[hi];
    r.bed_rise_sum = bed_rise_sum(bed);
    double min_r1 = std::numeric_limits<double>::infinity();
    double min_r2 = std::numeric_limits<double>::infinity();
    double min_l1 = std::numeric_limits<double>::infinity();
    double max_l2 = -std::numeric_limits<double>::infinity();
    double min_h = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        const auto e = detail::level_extrema(hist.frames[n], bed, g);
        min_r1 = std::min(min_r1, e.r1_in);
        min_r2 = std::min(min_r2, e.r2_out);
        min_l1 = std::min(min_l1, e.min_l1);
        max_l2 = std::max(max_l2, e.max_l2);
        min_h = std::min(min_h, e.min_h);
    }
    r.c1 = min_l1;
    r.c2 = -max_l2;
    r.epsilon_depth = min_h;
    if (!(r.c1 > 0.0 && r.c2 > 0.0)) {
        r.reason = "strong subcriticality fails on the window";
        return r;
    }
    const double rho = min_r1 + min_r2 - g * (1.0 / r.c1 + 1.0 / r.c2) * r.bed_rise_sum;
    r.rho = rho;
    r.certified_q_lower = r.epsilon_depth * rho / 2.0;
    const double transit = channel_length / std::min(r.c1, r.c2);
    if (r.window_hi - r.window_lo <= transit) {
        r.reason = "window shorter than the characteristic transit time";
        return r;
    }
    r.certified_from = r.window_lo + transit;
    if (!(rho > 0.0)) {
        r.reason = "margin is nonpositive";
        return r;
    }
    r.holds = true;
    return r;
}

/// Corollary-style condition using inlet data only: for all stored s,
/// u(s,a1) + 2 sqrt(g)(sqrt(h(s,a1)) - sqrt(max h)) - (g/c1) * rise_sum >= rho.
inline ConditionReport check_corollary_condition(const FlowHistory& hist, const BathymetryField& bed,
                                                 double t_lo, double t_hi, double g,
                                                 double channel_length) {
    const auto [lo, hi] = detail::window_indices(hist, t_lo, t_hi);
    ConditionReport r;
    r.condition = "corollary";
    r.window_lo = hist.times[lo];
    r.window_hi = hist.times[hi];
    r.bed_rise_sum = bed_rise_sum(bed);
    double min_r1 = std::numeric_limits<double>::infinity();
    double min_l1 = std::numeric_limits<double>::infinity();
    double max_h = -std::numeric_limits<double>::infinity();
    double min_h = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        const auto e = detail::level_extrema(hist.frames[n], bed, g);
        min_r1 = std::min(min_r1, e.r1_in);
        min_l1 = std::min(min_l1, e.min_l1);
        max_h = std::max(max_h, e.max_h);
        min_h = std::min(min_h, e.min_h);
    }
    r.c1 = min_l1;
    r.epsilon_depth = min_h;
    if (!(r.c1 > 0.0)) {
        r.reason = "lambda1 is not bounded away from zero on the window";
        return r;
    }
    const double rho = min_r1 - 2.0 * std::sqrt(g) * std::sqrt(max_h) -
                       (g / r.c1) * r.bed_rise_sum;
    r.rho = rho;
    r.certified_q_lower = r.epsilon_depth * rho;
    const double transit = channel_length / r.c1;
    if (r.window_hi - r.window_lo <= transit) {
        r.holds = false;
        r.reason = "window shorter than the characteristic transit time";
        return r;
    }
    r.certified_from = r.window_lo + transit;
    if (!(rho > 0.0)) {
        r.holds = false;
        r.reason = "margin is nonpositive";
        return r;
    }
    r.holds = true;
    return r;
}

namespace detail {

/// Suffix extrema over stored levels n..last, for O(1) shifted-window checks.
struct SuffixExtrema {
    std::vector<double> min_l1, max_l2, min_r1, min_r2, max_h, min_h;
    std::vector<double> times;

    SuffixExtrema(const FlowHistory& hist, const BathymetryField& bed, double g) {
        const int n = hist.levels();
        min_l1.resize(n); max_l2.resize(n); min_r1.resize(n);
        min_r2.resize(n); max_h.resize(n); min_h.resize(n);
        times = hist.times;
        for (int i = n - 1; i >= 0; --i) {
            const auto e = level_extrema(hist.frames[i], bed, g);
            min_l1[i] = e.min_l1; max_l2[i] = e.max_l2; min_r1[i] = e.r1_in;
            min_r2[i] = e.r2_out; max_h[i] = e.max_h; min_h[i] = e.min_h;
            if (i + 1 < n) {
                min_l1[i] = std::min(min_l1[i], min_l1[i + 1]);
                max_l2[i] = std::max(max_l2[i], max_l2[i + 1]);
                min_r1[i] = std::min(min_r1[i], min_r1[i + 1]);
                min_r2[i] = std::min(min_r2[i], min_r2[i + 1]);
                max_h[i] = std::max(max_h[i], max_h[i + 1]);
                min_h[i] = std::min(min_h[i], min_h[i + 1]);
            }
        }
    }

    ConditionReport theorem_at(int i, double g, double rise, double length) const {
        ConditionReport r;
        r.condition = "theorem";
        r.window_lo = times[i];
        r.window_hi = times.back();
        r.bed_rise_sum = rise;
        r.c1 = min_l1[i];
        r.c2 = -max_l2[i];
        r.epsilon_depth = min_h[i];
        if (!(r.c1 > 0.0 && r.c2 > 0.0)) {
            r.reason = "strong subcriticality fails on the window";
            return r;
        }
        r.rho = min_r1[i] + min_r2[i] - g * (1.0 / r.c1 + 1.0 / r.c2) * rise;
        r.certified_q_lower = r.epsilon_depth * r.rho / 2.0;
        const double transit = length / std::min(r.c1, r.c2);
        if (r.window_hi - r.window_lo <= transit) {
            r.reason = "window shorter than the characteristic transit time";
            return r;
        }
        r.certified_from = r.window_lo + transit;
        if (!(r.rho > 0.0)) {
            r.reason = "margin is nonpositive";
            return r;
        }
        r.holds = true;
        return r;
    }

    ConditionReport corollary_at(int i, double g, double rise, double length) const {
        ConditionReport r;
        r.condition = "corollary";
        r.window_lo = times[i];
        r.window_hi = times.back();
        r.bed_rise_sum = rise;
        r.c1 = min_l1[i];
        r.epsilon_depth = min_h[i];
        if (!(r.c1 > 0.0)) {
            r.reason = "lambda1 is not bounded away from zero on the window";
            return r;
        }
        r.rho = min_r1[i] - 2.0 * std::sqrt(g) * std::sqrt(max_h[i]) - (g / r.c1) * rise;
        r.certified_q_lower = r.epsilon_depth * r.rho;
        const double transit = length / r.c1;
        if (r.window_hi - r.window_lo <= transit) {
            r.reason = "window shorter than the characteristic transit time";
            return r;
        }
        r.certified_from = r.window_lo + transit;
        if (!(r.rho > 0.0)) {
            r.reason = "margin is nonpositive";
            return r;
        }
        r.holds = true;
        return r;
    }
};

} // namespace detail

/// Earliest shift t_s for which the theorem condition certifies a nonempty
/// interval inside (t_s, end of history). Returns the report of the first
/// feasible shift, or the last attempted (failing) report.
inline ConditionReport scan_theorem_shift(const FlowHistory& hist, const BathymetryField& bed,
                                          double t_hi, double g, double channel_length) {
    const detail::SuffixExtrema suf(hist, bed, g);
    const double rise = bed_rise_sum(bed);
    ConditionReport last;
    for (int n = 0; n < hist.levels(); ++n) {
        if (hist.times[n] >= t_hi) break;
        last = suf.theorem_at(n, g, rise, channel_length);
        if (last.holds) return last;
    }
    return last;
}

/// Shift maximizing the corollary margin; reports the best certificate.
inline ConditionReport scan_corollary_shift(const FlowHistory& hist, const BathymetryField& bed,
                                            double t_hi, double g, double channel_length) {
    const detail::SuffixExtrema suf(hist, bed, g);
    const double rise = bed_rise_sum(bed);
    ConditionReport best;
    bool have = false;
    ConditionReport last;
    for (int n = 0; n < hist.levels(); ++n) {
        if (hist.times[n] >= t_hi) break;
        last = suf.corollary_at(n, g, rise, channel_length);
        if (last.holds && (!have || last.rho > best.rho)) { best = last; have = true; }
    }
    return have ? best : last;
}

/// Relative Linf and L2 error norms against a reference profile.
inline std::pair<double, double> error_norms(const std::vector<double>& b_rec,
                                             const std::vector<double>& b_true, const Grid& grid) {
    if (b_rec.size() != b_true.size())
        throw std::invalid_argument("error_norms: size mismatch");
    double num_inf = 0.0, den_inf = 0.0, num_2 = 0.0, den_2 = 0.0;
    for (std::size_t j = 0; j < b_rec.size(); ++j) {
        num_inf = std::max(num_inf, std::abs(b_rec[j] - b_true[j]));
        den_inf = std::max(den_inf, std::abs(b_true[j]));
        num_2 += (b_rec[j] - b_true[j]) * (b_rec[j] - b_true[j]) * grid.dx;
        den_2 += b_true[j] * b_true[j] * grid.dx;
    }
    if (den_inf == 0.0 || den_2 == 0.0)
        throw std::invalid_argument("error_norms: zero-norm reference");
    return {num_inf / den_inf, std::sqrt(num_2) / std::sqrt(den_2)};
}

namespace detail {

inline double l1_norm(const std::vector<double>& v, double dx) {
    double s = 0.0;
    for (double x : v) s += std::abs(x) * dx;
    return s;
}

inline double linf_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

/// (e^{x} - 1) / C1 with the four-term series of (e^x - 1)/x when x is tiny,
/// written through x = C2 L so the flat-surface limit C1 -> 0 stays finite.
inline double c12_constant(double c1, double c2, double length, double hh_inf, double beta) {
    const double x = c2 * length;
    const double scale = length * hh_inf / (beta * beta); // = x / C1 when C1 > 0
    if (x < 1e-6) {
        const double series = 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0;
        return scale * series;
    }
    return (std::exp(x) - 1.0) / c1;
}

} // namespace detail

/// Evaluates the Lipschitz stability estimate on a pair of snapshots: runs
/// the inverse chain on both, computes the constants, the right-hand-side
/// bound and the observed L1 bed distance.
inline StabilityBudget stability_budget(const SurfaceSnapshot& exact, const SurfaceSnapshot& pert,
                                        double beta, const Grid& grid, double g) {
    if (!(beta > 0.0)) throw std::invalid_argument("stability_budget: beta must be positive");
    const auto r = reconstruct(exact, grid, g);
    const auto rt = reconstruct(pert, grid, g);
    if (r.degenerate || rt.degenerate)
        throw std::runtime_error("stability_budget: degenerate reconstruction");
    const int n = grid.n_cells;
    const double length = grid.a2 - grid.a1;

    std::vector<double> h(n), ht(n);
    for (int j = 0; j < n; ++j) {
        h[j] = r.q_rec[j] * r.q_rec[j] / r.phi[j];
        ht[j] = rt.q_rec[j] * rt.q_rec[j] / rt.phi[j];
    }
    const auto dzeta_dx = dx_spatial(exact.zeta, grid.dx);
    const auto dzeta_dx_t = dx_spatial(pert.zeta, grid.dx);

    double hh_inf = 0.0, ht_inf = 0.0, dzx_inf = 0.0, q2_inf = 0.0, mix_inf = 0.0, hqq_inf = 0.0;
    for (int j = 0; j < n; ++j) {
        hh_inf = std::max(hh_inf, std::abs(h[j] * ht[j]));
        ht_inf = std::max(ht_inf, std::abs(ht[j]));
        dzx_inf = std::max(dzx_inf, std::abs(dzeta_dx[j]));
        q2_inf = std::max(q2_inf, r.q_rec[j] * r.q_rec[j]);
        mix_inf = std::max(mix_inf, std::abs(dzeta_dx_t[j] * (r.q_rec[j] + rt.q_rec[j])));
        hqq_inf = std::max(hqq_inf, std::abs(ht[j] * (r.q_rec[j] + rt.q_rec[j])));
    }

    StabilityBudget b;
    b.beta = beta;
    b.c1 = g * dzx_inf;
    b.c2 = (g / (beta * beta)) * dzx_inf * hh_inf;
    b.c3 = (g / (beta * beta)) * ht_inf * mix_inf;
    b.c4 = (g / (beta * beta)) * ht_inf * q2_inf;
    b.c12 = detail::c12_constant(b.c1, b.c2, length, hh_inf, beta);

    std::vector<double> dq(n), ddq(n), dz(n), ddzx(n), db(n);
    for (int j = 0; j < n; ++j) {
        dq[j] = r.q_rec[j] - rt.q_rec[j];
        ddq[j] = r.dq_dt_rec[j] - rt.dq_dt_rec[j];
        dz[j] = exact.zeta[j] - pert.zeta[j];
        ddzx[j] = dzeta_dx[j] - dzeta_dx_t[j];
        db[j] = r.b_rec[j] - rt.b_rec[j];
    }
    const double h_a1 = extrapolate_to_inlet(exact.zeta, grid) - exact.b_a1;
    const double ht_a1 = extrapolate_to_inlet(pert.zeta, grid) - pert.b_a1;
    const double q_a1 = exact.q_in, qt_a1 = pert.q_in;
    const double zeta_gap_a1 = std::abs(extrapolate_to_inlet(exact.zeta, grid) -
                                        extrapolate_to_inlet(pert.zeta, grid));
    b.e_term = (q_a1 * q_a1 / (h_a1 * ht_a1)) * (std::abs(exact.b_a1 - pert.b_a1) + zeta_gap_a1) +
               ((q_a1 + qt_a1) / ht_a1) * std::abs(q_a1 - qt_a1) +
               b.c3 * detail::l1_norm(dq, grid.dx) +
               b.c4 * detail::l1_norm(ddzx, grid.dx) +
               detail::l1_norm(ddq, grid.dx);
    b.bound = b.c12 * b.e_term +
              (hqq_inf / (beta * beta)) * detail::l1_norm(dq, grid.dx) +
              detail::l1_norm(dz, grid.dx);
    b.observed = detail::l1_norm(db, grid.dx);
    b.holds = b.observed <= b.bound;
    return b;
}

} // namespace bathyrec
