#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bathyrec/grid.hpp"

namespace bathyrec {

/// Bed elevation sampled at cell interfaces, with cell-center values defined
/// as interface averages so the piecewise-linear bed has the exact cell mean.
struct BathymetryField {
    std::vector<double> b_iface;  // n_cells + 1
    std::vector<double> b_center; // n_cells
};

/// Named bed-profile generators plus tabulated samples.
///
/// bump:      height - coeff*(x - center)^2 inside its support, 0 outside
/// sandbar:   amplitude * (tanh(2(6x/25 - 3 + B)) - tanh(2(6x/25 - 3 - B))), B = 3pi/5
/// sech:      amplitude * sech(2(6x/25 - 3))
/// composite: bump at x=6 + bump at x=14 + 0.05(1 + cos(2pi(x-19)/4)) on (17,21)
/// tabulated: (x, b) samples that must coincide with the grid interfaces
struct BedSpec {
    enum class Kind { Flat, Bump, Sandbar, Sech, Composite, Tabulated };
    Kind kind = Kind::Flat;
    double elevation = 0.0;  // flat
    double height = 0.2;     // bump
    double coeff = 0.05;     // bump
    double center = 10.0;    // bump
    double amplitude = 0.1;  // sandbar / sech (sech default 0.2 set by caller)
    std::vector<double> tab_x, tab_b; // tabulated

    static BedSpec flat(double elev = 0.0) {
        BedSpec s; s.kind = Kind::Flat; s.elevation = elev; return s;
    }
    static BedSpec bump(double center = 10.0, double height = 0.2, double coeff = 0.05) {
        BedSpec s; s.kind = Kind::Bump; s.center = center; s.height = height; s.coeff = coeff; return s;
    }
    static BedSpec sandbar(double amplitude) {
        BedSpec s; s.kind = Kind::Sandbar; s.amplitude = amplitude; return s;
    }
    static BedSpec sech(double amplitude = 0.2) {
        BedSpec s; s.kind = Kind::Sech; s.amplitude = amplitude; return s;
    }
    static BedSpec composite() {
        BedSpec s; s.kind = Kind::Composite; return s;
    }
};

namespace detail {

inline double bump_profile(double x, double center, double height, double coeff) {
    const double half_width = std::sqrt(height / coeff);
    if (x <= center - half_width || x >= center + half_width) return 0.0;
    return height - coeff * (x - center) * (x - center);
}

} // namespace detail

/// Pointwise evaluation of an analytic generator (any real x, including ghost
/// locations outside the channel). Tabulated beds are not analytic; see
/// sample_bed / extend_bed for their handling.
inline double bed_eval(const BedSpec& spec, double x) {
    using K = BedSpec::Kind;
    switch (spec.kind) {
        case K::Flat:
            return spec.elevation;
        case K::Bump:
            return detail::bump_profile(x, spec.center, spec.height, spec.coeff);
        case K::Sandbar: {
            const double B = 3.0 * std::numbers::pi / 5.0;
            const double s = 6.0 * x / 25.0 - 3.0;
            return spec.amplitude * (std::tanh(2.0 * (s + B)) - std::tanh(2.0 * (s - B)));
        }
        case K::Sech: {
            const double s = 2.0 * (6.0 * x / 25.0 - 3.0);
            return spec.amplitude / std::cosh(s);
        }
        case K::Composite: {
            double b = detail::bump_profile(x, 6.0, 0.2, 0.05) +
                       detail::bump_profile(x, 14.0, 0.2, 0.05);
            if (x > 17.0 && x < 21.0)
                b += 0.05 * (1.0 + std::cos(2.0 * std::numbers::pi * (x - 19.0) / 4.0));
            return b;
        }
        case K::Tabulated:
            throw std::invalid_argument("bed_eval: tabulated beds have no analytic form");
    }
    throw std::invalid_argument("bed_eval: unknown generator");
}

/// Evaluates the bed at the grid interfaces and derives centers as interface
/// averages. Tabulated samples must match the interfaces exactly.
inline BathymetryField sample_bed(const BedSpec& spec, const Grid& grid) {
    const int n = grid.n_cells;
    BathymetryField f;
    f.b_iface.resize(n + 1);
    if (spec.kind == BedSpec::Kind::Tabulated) {
        if (static_cast<int>(spec.tab_x.size()) != n + 1 || spec.tab_b.size() != spec.tab_x.size())
            throw std::invalid_argument("sample_bed: tabulated bed needs one sample per interface");
        const double tol = 1e-9 * (grid.a2 - grid.a1);
        for (int i = 0; i <= n; ++i) {
            if (std::abs(spec.tab_x[i] - grid.iface(i)) > tol)
                throw std::invalid_argument("sample_bed: tabulated x does not match grid interfaces");
            f.b_iface[i] = spec.tab_b[i];
        }
    } else {
        for (int i = 0; i <= n; ++i) f.b_iface[i] = bed_eval(spec, grid.iface(i));
    }
    for (double v : f.b_iface)
        if (!std::isfinite(v)) throw std::invalid_argument("sample_bed: non-finite bed value");
    f.b_center.resize(n);
    for (int j = 0; j < n; ++j) f.b_center[j] = 0.5 * (f.b_iface[j] + f.b_iface[j + 1]);
    return f;
}

/// Interface and center bed values extended by n_ghost cells per side.
/// Analytic generators are evaluated outside the channel; tabulated beds are
/// constant-extended from the boundary interfaces.
struct ExtendedBed {
    int n_ghost = 2;
    std::vector<double> iface;  // n_cells + 1 + 2*n_ghost
    std::vector<double> center; // n_cells + 2*n_ghost
};

inline ExtendedBed extend_bed(const BedSpec& spec, const Grid& grid, int n_ghost = 2) {
    const int n = grid.n_cells;
    ExtendedBed e;
    e.n_ghost = n_ghost;
    e.iface.resize(n + 1 + 2 * n_ghost);
    const BathymetryField base = sample_bed(spec, grid);
    for (int i = 0; i <= n; ++i) e.iface[i + n_ghost] = base.b_iface[i];
    for (int k = 1; k <= n_ghost; ++k) {
        if (spec.kind == BedSpec::Kind::Tabulated) {
            e.iface[n_ghost - k] = base.b_iface[0];
            e.iface[n + n_ghost + k] = base.b_iface[n];
        } else {
            e.iface[n_ghost - k] = bed_eval(spec, grid.a1 - k * grid.dx);
            e.iface[n + n_ghost + k] = bed_eval(spec, grid.a2 + k * grid.dx);
        }
    }
    e.center.resize(n + 2 * n_ghost);
    for (std::size_t j = 0; j + 1 < e.iface.size(); ++j)
        e.center[j] = 0.5 * (e.iface[j] + e.iface[j + 1]);
    return e;
}

} // namespace bathyrec
