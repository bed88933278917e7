#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bathyrec {

/// Uniform finite-volume partition of the channel interval (a1, a2).
/// Cell j spans [iface(j), iface(j+1)] and is centered at center(j).
struct Grid {
    double a1 = 0.0;
    double a2 = 0.0;
    int n_cells = 0;
    double dx = 0.0;

    double iface(int i) const { return a1 + dx * i; }          // i in [0, n_cells]
    double center(int j) const { return a1 + dx * (j + 0.5); } // j in [0, n_cells)

    std::vector<double> centers() const {
        std::vector<double> x(n_cells);
        for (int j = 0; j < n_cells; ++j) x[j] = center(j);
        return x;
    }
    std::vector<double> ifaces() const {
        std::vector<double> x(n_cells + 1);
        for (int i = 0; i <= n_cells; ++i) x[i] = iface(i);
        return x;
    }
};

inline Grid build_grid(double a1, double a2, int n_cells) {
    if (!(a2 > a1)) throw std::invalid_argument("build_grid: a2 must exceed a1");
    if (n_cells < 4) throw std::invalid_argument("build_grid: need at least 4 cells");
    Grid g;
    g.a1 = a1;
    g.a2 = a2;
    g.n_cells = n_cells;
    g.dx = (a2 - a1) / n_cells;
    return g;
}

} // namespace bathyrec
