#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "bathyrec/bathymetry.hpp"
#include "bathyrec/forcing.hpp"
#include "bathyrec/grid.hpp"

namespace bathyrec {

/// Initial surface elevation: a constant, optionally with a Gaussian hump.
struct InitialSpec {
    double zeta = 0.0;
    double q = 0.0;
    double hump_amplitude = 0.0;
    double hump_center = 0.0;
    double hump_width = 1.0;

    double zeta_at(double x) const {
        if (hump_amplitude == 0.0) return zeta;
        const double s = (x - hump_center) / hump_width;
        return zeta + hump_amplitude * std::exp(-s * s);
    }
};

/// How much of the run to keep for the inverse stage and diagnostics.
enum class HistoryPolicy {
    Full, // every accepted level (default; required for condition checks)
    Tail  // only the trailing window needed for a t* = t_f snapshot
};

struct ScenarioConfig {
    std::string name = "scenario";
    double a1 = 0.0, a2 = 25.0;
    int n_cells = 100;
    BedSpec bed;
    InitialSpec initial;
    BoundaryForcing boundary;
    double t_final = 1.0;
    double cfl_c = 0.9;
    double theta = 1.0;
    double gravity = 9.812;
    std::optional<double> t_star; // empty: t* = t_f
    HistoryPolicy history = HistoryPolicy::Full;

    Grid grid() const { return build_grid(a1, a2, n_cells); }

    void validate() const {
        if (!(cfl_c > 0.0 && cfl_c < 1.0)) throw std::invalid_argument("ScenarioConfig: cfl_c must lie in (0,1)");
        if (!(theta >= 1.0 && theta <= 2.0)) throw std::invalid_argument("ScenarioConfig: theta must lie in [1,2]");
        if (!(t_final > 0.0)) throw std::invalid_argument("ScenarioConfig: t_final must be positive");
        if (!(gravity > 0.0)) throw std::invalid_argument("ScenarioConfig: gravity must be positive");
        boundary.validate();
        (void)grid();
    }
};

} // namespace bathyrec
