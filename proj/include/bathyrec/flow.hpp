#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bathyrec {

/// Cell-averaged surface elevation and discharge at one time level.
struct FlowField {
    double t = 0.0;
    std::vector<double> zeta;
    std::vector<double> q;
};

/// Time-ordered sequence of flow fields on the solver's nonuniform time mesh.
/// complete_from_start is false when only a trailing window was retained.
struct FlowHistory {
    std::vector<double> times;
    std::vector<FlowField> frames;
    bool complete_from_start = true;

    int levels() const { return static_cast<int>(times.size()); }

    int index_of_time(double t, double tol) const {
        for (int n = levels() - 1; n >= 0; --n)
            if (std::abs(times[n] - t) <= tol) return n;
        throw std::invalid_argument("FlowHistory: requested time is not a stored level");
    }
};

} // namespace bathyrec
