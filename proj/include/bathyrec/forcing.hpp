#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace bathyrec {

/// base + amplitude * sin(2 pi t / period); a zero amplitude gives a constant law.
struct SinusoidLaw {
    double base = 0.0;
    double amplitude = 0.0;
    double period = 1.0;

    double operator()(double t) const {
        if (amplitude == 0.0) return base;
        return base + amplitude * std::sin(2.0 * std::numbers::pi * t / period);
    }

    void validate() const {
        if (!std::isfinite(base) || !std::isfinite(amplitude))
            throw std::invalid_argument("SinusoidLaw: non-finite parameters");
        if (amplitude != 0.0 && !(period > 0.0))
            throw std::invalid_argument("SinusoidLaw: period must be positive");
    }
};

/// Which quantities are prescribed at the channel ends. A side with nothing
/// prescribed is treated as free outflow (ghost extrapolation).
struct BoundaryForcing {
    std::optional<SinusoidLaw> inlet_q;  // discharge law at a1
    std::optional<SinusoidLaw> inlet_h;  // depth law at a1 (supercritical inflow)
    std::optional<SinusoidLaw> outlet_h; // depth law at a2 (subcritical outflow)

    void validate() const {
        if (inlet_q) inlet_q->validate();
        if (inlet_h) inlet_h->validate();
        if (outlet_h) outlet_h->validate();
        if (inlet_h && outlet_h)
            throw std::invalid_argument("BoundaryForcing: depth may be prescribed at one side only");
        if (inlet_h && !inlet_q)
            throw std::invalid_argument("BoundaryForcing: inlet depth requires an inlet discharge law");
    }
};

struct ForcingValues {
    std::optional<double> q_in, h_in, h_out;
};

inline ForcingValues evaluate_forcing(const BoundaryForcing& bf, double t) {
    ForcingValues v;
    if (bf.inlet_q) v.q_in = (*bf.inlet_q)(t);
    if (bf.inlet_h) v.h_in = (*bf.inlet_h)(t);
    if (bf.outlet_h) v.h_out = (*bf.outlet_h)(t);
    return v;
}

} // namespace bathyrec
