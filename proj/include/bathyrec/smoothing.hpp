#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bathyrec {

/// Natural cubic smoothing spline in the Reinsch formulation: minimize the
/// curvature energy subject to sum_i w_i (y_i - f(x_i))^2 <= budget.
/// Unit weights unless per-point weights are given.
struct SmootherSpec {
    double budget = 0.0;
    std::vector<double> weights; // optional, one per sample
};

namespace detail {

/// Solves the symmetric positive-definite pentadiagonal system A x = rhs,
/// A given by its diagonal and first/second superdiagonals (LDL^T, band 2).
inline std::vector<double> solve_penta(std::vector<double> d0, std::vector<double> d1,
                                       std::vector<double> d2, std::vector<double> rhs) {
    const int m = static_cast<int>(d0.size());
    std::vector<double> l1(m, 0.0), l2(m, 0.0), diag(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double di = d0[i];
        if (i >= 1) di -= l1[i - 1] * l1[i - 1] * diag[i - 1];
        if (i >= 2) di -= l2[i - 2] * l2[i - 2] * diag[i - 2];
        diag[i] = di;
        if (i + 1 < m) {
            double e = d1[i];
            if (i >= 1) e -= l1[i - 1] * l2[i - 1] * diag[i - 1];
            l1[i] = e / diag[i];
        }
        if (i + 2 < m) l2[i] = d2[i] / diag[i];
    }
    for (int i = 0; i < m; ++i) {
        if (i >= 1) rhs[i] -= l1[i - 1] * rhs[i - 1];
        if (i >= 2) rhs[i] -= l2[i - 2] * rhs[i - 2];
    }
    for (int i = 0; i < m; ++i) rhs[i] /= diag[i];
    for (int i = m - 1; i >= 0; --i) {
        if (i + 1 < m) rhs[i] -= l1[i] * rhs[i + 1];
        if (i + 2 < m) rhs[i] -= l2[i] * rhs[i + 2];
    }
    return rhs;
}

struct ReinschSystem {
    int n = 0;
    std::vector<double> h;      // knot spacings
    std::vector<double> winv;   // 1 / w_i
    // R (tridiagonal, (n-2)^2) stored as diagonal + superdiagonal
    std::vector<double> r0, r1;

    // gamma = interior second derivatives; returns fitted values and the
    // weighted residual for the penalty parameter lambda
    void fit(const std::vector<double>& y, double lambda,
             std::vector<double>& fitted, double& resid) const {
        const int m = n - 2;
        // Q^T y
        std::vector<double> qty(m);
        for (int k = 0; k < m; ++k) {
            const int i = k + 1;
            qty[k] = (y[i - 1] - y[i]) / h[i - 1] + (y[i + 1] - y[i]) / h[i];
        }
        // A = R + lambda Q^T W^{-1} Q (pentadiagonal)
        std::vector<double> d0(m), d1(std::max(m - 1, 0)), d2(std::max(m - 2, 0));
        for (int k = 0; k < m; ++k) {
            const int i = k + 1;
            const double a = 1.0 / h[i - 1];
            const double b = -1.0 / h[i - 1] - 1.0 / h[i];
            const double c = 1.0 / h[i];
            d0[k] = r0[k] + lambda * (a * a * winv[i - 1] + b * b * winv[i] + c * c * winv[i + 1]);
            if (k + 1 < m) {
                const double bn = -1.0 / h[i] - 1.0 / h[i + 1];
                d1[k] = r1[k] + lambda * (b * (1.0 / h[i]) * winv[i] + c * bn * winv[i + 1]);
            }
            if (k + 2 < m) d2[k] = lambda * c * (1.0 / h[i + 1]) * winv[i + 1];
        }
        const auto gamma = solve_penta(d0, d1, d2, qty);
        // fitted = y - lambda W^{-1} Q gamma
        fitted = y;
        resid = 0.0;
        std::vector<double> qgam(n, 0.0);
        for (int k = 0; k < m; ++k) {
            const int i = k + 1;
            qgam[i - 1] += gamma[k] / h[i - 1];
            qgam[i] += -gamma[k] * (1.0 / h[i - 1] + 1.0 / h[i]);
            qgam[i + 1] += gamma[k] / h[i];
        }
        for (int i = 0; i < n; ++i) {
            const double e = lambda * winv[i] * qgam[i];
            fitted[i] = y[i] - e;
            resid += e * e / winv[i]; // w_i (y_i - f_i)^2
        }
    }
};

} // namespace detail

/// Fit the smoothing spline and return it evaluated at the input positions.
/// budget = 0 returns the data unchanged (interpolation); a budget at or
/// above the weighted-least-squares line residual returns that line.
inline std::vector<double> smooth_spline(const std::vector<double>& x,
                                         const std::vector<double>& y,
                                         const SmootherSpec& spec) {
    const int n = static_cast<int>(x.size());
    if (n < 4) throw std::invalid_argument("smooth_spline: need at least 4 samples");
    if (y.size() != x.size()) throw std::invalid_argument("smooth_spline: x/y size mismatch");
    for (int i = 0; i + 1 < n; ++i)
        if (!(x[i + 1] > x[i])) throw std::invalid_argument("smooth_spline: x must be strictly increasing");
    if (spec.budget < 0.0) throw std::invalid_argument("smooth_spline: negative budget");
    if (!spec.weights.empty() && static_cast<int>(spec.weights.size()) != n)
        throw std::invalid_argument("smooth_spline: weight count mismatch");

    if (spec.budget == 0.0) return y;

    std::vector<double> w(n, 1.0);
    if (!spec.weights.empty()) {
        w = spec.weights;
        for (double v : w)
            if (!(v > 0.0)) throw std::invalid_argument("smooth_spline: weights must be positive");
    }

    // weighted least-squares line: the infinite-smoothing limit
    {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
            sw += w[i]; sx += w[i] * x[i]; sy += w[i] * y[i];
            sxx += w[i] * x[i] * x[i]; sxy += w[i] * x[i] * y[i];
        }
        const double det = sw * sxx - sx * sx;
        const double slope = (sw * sxy - sx * sy) / det;
        const double icept = (sy - slope * sx) / sw;
        double resid = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = y[i] - (icept + slope * x[i]);
            resid += w[i] * r * r;
        }
        if (resid <= spec.budget) {
            std::vector<double> line(n);
            for (int i = 0; i < n; ++i) line[i] = icept + slope * x[i];
            return line;
        }
    }

    detail::ReinschSystem sys;
    sys.n = n;
    sys.h.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) sys.h[i] = x[i + 1] - x[i];
    sys.winv.resize(n);
    for (int i = 0; i < n; ++i) sys.winv[i] = 1.0 / w[i];
    sys.r0.resize(n - 2);
    sys.r1.assign(std::max(n - 3, 0), 0.0);
    for (int k = 0; k < n - 2; ++k) {
        sys.r0[k] = (sys.h[k] + sys.h[k + 1]) / 3.0;
        if (k + 1 < n - 2) sys.r1[k] = sys.h[k + 1] / 6.0;
    }

    // residual grows monotonically with lambda; bisect on log(lambda)
    std::vector<double> fitted;
    double resid = 0.0;
    double lo = 1e-16, hi = 1e16;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        sys.fit(y, mid, fitted, resid);
        if (resid < spec.budget) lo = mid;
        else hi = mid;
        if (hi / lo < 1.0 + 1e-12) break;
    }
    sys.fit(y, std::sqrt(lo * hi), fitted, resid);
    return fitted;
}

} // namespace bathyrec
