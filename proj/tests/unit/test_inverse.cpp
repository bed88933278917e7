#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bathyrec/inverse.hpp"
#include "bathyrec/steady.hpp"

using namespace bathyrec;
using Catch::Approx;

namespace {

SurfaceSnapshot blank_snapshot(const Grid& g, double zeta, double q_in) {
    SurfaceSnapshot s;
    s.zeta.assign(g.n_cells, zeta);
    s.dzeta_dt.assign(g.n_cells, 0.0);
    s.d2zeta_dt2.assign(g.n_cells, 0.0);
    s.q_in = q_in;
    s.dq_in_dt = 0.0;
    s.b_a1 = 0.0;
    return s;
}

/// Manufactured smooth fields satisfying the inverse-model identities:
/// dzeta/dt := -q'(x) and d2zeta/dt2 := -(dq/dt)'(x) with
/// dq/dt := -phi'(x) - g zeta'(x) h(x).
struct Manufactured {
    double g = 9.812;
    double w = 2.0 * std::numbers::pi / 25.0;

    double zeta(double x) const { return 2.0 + 0.1 * std::sin(w * x); }
    double dzeta(double x) const { return 0.1 * w * std::cos(w * x); }
    double d2zeta(double x) const { return -0.1 * w * w * std::sin(w * x); }
    double bed(double x) const {
        const double s = (x - 10.0) / 3.0;
        return 0.15 * std::exp(-s * s) + 0.05 * std::sin(w * x);
    }
    double dbed(double x) const {
        const double s = (x - 10.0) / 3.0;
        return 0.15 * std::exp(-s * s) * (-2.0 * s / 3.0) + 0.05 * w * std::cos(w * x);
    }
    double d2bed(double x) const {
        const double s = (x - 10.0) / 3.0;
        return 0.15 * std::exp(-s * s) * (4.0 * s * s - 2.0) / 9.0 -
               0.05 * w * w * std::sin(w * x);
    }
    double q(double x) const { return 4.0 + 0.3 * std::cos(w * x); }
    double dq(double x) const { return -0.3 * w * std::sin(w * x); }
    double d2q(double x) const { return -0.3 * w * w * std::cos(w * x); }
    double h(double x) const { return zeta(x) - bed(x); }
    double dh(double x) const { return dzeta(x) - dbed(x); }
    double d2h(double x) const { return d2zeta(x) - d2bed(x); }
    double phi(double x) const { return q(x) * q(x) / h(x); }
    double dphi(double x) const {
        return (2.0 * q(x) * dq(x)) / h(x) - q(x) * q(x) * dh(x) / (h(x) * h(x));
    }
    double d2phi(double x) const {
        const double hh = h(x);
        return (2.0 * dq(x) * dq(x) + 2.0 * q(x) * d2q(x)) / hh -
               (4.0 * q(x) * dq(x) * dh(x) + q(x) * q(x) * d2h(x)) / (hh * hh) +
               2.0 * q(x) * q(x) * dh(x) * dh(x) / (hh * hh * hh);
    }
    double dtq(double x) const { return -dphi(x) - g * dzeta(x) * h(x); }
    double ddtq(double x) const {
        return -d2phi(x) - g * (d2zeta(x) * h(x) + dzeta(x) * dh(x));
    }

    SurfaceSnapshot snapshot(const Grid& grid) const {
        SurfaceSnapshot s;
        s.zeta.resize(grid.n_cells);
        s.dzeta_dt.resize(grid.n_cells);
        s.d2zeta_dt2.resize(grid.n_cells);
        for (int j = 0; j < grid.n_cells; ++j) {
            const double x = grid.center(j);
            s.zeta[j] = zeta(x);
            s.dzeta_dt[j] = -dq(x);
            s.d2zeta_dt2[j] = -ddtq(x);
        }
        s.q_in = q(grid.a1);
        s.dq_in_dt = dtq(grid.a1);
        s.b_a1 = bed(grid.a1);
        return s;
    }
};

} // namespace

TEST_CASE("reconstruct_discharge") {
    const Grid g = build_grid(0.0, 25.0, 100);
    SECTION("steady continuity: zero surface rate keeps q constant") {
        const auto s = blank_snapshot(g, 2.0, 4.42);
        for (double q : reconstruct_discharge(s, g)) CHECK(q == Approx(4.42).margin(1e-14));
    }
    SECTION("constant surface rate gives the exact affine profile") {
        auto s = blank_snapshot(g, 2.0, 4.42);
        const double k = 0.03;
        s.dzeta_dt.assign(g.n_cells, k);
        const auto q = reconstruct_discharge(s, g);
        for (int j = 0; j < g.n_cells; ++j)
            CHECK(q[j] == Approx(4.42 - k * (g.center(j) - g.a1)).margin(1e-13));
    }
}

TEST_CASE("reconstruct_dq_dt mirrors the discharge march") {
    const Grid g = build_grid(0.0, 25.0, 100);
    auto s = blank_snapshot(g, 2.0, 4.42);
    SECTION("zero curvature keeps dq/dt at its inlet value") {
        s.dq_in_dt = 0.7;
        for (double v : reconstruct_dq_dt(s, g)) CHECK(v == Approx(0.7).margin(1e-14));
    }
    SECTION("constant d2zeta/dt2 gives the exact affine profile") {
        const double k = 0.02;
        s.d2zeta_dt2.assign(g.n_cells, k);
        s.dq_in_dt = 0.1;
        const auto v = reconstruct_dq_dt(s, g);
        for (int j = 0; j < g.n_cells; ++j)
            CHECK(v[j] == Approx(0.1 - k * (g.center(j) - g.a1)).margin(1e-13));
    }
}

TEST_CASE("solve_phi") {
    const Grid g = build_grid(0.0, 25.0, 100);
    SECTION("zero right-hand side keeps phi at its inlet value") {
        const auto s = blank_snapshot(g, 2.0, 4.42);
        const auto q = reconstruct_discharge(s, g);
        const auto dq = reconstruct_dq_dt(s, g);
        const auto m = solve_phi(s, q, dq, g, 9.812);
        REQUIRE(!m.degenerate);
        const double phi_a1 = 4.42 * 4.42 / 2.0;
        for (double p : m.phi) CHECK(p == Approx(phi_a1).margin(1e-12));
    }
    SECTION("zero inlet discharge is flagged degenerate at the first cell") {
        const auto s = blank_snapshot(g, 2.0, 0.0);
        const auto q = reconstruct_discharge(s, g);
        const auto dq = reconstruct_dq_dt(s, g);
        const auto m = solve_phi(s, q, dq, g, 9.812);
        CHECK(m.degenerate);
        CHECK(m.degenerate_cell == 0);
    }
    SECTION("nonpositive inlet depth is rejected") {
        auto s = blank_snapshot(g, 2.0, 4.42);
        s.b_a1 = 2.5;
        const auto q = reconstruct_discharge(s, g);
        const auto dq = reconstruct_dq_dt(s, g);
        CHECK_THROWS_AS(solve_phi(s, q, dq, g, 9.812), std::invalid_argument);
    }
}

TEST_CASE("assemble_bed is the algebraic identity b = zeta - q^2/phi") {
    const Grid g = build_grid(0.0, 25.0, 64);
    Manufactured m;
    SurfaceSnapshot s = m.snapshot(g);
    std::vector<double> q(g.n_cells), phi(g.n_cells);
    for (int j = 0; j < g.n_cells; ++j) {
        const double x = g.center(j);
        q[j] = m.q(x);
        phi[j] = m.phi(x);
    }
    const auto b = assemble_bed(s, q, phi);
    for (int j = 0; j < g.n_cells; ++j)
        CHECK(b[j] == Approx(m.bed(g.center(j))).margin(1e-12));
    SECTION("a zero-discharge cell returns the surface there") {
        q[10] = 0.0;
        const auto b2 = assemble_bed(s, q, phi);
        CHECK(b2[10] == s.zeta[10]);
    }
}

TEST_CASE("inlet anchoring: the upstream bed value is reproduced exactly") {
    const Grid g = build_grid(0.0, 25.0, 100);
    Manufactured m;
    const auto s = m.snapshot(g);
    const auto r = reconstruct(s, g, m.g);
    REQUIRE(!r.degenerate);
    // at a1 the anchor phi(a1) = q_in^2 / (zeta(a1) - b(a1)) inverts to b(a1)
    const double zeta_a1 = extrapolate_to_inlet(s.zeta, g);
    const double phi_a1 = s.q_in * s.q_in / (zeta_a1 - s.b_a1);
    CHECK(zeta_a1 - s.q_in * s.q_in / phi_a1 == Approx(s.b_a1).margin(1e-12));
    // and the first-cell bed is reproduced to the march accuracy
    CHECK(r.b_rec[0] == Approx(m.bed(g.center(0))).margin(2e-3));
}

TEST_CASE("manufactured solution: full inverse chain converges at second order") {
    Manufactured m;
    std::vector<double> errs;
    for (int n : {100, 200, 400}) {
        const Grid g = build_grid(0.0, 25.0, n);
        const auto s = m.snapshot(g);
        const auto r = reconstruct(s, g, m.g);
        REQUIRE(!r.degenerate);
        double linf = 0.0;
        for (int j = 0; j < n; ++j)
            linf = std::max(linf, std::abs(r.b_rec[j] - m.bed(g.center(j))));
        errs.push_back(linf);
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);
}

TEST_CASE("steady consistency: the Heun march approaches the closed form at O(dx^2)") {
    // exact steady data (Bernoulli surface over the smooth sech hump); the
    // marched-and-assembled bed and the closed-form bed differ only by the
    // march truncation, so the gap must shrink by >= 3x per grid doubling
    const double q = 4.42, h1 = 2.0, gr = 9.812;
    auto gap_for = [&](int n) {
        const Grid g = build_grid(0.0, 25.0, n);
        SurfaceSnapshot s;
        s.zeta.resize(n);
        s.dzeta_dt.assign(n, 0.0);
        s.d2zeta_dt2.assign(n, 0.0);
        s.q_in = q;
        s.dq_in_dt = 0.0;
        const double e0 = h1 + q * q / (2.0 * gr * h1 * h1);
        auto h_of = [&](double b) {
            double h = h1;
            for (int it = 0; it < 60; ++it) {
                const double f = h + q * q / (2.0 * gr * h * h) + b - e0;
                const double df = 1.0 - q * q / (gr * h * h * h);
                h -= f / df;
            }
            return h;
        };
        for (int j = 0; j < n; ++j) {
            const double b = bed_eval(BedSpec::sech(0.2), g.center(j));
            s.zeta[j] = h_of(b) + b;
        }
        s.b_a1 = bed_eval(BedSpec::sech(0.2), g.a1);
        const auto rec = reconstruct(s, g, gr);
        REQUIRE(!rec.degenerate);
        const double zeta_a1 = extrapolate_to_inlet(s.zeta, g);
        const auto closed = steady_analytic(s.zeta, q, zeta_a1 - s.b_a1, g, gr, zeta_a1);
        double gap = 0.0;
        for (int j = 0; j < n; ++j) gap = std::max(gap, std::abs(rec.b_rec[j] - closed.b[j]));
        return gap;
    };
    const double g100 = gap_for(100), g200 = gap_for(200), g400 = gap_for(400);
    CHECK(g100 / g200 >= 3.0);
    CHECK(g200 / g400 >= 3.0);
}

TEST_CASE("steady closed forms") {
    const Grid g = build_grid(0.0, 25.0, 100);
    SECTION("flat surface gives constant depth and bed") {
        std::vector<double> zeta(g.n_cells, 2.0);
        const auto r = steady_analytic(zeta, 4.42, 2.0, g, 9.812);
        for (int j = 0; j < g.n_cells; ++j) {
            CHECK(r.h[j] == Approx(2.0).margin(1e-13));
            CHECK(r.b[j] == Approx(0.0).margin(1e-13));
        }
    }
    SECTION("direct substitution of the closed form") {
        // q = 4.42, h(a1) = 2, zeta drop of 0.1
        std::vector<double> zeta(g.n_cells, 2.0);
        zeta[50] = 1.9;
        const auto r = steady_analytic(zeta, 4.42, 2.0, g, 9.812, 2.0);
        const double inv_h2 = 0.25 + (2.0 * 9.812 / (4.42 * 4.42)) * 0.1;
        CHECK(r.h[50] == Approx(1.0 / std::sqrt(inv_h2)).epsilon(1e-12));
        CHECK(r.h[50] == Approx(1.6893).margin(2e-4));
    }
    SECTION("nonpositive radicand is reported as unsteady data") {
        std::vector<double> zeta(g.n_cells, 2.0);
        zeta[50] = 2.0 + 1.0 / (2.0 * 9.812 / (4.42 * 4.42) * 4.0); // pushes 1/h^2 through zero
        CHECK_THROWS_AS(steady_analytic(zeta, 4.42, 2.0, g, 9.812, 2.0), std::runtime_error);
    }
    SECTION("zero discharge rejected") {
        std::vector<double> zeta(g.n_cells, 2.0);
        CHECK_THROWS_AS(steady_analytic(zeta, 0.0, 2.0, g, 9.812), std::invalid_argument);
    }
}

TEST_CASE("steady_discharge_free") {
    const Grid g = build_grid(0.0, 25.0, 100);
    SECTION("recovers the discharge from a consistent steady profile") {
        // build an exact subcritical steady surface for q = 4.42, h(a1) = 2
        const double q = 4.42, h1 = 2.0, gr = 9.812;
        std::vector<double> zeta(g.n_cells);
        auto h_of = [&](double b) {
            // subcritical root of the Bernoulli relation
            // h + q^2/(2 g h^2) + b = h1 + q^2/(2 g h1^2), Newton from h1
            const double e0 = h1 + q * q / (2.0 * gr * h1 * h1);
            double h = h1;
            for (int it = 0; it < 60; ++it) {
                const double f = h + q * q / (2.0 * gr * h * h) + b - e0;
                const double df = 1.0 - q * q / (gr * h * h * h);
                h -= f / df;
            }
            return h;
        };
        for (int j = 0; j < g.n_cells; ++j) {
            const double b = bed_eval(BedSpec::bump(), g.center(j));
            zeta[j] = h_of(b) + b;
        }
        const double x_ref = 10.125; // near the crest
        int j_ref = static_cast<int>((x_ref - g.a1) / g.dx);
        const double h_ref = zeta[j_ref] - bed_eval(BedSpec::bump(), g.center(j_ref));
        const auto r = steady_discharge_free(zeta, h1, x_ref, h_ref, g, gr, h1 + 0.0);
        // recovered bed matches the generator
        for (int j = 0; j < g.n_cells; ++j)
            CHECK(r.b[j] == Approx(bed_eval(BedSpec::bump(), g.center(j))).margin(2e-3));
    }
    SECTION("sign structure: subcritical dip over a rise yields positive q^2") {
        // zeta dips where the bed rises; h(a1) > h_ref
        const double gr = 9.812;
        std::vector<double> zeta(g.n_cells, 2.0);
        zeta[40] = 1.95;
        const double h_ref = 1.6;
        CHECK_NOTHROW(steady_discharge_free(zeta, 2.0, g.center(40), h_ref, g, gr, 2.0));
    }
    SECTION("degenerate denominator is rejected") {
        std::vector<double> zeta(g.n_cells, 2.0);
        zeta[40] = 1.9;
        CHECK_THROWS_AS(steady_discharge_free(zeta, 2.0, g.center(40), 2.0, g, 9.812, 2.0),
                        std::invalid_argument);
    }
    SECTION("flat surface at the reference point is rejected") {
        std::vector<double> zeta(g.n_cells, 2.0);
        CHECK_THROWS_AS(steady_discharge_free(zeta, 2.0, g.center(40), 1.5, g, 9.812, 2.0),
                        std::invalid_argument);
    }
}
