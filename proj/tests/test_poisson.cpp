#include "patchlab/poisson.hpp"

#include "patchlab/rng.hpp"

#include <cmath>

#include "doctest.h"

using namespace patchlab;

TEST_CASE("torsion function of the unit disk: p = (1 - |x|^2)/2") {
    const auto sol = solve_constrained(make_disk({0.0, 0.0}, 1.0));
    CHECK(sol.c.empty());
    CHECK(sol.sup_p() == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(sol.integral_p() == doctest::Approx(kPi / 4.0).epsilon(2e-3));
    // flux conservation: outer flux = -2 |D|
    CHECK(sol.outer_flux == doctest::Approx(-2.0 * kPi).epsilon(1e-3));
    // nodal comparison with the closed form
    double worst = 0.0;
    for (int v = 0; v < sol.mesh.n_vertices(); ++v) {
        const double exact = (1.0 - sol.mesh.vertices[v].squaredNorm()) / 2.0;
        worst = std::max(worst, std::abs(sol.p[v] - exact));
    }
    CHECK(worst < 5e-4);
}

TEST_CASE("centered annulus: closed-form constant and fluxes") {
    // p = (R^2 - |x|^2)/2, c1 = (R^2 - r^2)/2, inner flux -2 pi r^2
    const auto sol = solve_constrained(make_annulus({0.0, 0.0}, 1.0, 2.0));
    REQUIRE(sol.c.size() == 1);
    CHECK(sol.c[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(sol.hole_flux[0] == doctest::Approx(-2.0 * sol.hole_area[0]).epsilon(1e-9));
    CHECK(sol.hole_flux[0] == doctest::Approx(-2.0 * kPi).epsilon(1e-3));
    CHECK(sol.hole_area[0] == doctest::Approx(kPi).epsilon(1e-4));
    // divergence theorem: outer flux - sum hole fluxes = -2 |D|
    CHECK(sol.outer_flux - sol.hole_flux[0] == doctest::Approx(-2.0 * 3.0 * kPi).epsilon(1e-3));
    // Talenti equalities for the annulus
    const auto rep = talenti_report(sol);
    CHECK(rep.sup_p == doctest::Approx(rep.bound_sup).epsilon(1e-3));
    CHECK(rep.int_p == doctest::Approx(rep.bound_int).epsilon(1e-3));
}

TEST_CASE("mesh convergence of the annulus constant is at least first order") {
    double errs[3];
    int idx = 0;
    for (int n_theta : {128, 256, 512}) {
        TriMesh mesh = mesh_two_circle_domain({0.0, 0.0}, 1.0, {0.0, 0.0}, 2.0, n_theta);
        const auto sol = solve_constrained(mesh);
        errs[idx++] = std::abs(sol.c[0] - 1.5);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    CHECK(std::log2(errs[0] / errs[2]) / 2.0 >= 1.0);
}

TEST_CASE("Talenti report: square and ellipse have strict gaps") {
    const auto sq = talenti_report(solve_constrained(make_rect({-1.0, -1.0}, {1.0, 1.0})));
    const double bench = poisson_benchmark_error(8.0 / 512.0);
    CHECK(sq.gap_sup > 10.0 * bench);
    CHECK(sq.gap_int > 10.0 * bench);

    // ellipse closed form: p = (a^2 b^2/(a^2+b^2))(1 - x^2/a^2 - y^2/b^2)
    const auto ell = solve_constrained(make_ellipse({0.0, 0.0}, 2.0, 1.0));
    const auto rep = talenti_report(ell);
    CHECK(rep.sup_p == doctest::Approx(0.8).epsilon(2e-3));
    CHECK(rep.int_p == doctest::Approx(0.8 * kPi).epsilon(2e-3));
    CHECK(rep.gap_int > 10.0 * bench);
}

TEST_CASE("gradient energy identity and inequality") {
    // unit disk at origin: all three equal pi/2
    const auto disk = solve_constrained(make_disk({0.0, 0.0}, 1.0));
    const auto gd = gradient_energy_check(disk);
    CHECK(gd.grad_p_sq == doctest::Approx(kPi / 2.0).epsilon(5e-3));
    CHECK(gd.x_sq == doctest::Approx(kPi / 2.0).epsilon(5e-3));
    CHECK(gd.minus_gradp_x == doctest::Approx(gd.grad_p_sq).epsilon(5e-3));

    // off-center disk: strict gap
    const auto off = gradient_energy_check(solve_constrained(make_disk({1.0, 0.0}, 1.0)));
    CHECK(off.minus_gradp_x == doctest::Approx(off.grad_p_sq).epsilon(5e-3));
    CHECK(off.grad_p_sq < 0.9 * off.x_sq);

    // ellipse closed form: int |grad p|^2 = pi a^3 b^3/(a^2+b^2) = 1.6 pi < 2.5 pi
    const auto ell = gradient_energy_check(solve_constrained(make_ellipse({0.0, 0.0}, 2.0, 1.0)));
    CHECK(ell.grad_p_sq == doctest::Approx(1.6 * kPi).epsilon(5e-3));
    CHECK(ell.x_sq == doctest::Approx(2.5 * kPi).epsilon(5e-3));
    CHECK(ell.grad_p_sq < ell.x_sq);
}

TEST_CASE("distribution function: disk exact line, polygon bound") {
    const auto disk = solve_constrained(make_disk({0.0, 0.0}, 1.0));
    const auto df = distribution_function(disk);
    for (size_t i = 0; i < df.k.size(); ++i) {
        // level sets of (1-|x|^2)/2 are disks: g(k) = pi - 2 pi k
        CHECK(std::abs(df.g[i] - (kPi - 2.0 * kPi * df.k[i])) < 2e-2);
        CHECK(df.g[i] <= std::max(kPi - 2.0 * kPi * df.k[i], 0.0) + 2e-2);
        if (i > 0) CHECK(df.g[i] <= df.g[i - 1] + 1e-12);
    }

    SplitMix64 rng(3);
    const auto poly = solve_constrained(random_star_polygon(rng, 28));
    const double area = poly.domain_area();
    const auto dfp = distribution_function(poly);
    for (size_t i = 0; i < dfp.k.size(); ++i)
        CHECK(dfp.g[i] <= std::max(area - 2.0 * kPi * dfp.k[i], 0.0) + 2e-2);
}

TEST_CASE("mobius root: bracketing, residual, limit, symmetry") {
    for (auto [a, eps] : {std::pair{0.5, 0.001}, std::pair{0.9, 0.01}}) {
        const double b = mobius_b(a, eps);
        CHECK(a / 2.0 < b);
        CHECK(b < a);
        const double coef = (2.0 + (1.0 - a * a) * eps) / a;
        CHECK(std::abs(b * b - coef * b + 1.0) < 1e-12);
        // h maps the outer-circle endpoints to opposite points
        auto h = [&](double z) { return (z + b) / (1.0 + b * z); };
        CHECK(std::abs(h(1.0 + eps + a * eps) + h(-1.0 - eps + a * eps)) < 1e-12);
    }
    // eps -> 0 limit: smaller root of b^2 - (2/a) b + 1
    const double a0 = 0.7;
    const double limit = (1.0 - std::sqrt(1.0 - a0 * a0)) / a0;
    CHECK(mobius_b(a0, 1e-9) == doctest::Approx(limit).epsilon(1e-6));
    CHECK_THROWS_AS(mobius_b(0.5, 0.01), domain_error);  // eps >= a^2/64
    // frozen oracle values
    CHECK(mobius_b(0.5, 0.001) == doctest::Approx(0.26783322112687708).epsilon(1e-12));
    CHECK(mobius_b(0.9, 0.01) == doctest::Approx(0.62542783069357068).epsilon(1e-12));
}

TEST_CASE("thin annulus bound at the acceptance pairs") {
    const auto r1 = thin_annulus_bound(0.5, 1e-3);
    CHECK(r1.pass);
    CHECK(r1.solver_c1 > 0.0);
    // frozen: bound = (|D|/2pi)(1 - a^2/16)
    CHECK(r1.bound == doctest::Approx(9.84867187500e-4).epsilon(1e-10));

    const auto r2 = thin_annulus_bound(0.9, 1e-2);
    CHECK(r2.pass);
    CHECK(r2.bound == doctest::Approx(9.54121875e-3).epsilon(1e-10));
}

TEST_CASE("eccentric annulus bound, quadratic-root limit, solver agreement") {
    const auto r1 = eccentric_annulus_bound(1.0, 2.0, 0.5);
    CHECK(r1.beta_max == doctest::Approx(1.4685019685029528).epsilon(1e-12));
    CHECK(r1.pass);
    CHECK(r1.solver_c1 < 1.5);

    const auto r2 = eccentric_annulus_bound(1.0, 2.0, 0.9);
    CHECK(r2.beta_max == doctest::Approx(1.3960485225858541).epsilon(1e-12));
    CHECK(r2.pass);
    // nearly touching: markedly below the concentric value
    const auto r3 = eccentric_annulus_bound(1.0, 2.0, 0.98);
    CHECK(r3.beta_max < 1.4);
    CHECK(r3.pass);

    // l -> 0 recovers the concentric equality case
    const auto r0 = eccentric_annulus_bound(1.0, 2.0, 0.0, 512);
    CHECK(r0.beta_max == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r0.solver_c1 == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("matrix sign pattern and fluxes on random multi-hole shapes") {
    SplitMix64 rng(17);
    int built = 0;
    for (int trial = 0; trial < 14 && built < 10; ++trial) {
        // star-shaped outer loop with 1-3 disk holes
        const Patch outer = random_star_polygon(rng, 40, 1.0, 0.25);
        const auto& oloop = std::get<PolygonShape>(outer.components.front()).outer;
        std::vector<Loop> holes;
        const int want = 1 + static_cast<int>(rng.next() % 3);
        for (int h = 0; h < want; ++h) {
            const double ang = rng.uniform(0.0, 2.0 * kPi);
            const double rad = rng.uniform(0.2, 0.45);
            const Vec2 c(rad * std::cos(ang), rad * std::sin(ang));
            const double rr = rng.uniform(0.08, 0.16);
            bool clear = c.norm() + rr < 0.6;
            for (const Loop& prev : holes)
                if ((loop_first_moment(prev) / loop_signed_area(prev) - c).norm() <
                    rr + 0.22)
                    clear = false;
            if (!clear) continue;
            Loop hole(24);
            for (int i = 0; i < 24; ++i) {
                const double t = 2.0 * kPi * i / 24.0;
                hole[i] = c + rr * Vec2(std::cos(t), std::sin(t));
            }
            holes.push_back(hole);
        }
        if (holes.empty()) continue;
        ++built;
        const auto sol = solve_constrained(make_polygon(oloop, holes), 0.02);
        const int n = static_cast<int>(sol.c.size());
        // c_i > 0 and the Hopf-lemma sign pattern
        for (int i = 0; i < n; ++i) CHECK(sol.c[i] > 0.0);
        for (int j = 0; j < n; ++j) {
            CHECK(sol.A(j, j) < 0.0);
            double colsum = 0.0;
            for (int i = 0; i < n; ++i) {
                if (i != j) CHECK(sol.A(i, j) > 0.0);
                colsum += sol.A(i, j);
            }
            CHECK(colsum < 0.0);
        }
        // hole fluxes hit -2|h_i| to 1e-3 relative
        for (int i = 0; i < n; ++i)
            CHECK(sol.hole_flux[i] ==
                  doctest::Approx(-2.0 * sol.hole_area[i]).epsilon(1e-3));
        // conservation: outer - sum holes = -2 |D|
        double hole_sum = 0.0;
        for (int i = 0; i < n; ++i) hole_sum += sol.hole_flux[i];
        CHECK(sol.outer_flux - hole_sum ==
              doctest::Approx(-2.0 * sol.domain_area()).epsilon(2e-3));
        // maximum principle: 0 <= p <= sup c + diameter bound
        CHECK(sol.p.minCoeff() > -1e-9);
        CHECK(sol.sup_p() <= sol.domain_area() / (2.0 * kPi) + 1e-3);
    }
    CHECK(built == 10);
}

TEST_CASE("asymmetry-hole report") {
    // square with a round hole: strict ratio < 1
    Loop hole(32);
    for (int i = 0; i < 32; ++i) {
        const double t = 2.0 * kPi * i / 32.0;
        hole[i] = Vec2(0.15, 0.1) + 0.3 * Vec2(std::cos(t), std::sin(t));
    }
    const Patch sq_hole = make_polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {hole});
    const auto rep = asymmetry_hole_bound(sq_hole);
    CHECK(rep.ratio_below_one);
    CHECK(rep.weak_chain_holds);
    CHECK(rep.asymmetry > 1e-2);

    // concentric annulus: ratio -> 1
    const auto conc = asymmetry_hole_bound(make_annulus({0.0, 0.0}, 1.0, 2.0));
    CHECK(conc.ratio == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(conc.weak_chain_holds);

    // eccentric thin annulus: ratio <= 1 - a^2/16
    const auto thin = thin_annulus_bound(0.5, 1e-3);
    const double ratio = thin.solver_c1 / (kPi * (std::pow(1.001, 2) - 1.0) / (2.0 * kPi));
    CHECK(ratio <= 1.0 - 0.25 / 16.0 + 1e-3);
}

TEST_CASE("isoperimetric direction P >= 2 sqrt(pi |E|) on test shapes") {
    SplitMix64 rng(23);
    for (int t = 0; t < 8; ++t) {
        const Patch poly = random_star_polygon(rng, 32);
        const Measures m = measures(poly);
        CHECK(m.perimeter >= 2.0 * std::sqrt(kPi * m.area) - 1e-9);
    }
    const Measures md = measures(make_disk({0.3, -0.4}, 1.3));
    CHECK(md.perimeter == doctest::Approx(2.0 * std::sqrt(kPi * md.area)).epsilon(1e-12));
}

TEST_CASE("subset asymmetry lemma on random doubly-connected sets") {
    SplitMix64 rng(31);
    int done = 0;
    for (int trial = 0; trial < 40 && done < 20; ++trial) {
        const Patch E = random_annular_polygon(rng, 40);
        const double aE = fraenkel_asymmetry(E, 192);
        if (aE < 5e-3) continue;
        // carve a boundary-hugging chunk U subset E with |U| >= |E|(1 - A/4)
        const Measures mE = measures(E);
        const RasterSpec spec = RasterSpec::cover(bounding_box(E), 192);
        RasterShape r = rasterize(E, spec);
        const double target_remove = mE.area * aE / 4.0 * rng.uniform(0.2, 0.8);
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        Vec2 dir(std::cos(ang), std::sin(ang));
        // remove cells beyond a moving half-plane until the quota is met
        std::vector<std::pair<double, std::pair<int, int>>> order;
        for (int j = 0; j < r.ny; ++j)
            for (int i = 0; i < r.nx; ++i)
                if (r.at(i, j)) order.push_back({dir.dot(r.cell_center(i, j)), {i, j}});
        std::sort(order.begin(), order.end());
        double removed = 0.0;
        for (auto it = order.rbegin(); it != order.rend() && removed < target_remove; ++it) {
            r.set(it->second.first, it->second.second, false);
            removed += r.h * r.h;
        }
        const Patch U{Patch(r)};
        const double aU = fraenkel_asymmetry(U, 192);
        CHECK(aU >= aE / 4.0 - 0.02);
        ++done;
    }
    CHECK(done == 20);
}
