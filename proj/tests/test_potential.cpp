#include "patchlab/potential.hpp"

#include "patchlab/rng.hpp"

#include <cmath>

#include "doctest.h"

using namespace patchlab;

namespace {

ScalarField radial_bump(int n = 256, double extent = 4.0, const Vec2& center = {0.0, 0.0},
                        double R = 1.0) {
    ScalarField f = make_field({-extent / 2 + extent / (2 * n), -extent / 2 + extent / (2 * n)},
                               extent / n, n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = (f.cell_center(i, j) - center).norm() / R;
            f.values(i, j) = r < 1.0 ? std::exp(1.0 / (r * r - 1.0)) : 0.0;
        }
    return f;
}

}  // namespace

TEST_CASE("Newtonian potential of the disk: log far field and hole constancy") {
    const KernelSpec k0 = make_kernel(0.0);
    const Patch disk = make_disk({0.0, 0.0}, 1.0);
    // (area/2pi) ln|x| outside: exact for the polygonized area, and within
    // the polygonization deficit of the analytic one
    const double poly_area = measures(Patch(polygonize(disk, 512)[0])).area;
    for (double r : {1.5, 2.0, 4.0}) {
        const double v = convolve_indicator(disk, k0, {r, 0.3 * r});
        const double lnr = std::log(std::hypot(r, 0.3 * r));
        CHECK(v == doctest::Approx(poly_area / (2.0 * kPi) * lnr).epsilon(1e-10));
        CHECK(v == doctest::Approx(kPi / (2.0 * kPi) * lnr).epsilon(1e-4));
    }
    // inside a concentric hole the potential is constant
    const Patch ann = make_annulus({0.0, 0.0}, 1.0, 2.0);
    const double v0 = convolve_indicator(ann, k0, {0.0, 0.0});
    for (const Vec2 p : {Vec2(0.3, 0.2), Vec2(-0.5, 0.4), Vec2(0.0, -0.8)}) {
        CHECK(convolve_indicator(ann, k0, p) == doctest::Approx(v0).epsilon(1e-8));
    }
    // interior closed form (r^2 - R^2)/4 + (R^2/2) ln R at R = 1
    const double vin = convolve_indicator(disk, k0, {0.5, 0.0});
    CHECK(vin == doctest::Approx(disk_kernel_potential(1.0, k0, 0.5)).epsilon(2e-5));
}

TEST_CASE("Riesz potential of the disk matches the closed form") {
    const KernelSpec k = make_kernel(0.5);
    const Patch disk = make_disk({0.0, 0.0}, 1.0);
    // center value: -C_alpha 2 pi/(2 - alpha), polar oracle
    const double v = convolve_indicator(disk, k, {0.0, 0.0}, 4096);
    CHECK(v == doctest::Approx(-k.c_alpha * 2.0 * kPi / 1.5).epsilon(2e-6));
    for (double r : {0.4, 0.9, 1.0, 1.3, 3.0}) {
        CHECK(convolve_indicator(disk, k, {r, 0.0}) ==
              doctest::Approx(disk_kernel_potential(1.0, k, r)).epsilon(2e-4));
    }
    // raster quadrature route agrees too
    const RasterShape raster = rasterize(disk, RasterSpec::cover(bounding_box(disk), 256));
    CHECK(convolve_indicator(Patch(raster), k, {0.0, 0.0}) ==
          doctest::Approx(-k.c_alpha * 2.0 * kPi / 1.5).epsilon(5e-3));
}

TEST_CASE("f_omega is constant on the boundary of radial states for any Omega") {
    for (double alpha : {0.0, 0.5}) {
        const KernelSpec k = make_kernel(alpha);
        for (double om : {-1.0, 0.0, 0.5, 3.0}) {
            const auto st = make_patch_state(make_disk({0.0, 0.0}, 1.0), om, k);
            const auto rep = stationarity_residual(st);
            CHECK(rep.max_oscillation <= rep.tolerance);
            CHECK(rep.is_rotating_solution);
        }
    }
}

TEST_CASE("centered annulus is stationary with distinct boundary constants") {
    const auto st = make_patch_state(make_annulus({0.0, 0.0}, 1.0, 2.0), 0.0, make_kernel(0.0));
    const auto rep = stationarity_residual(st);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.is_rotating_solution);
    CHECK(std::abs(rep.rows[0].mean_value - rep.rows[1].mean_value) > 10.0 * rep.tolerance);
}

TEST_CASE("Kirchhoff ellipse is a rotating solution exactly at ab/(a+b)^2") {
    const Patch ell = make_ellipse({0.0, 0.0}, 2.0, 1.0);
    const KernelSpec k0 = make_kernel(0.0);
    const auto good = stationarity_residual(make_patch_state(ell, 2.0 / 9.0, k0));
    CHECK(good.is_rotating_solution);
    const auto bad = stationarity_residual(make_patch_state(ell, 0.3, k0));
    CHECK_FALSE(bad.is_rotating_solution);
    CHECK(bad.max_oscillation > 1e3 * good.max_oscillation);  // test discriminance

    // square patch is not stationary
    const auto sq = stationarity_residual(
        make_patch_state(make_rect({-1.0, -1.0}, {1.0, 1.0}), 0.0, k0));
    CHECK_FALSE(sq.is_rotating_solution);
}

TEST_CASE("velocity: zero at disk center, point-vortex far field, Kirchhoff tangency") {
    const KernelSpec k0 = make_kernel(0.0);
    const auto disk = make_patch_state(make_disk({0.0, 0.0}, 1.0), 0.0, k0);
    CHECK(velocity(disk, {0.0, 0.0}).norm() < 1e-10);

    // |u| = |D|/(2 pi |x|), tangential
    const Vec2 u = velocity(disk, {2.0, 0.0});
    CHECK(u.norm() == doctest::Approx(1.0 / 4.0).epsilon(1e-4));
    CHECK(std::abs(u.x()) < 1e-8);

    // relative-frame tangency on the Kirchhoff ellipse
    const Patch ell = make_ellipse({0.0, 0.0}, 2.0, 1.0);
    const auto st = make_patch_state(ell, 2.0 / 9.0, k0);
    const auto comps = boundary_components(ell, 256);
    double worst = 0.0;
    for (size_t i = 0; i < comps[0].nodes.size(); i += 8) {
        const Vec2 p = comps[0].nodes[i];
        const Vec2 next = comps[0].nodes[(i + 1) % comps[0].nodes.size()];
        const Vec2 prev = comps[0].nodes[(i + comps[0].nodes.size() - 1) % comps[0].nodes.size()];
        Vec2 tangent = (next - prev).normalized();
        const Vec2 n(tangent.y(), -tangent.x());
        const Vec2 rel = velocity(st, p) - st.omega * Vec2(-p.y(), p.x());
        worst = std::max(worst, std::abs(rel.dot(n)) / rel.norm());
    }
    CHECK(worst < 2e-3);
}

TEST_CASE("grid potential matches boundary quadrature for a smooth density") {
    const ScalarField w = radial_bump();
    const KernelSpec k0 = make_kernel(0.0);
    const ScalarField pot = grid_kernel_potential(w, k0);
    // total mass and the far-field log law
    const double mass = w.grid_integral();
    const Vec2 pfar(1.9, 0.0);
    CHECK(pot.bilinear(pfar) ==
          doctest::Approx(mass / (2.0 * kPi) * std::log(pfar.norm())).epsilon(5e-3));
}

TEST_CASE("level set components of radial and annular fields") {
    const ScalarField w = radial_bump();
    const auto loops = level_set_components(w, 0.5 * w.max_value());
    REQUIRE(loops.size() == 1);
    // contour radius equals the radial-profile root r = sqrt(ln2/(1+ln2))
    const double expect = std::sqrt(std::log(2.0) / (1.0 + std::log(2.0)));
    for (const Vec2& p : loops[0]) CHECK(p.norm() == doctest::Approx(expect).epsilon(2e-2));

    // annular bump has two nested contours
    ScalarField ann = w;
    for (int j = 0; j < ann.ny; ++j)
        for (int i = 0; i < ann.nx; ++i) {
            const double r = (ann.cell_center(i, j).norm() - 1.0) / 0.5;
            ann.values(i, j) = std::abs(r) < 1.0 ? std::exp(1.0 / (r * r - 1.0)) : 0.0;
        }
    CHECK(level_set_components(ann, 0.5 * ann.max_value()).size() == 2);

    // level above the maximum: empty list
    CHECK(level_set_components(w, 2.0 * w.max_value()).empty());
}

TEST_CASE("smooth residual: radial states pass, translated fails for negative Omega") {
    const KernelSpec k0 = make_kernel(0.0);
    const ScalarField centered = radial_bump();
    const auto stc = make_smooth_state(centered, -0.3, k0);
    std::vector<double> levels;
    for (double f : {0.15, 0.3, 0.5, 0.7, 0.85}) levels.push_back(f * centered.max_value());
    const auto repc = smooth_residual(stc, levels);
    CHECK(repc.max_oscillation <= repc.tolerance);

    const ScalarField shifted = radial_bump(256, 4.0, {0.45, 0.0});
    const auto reps = smooth_residual(make_smooth_state(shifted, -0.3, k0), levels);
    CHECK(reps.max_oscillation > 10.0 * reps.tolerance);

    // stationarity is translation invariant at Omega = 0
    const auto rep0 = smooth_residual(make_smooth_state(shifted, 0.0, k0), levels);
    CHECK(rep0.max_oscillation <= rep0.tolerance);
}

TEST_CASE("step approximation: nesting, sup bound, integral convergence") {
    const ScalarField w = radial_bump();
    const double mass = w.grid_integral();
    double prev_err = 1e30;
    for (int n : {4, 8, 16}) {
        const auto step = step_approximation(w, n);
        CHECK(step.sup_error <= 2.0 * w.max_value() / n);
        CHECK(step.sup_error < prev_err);
        prev_err = step.sup_error;
        CHECK(std::abs(step.total_integral - mass) < 4.0 * mass / n);
    }
    // radial bump: nested annular/disk components, one per band
    const auto s8 = step_approximation(w, 8);
    CHECK(s8.patch.components.size() == 8);
}

TEST_CASE("Hoelder regularity proxy for f_Omega") {
    SplitMix64 rng(5);
    const Patch poly = random_star_polygon(rng, 32);
    for (double alpha : {0.0, 0.5, 1.5}) {
        const KernelSpec k = make_kernel(alpha);
        const auto st = make_patch_state(poly, 0.2, k);
        const double e = std::min(k.hk_delta(), 1.0);
        double c_big = 0.0;
        for (int trial = 0; trial < 8; ++trial) {
            const Vec2 x(rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
            const Vec2 dir(std::cos(rng.uniform(0.0, 2 * kPi)), std::sin(rng.uniform(0.0, 2 * kPi)));
            const double s = 0.08;
            c_big = std::max(c_big, std::abs(f_omega(st, x + s * dir) - f_omega(st, x)) /
                                        std::pow(s, e));
        }
        // smaller offsets must not blow past the large-offset Hoelder constant
        for (int trial = 0; trial < 8; ++trial) {
            const Vec2 x(rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
            const Vec2 dir(std::cos(rng.uniform(0.0, 2 * kPi)), std::sin(rng.uniform(0.0, 2 * kPi)));
            for (double s : {0.02, 0.005}) {
                const double ratio =
                    std::abs(f_omega(st, x + s * dir) - f_omega(st, x)) / std::pow(s, e);
                CHECK(ratio <= 3.0 * c_big + 1e-9);
            }
        }
    }
}

TEST_CASE("quadrature convergence on the disk benchmark is at least first order") {
    const KernelSpec k0 = make_kernel(0.0);
    const double e128 = disk_benchmark_error(k0, 128);
    const double e256 = disk_benchmark_error(k0, 256);
    const double e512 = disk_benchmark_error(k0, 512);
    CHECK(e256 < e128);
    CHECK(e512 < e256);
    const double order = std::log2(e128 / e512) / 2.0;
    CHECK(order >= 1.0);
}
