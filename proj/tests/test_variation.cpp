#include "patchlab/variation.hpp"

#include "patchlab/rng.hpp"

#include <cmath>

#include "doctest.h"

using namespace patchlab;

namespace {
const KernelSpec k0 = make_kernel(0.0);
}

TEST_CASE("two evaluations of the first variation agree on the basic shapes") {
    struct Row {
        Patch patch;
        double omega;
    };
    const Row rows[] = {
        {make_disk({0.0, 0.0}, 1.0), 0.0},
        {make_disk({0.0, 0.0}, 1.0), 0.5},
        {make_annulus({0.0, 0.0}, 1.0, 2.0), -1.0},
        {make_annulus({0.0, 0.0}, 1.0, 2.0), 0.3},
        {make_ellipse({0.0, 0.0}, 2.0, 1.0), 2.0},
        {make_rect({-1.0, -1.0}, {1.0, 1.0}), 0.3},
    };
    for (const Row& row : rows) {
        const auto rep = first_variation(make_patch_state(row.patch, row.omega, k0));
        CHECK(rep.identity_available);
        CHECK(std::abs(rep.I_boundary - rep.I_identity) <= 1e-3 * rep.pair_term);
    }
}

TEST_CASE("zero-variation law for verified rotating states") {
    // disk at several Omega, centered annulus at 0, Kirchhoff ellipse
    for (double om : {-1.0, 0.0, 0.5, 2.0}) {
        const auto rep = first_variation(make_patch_state(make_disk({0.0, 0.0}, 1.0), om, k0));
        CHECK(std::abs(rep.I_boundary) <= rep.tolerance);
        CHECK(std::abs(rep.I_identity) <= rep.tolerance);
    }
    const auto ann = first_variation(make_patch_state(make_annulus({0.0, 0.0}, 1.0, 2.0), 0.0, k0));
    CHECK(std::abs(ann.I_boundary) <= ann.tolerance);
    const auto kir =
        first_variation(make_patch_state(make_ellipse({0.0, 0.0}, 2.0, 1.0), 2.0 / 9.0, k0));
    CHECK(std::abs(kir.I_boundary) <= kir.tolerance);
    CHECK(std::abs(kir.I_identity) <= kir.tolerance);
}

TEST_CASE("Kirchhoff identity with the closed-form terms") {
    const auto rep =
        first_variation(make_patch_state(make_ellipse({0.0, 0.0}, 2.0, 1.0), 2.0 / 9.0, k0));
    // |D|^2/4pi = pi, int |x|^2 = 2.5 pi, int p = 0.8 pi
    CHECK(rep.pair_term == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(rep.moment_term == doctest::Approx(2.0 / 9.0 * 2.5 * kPi).epsilon(1e-6));
    CHECK(rep.p_term == doctest::Approx((4.0 / 9.0 - 1.0) * 0.8 * kPi).epsilon(1e-3));
    CHECK(std::abs(rep.I_identity) < 1e-3 * kPi);
}

TEST_CASE("sign laws: square at 0, ellipse below 0, above 1/2, off-center disk") {
    const auto sq = first_variation(make_patch_state(make_rect({-1, -1}, {1, 1}), 0.0, k0));
    CHECK(sq.I_identity > sq.tolerance);
    CHECK(rigidity_verdict(sq, 0.0).observed_sign == 1);
    CHECK(rigidity_verdict(sq, 0.0).consistent);

    const auto em = first_variation(make_patch_state(make_ellipse({0, 0}, 2.0, 1.0), -0.1, k0));
    CHECK(em.I_identity > em.tolerance);
    const auto ep = first_variation(make_patch_state(make_ellipse({0, 0}, 2.0, 1.0), 0.5, k0));
    CHECK(ep.I_identity < -ep.tolerance);
    CHECK(rigidity_verdict(ep, 0.5).observed_sign == -1);

    // non-centered disk at Omega = -0.5: I = pi/2 through I2 > 0
    const auto od = first_variation(make_patch_state(make_disk({1.0, 0.0}, 1.0), -0.5, k0));
    CHECK(od.I_identity == doctest::Approx(kPi / 2.0).epsilon(1e-3));
    CHECK(od.I2 == doctest::Approx(kPi).epsilon(1e-3));
    CHECK(od.I1 == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("random star polygons obey both sign laws") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        const Patch poly = random_star_polygon(rng, 36);
        const auto at0 = first_variation(make_patch_state(poly, 0.0, k0));
        CHECK(at0.I_identity > at0.tolerance);
        const auto at5 = first_variation(make_patch_state(poly, 0.5, k0));
        CHECK(at5.I_identity < -at5.tolerance);
        // I2 >= 0 always
        CHECK(at0.I2 > -at0.tolerance);
    }
}

TEST_CASE("multi-component identity: two far disks") {
    Patch two;
    two.components.push_back(DiskShape{{-3.0, 0.0}, 1.0});
    two.components.push_back(DiskShape{{3.0, 0.0}, 1.0});
    VecX w(2);
    w << 1.0, 2.0;
    const auto rep = first_variation(make_patch_state(two, 0.0, k0, w));
    // pair term: (a1^2 + 2 a1 a2 + a2^2) |B|^2 / 4pi = 9 pi^2/(4 pi) pi... = 2.25 pi
    CHECK(rep.pair_term == doctest::Approx(9.0 * kPi * kPi / (4.0 * kPi)).epsilon(1e-6));
    CHECK(std::abs(rep.I_boundary - rep.I_identity) < 1e-3 * rep.pair_term);
}

TEST_CASE("stability bound") {
    // disk: measured 0 <= bound
    const auto d = stability_bound(make_disk({0.0, 0.0}, 1.0), 0.4);
    CHECK(d.pass);
    CHECK(d.measured < 0.05);
    // delta = 1/8: bound = |D| exactly
    const auto e = stability_bound(make_ellipse({0.0, 0.0}, 1.02, 1.0 / 1.02), 0.375);
    CHECK(e.delta == doctest::Approx(0.125));
    CHECK(e.bound == doctest::Approx(measures(make_ellipse({0, 0}, 1.02, 1.0 / 1.02)).area)
                         .epsilon(1e-12));
    CHECK(e.pass);
    CHECK_THROWS_AS(stability_bound(make_disk({0, 0}, 1.0), 0.2), domain_error);
}

TEST_CASE("exterior variation: radial cases small, square persistent, bound holds") {
    const Patch ann = make_annulus({0.0, 0.0}, 1.0, 2.0);
    const auto a1 = exterior_first_variation(ann, 0.5, 8.0, 512);
    CHECK(a1.gradient_bound_holds);
    CHECK(a1.identity_gap < 1e-10);
    // radial equality cases: J terms at the discretization floor
    CHECK(std::abs(a1.J_R1) < 1e-2);
    CHECK(std::abs(a1.J_R2) < 1e-2);

    const auto disk = exterior_first_variation(make_disk({0.0, 0.0}, 1.0), 0.7, 8.0, 512);
    CHECK(std::abs(disk.J_R1) < 1e-2);
    CHECK(std::abs(disk.J_R2) < 1e-2);
    CHECK(disk.gradient_bound_holds);

    // square at Omega = 1/2: -I_R stays bounded away from zero over the R grid
    const Patch sq = make_rect({-1.0, -1.0}, {1.0, 1.0});
    const double R0 = std::sqrt(2.0);
    for (double mult : {4.0, 8.0}) {
        const auto rep = exterior_first_variation(sq, 0.5, mult * R0, 384);
        CHECK(-rep.I_R > 0.05);
        CHECK(rep.gradient_bound_holds);
    }
    CHECK_THROWS_AS(exterior_first_variation(ann, 0.5, 3.0), domain_error);
}
