#include "patchlab/rng.hpp"

#include <cmath>

namespace patchlab {

namespace {

Loop star_loop(SplitMix64& rng, int n_vertices, double r0, double roughness, const Vec2& center) {
    const int n_modes = 5;
    double amp[n_modes], phase[n_modes];
    double total = 0.0;
    for (int k = 0; k < n_modes; ++k) {
        amp[k] = rng.uniform(0.2, 1.0);
        phase[k] = rng.uniform(0.0, 2.0 * kPi);
        total += amp[k];
    }
    for (int k = 0; k < n_modes; ++k) amp[k] *= roughness / total;
    Loop loop(n_vertices);
    for (int i = 0; i < n_vertices; ++i) {
        const double th = 2.0 * kPi * i / n_vertices;
        double r = 1.0;
        for (int k = 0; k < n_modes; ++k) r += amp[k] * std::cos((k + 2) * th + phase[k]);
        loop[i] = center + r0 * r * Vec2(std::cos(th), std::sin(th));
    }
    return loop;
}

}  // namespace

Patch random_star_polygon(SplitMix64& rng, int n_vertices, double r0, double roughness) {
    return make_polygon(star_loop(rng, n_vertices, r0, roughness, {0.0, 0.0}));
}

Patch random_annular_polygon(SplitMix64& rng, int n_vertices) {
    Loop outer = star_loop(rng, n_vertices, 1.0, 0.2, {0.0, 0.0});
    Loop hole = star_loop(rng, std::max(16, n_vertices / 2), rng.uniform(0.25, 0.4), 0.15,
                          {rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)});
    return make_polygon(std::move(outer), {std::move(hole)});
}

Patch random_dented_disk(SplitMix64& rng, double R, int n_vertices) {
    const double th0 = rng.uniform(0.0, 2.0 * kPi);
    const double width = rng.uniform(0.25, 0.8);
    const double depth = rng.uniform(0.05, 0.25) * R;
    Loop loop(n_vertices);
    for (int i = 0; i < n_vertices; ++i) {
        const double th = 2.0 * kPi * i / n_vertices;
        const double d = std::remainder(th - th0, 2.0 * kPi);
        const double dent = depth * std::exp(-0.5 * (d / width) * (d / width));
        loop[i] = (R - dent) * Vec2(std::cos(th), std::sin(th));
    }
    return make_polygon(std::move(loop));
}

ArrXX random_blob_values(SplitMix64& rng, const ScalarFieldSpecSeed& spec) {
    const int n = spec.grid_n;
    ArrXX v(n, n);
    v.setZero();
    const double h = spec.extent / n;
    const Vec2 origin(-spec.extent / 2.0 + h / 2.0, -spec.extent / 2.0 + h / 2.0);
    const double rmax = 0.28 * spec.extent;
    struct Bump {
        Vec2 c;
        double s, a;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < spec.n_bumps; ++k) {
        bumps.push_back({Vec2(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)) * rmax,
                         rng.uniform(0.1, 0.25) * spec.extent, rng.uniform(0.4, 1.0)});
    }
    const double cutoff = 0.42 * spec.extent;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p = origin + Vec2(i * h, j * h);
            double s = 0.0;
            for (const Bump& b : bumps)
                s += b.a * std::exp(-0.5 * (p - b.c).squaredNorm() / (b.s * b.s));
            // taper to exactly zero near the grid border
            const double rr = p.norm();
            const double taper =
                rr >= cutoff ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - (rr / cutoff) * (rr / cutoff)));
            v(i, j) = s * taper;
        }
    return v;
}

Patch random_raster_patch(SplitMix64& rng, int grid_n, double extent) {
    ScalarFieldSpecSeed spec;
    spec.grid_n = grid_n;
    spec.extent = extent;
    spec.n_bumps = rng.uniform_int(2, 5);
    const ArrXX v = random_blob_values(rng, spec);
    const double level = rng.uniform(0.25, 0.5) * v.maxCoeff();
    RasterShape r;
    r.h = extent / grid_n;
    r.nx = r.ny = grid_n;
    r.origin = Vec2(-extent / 2.0 + r.h / 2.0, -extent / 2.0 + r.h / 2.0);
    r.bits.assign(static_cast<size_t>(grid_n) * grid_n, 0);
    for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) r.set(i, j, v(i, j) > level);
    return Patch(r);
}

}  // namespace patchlab
