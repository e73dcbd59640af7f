#pragma once

#include "patchlab/geometry.hpp"
#include "patchlab/types.hpp"

#include <cstdint>

namespace patchlab {

// splitmix64: tiny, portable, and identical across platforms, so seeded runs
// reproduce byte-for-byte.
struct SplitMix64 {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed + 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

// Star-shaped polygon about the origin: r(theta) = r0 (1 + sum_k a_k cos(k theta + phi_k))
// with coefficients small enough to keep r > 0 and the wedges non-degenerate.
Patch random_star_polygon(SplitMix64& rng, int n_vertices = 48, double r0 = 1.0,
                          double roughness = 0.35);

// Doubly-connected patch: star-shaped outer loop with a smaller star hole inside.
Patch random_annular_polygon(SplitMix64& rng, int n_vertices = 48);

// Disk of radius R with a smooth angular dent pressed into the boundary.
Patch random_dented_disk(SplitMix64& rng, double R = 1.0, int n_vertices = 256);

// Smooth nonnegative random blob sampled on a grid (sum of Gaussian bumps),
// compactly supported well inside the grid.
struct ScalarFieldSpecSeed {
    int grid_n = 256;
    double extent = 4.0;  // grid covers [-extent/2, extent/2]^2
    int n_bumps = 4;
};

ArrXX random_blob_values(SplitMix64& rng, const ScalarFieldSpecSeed& spec);

// Random raster patch: thresholded random blob.
Patch random_raster_patch(SplitMix64& rng, int grid_n = 256, double extent = 4.0);

}  // namespace patchlab
