#include "patchlab/contour.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>

namespace patchlab {

namespace {

// lattice edge key: (i, j, axis), axis 0 = from (i,j) to (i+1,j), 1 = vertical
using EdgeKey = std::uint64_t;

EdgeKey edge_key(int i, int j, int axis) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 33) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)) << 1) |
           static_cast<std::uint64_t>(axis);
}

}  // namespace

std::vector<std::vector<Vec2>> extract_contours(const ArrXX& values, double level,
                                                const Vec2& origin, double h) {
    const int nx = static_cast<int>(values.rows());
    const int ny = static_cast<int>(values.cols());
    const double range = values.maxCoeff() - values.minCoeff();
    // tie-break a level that collides with a sample value
    bool collide = false;
    for (int j = 0; j < ny && !collide; ++j)
        for (int i = 0; i < nx; ++i)
            if (values(i, j) == level) {
                collide = true;
                break;
            }
    if (collide) level += 1e-12 * (range > 0.0 ? range : 1.0);

    auto above = [&](int i, int j) { return values(i, j) > level; };
    auto crossing = [&](int i0, int j0, int i1, int j1) -> Vec2 {
        const double v0 = values(i0, j0), v1 = values(i1, j1);
        const double t = (level - v0) / (v1 - v0);
        return origin + Vec2((i0 + t * (i1 - i0)) * h, (j0 + t * (j1 - j0)) * h);
    };

    // each crossed lattice edge meets exactly two cell segments
    std::map<EdgeKey, std::array<EdgeKey, 2>> links;
    std::map<EdgeKey, int> degree;
    std::map<EdgeKey, Vec2> points;

    auto add_segment = [&](EdgeKey a, EdgeKey b) {
        links[a][degree[a]++] = b;
        links[b][degree[b]++] = a;
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int mask = (above(i, j) ? 1 : 0) | (above(i + 1, j) ? 2 : 0) |
                             (above(i + 1, j + 1) ? 4 : 0) | (above(i, j + 1) ? 8 : 0);
            if (mask == 0 || mask == 15) continue;
            const EdgeKey B = edge_key(i, j, 0);
            const EdgeKey R = edge_key(i + 1, j, 1);
            const EdgeKey T = edge_key(i, j + 1, 0);
            const EdgeKey L = edge_key(i, j, 1);
            if (!points.count(B) && (above(i, j) != above(i + 1, j)))
                points[B] = crossing(i, j, i + 1, j);
            if (!points.count(R) && (above(i + 1, j) != above(i + 1, j + 1)))
                points[R] = crossing(i + 1, j, i + 1, j + 1);
            if (!points.count(T) && (above(i, j + 1) != above(i + 1, j + 1)))
                points[T] = crossing(i, j + 1, i + 1, j + 1);
            if (!points.count(L) && (above(i, j) != above(i, j + 1)))
                points[L] = crossing(i, j, i, j + 1);

            switch (mask) {
                case 1: case 14: add_segment(L, B); break;
                case 2: case 13: add_segment(B, R); break;
                case 3: case 12: add_segment(L, R); break;
                case 4: case 11: add_segment(R, T); break;
                case 6: case 9:  add_segment(B, T); break;
                case 7: case 8:  add_segment(L, T); break;
                case 5: case 10: {
                    const double center = 0.25 * (values(i, j) + values(i + 1, j) +
                                                  values(i + 1, j + 1) + values(i, j + 1));
                    const bool diag = (center > level) == (mask == 5);
                    if (diag) {  // region connected across the 00-11 diagonal
                        add_segment(B, R);
                        add_segment(T, L);
                    } else {
                        add_segment(L, B);
                        add_segment(R, T);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // walk the degree-2 graph into closed loops
    std::map<EdgeKey, bool> visited;
    std::vector<std::vector<Vec2>> loops;
    for (const auto& [start, lk] : links) {
        (void)lk;
        if (visited[start]) continue;
        std::vector<Vec2> loop;
        EdgeKey prev = start;
        EdgeKey cur = links[start][0];
        visited[start] = true;
        loop.push_back(points.at(start));
        while (cur != start) {
            visited[cur] = true;
            loop.push_back(points.at(cur));
            const auto& nb = links.at(cur);
            const EdgeKey nxt = (nb[0] == prev) ? nb[1] : nb[0];
            prev = cur;
            cur = nxt;
        }
        if (loop.size() < 3) continue;
        // orient CCW around the super-level side: probe just left of the
        // first segment midpoint
        const Vec2 a = loop[0], b = loop[1];
        const Vec2 mid = 0.5 * (a + b);
        Vec2 n(-(b - a).y(), (b - a).x());
        if (n.norm() > 0.0) n *= 0.25 * h / n.norm();
        const Vec2 probe = mid + n;
        const double fi = (probe.x() - origin.x()) / h;
        const double fj = (probe.y() - origin.y()) / h;
        const int pi = std::max(0, std::min(nx - 2, static_cast<int>(std::floor(fi))));
        const int pj = std::max(0, std::min(ny - 2, static_cast<int>(std::floor(fj))));
        const double tx = fi - pi, ty = fj - pj;
        const double val = (1 - tx) * (1 - ty) * values(pi, pj) +
                           tx * (1 - ty) * values(pi + 1, pj) +
                           (1 - tx) * ty * values(pi, pj + 1) + tx * ty * values(pi + 1, pj + 1);
        if (val <= level) std::reverse(loop.begin(), loop.end());
        loops.push_back(std::move(loop));
    }
    return loops;
}

}  // namespace patchlab
