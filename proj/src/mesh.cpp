#include "patchlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

namespace patchlab {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a,b,c)
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double ax = a.x() - d.x(), ay = a.y() - d.y();
    const double bx = b.x() - d.x(), by = b.y() - d.y();
    const double cx = c.x() - d.x(), cy = c.y() - d.y();
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

struct Delaunay {
    std::vector<Vec2> pts;
    // triangle: vertex ids and neighbor triangle ids (nb[i] across vertex i)
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> nb;
        bool alive = true;
    };
    std::vector<Tri> tris;
    int last_alive = 0;
    double scale = 1.0;

    explicit Delaunay(const std::vector<Vec2>& input) {
        BBox box;
        box.lo = box.hi = input.front();
        for (const Vec2& p : input) box.expand(p);
        scale = std::max(box.diagonal(), 1e-12);
        const Vec2 c = 0.5 * (box.lo + box.hi);
        const double m = 8.0 * scale;
        pts.push_back(c + Vec2(-m, -m));
        pts.push_back(c + Vec2(m, -m));
        pts.push_back(c + Vec2(0.0, m));
        tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
        for (const Vec2& p : input) insert(p);
    }

    int locate(const Vec2& p) const {
        int t = last_alive;
        if (!tris[t].alive)
            for (t = static_cast<int>(tris.size()) - 1; t >= 0 && !tris[t].alive; --t) {
            }
        for (int steps = 0; steps < 4 * static_cast<int>(tris.size()) + 16; ++steps) {
            const Tri& tr = tris[t];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2& a = pts[tr.v[(e + 1) % 3]];
                const Vec2& b = pts[tr.v[(e + 2) % 3]];
                if (orient(a, b, p) < -1e-14 * scale * scale) {
                    next = tr.nb[e];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        throw numerical_error("triangulate: point location failed");
    }

    void insert(const Vec2& p) {
        const int start = locate(p);
        // collect the cavity: triangles whose circumcircle contains p
        std::vector<int> cavity;
        std::vector<int> stack{start};
        std::set<int> seen{start};
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const Tri& tr = tris[t];
            if (incircle(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]], p) <=
                1e-12 * scale * scale * scale * scale) {
                if (t != start) continue;
            }
            cavity.push_back(t);
            for (int e = 0; e < 3; ++e) {
                const int nb = tr.nb[e];
                if (nb >= 0 && !seen.count(nb)) {
                    seen.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        std::set<int> in_cavity(cavity.begin(), cavity.end());
        // cavity boundary: directed edges of cavity triangles whose neighbor
        // is outside the cavity
        struct BEdge {
            int a, b, outside;
        };
        std::vector<BEdge> boundary;
        for (int t : cavity) {
            const Tri& tr = tris[t];
            for (int e = 0; e < 3; ++e) {
                const int nb = tr.nb[e];
                if (nb < 0 || !in_cavity.count(nb))
                    boundary.push_back({tr.v[(e + 1) % 3], tr.v[(e + 2) % 3], nb});
            }
        }
        for (int t : cavity) tris[t].alive = false;
        const int pid = static_cast<int>(pts.size());
        pts.push_back(p);
        // fan: one triangle per boundary edge
        std::map<int, int> edge_from;  // boundary edge start vertex -> new tri
        std::vector<int> fresh;
        for (const BEdge& be : boundary) {
            const int tid = static_cast<int>(tris.size());
            tris.push_back({{pid, be.a, be.b}, {be.outside, -1, -1}, true});
            if (be.outside >= 0) {
                Tri& out = tris[be.outside];
                for (int e = 0; e < 3; ++e)
                    if ((out.v[(e + 1) % 3] == be.b && out.v[(e + 2) % 3] == be.a))
                        out.nb[e] = tid;
            }
            edge_from[be.a] = tid;
            fresh.push_back(tid);
        }
        // link the fan triangles around pid: tri(pid, a, b): neighbor across
        // vertex b (edge pid-a) is the fan triangle ending at a
        std::map<int, int> edge_to;
        for (int tid : fresh) edge_to[tris[tid].v[2]] = tid;
        for (int tid : fresh) {
            Tri& tr = tris[tid];
            tr.nb[2] = edge_to.count(tr.v[1]) ? edge_to[tr.v[1]] : -1;  // across v[2]: edge pid-a
            tr.nb[1] = edge_from.count(tr.v[2]) ? edge_from[tr.v[2]] : -1;
        }
        last_alive = fresh.empty() ? last_alive : fresh.front();
        if (fresh.empty()) throw numerical_error("triangulate: empty cavity");
    }
};

std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a * 0x9e3779b97f4a7c15ull + b + 0x7f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool point_in_loops(const std::vector<const Loop*>& loops, const Vec2& p) {
    bool inside = false;
    for (const Loop* lp : loops) {
        const Loop& loop = *lp;
        const size_t n = loop.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = loop[j];
            const Vec2& b = loop[i];
            if ((b.y() > p.y()) != (a.y() > p.y())) {
                const double xc = b.x() + (p.y() - b.y()) / (a.y() - b.y()) * (a.x() - b.x());
                if (p.x() < xc) inside = !inside;
            }
        }
    }
    return inside;
}

}  // namespace

double TriMesh::triangle_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * cross2(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

Vec2 TriMesh::centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t) a += triangle_area(t);
    return a;
}

double TriMesh::curve_area(int c) const {
    const auto& ids = curves[c];
    double s = 0.0;
    for (size_t i = 0, j = ids.size() - 1; i < ids.size(); j = i++)
        s += cross2(vertices[ids[j]], vertices[ids[i]]);
    return 0.5 * s;
}

double TriMesh::curve_length(int c) const {
    const auto& ids = curves[c];
    double s = 0.0;
    for (size_t i = 0, j = ids.size() - 1; i < ids.size(); j = i++)
        s += (vertices[ids[i]] - vertices[ids[j]]).norm();
    return s;
}

TriMesh triangulate_polygon(const PolygonShape& poly, double target_edge) {
    if (target_edge <= 0.0) throw domain_error("triangulate_polygon: target edge must be positive");

    // resampled boundary loops (loops[0] = outer)
    std::vector<Loop> loops;
    loops.push_back(resample_loop(
        poly.outer, std::max<size_t>(16, std::lround(loop_perimeter(poly.outer) / target_edge))));
    for (const Loop& h : poly.holes)
        loops.push_back(resample_loop(
            h, std::max<size_t>(16, std::lround(loop_perimeter(h) / target_edge))));

    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<Vec2> points;
        std::vector<int> curve_of;
        std::vector<std::vector<int>> curve_ids(loops.size());
        for (size_t c = 0; c < loops.size(); ++c)
            for (const Vec2& p : loops[c]) {
                curve_ids[c].push_back(static_cast<int>(points.size()));
                points.push_back(p);
                curve_of.push_back(static_cast<int>(c));
            }

        // jittered hex lattice inside, kept clear of the boundary
        std::vector<const Loop*> loop_ptrs;
        for (const Loop& l : loops) loop_ptrs.push_back(&l);
        BBox box;
        box.lo = box.hi = loops[0].front();
        for (const Vec2& p : loops[0]) box.expand(p);
        const double hx = target_edge;
        const double hy = target_edge * 0.8660254037844386;
        const int rows = static_cast<int>(box.height() / hy) + 2;
        const int cols = static_cast<int>(box.width() / hx) + 2;
        for (int r = 0; r < rows; ++r) {
            const double y = box.lo.y() + r * hy;
            for (int q = 0; q < cols; ++q) {
                const double x = box.lo.x() + (q + (r % 2 ? 0.5 : 0.0)) * hx;
                const double jx =
                    (hash2(r, q) * 0x1.0p-64 - 0.5) * 0.12 * target_edge;
                const double jy =
                    (hash2(q, r ^ 0x5a5aull) * 0x1.0p-64 - 0.5) * 0.12 * target_edge;
                const Vec2 p(x + jx, y + jy);
                if (!point_in_loops(loop_ptrs, p)) continue;
                double dmin = std::numeric_limits<double>::infinity();
                for (const Loop& l : loops) {
                    const size_t n = l.size();
                    for (size_t i = 0, j = n - 1; i < n; j = i++) {
                        dmin = std::min(dmin, point_segment_distance(p, l[j], l[i]));
                        if (dmin < 0.7 * target_edge) break;
                    }
                    if (dmin < 0.7 * target_edge) break;
                }
                if (dmin < 0.7 * target_edge) continue;
                points.push_back(p);
                curve_of.push_back(-1);
            }
        }

        Delaunay dt(points);

        // all boundary edges must be present; otherwise split and retry
        std::set<std::pair<int, int>> edges;
        for (const auto& tr : dt.tris) {
            if (!tr.alive) continue;
            for (int e = 0; e < 3; ++e) {
                int a = tr.v[e] - 3, b = tr.v[(e + 1) % 3] - 3;  // super-triangle offset
                if (a < 0 || b < 0) continue;
                edges.insert({std::min(a, b), std::max(a, b)});
            }
        }
        bool missing = false;
        for (size_t c = 0; c < loops.size(); ++c) {
            const auto& ids = curve_ids[c];
            Loop refined;
            for (size_t i = 0; i < ids.size(); ++i) {
                const int a = ids[i], b = ids[(i + 1) % ids.size()];
                refined.push_back(points[a]);
                if (!edges.count({std::min(a, b), std::max(a, b)})) {
                    refined.push_back(0.5 * (points[a] + points[b]));
                    missing = true;
                }
            }
            loops[c] = std::move(refined);
        }
        if (missing) continue;

        // harvest: drop super-triangle, keep triangles whose centroid is inside
        TriMesh mesh;
        mesh.target_edge = target_edge;
        mesh.vertices = points;
        mesh.vertex_curve = curve_of;
        mesh.curves = curve_ids;
        for (const auto& tr : dt.tris) {
            if (!tr.alive) continue;
            if (tr.v[0] < 3 || tr.v[1] < 3 || tr.v[2] < 3) continue;
            std::array<int, 3> v{tr.v[0] - 3, tr.v[1] - 3, tr.v[2] - 3};
            const Vec2 c = (points[v[0]] + points[v[1]] + points[v[2]]) / 3.0;
            if (!point_in_loops(loop_ptrs, c)) continue;
            if (orient(points[v[0]], points[v[1]], points[v[2]]) < 0.0) std::swap(v[1], v[2]);
            mesh.triangles.push_back(v);
        }
        if (mesh.triangles.empty()) throw numerical_error("triangulate_polygon: no triangles kept");
        return mesh;
    }
    throw numerical_error("triangulate_polygon: boundary edge recovery did not converge");
}

TriMesh mesh_two_circle_domain(const Vec2& inner_c, double r_in, const Vec2& outer_c,
                               double r_out, int n_theta, int n_rho) {
    const Vec2 d = outer_c - inner_c;
    const double l = d.norm();
    if (r_out - l <= r_in)
        throw domain_error("mesh_two_circle_domain: inner circle must be strictly inside");
    const double phi = l > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;

    // normalized frame: inner circle = unit circle at origin, outer center on +x
    const double dd = l / r_in;
    const double rr = r_out / r_in;
    const double ep = dd + rr, em = dd - rr;
    const double A = ep + em;                  // 2 d
    const double B = 2.0 * (1.0 + ep * em);    // negative for nested circles
    double b = 0.0;
    if (std::abs(A) > 1e-300) {
        const double disc = B * B - 4.0 * A * A;
        b = 2.0 * A / (-B + std::sqrt(std::max(disc, 0.0)));
    }
    auto h = [&](double t) { return (t + b) / (1.0 + b * t); };
    const double rho_w = std::abs(h(ep));
    auto h_inv = [&](const Vec2& w) -> Vec2 {
        // (w - b) / (1 - b w) in complex arithmetic
        const double wx = w.x() - b, wy = w.y();
        const double ux = 1.0 - b * w.x(), uy = -b * w.y();
        const double den = ux * ux + uy * uy;
        return Vec2((wx * ux + wy * uy) / den, (wy * ux - wx * uy) / den);
    };

    if (n_rho <= 0)
        n_rho = std::max(8, static_cast<int>(std::ceil(n_theta * std::log(rho_w) / (2.0 * kPi))));

    TriMesh mesh;
    mesh.target_edge = 2.0 * kPi * r_out / n_theta;
    mesh.curves.resize(2);
    const double cph = std::cos(phi), sph = std::sin(phi);
    auto to_world = [&](const Vec2& z) -> Vec2 {
        return inner_c + r_in * Vec2(cph * z.x() - sph * z.y(), sph * z.x() + cph * z.y());
    };
    for (int j = 0; j <= n_rho; ++j) {
        const double rho = std::pow(rho_w, static_cast<double>(j) / n_rho);
        for (int k = 0; k < n_theta; ++k) {
            const double th = 2.0 * kPi * k / n_theta;
            const Vec2 w(rho * std::cos(th), rho * std::sin(th));
            const int id = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(to_world(h_inv(w)));
            if (j == 0) {
                mesh.vertex_curve.push_back(1);
                mesh.curves[1].push_back(id);
            } else if (j == n_rho) {
                mesh.vertex_curve.push_back(0);
                mesh.curves[0].push_back(id);
            } else {
                mesh.vertex_curve.push_back(-1);
            }
        }
    }
    auto vid = [&](int j, int k) { return j * n_theta + ((k % n_theta + n_theta) % n_theta); };
    for (int j = 0; j < n_rho; ++j)
        for (int k = 0; k < n_theta; ++k) {
            // split each quad along alternating diagonals
            const int v00 = vid(j, k), v10 = vid(j, k + 1);
            const int v01 = vid(j + 1, k), v11 = vid(j + 1, k + 1);
            if ((j + k) % 2 == 0) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    // enforce CCW
    for (auto& tr : mesh.triangles) {
        if (orient(mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]) < 0.0)
            std::swap(tr[1], tr[2]);
    }
    return mesh;
}

}  // namespace patchlab
