#include "patchlab/geometry.hpp"

#include "patchlab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace patchlab {

namespace {

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool point_in_loops_evenodd(const std::vector<const Loop*>& loops, const Vec2& p) {
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

Vec2 ellipse_point(const EllipseShape& e, double t) {
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double x = e.a * std::cos(t), y = e.b * std::sin(t);
    return e.center + Vec2(c * x - s * y, s * x + c * y);
}

Loop circle_loop(const Vec2& c, double r, int n, bool ccw) {
    Loop loop(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n * (ccw ? 1.0 : -1.0);
        loop[i] = c + r * Vec2(std::cos(t), std::sin(t));
    }
    return loop;
}

int hole_node_count(double hole_len, double outer_len, int n_outer) {
    return std::max(16, static_cast<int>(std::lround(n_outer * hole_len / outer_len)));
}

// scanline rasterization of a set of loops (even-odd rule)
void rasterize_loops(const std::vector<const Loop*>& loops, const RasterSpec& spec,
                     RasterShape& out) {
    for (int j = 0; j < spec.ny; ++j) {
        const double y = spec.origin.y() + j * spec.h;
        std::vector<double> xs;
        for (const Loop* lp : loops) {
            const Loop& loop = *lp;
            const size_t n = loop.size();
            for (size_t i = 0, k = n - 1; i < n; k = i++) {
                const Vec2& a = loop[k];
                const Vec2& b = loop[i];
                if ((b.y() > y) != (a.y() > y))
                    xs.push_back(b.x() + (y - b.y()) / (a.y() - b.y()) * (a.x() - b.x()));
            }
        }
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());
        for (size_t k = 0; k + 1 < xs.size(); k += 2) {
            int i0 = static_cast<int>(std::ceil((xs[k] - spec.origin.x()) / spec.h));
            int i1 = static_cast<int>(std::floor((xs[k + 1] - spec.origin.x()) / spec.h));
            i0 = std::max(i0, 0);
            i1 = std::min(i1, spec.nx - 1);
            for (int i = i0; i <= i1; ++i) out.set(i, j, true);
        }
    }
}

}  // namespace

double loop_signed_area(const Loop& loop) {
    double s = 0.0;
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) s += cross2(loop[j], loop[i]);
    return 0.5 * s;
}

double loop_perimeter(const Loop& loop) {
    double s = 0.0;
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) s += (loop[i] - loop[j]).norm();
    return s;
}

Vec2 loop_first_moment(const Loop& loop) {
    Vec2 c(0.0, 0.0);
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const double w = cross2(loop[j], loop[i]);
        c += w * (loop[j] + loop[i]);
    }
    return c / 6.0;
}

double loop_second_moment(const Loop& loop) {
    double s = 0.0;
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& p = loop[j];
        const Vec2& q = loop[i];
        s += cross2(p, q) * (p.squaredNorm() + p.dot(q) + q.squaredNorm());
    }
    return s / 12.0;
}

bool loop_is_simple(const Loop& loop) {
    const size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = i + 1; k < n; ++k) {
            if (k == i || (k + 1) % n == i || (i + 1) % n == k) continue;
            if (segments_properly_intersect(loop[i], loop[(i + 1) % n], loop[k],
                                            loop[(k + 1) % n]))
                return false;
        }
    }
    return true;
}

Loop resample_loop(const Loop& loop, int n_nodes) {
    const size_t n = loop.size();
    std::vector<double> cum(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + (loop[(i + 1) % n] - loop[i]).norm();
    const double total = cum[n];
    Loop out(n_nodes);
    size_t seg = 0;
    for (int k = 0; k < n_nodes; ++k) {
        const double s = total * k / n_nodes;
        while (seg + 1 < n && cum[seg + 1] < s) ++seg;
        const double den = cum[seg + 1] - cum[seg];
        const double t = den > 0.0 ? (s - cum[seg]) / den : 0.0;
        out[k] = loop[seg] + t * (loop[(seg + 1) % n] - loop[seg]);
    }
    return out;
}

double distance_to_loop(const Vec2& p, const Loop& loop) {
    double d = std::numeric_limits<double>::infinity();
    const size_t n = loop.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++)
        d = std::min(d, point_segment_distance(p, loop[j], loop[i]));
    return d;
}

Patch make_disk(const Vec2& c, double r) {
    if (r <= 0.0) throw domain_error("make_disk: radius must be positive");
    return Patch(DiskShape{c, r});
}

Patch make_annulus(const Vec2& c, double r_inner, double r_outer) {
    if (!(0.0 < r_inner && r_inner < r_outer))
        throw domain_error("make_annulus: requires 0 < r_inner < r_outer");
    return Patch(AnnulusShape{c, r_inner, r_outer});
}

Patch make_ellipse(const Vec2& c, double a, double b, double angle) {
    if (!(a >= b && b > 0.0)) throw domain_error("make_ellipse: requires a >= b > 0");
    return Patch(EllipseShape{c, a, b, angle});
}

Patch make_polygon(Loop outer, std::vector<Loop> holes) {
    if (outer.size() < 3) throw domain_error("make_polygon: outer loop needs >= 3 vertices");
    if (loop_signed_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
    for (Loop& h : holes) {
        if (h.size() < 3) throw domain_error("make_polygon: hole loop needs >= 3 vertices");
        if (loop_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
    }
    return Patch(PolygonShape{std::move(outer), std::move(holes)});
}

Patch make_rect(const Vec2& lo, const Vec2& hi) {
    return make_polygon({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

void validate(const Patch& patch) {
    if (patch.components.empty()) throw domain_error("validate: empty patch");
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            BBox box;
            box.lo = box.hi = poly->outer.front();
            for (const Vec2& p : poly->outer) box.expand(p);
            const double outer_area = loop_signed_area(poly->outer);
            if (outer_area <= 10.0 * std::numeric_limits<double>::epsilon() *
                                  box.diagonal() * box.diagonal())
                throw domain_error("validate: degenerate polygon");
            if (!loop_is_simple(poly->outer))
                throw domain_error("validate: outer loop self-intersects");
            double holes_area = 0.0;
            for (const Loop& h : poly->holes) {
                if (!loop_is_simple(h)) throw domain_error("validate: hole loop self-intersects");
                const double ha = loop_signed_area(h);
                if (ha >= 0.0) throw domain_error("validate: hole must be clockwise");
                holes_area += -ha;
                if (!point_in_loops_evenodd({&poly->outer}, h.front()))
                    throw domain_error("validate: hole not inside outer loop");
            }
            if (holes_area >= outer_area)
                throw domain_error("validate: holes exceed outer area");
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            if (r->h <= 0.0) throw domain_error("validate: raster spacing must be positive");
            if (r->nx <= 0 || r->ny <= 0 ||
                r->bits.size() != static_cast<size_t>(r->nx) * r->ny)
                throw domain_error("validate: raster dimensions mismatch");
        } else if (const auto* d = std::get_if<DiskShape>(&s)) {
            if (d->radius <= 0.0) throw domain_error("validate: disk radius must be positive");
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            if (!(0.0 < an->r_inner && an->r_inner < an->r_outer))
                throw domain_error("validate: annulus radii must satisfy 0 < r_in < r_out");
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            if (!(e->a >= e->b && e->b > 0.0))
                throw domain_error("validate: ellipse semiaxes must satisfy a >= b > 0");
        }
    }
}

BBox bounding_box(const Patch& patch) {
    BBox box;
    bool first = true;
    auto expand = [&](const Vec2& p) {
        if (first) {
            box.lo = box.hi = p;
            first = false;
        } else {
            box.expand(p);
        }
    };
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            for (const Vec2& p : poly->outer) expand(p);
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            expand(r->origin - Vec2(r->h / 2, r->h / 2));
            expand(r->origin + Vec2((r->nx - 0.5) * r->h, (r->ny - 0.5) * r->h));
        } else if (const auto* d = std::get_if<DiskShape>(&s)) {
            expand(d->center - Vec2(d->radius, d->radius));
            expand(d->center + Vec2(d->radius, d->radius));
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            expand(an->center - Vec2(an->r_outer, an->r_outer));
            expand(an->center + Vec2(an->r_outer, an->r_outer));
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            for (int i = 0; i < 64; ++i) expand(ellipse_point(*e, 2.0 * kPi * i / 64.0));
            BBox pad = box;
            pad.pad(0.02 * e->a);
            box = pad;
        }
    }
    return box;
}

bool contains(const Patch& patch, const Vec2& p) {
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            std::vector<const Loop*> loops{&poly->outer};
            for (const Loop& h : poly->holes) loops.push_back(&h);
            if (point_in_loops_evenodd(loops, p)) return true;
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            const int i = static_cast<int>(std::lround((p.x() - r->origin.x()) / r->h));
            const int j = static_cast<int>(std::lround((p.y() - r->origin.y()) / r->h));
            if (i >= 0 && i < r->nx && j >= 0 && j < r->ny && r->at(i, j)) return true;
        } else if (const auto* d = std::get_if<DiskShape>(&s)) {
            if ((p - d->center).norm() < d->radius) return true;
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            const double rr = (p - an->center).norm();
            if (rr > an->r_inner && rr < an->r_outer) return true;
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            const double c = std::cos(e->angle), sn = std::sin(e->angle);
            const Vec2 q = p - e->center;
            const double u = (c * q.x() + sn * q.y()) / e->a;
            const double v = (-sn * q.x() + c * q.y()) / e->b;
            if (u * u + v * v < 1.0) return true;
        }
    }
    return false;
}

Measures measures(const Patch& patch) {
    validate(patch);
    Measures m;
    Vec2 weighted_centroid(0.0, 0.0);
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            double a = loop_signed_area(poly->outer);
            double per = loop_perimeter(poly->outer);
            Vec2 ctr = loop_first_moment(poly->outer);
            double i2 = loop_second_moment(poly->outer);
            for (const Loop& h : poly->holes) {
                a += loop_signed_area(h);
                per += loop_perimeter(h);
                ctr += loop_first_moment(h);
                i2 += loop_second_moment(h);
            }
            m.area += a;
            m.perimeter += per;
            weighted_centroid += ctr;
            m.second_moment += i2;
            for (const Vec2& p : poly->outer) m.r_max = std::max(m.r_max, p.norm());
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            const double cell = r->h * r->h;
            long cnt = 0;
            for (int j = 0; j < r->ny; ++j)
                for (int i = 0; i < r->nx; ++i)
                    if (r->at(i, j)) {
                        ++cnt;
                        const Vec2 c = r->cell_center(i, j);
                        weighted_centroid += cell * c;
                        m.second_moment += cell * (c.squaredNorm() + r->h * r->h / 6.0);
                        m.r_max = std::max(m.r_max, c.norm() + r->h * 0.7071067811865476);
                    }
            m.area += cnt * cell;
            // contour length of the smoothed bit field; contouring the raw 0/1
            // samples would give a staircase with an O(1) length bias
            ArrXX v(r->nx + 4, r->ny + 4);
            v.setZero();
            for (int j = 0; j < r->ny; ++j)
                for (int i = 0; i < r->nx; ++i) v(i + 2, j + 2) = r->at(i, j) ? 1.0 : 0.0;
            ArrXX sm = v;
            for (int pass = 0; pass < 2; ++pass) {
                ArrXX next = sm;
                for (int j = 1; j + 1 < sm.cols(); ++j)
                    for (int i = 1; i + 1 < sm.rows(); ++i)
                        next(i, j) = (sm(i, j) + sm(i - 1, j) + sm(i + 1, j) + sm(i, j - 1) +
                                      sm(i, j + 1)) /
                                     5.0;
                sm = next;
            }
            for (const auto& loop :
                 extract_contours(sm, 0.5, r->origin - Vec2(2 * r->h, 2 * r->h), r->h))
                m.perimeter += loop_perimeter(loop);
        } else if (const auto* d = std::get_if<DiskShape>(&s)) {
            const double a = kPi * d->radius * d->radius;
            m.area += a;
            m.perimeter += 2.0 * kPi * d->radius;
            weighted_centroid += a * d->center;
            m.second_moment += kPi * std::pow(d->radius, 4) / 2.0 + a * d->center.squaredNorm();
            m.r_max = std::max(m.r_max, d->center.norm() + d->radius);
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            const double a = kPi * (an->r_outer * an->r_outer - an->r_inner * an->r_inner);
            m.area += a;
            m.perimeter += 2.0 * kPi * (an->r_outer + an->r_inner);
            weighted_centroid += a * an->center;
            m.second_moment += kPi * (std::pow(an->r_outer, 4) - std::pow(an->r_inner, 4)) / 2.0 +
                               a * an->center.squaredNorm();
            m.r_max = std::max(m.r_max, an->center.norm() + an->r_outer);
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            const double a = kPi * e->a * e->b;
            m.area += a;
            // arclength by 512-point midpoint rule on the smooth parametrization
            double per = 0.0;
            const int n = 512;
            for (int i = 0; i < n; ++i) {
                const double t = 2.0 * kPi * (i + 0.5) / n;
                per += std::hypot(e->a * std::sin(t), e->b * std::cos(t));
            }
            m.perimeter += per * 2.0 * kPi / n;
            weighted_centroid += a * e->center;
            m.second_moment +=
                kPi * e->a * e->b * (e->a * e->a + e->b * e->b) / 4.0 + a * e->center.squaredNorm();
            for (int i = 0; i < 2048; ++i)
                m.r_max = std::max(m.r_max, ellipse_point(*e, 2.0 * kPi * i / 2048.0).norm());
        }
    }
    if (m.area <= 0.0) throw domain_error("measures: degenerate geometry (area <= 0)");
    m.centroid = weighted_centroid / m.area;
    return m;
}

std::vector<PolygonShape> polygonize(const Patch& patch, int n_nodes) {
    std::vector<PolygonShape> out;
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            PolygonShape p;
            const double outer_len = loop_perimeter(poly->outer);
            p.outer = resample_loop(poly->outer,
                                    std::max<int>(n_nodes, poly->outer.size()));
            for (const Loop& h : poly->holes)
                p.holes.push_back(resample_loop(
                    h, std::max<int>(hole_node_count(loop_perimeter(h), outer_len, n_nodes),
                                     h.size())));
            out.push_back(std::move(p));
        } else if (const auto* d = std::get_if<DiskShape>(&s)) {
            out.push_back({circle_loop(d->center, d->radius, n_nodes, true), {}});
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            PolygonShape p;
            p.outer = circle_loop(an->center, an->r_outer, n_nodes, true);
            p.holes.push_back(circle_loop(
                an->center, an->r_inner,
                hole_node_count(2.0 * kPi * an->r_inner, 2.0 * kPi * an->r_outer, n_nodes),
                false));
            out.push_back(std::move(p));
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            // nodes exactly on the curve at uniform arclength: invert the
            // cumulative arclength of a dense parameter sampling
            const int m = 16384;
            std::vector<double> cum(m + 1, 0.0);
            for (int i = 0; i < m; ++i) {
                const double t = 2.0 * kPi * (i + 0.5) / m;
                cum[i + 1] = cum[i] + std::hypot(e->a * std::sin(t), e->b * std::cos(t));
            }
            Loop loop(n_nodes);
            int seg = 0;
            for (int k = 0; k < n_nodes; ++k) {
                const double target = cum[m] * k / n_nodes;
                while (seg + 1 < m && cum[seg + 1] < target) ++seg;
                const double t =
                    2.0 * kPi *
                    (seg + (target - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300)) / m;
                loop[k] = ellipse_point(*e, t);
            }
            out.push_back({std::move(loop), {}});
        } else {
            throw domain_error("polygonize: raster patches have no polygonal boundary");
        }
    }
    return out;
}

std::vector<BoundaryComponent> boundary_components(const Patch& patch, int n_nodes) {
    std::vector<BoundaryComponent> out;
    const auto polys = polygonize(patch, n_nodes);
    for (size_t c = 0; c < polys.size(); ++c) {
        auto push = [&](const Loop& loop, bool hole) {
            BoundaryComponent bc;
            bc.nodes = loop;
            bc.is_hole = hole;
            bc.component = static_cast<int>(c);
            const size_t n = loop.size();
            bc.weights.resize(n);
            for (size_t i = 0; i < n; ++i) {
                const Vec2& prev = loop[(i + n - 1) % n];
                const Vec2& next = loop[(i + 1) % n];
                bc.weights[i] = 0.5 * ((loop[i] - prev).norm() + (next - loop[i]).norm());
            }
            bc.length = loop_perimeter(loop);
            out.push_back(std::move(bc));
        };
        push(polys[c].outer, false);
        for (const Loop& h : polys[c].holes) push(h, true);
    }
    return out;
}

RasterSpec RasterSpec::cover(const BBox& box, int n, double pad_fraction) {
    RasterSpec spec;
    const double side = std::max(box.width(), box.height()) * (1.0 + 2.0 * pad_fraction);
    spec.h = side / n;
    spec.nx = spec.ny = n;
    const Vec2 center = 0.5 * (box.lo + box.hi);
    spec.origin = center - Vec2(spec.h * (n - 1) / 2.0, spec.h * (n - 1) / 2.0);
    return spec;
}

RasterShape rasterize(const Patch& patch, const RasterSpec& spec) {
    RasterShape out;
    out.origin = spec.origin;
    out.h = spec.h;
    out.nx = spec.nx;
    out.ny = spec.ny;
    out.bits.assign(static_cast<size_t>(spec.nx) * spec.ny, 0);
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            std::vector<const Loop*> loops{&poly->outer};
            for (const Loop& h : poly->holes) loops.push_back(&h);
            rasterize_loops(loops, spec, out);
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            for (int j = 0; j < spec.ny; ++j)
                for (int i = 0; i < spec.nx; ++i) {
                    if (out.at(i, j)) continue;
                    const Vec2 p = spec.cell_center(i, j);
                    const int ri = static_cast<int>(std::lround((p.x() - r->origin.x()) / r->h));
                    const int rj = static_cast<int>(std::lround((p.y() - r->origin.y()) / r->h));
                    if (ri >= 0 && ri < r->nx && rj >= 0 && rj < r->ny && r->at(ri, rj))
                        out.set(i, j, true);
                }
        } else {
            Patch single;
            single.components.push_back(s);
            for (int j = 0; j < spec.ny; ++j)
                for (int i = 0; i < spec.nx; ++i)
                    if (!out.at(i, j) && contains(single, spec.cell_center(i, j)))
                        out.set(i, j, true);
        }
    }
    return out;
}

BandResult boundary_band(const Patch& patch, double tau, int grid_n) {
    if (tau <= 0.0) throw domain_error("boundary_band: tau must be positive");
    BBox box = bounding_box(patch);
    const bool oversized = tau > box.diagonal();
    box.pad(std::min(tau, box.diagonal()) * 1.05 + 1e-12);
    RasterSpec spec = RasterSpec::cover(box, grid_n, 0.0);

    // dense boundary sample set with a bucket grid for nearest-point queries
    std::vector<Vec2> pts;
    if (std::holds_alternative<RasterShape>(patch.components.front()) &&
        patch.components.size() == 1) {
        const auto& r = std::get<RasterShape>(patch.components.front());
        ArrXX v(r.nx + 2, r.ny + 2);
        v.setZero();
        for (int j = 0; j < r.ny; ++j)
            for (int i = 0; i < r.nx; ++i) v(i + 1, j + 1) = r.at(i, j) ? 1.0 : 0.0;
        for (const auto& loop : extract_contours(v, 0.5, r.origin - Vec2(r.h, r.h), r.h))
            for (const Vec2& p : loop) pts.push_back(p);
    } else {
        for (const auto& poly : polygonize(patch, 1024)) {
            const double step = spec.h / 2.0;
            auto sample = [&](const Loop& loop) {
                const Loop dense =
                    resample_loop(loop, std::max<int>(64, loop_perimeter(loop) / step));
                pts.insert(pts.end(), dense.begin(), dense.end());
            };
            sample(poly.outer);
            for (const Loop& h : poly.holes) sample(h);
        }
    }

    // exact Euclidean distance transform (Felzenszwalb) from the cells holding
    // boundary samples; the sample spacing and site quantization keep the
    // distance within one cell of the true value
    const size_t ncell = static_cast<size_t>(spec.nx) * spec.ny;
    std::vector<double> sq(ncell, std::numeric_limits<double>::infinity());
    for (const Vec2& p : pts) {
        const int i = static_cast<int>(std::lround((p.x() - spec.origin.x()) / spec.h));
        const int j = static_cast<int>(std::lround((p.y() - spec.origin.y()) / spec.h));
        if (i >= 0 && i < spec.nx && j >= 0 && j < spec.ny)
            sq[static_cast<size_t>(j) * spec.nx + i] = 0.0;
    }
    auto edt_1d = [](std::vector<double>& f) {
        const int n = static_cast<int>(f.size());
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<int> v(n, 0);
        std::vector<double> z(n + 1, 0.0), d(n, inf);
        int k = -1;
        for (int q = 0; q < n; ++q) {
            if (std::isinf(f[q])) continue;
            if (k < 0) {
                k = 0;
                v[0] = q;
                z[0] = -inf;
                z[1] = inf;
                continue;
            }
            double s = (f[q] + q * q - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
            while (s <= z[k]) {
                --k;
                s = (f[q] + q * q - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = inf;
        }
        if (k < 0) return;  // no finite sites on this line
        int kk = 0;
        for (int q = 0; q < n; ++q) {
            while (z[kk + 1] < q) ++kk;
            d[q] = static_cast<double>(q - v[kk]) * (q - v[kk]) + f[v[kk]];
        }
        f = d;
    };
    // columns then rows
    {
        std::vector<double> col(spec.ny);
        for (int i = 0; i < spec.nx; ++i) {
            for (int j = 0; j < spec.ny; ++j) col[j] = sq[static_cast<size_t>(j) * spec.nx + i];
            edt_1d(col);
            for (int j = 0; j < spec.ny; ++j) sq[static_cast<size_t>(j) * spec.nx + i] = col[j];
        }
        std::vector<double> row(spec.nx);
        for (int j = 0; j < spec.ny; ++j) {
            for (int i = 0; i < spec.nx; ++i) row[i] = sq[static_cast<size_t>(j) * spec.nx + i];
            edt_1d(row);
            for (int i = 0; i < spec.nx; ++i) sq[static_cast<size_t>(j) * spec.nx + i] = row[i];
        }
    }

    RasterShape band;
    band.origin = spec.origin;
    band.h = spec.h;
    band.nx = spec.nx;
    band.ny = spec.ny;
    band.bits.assign(ncell, 0);
    double area = 0.0;
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            const double dist = spec.h * std::sqrt(sq[static_cast<size_t>(j) * spec.nx + i]);
            if (oversized || dist <= tau) band.set(i, j, true);
            // fractional coverage of cells straddling the band edge
            area += oversized ? 1.0 : std::clamp(0.5 + (tau - dist) / spec.h, 0.0, 1.0);
        }
    BandResult res;
    res.band_area = area * spec.h * spec.h;
    res.band_region = Patch(std::move(band));
    return res;
}

double polygon_disk_overlap(const std::vector<PolygonShape>& polys, const Vec2& center,
                            double r) {
    auto wedge = [&](Vec2 p, Vec2 q) -> double {
        // contribution of directed edge p->q to area(loop cap disk), disk at origin
        p -= center;
        q -= center;
        const double r2 = r * r;
        // find intersections of segment with the circle
        const Vec2 d = q - p;
        const double a = d.squaredNorm();
        const double b = 2.0 * p.dot(d);
        const double c = p.squaredNorm() - r2;
        std::vector<double> ts{0.0};
        if (a > 0.0) {
            const double disc = b * b - 4.0 * a * c;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
                    if (t > 1e-14 && t < 1.0 - 1e-14) ts.push_back(t);
            }
        }
        ts.push_back(1.0);
        std::sort(ts.begin(), ts.end());
        double acc = 0.0;
        for (size_t k = 0; k + 1 < ts.size(); ++k) {
            const Vec2 u = p + ts[k] * d;
            const Vec2 v = p + ts[k + 1] * d;
            const Vec2 mid = 0.5 * (u + v);
            if (mid.squaredNorm() <= r2) {
                acc += 0.5 * cross2(u, v);  // triangle with the center
            } else {
                double dth = std::atan2(v.y(), v.x()) - std::atan2(u.y(), u.x());
                while (dth > kPi) dth -= 2.0 * kPi;
                while (dth < -kPi) dth += 2.0 * kPi;
                acc += 0.5 * r2 * dth;  // circular sector
            }
        }
        return acc;
    };
    double area = 0.0;
    for (const auto& poly : polys) {
        const size_t n = poly.outer.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) area += wedge(poly.outer[j], poly.outer[i]);
        for (const Loop& h : poly.holes) {
            const size_t m = h.size();
            for (size_t i = 0, j = m - 1; i < m; j = i++) area += wedge(h[j], h[i]);
        }
    }
    return area;
}

namespace {

double overlap_with_disk(const Patch& patch, const std::vector<PolygonShape>& polys,
                         const RasterShape* raster, const Vec2& c, double r) {
    if (!polys.empty()) return polygon_disk_overlap(polys, c, r);
    double acc = 0.0;
    const RasterShape& rs = *raster;
    (void)patch;
    for (int j = 0; j < rs.ny; ++j)
        for (int i = 0; i < rs.nx; ++i)
            if (rs.at(i, j) && (rs.cell_center(i, j) - c).norm() <= r) acc += rs.h * rs.h;
    return acc;
}

}  // namespace

double fraenkel_asymmetry(const Patch& patch, int grid_n) {
    const Measures m = measures(patch);
    const double r = std::sqrt(m.area / kPi);

    std::vector<PolygonShape> polys;
    const RasterShape* raster = nullptr;
    if (patch.components.size() == 1 &&
        std::holds_alternative<RasterShape>(patch.components.front())) {
        raster = &std::get<RasterShape>(patch.components.front());
    } else {
        polys = polygonize(patch, std::max(grid_n, 512));
    }

    auto objective = [&](const Vec2& c) {
        const double ov = overlap_with_disk(patch, polys, raster, c, r);
        return 2.0 * (m.area - ov) / m.area;
    };

    // Nelder-Mead over the center, seeded at the centroid, 3 restarts
    double best = std::numeric_limits<double>::infinity();
    const double scale = 0.25 * r;
    const Vec2 seeds[3] = {m.centroid, m.centroid + Vec2(0.37 * r, -0.21 * r),
                           m.centroid + Vec2(-0.18 * r, 0.33 * r)};
    for (const Vec2& seed : seeds) {
        Vec2 simplex[3] = {seed, seed + Vec2(scale, 0.0), seed + Vec2(0.0, scale)};
        double f[3] = {objective(simplex[0]), objective(simplex[1]), objective(simplex[2])};
        for (int it = 0; it < 120; ++it) {
            int order[3] = {0, 1, 2};
            std::sort(order, order + 3, [&](int a, int b) { return f[a] < f[b]; });
            const Vec2 lo = simplex[order[0]], md = simplex[order[1]];
            Vec2& hi = simplex[order[2]];
            double& fhi = f[order[2]];
            if ((lo - hi).norm() < 1e-9 * (r + 1.0)) break;
            const Vec2 centroid = 0.5 * (lo + md);
            const Vec2 refl = centroid + (centroid - hi);
            const double fr = objective(refl);
            if (fr < f[order[0]]) {
                const Vec2 exp_pt = centroid + 2.0 * (centroid - hi);
                const double fe = objective(exp_pt);
                if (fe < fr) {
                    hi = exp_pt;
                    fhi = fe;
                } else {
                    hi = refl;
                    fhi = fr;
                }
            } else if (fr < f[order[1]]) {
                hi = refl;
                fhi = fr;
            } else {
                const Vec2 con = centroid + 0.5 * (hi - centroid);
                const double fc = objective(con);
                if (fc < fhi) {
                    hi = con;
                    fhi = fc;
                } else {
                    for (int k = 0; k < 3; ++k) {
                        if (k == order[0]) continue;
                        simplex[k] = lo + 0.5 * (simplex[k] - lo);
                        f[k] = objective(simplex[k]);
                    }
                }
            }
        }
        best = std::min(best, std::min({f[0], f[1], f[2]}));
    }
    return std::clamp(best, 0.0, 1.0 - 1e-15);
}

double IntervalSet::total_length() const {
    double s = 0.0;
    for (const auto& [a, b] : intervals) s += b - a;
    return s;
}

void IntervalSet::normalize() {
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [a, b] : intervals) {
        if (b <= a) continue;
        if (!out.empty() && a <= out.back().second) {
            out.back().second = std::max(out.back().second, b);
        } else {
            out.push_back({a, b});
        }
    }
    intervals = std::move(out);
}

IntervalSet section_at(const Patch& patch, const Vec2& direction, double xprime) {
    const Vec2 d = direction.normalized();
    const Vec2 dp = rot90(d);
    IntervalSet cut;
    for (const Shape& s : patch.components) {
        if (const auto* poly = std::get_if<PolygonShape>(&s)) {
            std::vector<double> ts;
            auto crossings = [&](const Loop& loop) {
                const size_t n = loop.size();
                for (size_t i = 0, j = n - 1; i < n; j = i++) {
                    const double sa = loop[j].dot(dp) - xprime;
                    const double sb = loop[i].dot(dp) - xprime;
                    if ((sb > 0.0) != (sa > 0.0)) {
                        const double t = sa / (sa - sb);
                        ts.push_back((loop[j] + t * (loop[i] - loop[j])).dot(d));
                    }
                }
            };
            crossings(poly->outer);
            for (const Loop& h : poly->holes) crossings(h);
            std::sort(ts.begin(), ts.end());
            for (size_t k = 0; k + 1 < ts.size(); k += 2) cut.intervals.push_back({ts[k], ts[k + 1]});
        } else if (const auto* dk = std::get_if<DiskShape>(&s)) {
            const double off = dk->center.dot(dp) - xprime;
            if (std::abs(off) < dk->radius) {
                const double half = std::sqrt(dk->radius * dk->radius - off * off);
                const double tc = dk->center.dot(d);
                cut.intervals.push_back({tc - half, tc + half});
            }
        } else if (const auto* an = std::get_if<AnnulusShape>(&s)) {
            const double off = an->center.dot(dp) - xprime;
            const double tc = an->center.dot(d);
            if (std::abs(off) < an->r_outer) {
                const double ho = std::sqrt(an->r_outer * an->r_outer - off * off);
                if (std::abs(off) < an->r_inner) {
                    const double hi = std::sqrt(an->r_inner * an->r_inner - off * off);
                    cut.intervals.push_back({tc - ho, tc - hi});
                    cut.intervals.push_back({tc + hi, tc + ho});
                } else {
                    cut.intervals.push_back({tc - ho, tc + ho});
                }
            }
        } else if (const auto* e = std::get_if<EllipseShape>(&s)) {
            // line p(t) = xprime*dp + t*d in the ellipse's unit-disk frame
            const double cc = std::cos(e->angle), ss = std::sin(e->angle);
            auto to_unit = [&](const Vec2& p) {
                const Vec2 q = p - e->center;
                return Vec2((cc * q.x() + ss * q.y()) / e->a, (-ss * q.x() + cc * q.y()) / e->b);
            };
            const Vec2 p0 = to_unit(xprime * dp);
            const Vec2 p1 = to_unit(xprime * dp + d);
            const Vec2 dd = p1 - p0;
            const double A = dd.squaredNorm();
            const double B = 2.0 * p0.dot(dd);
            const double C = p0.squaredNorm() - 1.0;
            const double disc = B * B - 4.0 * A * C;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                cut.intervals.push_back({(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)});
            }
        } else if (const auto* r = std::get_if<RasterShape>(&s)) {
            // axis-aligned directions only
            const bool along_x = std::abs(d.x()) > std::abs(d.y());
            if (std::abs(along_x ? d.y() : d.x()) > 1e-12)
                throw domain_error("section_at: raster sections require an axis direction");
            const double sgn = along_x ? (d.x() > 0 ? 1.0 : -1.0) : (d.y() > 0 ? 1.0 : -1.0);
            const int n_along = along_x ? r->nx : r->ny;
            const int n_across = along_x ? r->ny : r->nx;
            const double o_across = along_x ? r->origin.y() : r->origin.x();
            const double o_along = along_x ? r->origin.x() : r->origin.y();
            const double xp_line = along_x ? xprime : -xprime;  // dp = rot90(d)
            const int j = static_cast<int>(std::lround((xp_line * sgn - o_across) / r->h));
            if (j < 0 || j >= n_across) continue;
            int i = 0;
            while (i < n_along) {
                const bool on = along_x ? r->at(i, j) : r->at(j, i);
                if (!on) {
                    ++i;
                    continue;
                }
                int k = i;
                while (k < n_along && (along_x ? r->at(k, j) : r->at(j, k))) ++k;
                const double a = o_along + (i - 0.5) * r->h;
                const double b = o_along + (k - 0.5) * r->h;
                if (sgn > 0) {
                    cut.intervals.push_back({a, b});
                } else {
                    cut.intervals.push_back({-b, -a});
                }
                i = k;
            }
        }
    }
    cut.normalize();
    return cut;
}

std::vector<SectionLine> sections(const Patch& patch, const Vec2& direction, int grid_n) {
    const Vec2 d = direction.normalized();
    const Vec2 dp = rot90(d);
    std::vector<SectionLine> out;
    if (patch.components.size() == 1 &&
        std::holds_alternative<RasterShape>(patch.components.front())) {
        const auto& r = std::get<RasterShape>(patch.components.front());
        const bool along_x = std::abs(d.x()) > std::abs(d.y());
        const int n_across = along_x ? r.ny : r.nx;
        const double o_across = along_x ? r.origin.y() : r.origin.x();
        const double sgn_across = along_x ? (d.x() > 0 ? 1.0 : -1.0) : (d.y() > 0 ? -1.0 : 1.0);
        for (int j = 0; j < n_across; ++j) {
            SectionLine line;
            line.xprime = sgn_across * (o_across + j * r.h);
            line.cut = section_at(patch, d, line.xprime);
            if (!line.cut.intervals.empty()) out.push_back(std::move(line));
        }
        return out;
    }
    const BBox box = bounding_box(patch);
    const Vec2 corners[4] = {box.lo, box.hi, Vec2(box.lo.x(), box.hi.y()),
                             Vec2(box.hi.x(), box.lo.y())};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2& c : corners) {
        lo = std::min(lo, c.dot(dp));
        hi = std::max(hi, c.dot(dp));
    }
    for (int j = 0; j < grid_n; ++j) {
        SectionLine line;
        line.xprime = lo + (hi - lo) * (j + 0.5) / grid_n;
        line.cut = section_at(patch, d, line.xprime);
        if (!line.cut.intervals.empty()) out.push_back(std::move(line));
    }
    return out;
}

double symmetric_difference(const Patch& a, const Patch& b, int grid_n) {
    BBox box = bounding_box(a);
    const BBox bb = bounding_box(b);
    box.expand(bb.lo);
    box.expand(bb.hi);
    box.pad(1e-9 + 0.01 * box.diagonal());
    const RasterSpec spec = RasterSpec::cover(box, grid_n, 0.0);
    const RasterShape ra = rasterize(a, spec);
    const RasterShape rb = rasterize(b, spec);
    long cnt = 0;
    for (size_t k = 0; k < ra.bits.size(); ++k) cnt += (ra.bits[k] != rb.bits[k]) ? 1 : 0;
    return cnt * spec.h * spec.h;
}

}  // namespace patchlab
