#pragma once

#include "patchlab/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace patchlab {

// A closed loop of vertices; the segment from back() to front() is implied.
using Loop = std::vector<Vec2>;

double loop_signed_area(const Loop& loop);
double loop_perimeter(const Loop& loop);
Vec2 loop_first_moment(const Loop& loop);         // signed int x dA
double loop_second_moment(const Loop& loop);      // signed int |x|^2 dx over the interior
bool loop_is_simple(const Loop& loop);
Loop resample_loop(const Loop& loop, int n_nodes);
double distance_to_loop(const Vec2& p, const Loop& loop);

struct PolygonShape {
    Loop outer;               // CCW
    std::vector<Loop> holes;  // CW, strictly inside outer
};

struct RasterShape {
    Vec2 origin{0.0, 0.0};  // center of cell (0,0)
    double h = 1.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> bits;  // row-major, bits[j*nx+i] for cell (i,j)

    bool at(int i, int j) const { return bits[static_cast<size_t>(j) * nx + i] != 0; }
    void set(int i, int j, bool v) { bits[static_cast<size_t>(j) * nx + i] = v ? 1 : 0; }
    Vec2 cell_center(int i, int j) const {
        return origin + Vec2(i * h, j * h);
    }
};

struct DiskShape {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
};

struct AnnulusShape {
    Vec2 center{0.0, 0.0};
    double r_inner = 0.5;
    double r_outer = 1.0;
};

struct EllipseShape {
    Vec2 center{0.0, 0.0};
    double a = 1.0;  // semiaxes, a >= b
    double b = 1.0;
    double angle = 0.0;
};

using Shape = std::variant<PolygonShape, RasterShape, DiskShape, AnnulusShape, EllipseShape>;

// A planar patch: one or more disjoint components, each possibly with holes.
struct Patch {
    std::vector<Shape> components;

    Patch() = default;
    explicit Patch(Shape s) { components.push_back(std::move(s)); }
};

Patch make_disk(const Vec2& c, double r);
Patch make_annulus(const Vec2& c, double r_inner, double r_outer);
Patch make_ellipse(const Vec2& c, double a, double b, double angle = 0.0);
Patch make_polygon(Loop outer, std::vector<Loop> holes = {});
Patch make_rect(const Vec2& lo, const Vec2& hi);

// Checks representation invariants (orientations, simplicity, containment,
// positive measures); throws domain_error on violation.
void validate(const Patch& patch);

struct Measures {
    double area = 0.0;
    double perimeter = 0.0;
    Vec2 centroid{0.0, 0.0};
    double second_moment = 0.0;  // int_D |x|^2 dx, about the origin
    double r_max = 0.0;          // max_{x in D-bar} |x|
};

Measures measures(const Patch& patch);
BBox bounding_box(const Patch& patch);
bool contains(const Patch& patch, const Vec2& p);

// All boundary loops of the patch as polygons: analytic shapes are
// polygonized with n_nodes on the outer loop of each component and a
// length-proportional count on holes. Outer loops CCW, holes CW.
std::vector<PolygonShape> polygonize(const Patch& patch, int n_nodes = 512);

struct BoundaryComponent {
    Loop nodes;                   // closed polyline, first node not repeated
    bool is_hole = false;
    int component = 0;            // index of the owning patch component
    std::vector<double> weights;  // arc-length quadrature weight per node
    double length = 0.0;
};

std::vector<BoundaryComponent> boundary_components(const Patch& patch, int n_nodes = 512);

struct RasterSpec {
    Vec2 origin{0.0, 0.0};
    double h = 1.0;
    int nx = 256, ny = 256;

    static RasterSpec cover(const BBox& box, int n, double pad_fraction = 0.03);
    Vec2 cell_center(int i, int j) const { return origin + Vec2(i * h, j * h); }
};

RasterShape rasterize(const Patch& patch, const RasterSpec& spec);

struct BandResult {
    Patch band_region;  // raster patch
    double band_area = 0.0;
};

// B^tau[D]: cells within distance tau of the boundary, resolved on a raster.
BandResult boundary_band(const Patch& patch, double tau, int grid_n = 256);

// Fraenkel asymmetry A(D) in [0,1): the infimum over centers of
// |D symdiff (x0 + r B)| / |D| with pi r^2 = |D|. Derivative-free search
// seeded at the centroid, 3 restarts.
double fraenkel_asymmetry(const Patch& patch, int grid_n = 256);

// Finite disjoint union of open intervals, kept sorted.
struct IntervalSet {
    std::vector<std::pair<double, double>> intervals;

    double total_length() const;
    void normalize();  // sort, drop empties, merge touching intervals
};

// 1D sections D_{x'} along direction e1 (after rotating `direction` onto e1),
// sampled on the raster rows (or exact for analytic shapes and polygons).
struct SectionLine {
    double xprime = 0.0;
    IntervalSet cut;
};

std::vector<SectionLine> sections(const Patch& patch, const Vec2& direction, int grid_n = 256);
IntervalSet section_at(const Patch& patch, const Vec2& direction, double xprime);

// Area of the symmetric difference, by raster counting on the union bbox.
double symmetric_difference(const Patch& a, const Patch& b, int grid_n = 256);

// Exact area of polygon-with-holes intersected with a disk.
double polygon_disk_overlap(const std::vector<PolygonShape>& polys, const Vec2& center, double r);

}  // namespace patchlab
