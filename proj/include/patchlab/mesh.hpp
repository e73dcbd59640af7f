#pragma once

#include "patchlab/geometry.hpp"
#include "patchlab/types.hpp"

#include <array>
#include <vector>

namespace patchlab {

// Conforming triangle mesh of a connected plane domain with holes.
// Curve 0 is the outer boundary; curves 1..n are holes. Boundary vertices
// carry their curve id; curve node lists are ordered along the curve.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<int> vertex_curve;              // -1 for interior vertices
    std::vector<std::vector<int>> curves;       // ordered vertex ids per curve
    double target_edge = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    double triangle_area(int t) const;
    Vec2 centroid(int t) const;
    double total_area() const;
    // signed area enclosed by a boundary curve's node polygon
    double curve_area(int c) const;
    double curve_length(int c) const;
};

// Unstructured Delaunay mesh of a polygon with holes: boundary loops resampled
// at the target edge length, jittered hex lattice inside, Bowyer-Watson
// triangulation, boundary-edge recovery by midpoint insertion.
TriMesh triangulate_polygon(const PolygonShape& poly, double target_edge);

// Structured conformal mesh of the region between two nested circles
// (B(inner_c, r_in) strictly inside B(outer_c, r_out)): a Moebius map sends
// the domain to a concentric annulus, meshed in log-polar coordinates.
// Curve 0 is the outer circle, curve 1 the inner one.
TriMesh mesh_two_circle_domain(const Vec2& inner_c, double r_in, const Vec2& outer_c,
                               double r_out, int n_theta, int n_rho = 0);

}  // namespace patchlab
