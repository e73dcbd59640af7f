#include "patchlab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace patchlab {

namespace {

// P1 gradient of nodal values on a triangle
Vec2 tri_gradient(const TriMesh& mesh, const VecX& vals, int t) {
    const auto& tr = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tr[0]];
    const Vec2& p1 = mesh.vertices[tr[1]];
    const Vec2& p2 = mesh.vertices[tr[2]];
    const double area = mesh.triangle_area(t);
    const Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
    return (vals[tr[0]] * Vec2(-e0.y(), e0.x()) + vals[tr[1]] * Vec2(-e1.y(), e1.x()) +
            vals[tr[2]] * Vec2(-e2.y(), e2.x())) /
           (2.0 * area);
}

// gradient of a component's Newtonian/Riesz potential: radial closed form for
// disks and annuli, polygon boundary integral otherwise
struct CompPotential {
    bool radial = false;
    Vec2 center{0.0, 0.0};
    double r_in = 0.0, r_out = 0.0;
    std::vector<PolygonShape> polys;
    KernelSpec kernel;

    static CompPotential make(const Shape& shape, const KernelSpec& k, int n_nodes) {
        CompPotential cp;
        cp.kernel = k;
        if (const auto* d = std::get_if<DiskShape>(&shape)) {
            cp.radial = true;
            cp.center = d->center;
            cp.r_out = d->radius;
        } else if (const auto* an = std::get_if<AnnulusShape>(&shape)) {
            cp.radial = true;
            cp.center = an->center;
            cp.r_in = an->r_inner;
            cp.r_out = an->r_outer;
        } else {
            Patch single;
            single.components.push_back(shape);
            cp.polys = polygonize(single, n_nodes);
        }
        return cp;
    }

    Vec2 gradient(const Vec2& x) const {
        if (!radial) return polygon_potential_gradient(polys, kernel, x);
        const Vec2 d = x - center;
        const double r = d.norm();
        if (r < 1e-14) return Vec2(0.0, 0.0);
        double dr = disk_kernel_potential_dr(r_out, kernel, r);
        if (r_in > 0.0) dr -= disk_kernel_potential_dr(r_in, kernel, r);
        return dr / r * d;
    }
};

struct ComponentData {
    std::vector<PolygonShape> polys;  // single-component polygonization
    PoissonSolution sol;
    double area = 0.0;
    double second_moment = 0.0;
    double int_p = 0.0;
};

}  // namespace

VariationReport first_variation(const RotatingState& state, double mesh_edge) {
    if (state.density) throw domain_error("first_variation: patch states only");
    if (state.kernel.alpha >= 1.0)
        throw domain_error("first_variation: boundary route needs alpha < 1");

    const int n_comp = static_cast<int>(state.patch.components.size());
    std::vector<ComponentData> comp(n_comp);
    std::vector<CompPotential> pots;
    for (int i = 0; i < n_comp; ++i) {
        Patch single;
        single.components.push_back(state.patch.components[i]);
        comp[i].polys = polygonize(single, state.boundary_nodes);
        comp[i].sol = solve_constrained(single, mesh_edge);
        const Measures m = measures(single);
        comp[i].area = m.area;
        comp[i].second_moment = m.second_moment;
        comp[i].int_p = comp[i].sol.integral_p();
        pots.push_back(CompPotential::make(state.patch.components[i], state.kernel,
                                           state.boundary_nodes));
    }

    VariationReport rep;

    // volume quadrature of sum_i a_i int_{D_i} (x + grad p_i) . grad f_Omega
    for (int i = 0; i < n_comp; ++i) {
        const double ai = state.weights[i];
        const TriMesh& mesh = comp[i].sol.mesh;
        double acc = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const Vec2 c = mesh.centroid(t);
            const Vec2 gp = tri_gradient(mesh, comp[i].sol.p, t);
            Vec2 gf = -state.omega * c;
            for (int j = 0; j < n_comp; ++j) gf += state.weights[j] * pots[j].gradient(c);
            acc += mesh.triangle_area(t) * (c + gp).dot(gf);
        }
        rep.I_boundary += ai * acc;
    }

    // identity route (Newtonian only)
    if (state.kernel.alpha == 0.0) {
        rep.identity_available = true;
        for (int i = 0; i < n_comp; ++i) {
            const double ai = state.weights[i];
            for (int j = 0; j < n_comp; ++j)
                rep.pair_term +=
                    ai * state.weights[j] * comp[i].area * comp[j].area / (4.0 * kPi);
            rep.moment_term += state.omega * ai * comp[i].second_moment;
            rep.p_term += (2.0 * state.omega - ai) * ai * comp[i].int_p;
            double holes = 0.0;
            for (size_t k = 0; k < comp[i].sol.c.size(); ++k)
                holes += comp[i].sol.c[k] * comp[i].sol.hole_area[k];
            rep.hole_term += 2.0 * state.omega * ai * holes;
            // cross terms: p_i is c_ik on hole curves, 0 on the outer one
            for (int j = 0; j < n_comp; ++j) {
                if (j == i) continue;
                for (size_t k = 0; k < comp[i].polys.front().holes.size(); ++k) {
                    const Loop& hole = comp[i].polys.front().holes[k];
                    double flux = 0.0;  // int_{dh_ik} grad psi_j . n_D dsigma
                    const size_t n = hole.size();
                    for (size_t a = 0, b = n - 1; a < n; b = a++) {
                        const Vec2 mid = 0.5 * (hole[b] + hole[a]);
                        const Vec2 tang = hole[a] - hole[b];
                        const Vec2 nrm(tang.y(), -tang.x());  // outward of D (CW hole)
                        flux += pots[j].gradient(mid).dot(nrm);
                    }
                    rep.cross_term += ai * state.weights[j] * comp[i].sol.c[k] * flux;
                }
            }
        }
        rep.I_identity =
            rep.pair_term - rep.moment_term + rep.p_term + rep.hole_term + rep.cross_term;

        // I = I1 + (-Omega) I2 split
        rep.I1 = rep.pair_term + rep.cross_term;
        for (int i = 0; i < n_comp; ++i)
            rep.I1 -= state.weights[i] * state.weights[i] * comp[i].int_p;
        for (int i = 0; i < n_comp; ++i) {
            double holes = 0.0;
            for (size_t k = 0; k < comp[i].sol.c.size(); ++k)
                holes += comp[i].sol.c[k] * comp[i].sol.hole_area[k];
            rep.I2 += state.weights[i] *
                      (comp[i].second_moment - 2.0 * comp[i].int_p - 2.0 * holes);
        }
    }

    rep.tolerance = 1e-3 * std::max(rep.pair_term, 1e-12);
    const auto stat = stationarity_residual(state);
    rep.stationarity_oscillation = stat.max_oscillation;
    return rep;
}

RigidityVerdict rigidity_verdict(const VariationReport& report, double omega) {
    RigidityVerdict v;
    if (omega <= 0.0)
        v.expected_sign = 1;
    else if (omega >= 0.5)
        v.expected_sign = -1;
    const double I = report.identity_available ? report.I_identity : report.I_boundary;
    if (I > report.tolerance)
        v.observed_sign = 1;
    else if (I < -report.tolerance)
        v.observed_sign = -1;
    if (v.observed_sign == 0) {
        v.conclusion = "first variation vanishes: consistent with a radial set or a rotating solution";
        v.consistent = true;
    } else if (v.expected_sign == 0) {
        v.conclusion = "no sign law applies for Omega in (0, 1/2)";
        v.consistent = true;
    } else if (v.observed_sign == v.expected_sign) {
        v.conclusion = "sign law holds: a non-radial patch with this Omega cannot be a rotating solution";
        v.consistent = true;
    } else {
        v.conclusion = "sign law violated: check resolution";
        v.consistent = false;
    }
    return v;
}

StabilityBoundReport stability_bound(const Patch& patch, double omega) {
    if (!(omega > 0.25 && omega < 0.5))
        throw domain_error("stability_bound: Omega must lie in (1/4, 1/2)");
    if (patch.components.size() != 1)
        throw domain_error("stability_bound: simply-connected patches only");
    if (const auto* poly = std::get_if<PolygonShape>(&patch.components.front()))
        if (!poly->holes.empty())
            throw domain_error("stability_bound: simply-connected patches only");

    StabilityBoundReport rep;
    rep.delta = 0.5 - omega;
    const Measures m = measures(patch);
    rep.bound = 2.0 * std::sqrt(2.0 * rep.delta) * m.area;
    const Patch ball = make_disk({0.0, 0.0}, std::sqrt(m.area / kPi));
    rep.measured = symmetric_difference(patch, ball, 1024);
    rep.pass = rep.measured <= rep.bound;
    const auto stat = stationarity_residual(make_patch_state(patch, omega, make_kernel(0.0)));
    rep.stationarity_oscillation = stat.max_oscillation;
    rep.stationarity_tolerance = stat.tolerance;
    return rep;
}

ExteriorReport exterior_first_variation(const Patch& patch, double omega, double R,
                                        int n_theta) {
    const Measures m = measures(patch);
    const double R0 = m.r_max;
    if (!(R > 2.0 * R0))
        throw domain_error("exterior_first_variation: requires R > 2 R0 with D inside B(0,R0)");

    ExteriorReport rep;
    rep.R = R;
    rep.R0 = R0;

    const int n_comp = static_cast<int>(patch.components.size());
    const KernelSpec newt = make_kernel(0.0);
    std::vector<std::vector<PolygonShape>> polys(n_comp);
    std::vector<CompPotential> pots;
    for (int i = 0; i < n_comp; ++i) {
        Patch single;
        single.components.push_back(patch.components[i]);
        polys[i] = polygonize(single, 256);
        pots.push_back(CompPotential::make(patch.components[i], newt, 256));
    }

    // region solves: the annular component touching dB_R, then the holes of D
    struct Region {
        PoissonSolution sol;
        bool is_outer = false;
    };
    std::vector<Region> regions;

    const Shape& s0 = patch.components.front();
    const bool circular_outer =
        n_comp == 1 &&
        (std::holds_alternative<DiskShape>(s0) || std::holds_alternative<AnnulusShape>(s0));
    if (circular_outer) {
        Vec2 c;
        double r_out;
        if (const auto* d = std::get_if<DiskShape>(&s0)) {
            c = d->center;
            r_out = d->radius;
        } else {
            const auto& an = std::get<AnnulusShape>(s0);
            c = an.center;
            r_out = an.r_outer;
        }
        TriMesh mesh = mesh_two_circle_domain(c, r_out, {0.0, 0.0}, R, n_theta);
        regions.push_back({solve_constrained(mesh), true});
    } else {
        Loop circle(n_theta);
        for (int k = 0; k < n_theta; ++k) {
            const double th = 2.0 * kPi * k / n_theta;
            circle[k] = R * Vec2(std::cos(th), std::sin(th));
        }
        std::vector<Loop> holes;
        for (int i = 0; i < n_comp; ++i) {
            Loop h = polys[i].front().outer;
            std::reverse(h.begin(), h.end());
            holes.push_back(std::move(h));
        }
        const double edge = 2.0 * kPi * R / n_theta;
        TriMesh mesh = triangulate_polygon(PolygonShape{circle, holes}, edge);
        regions.push_back({solve_constrained(mesh), true});
    }
    for (int i = 0; i < n_comp; ++i) {
        for (const Loop& hole : polys[i].front().holes) {
            Loop outer = hole;
            std::reverse(outer.begin(), outer.end());
            const double edge = loop_perimeter(outer) / 256.0;
            TriMesh mesh = triangulate_polygon(PolygonShape{outer, {}}, edge);
            regions.push_back({solve_constrained(mesh), false});
        }
    }

    auto grad_psi_D = [&](const Vec2& x) -> Vec2 {
        Vec2 g(0.0, 0.0);
        for (int i = 0; i < n_comp; ++i) g += pots[i].gradient(x);
        return g;
    };

    for (const Region& reg : regions) {
        const TriMesh& mesh = reg.sol.mesh;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const Vec2 c = mesh.centroid(t);
            const double A = mesh.triangle_area(t);
            const Vec2 e = c + tri_gradient(mesh, reg.sol.p, t);  // grad phi
            const Vec2 gpsi = grad_psi_D(c);
            const Vec2 gf = gpsi - omega * c;
            const Vec2 gW = 0.5 * c - gpsi;  // grad of (1_{B_R} - 1_D) * N inside B_R
            rep.I_R += A * e.dot(gf);
            rep.J_R1 += A * e.dot(gW);
            rep.J_R2 += A * e.dot(c);
        }
    }
    rep.identity_gap = std::abs(rep.I_R + rep.J_R1 + (2.0 * omega - 1.0) / 2.0 * rep.J_R2);

    // Lemma bound |grad phi_{0,R}.n| <= N R0^2/(2R log(R/R0)) on dB_R, with N
    // the number of components of V = B_R minus the outer region
    rep.outer_gradient_bound = n_comp * R0 * R0 / (2.0 * R * std::log(R / R0));
    const Region& outer = regions.front();
    const TriMesh& mesh = outer.sol.mesh;
    const auto& ids = mesh.curves[0];
    std::vector<double> q_density(ids.size());
    for (size_t a = 0; a < ids.size(); ++a) {
        const int v = ids[a];
        const int prev = ids[(a + ids.size() - 1) % ids.size()];
        const int next = ids[(a + 1) % ids.size()];
        const double ell = 0.5 * ((mesh.vertices[v] - mesh.vertices[prev]).norm() +
                                  (mesh.vertices[next] - mesh.vertices[v]).norm());
        // weak nodal flux of phi = |x|^2/2 + p: K p - load gives the p part,
        // the quadratic part is assembled triangle-wise from its interpolant
        double r_phi = outer.sol.nodal_residual[v];
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto& tr = mesh.triangles[t];
            int local = -1;
            for (int q = 0; q < 3; ++q)
                if (tr[q] == v) local = q;
            if (local < 0) continue;
            const double A = mesh.triangle_area(t);
            const Vec2& p0 = mesh.vertices[tr[0]];
            const Vec2& p1 = mesh.vertices[tr[1]];
            const Vec2& p2 = mesh.vertices[tr[2]];
            VecX g2(3);
            g2 << 0.5 * p0.squaredNorm(), 0.5 * p1.squaredNorm(), 0.5 * p2.squaredNorm();
            const Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
            const Vec2 gl[3] = {Vec2(-e0.y(), e0.x()) / (2.0 * A),
                                Vec2(-e1.y(), e1.x()) / (2.0 * A),
                                Vec2(-e2.y(), e2.x()) / (2.0 * A)};
            const Vec2 gq = g2[0] * gl[0] + g2[1] * gl[1] + g2[2] * gl[2];
            r_phi += A * gl[local].dot(gq) + 2.0 * A / 3.0;  // + int phi_v Delta(x^2/2)
        }
        q_density[a] = r_phi / ell;
    }
    // 3-node window along the curve damps the O(h) sign-alternating FEM noise
    for (size_t a = 0; a < ids.size(); ++a) {
        const double q = (q_density[(a + ids.size() - 1) % ids.size()] + q_density[a] +
                          q_density[(a + 1) % ids.size()]) /
                         3.0;
        rep.outer_gradient_max = std::max(rep.outer_gradient_max, std::abs(q));
    }
    rep.gradient_bound_holds =
        rep.outer_gradient_max <= rep.outer_gradient_bound + 1e-4 * (1.0 + R0 * R0);
    return rep;
}

}  // namespace patchlab
