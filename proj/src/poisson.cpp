#include "patchlab/poisson.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace patchlab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Assembled {
    SpMat K;        // full stiffness
    VecX load;      // weak load of Delta p = -2: +2 int phi_i
    std::vector<int> dof;       // vertex -> interior dof index, -1 if Dirichlet
    std::vector<int> interior;  // dof -> vertex
    SpMat K_ii;
    SpMat K_ib;  // interior x boundary (all vertices, zero-padded columns)
    std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;
};

Assembled assemble(const TriMesh& mesh) {
    Assembled as;
    const int n = mesh.n_vertices();
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.n_triangles());
    as.load = VecX::Zero(n);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2& p0 = mesh.vertices[tr[0]];
        const Vec2& p1 = mesh.vertices[tr[1]];
        const Vec2& p2 = mesh.vertices[tr[2]];
        const double area = mesh.triangle_area(t);
        if (area <= 0.0) throw numerical_error("assemble: non-positive triangle area");
        // P1 gradients: grad phi_i = rot90(opposite edge) / (2 area)
        const Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
        const Vec2 g[3] = {Vec2(-e0.y(), e0.x()) / (2.0 * area),
                           Vec2(-e1.y(), e1.x()) / (2.0 * area),
                           Vec2(-e2.y(), e2.x()) / (2.0 * area)};
        for (int a = 0; a < 3; ++a) {
            for (int bb = 0; bb < 3; ++bb)
                trips.emplace_back(tr[a], tr[bb], area * g[a].dot(g[bb]));
            as.load[tr[a]] += 2.0 * area / 3.0;
        }
    }
    as.K = SpMat(n, n);
    as.K.setFromTriplets(trips.begin(), trips.end());

    as.dof.assign(n, -1);
    for (int v = 0; v < n; ++v)
        if (mesh.vertex_curve[v] < 0) {
            as.dof[v] = static_cast<int>(as.interior.size());
            as.interior.push_back(v);
        }
    const int ni = static_cast<int>(as.interior.size());
    std::vector<Triplet> tii, tib;
    for (int col = 0; col < as.K.outerSize(); ++col)
        for (SpMat::InnerIterator it(as.K, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int cc = static_cast<int>(it.col());
            if (as.dof[r] >= 0 && as.dof[cc] >= 0)
                tii.emplace_back(as.dof[r], as.dof[cc], it.value());
            else if (as.dof[r] >= 0 && as.dof[cc] < 0)
                tib.emplace_back(as.dof[r], cc, it.value());
        }
    as.K_ii = SpMat(ni, ni);
    as.K_ii.setFromTriplets(tii.begin(), tii.end());
    as.K_ib = SpMat(ni, n);
    as.K_ib.setFromTriplets(tib.begin(), tib.end());
    as.ldlt = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
    as.ldlt->compute(as.K_ii);
    if (as.ldlt->info() != Eigen::Success)
        throw numerical_error("assemble: stiffness factorization failed");
    return as;
}

// solve with Dirichlet data g on boundary vertices and the assembled load
// scaled by load_scale (1 for u, 0 for the harmonic lifts)
VecX dirichlet_solve(const TriMesh& mesh, const Assembled& as, const VecX& g,
                     double load_scale) {
    (void)mesh;
    VecX full = g;
    VecX rhs_i(static_cast<int>(as.interior.size()));
    const VecX kib_g = as.K_ib * g;
    for (size_t d = 0; d < as.interior.size(); ++d)
        rhs_i[static_cast<int>(d)] =
            load_scale * as.load[as.interior[d]] - kib_g[static_cast<int>(d)];
    const VecX sol_i = as.ldlt->solve(rhs_i);
    for (size_t d = 0; d < as.interior.size(); ++d)
        full[as.interior[d]] = sol_i[static_cast<int>(d)];
    return full;
}

// residual r = K u - load_scale * load; per-curve sums give weak fluxes
VecX weak_residual(const Assembled& as, const VecX& u, double load_scale) {
    return as.K * u - load_scale * as.load;
}

double curve_residual_sum(const TriMesh& mesh, const VecX& r, int curve) {
    double s = 0.0;
    for (int v : mesh.curves[curve]) s += r[v];
    return s;
}

PoissonSolution solve_on_mesh(const TriMesh& mesh, bool allow_refine);

}  // namespace

double PoissonSolution::sup_p() const { return p.maxCoeff(); }

double PoissonSolution::integral_p() const {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        s += mesh.triangle_area(t) * (p[tr[0]] + p[tr[1]] + p[tr[2]]) / 3.0;
    }
    return s;
}

double PoissonSolution::domain_area() const { return mesh.total_area(); }

namespace {

PoissonSolution solve_on_mesh(const TriMesh& mesh, bool allow_refine) {
    (void)allow_refine;
    const int n_holes = static_cast<int>(mesh.curves.size()) - 1;
    const Assembled as = assemble(mesh);
    const int n = mesh.n_vertices();

    // u: homogeneous Dirichlet
    const VecX u = dirichlet_solve(mesh, as, VecX::Zero(n), 1.0);
    // v_j: harmonic, 1 on hole j, 0 elsewhere
    std::vector<VecX> lifts;
    for (int j = 0; j < n_holes; ++j) {
        VecX g = VecX::Zero(n);
        for (int v : mesh.curves[j + 1]) g[v] = 1.0;
        lifts.push_back(dirichlet_solve(mesh, as, g, 0.0));
    }

    PoissonSolution sol;
    sol.mesh = mesh;
    sol.A = MatX::Zero(n_holes, n_holes);
    sol.b = VecX::Zero(n_holes);
    sol.hole_area.resize(n_holes);
    sol.hole_flux.resize(n_holes);

    const VecX ru = weak_residual(as, u, 1.0);
    std::vector<VecX> rv;
    for (int j = 0; j < n_holes; ++j) rv.push_back(weak_residual(as, lifts[j], 0.0));

    for (int i = 0; i < n_holes; ++i) {
        sol.hole_area[i] = std::abs(mesh.curve_area(i + 1));
        // fluxes w.r.t. the hole's outer normal = -(sum of weak residuals)
        sol.b[i] = -2.0 * sol.hole_area[i] + curve_residual_sum(mesh, ru, i + 1);
        for (int j = 0; j < n_holes; ++j)
            sol.A(i, j) = -curve_residual_sum(mesh, rv[j], i + 1);
    }

    // sign pattern required by the Hopf-lemma argument
    for (int j = 0; j < n_holes; ++j) {
        if (!(sol.A(j, j) < 0.0))
            throw numerical_error("solve_constrained: A_jj >= 0 (mesh too coarse)");
        double colsum = 0.0;
        for (int i = 0; i < n_holes; ++i) {
            if (i != j && !(sol.A(i, j) > 0.0))
                throw numerical_error("solve_constrained: A_ij <= 0 (mesh too coarse)");
            colsum += sol.A(i, j);
        }
        if (!(colsum < 0.0))
            throw numerical_error("solve_constrained: column sum >= 0 (mesh too coarse)");
    }

    VecX cvec(n_holes);
    if (n_holes > 0) {
        cvec = sol.A.fullPivLu().solve(sol.b);
        const double res = (sol.A * cvec - sol.b).cwiseAbs().maxCoeff();
        const double scale = sol.b.cwiseAbs().maxCoeff() + 1.0;
        if (res > 1e-10 * scale) throw numerical_error("solve_constrained: hole system residual");
    }

    sol.p = u;
    for (int j = 0; j < n_holes; ++j) sol.p += cvec[j] * lifts[j];
    sol.c.assign(cvec.data(), cvec.data() + n_holes);

    const VecX rp = weak_residual(as, sol.p, 1.0);
    sol.nodal_residual = rp;
    for (int i = 0; i < n_holes; ++i) sol.hole_flux[i] = -curve_residual_sum(mesh, rp, i + 1);
    sol.outer_flux = curve_residual_sum(mesh, rp, 0);
    sol.solve_residual = 0.0;
    for (int v : as.interior) sol.solve_residual = std::max(sol.solve_residual, std::abs(rp[v]));
    return sol;
}

}  // namespace

PoissonSolution solve_constrained(const TriMesh& mesh) { return solve_on_mesh(mesh, false); }

PoissonSolution solve_constrained(const Patch& patch, double target_edge) {
    if (patch.components.size() != 1)
        throw domain_error("solve_constrained: connected patches only");

    const Shape& s = patch.components.front();
    if (const auto* an = std::get_if<AnnulusShape>(&s)) {
        const int n_theta =
            target_edge > 0.0
                ? std::max(64, static_cast<int>(2.0 * kPi * an->r_outer / target_edge))
                : 1024;
        TriMesh mesh = mesh_two_circle_domain(an->center, an->r_inner, an->center, an->r_outer,
                                              n_theta);
        auto sol = solve_on_mesh(mesh, true);
        sol.tolerance = 10.0 * poisson_benchmark_error(2.0 * kPi * an->r_outer / n_theta);
        return sol;
    }

    const auto polys = polygonize(patch, 512);
    const PolygonShape& poly = polys.front();
    const double edge =
        target_edge > 0.0
            ? target_edge
            : (loop_perimeter(poly.outer) +
               [&] {
                   double s2 = 0.0;
                   for (const Loop& h : poly.holes) s2 += loop_perimeter(h);
                   return s2;
               }()) /
                  512.0;
    TriMesh mesh = triangulate_polygon(poly, edge);
    PoissonSolution sol = [&] {
        try {
            return solve_on_mesh(mesh, true);
        } catch (const numerical_error&) {
            // refine once and retry (sign-pattern violations on coarse meshes)
            TriMesh finer = triangulate_polygon(poly, 0.5 * edge);
            return solve_on_mesh(finer, false);
        }
    }();
    sol.tolerance = 10.0 * poisson_benchmark_error(edge);
    return sol;
}

double poisson_benchmark_error(double target_edge) {
    static std::vector<std::pair<double, double>> cache;
    for (const auto& [e, v] : cache)
        if (e == target_edge) return v;
    const auto polys = polygonize(make_disk({0.0, 0.0}, 1.0), 512);
    TriMesh mesh = triangulate_polygon(polys.front(), target_edge);
    const PoissonSolution sol = solve_on_mesh(mesh, false);
    const double err = std::abs(sol.sup_p() - 0.5);
    cache.push_back({target_edge, err});
    return err;
}

TalentiReport talenti_report(const PoissonSolution& sol) {
    TalentiReport rep;
    rep.sup_p = sol.sup_p();
    rep.int_p = sol.integral_p();
    const double area = sol.domain_area();
    rep.bound_sup = area / (2.0 * kPi);
    rep.bound_int = area * area / (4.0 * kPi);
    rep.gap_sup = rep.bound_sup - rep.sup_p;
    rep.gap_int = rep.bound_int - rep.int_p;
    return rep;
}

GradientEnergyReport gradient_energy_check(const PoissonSolution& sol) {
    GradientEnergyReport rep;
    const TriMesh& mesh = sol.mesh;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2& p0 = mesh.vertices[tr[0]];
        const Vec2& p1 = mesh.vertices[tr[1]];
        const Vec2& p2 = mesh.vertices[tr[2]];
        const double area = mesh.triangle_area(t);
        const Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
        const Vec2 g0 = Vec2(-e0.y(), e0.x()) / (2.0 * area);
        const Vec2 g1 = Vec2(-e1.y(), e1.x()) / (2.0 * area);
        const Vec2 g2 = Vec2(-e2.y(), e2.x()) / (2.0 * area);
        const Vec2 grad = sol.p[tr[0]] * g0 + sol.p[tr[1]] * g1 + sol.p[tr[2]] * g2;
        rep.grad_p_sq += area * grad.squaredNorm();
        // edge-midpoint rule, exact for quadratics
        const Vec2 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
        rep.x_sq += area / 3.0 * (m01.squaredNorm() + m12.squaredNorm() + m20.squaredNorm());
        rep.minus_gradp_x += -area * grad.dot((p0 + p1 + p2) / 3.0);
    }
    return rep;
}

DistributionFunction distribution_function(const PoissonSolution& sol, int n_levels) {
    DistributionFunction df;
    const double top = sol.sup_p();
    const TriMesh& mesh = sol.mesh;
    for (int l = 0; l < n_levels; ++l) {
        const double k = top * l / (n_levels - 1.0);
        double area = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto& tr = mesh.triangles[t];
            double v[3] = {sol.p[tr[0]], sol.p[tr[1]], sol.p[tr[2]]};
            std::sort(v, v + 3);
            const double A = mesh.triangle_area(t);
            if (k < v[0]) {
                area += A;
            } else if (k < v[1]) {
                const double d = (v[1] - v[0]) * (v[2] - v[0]);
                area += d > 0.0 ? A * (1.0 - (k - v[0]) * (k - v[0]) / d) : A;
            } else if (k < v[2]) {
                const double d = (v[2] - v[0]) * (v[2] - v[1]);
                if (d > 0.0) area += A * (v[2] - k) * (v[2] - k) / d;
            }
        }
        df.k.push_back(k);
        df.g.push_back(area);
    }
    return df;
}

double mobius_b(double a, double eps) {
    if (!(a > 0.0 && a < 1.0)) throw domain_error("mobius_b: a must lie in (0,1)");
    if (!(eps > 0.0 && eps < a * a / 64.0))
        throw domain_error("mobius_b: requires 0 < eps < a^2/64");
    const double coef = (2.0 + (1.0 - a * a) * eps) / a;
    // smaller root of b^2 - coef b + 1, stable form
    return 2.0 / (coef + std::sqrt(coef * coef - 4.0));
}

ThinAnnulusReport thin_annulus_bound(double a, double eps, int n_theta) {
    if (!(a > 0.0 && a < 1.0) || !(eps > 0.0 && eps < a * a / 64.0))
        throw domain_error("thin_annulus_bound: requires 0 < eps < a^2/64");
    ThinAnnulusReport rep;
    const double area = kPi * ((1.0 + eps) * (1.0 + eps) - 1.0);
    rep.bound = area / (2.0 * kPi) * (1.0 - a * a / 16.0);
    TriMesh mesh = mesh_two_circle_domain({0.0, 0.0}, 1.0, {a * eps, 0.0}, 1.0 + eps, n_theta, 24);
    const PoissonSolution sol = solve_on_mesh(mesh, false);
    rep.solver_c1 = sol.c.at(0);
    rep.pass = rep.solver_c1 <= rep.bound * (1.0 + 1e-3);
    return rep;
}

EccentricAnnulusReport eccentric_annulus_bound(double r, double R, double l, int n_theta) {
    if (!(l >= 0.0 && l + r < R))
        throw domain_error("eccentric_annulus_bound: inner disk must be strictly inside");
    EccentricAnnulusReport rep;
    const double Br = kPi * r * r;
    const double D = kPi * (R * R - r * r);
    const double rhs = D * D / (4.0 * kPi) + D * Br / (2.0 * kPi) - l * l * Br / 2.0;
    rep.beta_max = (-Br + std::sqrt(Br * Br + 4.0 * kPi * rhs)) / (2.0 * kPi);
    TriMesh mesh = mesh_two_circle_domain({l, 0.0}, r, {0.0, 0.0}, R, n_theta);
    const PoissonSolution sol = solve_on_mesh(mesh, false);
    rep.solver_c1 = sol.c.at(0);
    rep.pass = rep.solver_c1 <= rep.beta_max * (1.0 + 1e-3);
    return rep;
}

AsymmetryHoleReport asymmetry_hole_bound(const Patch& patch, double target_edge) {
    const PoissonSolution sol = solve_constrained(patch, target_edge);
    if (sol.c.size() != 1)
        throw domain_error("asymmetry_hole_bound: doubly-connected patches only");
    AsymmetryHoleReport rep;
    rep.c1 = sol.c[0];
    const double area = sol.domain_area();
    rep.ratio = rep.c1 / (area / (2.0 * kPi));
    // fill the hole: the outer boundary alone
    const auto polys = polygonize(patch, 512);
    rep.asymmetry = fraenkel_asymmetry(Patch(PolygonShape{polys.front().outer, {}}));
    rep.ratio_below_one = rep.ratio < 1.0;
    const DistributionFunction df = distribution_function(sol);
    rep.weak_chain_holds = true;
    const double slack = 10.0 * sol.tolerance + 1e-9;
    for (size_t i = 0; i < df.k.size(); ++i) {
        const double bound = std::max(area - 2.0 * kPi * df.k[i], 0.0);
        if (df.g[i] > bound + 2.0 * kPi * slack) rep.weak_chain_holds = false;
    }
    return rep;
}

}  // namespace patchlab
