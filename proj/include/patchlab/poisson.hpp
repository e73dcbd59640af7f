#pragma once

#include "patchlab/geometry.hpp"
#include "patchlab/mesh.hpp"
#include "patchlab/types.hpp"

#include <vector>

namespace patchlab {

// Solution of the constrained torsion problem on a connected domain with
// holes: Delta p = -2 in D, p = 0 on the outer boundary, p = c_i on hole i,
// with the constants fixed by the flux conditions
// int_{dh_i} grad p . n dsigma = -2 |h_i| (n = outer normal of the hole).
struct PoissonSolution {
    TriMesh mesh;
    VecX p;                           // nodal values
    std::vector<double> c;            // hole constants, c[i] for curve i+1
    std::vector<double> hole_area;    // |h_i| from the mesh curve polygons
    std::vector<double> hole_flux;    // int_{dh_i} grad p . n_hole dsigma
    double outer_flux = 0.0;          // int_{dD_0} grad p . n_D dsigma
    MatX A;                           // hole coupling matrix
    VecX b;                           // its right-hand side
    double solve_residual = 0.0;      // linear-solve residual, inf-norm
    double tolerance = 0.0;           // 10x disk benchmark sup-p error
    VecX nodal_residual;              // weak residual K p - load (boundary fluxes)

    double sup_p() const;
    double integral_p() const;
    double domain_area() const;
};

// Solve on a prebuilt mesh (curve 0 = outer boundary).
PoissonSolution solve_constrained(const TriMesh& mesh);

// Solve on a patch: two-circle domains get the structured conformal mesh,
// everything else the unstructured one. target_edge <= 0 means |dD|/512.
PoissonSolution solve_constrained(const Patch& patch, double target_edge = 0.0);

// sup-p error of the solver on the unit disk at a comparable resolution
double poisson_benchmark_error(double target_edge);

struct TalentiReport {
    double sup_p = 0.0;
    double int_p = 0.0;
    double bound_sup = 0.0;  // |D| / 2 pi
    double bound_int = 0.0;  // |D|^2 / 4 pi
    double gap_sup = 0.0;
    double gap_int = 0.0;
};

TalentiReport talenti_report(const PoissonSolution& sol);

struct GradientEnergyReport {
    double grad_p_sq = 0.0;     // int |grad p|^2
    double x_sq = 0.0;          // int |x|^2
    double minus_gradp_x = 0.0; // -int grad p . x
};

GradientEnergyReport gradient_energy_check(const PoissonSolution& sol);

struct DistributionFunction {
    std::vector<double> k;
    std::vector<double> g;  // |{p > k}|
};

DistributionFunction distribution_function(const PoissonSolution& sol, int n_levels = 256);

// Root in (0,1) of b^2 - ((2 + (1-a^2) eps)/a) b + 1, the Moebius parameter
// that maps the thin eccentric annulus to a concentric one.
double mobius_b(double a, double eps);

struct ThinAnnulusReport {
    double bound = 0.0;     // (|D|/2pi)(1 - a^2/16)
    double solver_c1 = 0.0;
    bool pass = false;
};

// Eccentric thin annulus B(a eps e1, 1+eps) minus B(0,1); requires
// 0 < eps < a^2/64.
ThinAnnulusReport thin_annulus_bound(double a, double eps, int n_theta = 3072);

struct EccentricAnnulusReport {
    double beta_max = 0.0;  // positive root of the quadratic bound
    double solver_c1 = 0.0;
    bool pass = false;
};

// B(l e1, r) inside B(0, R): bound from
// pi b^2 + b |B_r| <= |D|^2/4pi + |D||B_r|/2pi - l^2 |B_r|/2.
EccentricAnnulusReport eccentric_annulus_bound(double r, double R, double l, int n_theta = 2048);

struct AsymmetryHoleReport {
    double c1 = 0.0;
    double ratio = 0.0;       // c1 / (|D|/2pi)
    double asymmetry = 0.0;   // A(D with the hole filled)
    bool ratio_below_one = false;
    bool weak_chain_holds = false;  // g(k) <= (|D| - 2 pi k)_+ within tolerance
};

AsymmetryHoleReport asymmetry_hole_bound(const Patch& patch, double target_edge = 0.0);

}  // namespace patchlab
