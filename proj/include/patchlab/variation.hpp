#pragma once

#include "patchlab/poisson.hpp"
#include "patchlab/potential.hpp"
#include "patchlab/types.hpp"

#include <string>
#include <vector>

namespace patchlab {

// First variation of the interaction-plus-confinement energy under the
// divergence-free deformation v = -grad(|x|^2/2 + p), evaluated two ways.
struct VariationReport {
    double I_boundary = 0.0;   // volume quadrature of int (x + grad p).grad f_Omega
    double I_identity = 0.0;   // closed combination (Newtonian kernel only)
    bool identity_available = false;
    // identity-route terms
    double pair_term = 0.0;    // sum_ij a_i a_j |D_i||D_j| / 4pi
    double moment_term = 0.0;  // Omega sum_i a_i int_{D_i} |x|^2
    double p_term = 0.0;       // (2 Omega - 1)-type p contributions
    double hole_term = 0.0;    // 2 Omega sum_i a_i sum_k c_ik |h_ik|
    double cross_term = 0.0;   // boundary-quadrature cross terms, i != j
    // decomposition I = I1 + (-Omega) I2 used for Omega < 0
    double I1 = 0.0;
    double I2 = 0.0;  // >= 0 up to tolerance
    double tolerance = 0.0;
    double stationarity_oscillation = 0.0;
};

VariationReport first_variation(const RotatingState& state, double mesh_edge = 0.0);

struct RigidityVerdict {
    int expected_sign = 0;  // +1 for Omega <= 0, -1 for Omega >= 1/2, else 0
    int observed_sign = 0;
    std::string conclusion;
    bool consistent = false;
};

RigidityVerdict rigidity_verdict(const VariationReport& report, double omega);

struct StabilityBoundReport {
    double delta = 0.0;     // 1/2 - Omega
    double bound = 0.0;     // 2 sqrt(2 delta) |D|
    double measured = 0.0;  // |D symdiff B|, B the origin-centered equal-area disk
    bool pass = false;
    double stationarity_oscillation = 0.0;
    double stationarity_tolerance = 0.0;
};

StabilityBoundReport stability_bound(const Patch& patch, double omega);

// Exterior first variation on B(0,R) minus D-bar, decomposed into the
// component touching dB_R and the hole regions U_i; the same integral also
// evaluates as -J1 - ((2 Omega - 1)/2) J2.
struct ExteriorReport {
    double R = 0.0;
    double R0 = 0.0;
    double I_R = 0.0;
    double J_R1 = 0.0;
    double J_R2 = 0.0;
    double identity_gap = 0.0;  // |I_R + J1 + ((2Omega-1)/2) J2|
    double outer_gradient_max = 0.0;   // max |grad phi_{0,R} . n| on dB_R
    double outer_gradient_bound = 0.0; // N R0^2 / (2 R log(R/R0))
    bool gradient_bound_holds = false;
};

ExteriorReport exterior_first_variation(const Patch& patch, double omega, double R,
                                        int n_theta = 1024);

}  // namespace patchlab
