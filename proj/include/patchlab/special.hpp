#pragma once

#include "patchlab/types.hpp"

#include <vector>

namespace patchlab {

// Gamma function, accurate to ~1e-13 relative on [0.1, 30]; reflection handles
// negative non-integer arguments. Non-positive integers are poles.
double gamma_fn(double x);
double log_gamma(double x);

// Gauss hypergeometric series 2F1(a,b;c;z) for |z| <= 1, summed directly with
// the term ratio recurrence. Requires c-a-b > 0 when z = 1.
double hyp2f1(double a, double b, double c, double z);

// Biot-Savart kernel family: alpha = 0 is the Newtonian kernel (1/2pi) ln r,
// alpha in (0,2) is -C_alpha r^-alpha.
struct KernelSpec {
    double alpha = 0.0;
    double c_alpha = 0.0;  // 0 for alpha = 0

    // delta in the K'(r) <= r^(-d-1+delta) growth hypothesis, d = 2.
    double hk_delta() const { return 2.0 - alpha; }
};

KernelSpec make_kernel(double alpha);
double kernel_value(const KernelSpec& k, double r);
double kernel_radial_derivative(const KernelSpec& k, double r);

// Bifurcation threshold Omega_m^alpha for the m-fold branch from the disk.
// At alpha = 0 this reduces to (m-1)/(2m). alpha = 1 is a pole.
double omega_m_alpha(int m, double alpha);

// Limit of Omega_m^alpha as m -> infinity; +infinity for alpha >= 1.
double omega_alpha(double alpha);

// Fast-rotation threshold Omega_c(R) = R^-alpha Omega_alpha, alpha in (0,1).
double omega_c(double R, double alpha);

// I(x) = int_{B(0,R)} |x-y|^-alpha dy via the two-branch 2F1 closed form:
//   r <= R:  (2 pi / (2-alpha)) R^(2-alpha) 2F1(alpha/2-1, alpha/2; 1; r^2/R^2)
//   r >  R:  pi R^2 r^-alpha      2F1(alpha/2,   alpha/2; 2; R^2/r^2)
// normalized so that I(0) matches the polar integral 2 pi R^(2-alpha)/(2-alpha).
double disk_riesz_potential(double R, double alpha, const Vec2& x);
double disk_riesz_potential(double R, double alpha, double r);

// Radial derivative dI/dr of disk_riesz_potential, by term-wise
// differentiation of the hypergeometric series (continuous across |x| = R).
double disk_riesz_potential_dr(double R, double alpha, double r);

// Convolution 1_{B(0,R)} * K_alpha evaluated radially; alpha = 0 uses the
// classical closed form, alpha > 0 uses -C_alpha * disk_riesz_potential.
double disk_kernel_potential(double R, const KernelSpec& k, double r);
double disk_kernel_potential_dr(double R, const KernelSpec& k, double r);

struct RadialProfileReport {
    bool is_monotone = false;
    double worst_violation_location = 0.0;  // radius with the largest g' value
    double worst_derivative = 0.0;          // max of d/dr [1_B * K - (Omega/2) r^2]
};

// Checks that g_R(r) = (1_{B(0,R)} * K_alpha)(r) - (Omega/2) r^2 is
// non-increasing in r, sampling a finite-difference derivative on a radial
// grid over (0, 3R].
RadialProfileReport radial_profile_check(double R, double alpha, double Omega);

struct ThresholdRow {
    int m = 0;
    double omega_m = 0.0;
};

struct ThresholdTable {
    double alpha = 0.0;
    std::vector<ThresholdRow> rows;      // m = 2..m_max
    double omega_alpha_value = 0.0;      // +inf for alpha >= 1
    std::vector<double> radii;           // queried R values
    std::vector<double> omega_c_values;  // R^-alpha Omega_alpha per radius
};

ThresholdTable make_threshold_table(double alpha, int m_max, const std::vector<double>& radii);

}  // namespace patchlab
