#include "patchlab/special.hpp"

#include <cmath>
#include <limits>

namespace patchlab {

namespace {

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7,
};

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

double lanczos_gamma_positive(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double s = kLanczos[0];
    for (int i = 1; i < 9; ++i) s += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * s;
}

}  // namespace

double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) throw domain_error("gamma_fn: pole at non-positive integer");
    if (x < 0.5) {
        // reflection formula
        return kPi / (std::sin(kPi * x) * lanczos_gamma_positive(1.0 - x));
    }
    return lanczos_gamma_positive(x);
}

double log_gamma(double x) {
    if (x <= 0.0) throw domain_error("log_gamma: requires x > 0");
    if (x < 0.5) return std::log(gamma_fn(x));
    const double z = x - 1.0;
    double s = kLanczos[0];
    for (int i = 1; i < 9; ++i) s += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(s);
}

namespace {

double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0;
    double sum = 1.0;
    for (long n = 0; n < 1000000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) < 1e-14 * std::abs(sum)) return sum;
        if (term == 0.0) return sum;
    }
    throw numerical_error("hyp2f1: series did not converge within 1e6 terms");
}

}  // namespace

double hyp2f1(double a, double b, double c, double z) {
    if (is_nonpositive_integer(c)) throw domain_error("hyp2f1: c is a non-positive integer");
    if (z > 1.0 || z < -1.0) throw domain_error("hyp2f1: series requires |z| <= 1");
    const double s = c - a - b;
    if (z == 1.0 && s <= 0.0)
        throw domain_error("hyp2f1: divergent at z = 1 for c - a - b <= 0");
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return hyp2f1_series(a, b, c, z);
    // The direct series converges like n^(-1-s) near z = 1, far too slowly for
    // the accuracy needed there; switch to the 1-z connection formula.
    if (z > 0.75 && !is_nonpositive_integer(s) && !is_nonpositive_integer(-s) &&
        std::abs(s - std::round(s)) > 1e-8) {
        const double t = 1.0 - z;
        const double first = gamma_fn(c) * gamma_fn(s) / (gamma_fn(c - a) * gamma_fn(c - b)) *
                             hyp2f1_series(a, b, 1.0 - s, t);
        const double second = (t == 0.0 ? 0.0
                                        : std::pow(t, s) * gamma_fn(c) * gamma_fn(-s) /
                                              (gamma_fn(a) * gamma_fn(b)) *
                                              hyp2f1_series(c - a, c - b, 1.0 + s, t));
        return first + second;
    }
    return hyp2f1_series(a, b, c, z);
}

KernelSpec make_kernel(double alpha) {
    if (alpha < 0.0 || alpha >= 2.0) throw domain_error("make_kernel: alpha must lie in [0,2)");
    KernelSpec k;
    k.alpha = alpha;
    if (alpha > 0.0) {
        k.c_alpha = 1.0 / (2.0 * kPi) * gamma_fn(alpha / 2.0) /
                    (std::pow(2.0, 1.0 - alpha) * gamma_fn(1.0 - alpha / 2.0));
    }
    return k;
}

double kernel_value(const KernelSpec& k, double r) {
    if (r <= 0.0) throw domain_error("kernel_value: r must be positive");
    if (k.alpha == 0.0) return std::log(r) / (2.0 * kPi);
    return -k.c_alpha * std::pow(r, -k.alpha);
}

double kernel_radial_derivative(const KernelSpec& k, double r) {
    if (r <= 0.0) throw domain_error("kernel_radial_derivative: r must be positive");
    if (k.alpha == 0.0) return 1.0 / (2.0 * kPi * r);
    return k.alpha * k.c_alpha * std::pow(r, -k.alpha - 1.0);
}

double omega_m_alpha(int m, double alpha) {
    if (m < 2) throw domain_error("omega_m_alpha: m must be >= 2");
    if (alpha == 1.0) throw domain_error("omega_m_alpha: Gamma(1-alpha) pole at alpha = 1");
    if (alpha < 0.0 || alpha >= 2.0) throw domain_error("omega_m_alpha: alpha must lie in [0,2)");
    const double pref = std::pow(2.0, alpha - 1.0) * gamma_fn(1.0 - alpha) /
                        std::pow(gamma_fn(1.0 - alpha / 2.0), 2);
    const double head = gamma_fn(1.0 + alpha / 2.0) / gamma_fn(2.0 - alpha / 2.0);
    const double tail =
        std::exp(log_gamma(m + alpha / 2.0) - log_gamma(m + 1.0 - alpha / 2.0));
    return pref * (head - tail);
}

double omega_alpha(double alpha) {
    if (alpha <= 0.0 || alpha >= 2.0) throw domain_error("omega_alpha: alpha must lie in (0,2)");
    if (alpha >= 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(2.0, alpha - 1.0) * gamma_fn(1.0 - alpha) /
           std::pow(gamma_fn(1.0 - alpha / 2.0), 2) * gamma_fn(1.0 + alpha / 2.0) /
           gamma_fn(2.0 - alpha / 2.0);
}

double omega_c(double R, double alpha) {
    if (R <= 0.0) throw domain_error("omega_c: R must be positive");
    return std::pow(R, -alpha) * omega_alpha(alpha);
}

double disk_riesz_potential(double R, double alpha, double r) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw domain_error("disk_riesz_potential: alpha must lie in (0,1)");
    if (R <= 0.0) throw domain_error("disk_riesz_potential: R must be positive");
    r = std::abs(r);
    if (r <= R) {
        const double z = (r / R) * (r / R);
        return 2.0 * kPi / (2.0 - alpha) * std::pow(R, 2.0 - alpha) *
               hyp2f1(alpha / 2.0 - 1.0, alpha / 2.0, 1.0, z);
    }
    const double z = (R / r) * (R / r);
    return kPi * R * R * std::pow(r, -alpha) * hyp2f1(alpha / 2.0, alpha / 2.0, 2.0, z);
}

double disk_riesz_potential(double R, double alpha, const Vec2& x) {
    return disk_riesz_potential(R, alpha, x.norm());
}

double disk_riesz_potential_dr(double R, double alpha, double r) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw domain_error("disk_riesz_potential_dr: alpha must lie in (0,1)");
    r = std::abs(r);
    if (r <= R) {
        const double a = alpha / 2.0 - 1.0, b = alpha / 2.0;
        const double w = (r / R) * (r / R);
        // d/dw 2F1(a,b;1;w) = a b 2F1(a+1,b+1;2;w)
        return 2.0 * kPi / (2.0 - alpha) * std::pow(R, 2.0 - alpha) * a * b *
               hyp2f1(a + 1.0, b + 1.0, 2.0, w) * 2.0 * r / (R * R);
    }
    const double a = alpha / 2.0;
    const double w = (R / r) * (R / r);
    const double F = hyp2f1(a, a, 2.0, w);
    const double Fp = a * a / 2.0 * hyp2f1(a + 1.0, a + 1.0, 3.0, w);
    return kPi * R * R *
           (-alpha * std::pow(r, -alpha - 1.0) * F +
            std::pow(r, -alpha) * Fp * (-2.0 * R * R / (r * r * r)));
}

double disk_kernel_potential(double R, const KernelSpec& k, double r) {
    r = std::abs(r);
    if (k.alpha == 0.0) {
        if (r >= R) return R * R / 2.0 * std::log(r);  // (|B|/2pi) ln r
        return (r * r - R * R) / 4.0 + R * R / 2.0 * std::log(R);
    }
    return -k.c_alpha * disk_riesz_potential(R, k.alpha, r);
}

double disk_kernel_potential_dr(double R, const KernelSpec& k, double r) {
    r = std::abs(r);
    if (k.alpha == 0.0) return r >= R ? R * R / (2.0 * r) : r / 2.0;
    return -k.c_alpha * disk_riesz_potential_dr(R, k.alpha, r);
}

RadialProfileReport radial_profile_check(double R, double alpha, double Omega) {
    const KernelSpec k = make_kernel(alpha);
    const int n = 600;
    RadialProfileReport rep;
    rep.is_monotone = true;
    rep.worst_derivative = -std::numeric_limits<double>::infinity();
    // derivative scale for the tolerance: the confinement slope at r = R
    const double tol = 1e-8 * (std::abs(Omega) * R + k.c_alpha + 1.0 / (2.0 * kPi));
    for (int i = 1; i <= n; ++i) {
        const double r = 3.0 * R * i / n;
        const double gp = disk_kernel_potential_dr(R, k, r) - Omega * r;
        if (gp > rep.worst_derivative) {
            rep.worst_derivative = gp;
            rep.worst_violation_location = r;
        }
    }
    rep.is_monotone = rep.worst_derivative <= tol;
    return rep;
}

ThresholdTable make_threshold_table(double alpha, int m_max,
                                    const std::vector<double>& radii) {
    ThresholdTable t;
    t.alpha = alpha;
    for (int m = 2; m <= m_max; ++m) t.rows.push_back({m, omega_m_alpha(m, alpha)});
    t.omega_alpha_value = alpha > 0.0 ? omega_alpha(alpha)
                                      : 0.5;  // continuous limit at alpha = 0
    for (double R : radii) {
        t.radii.push_back(R);
        if (alpha == 0.0) {
            t.omega_c_values.push_back(0.5);  // R^0 * Omega_0
        } else if (alpha < 1.0) {
            t.omega_c_values.push_back(omega_c(R, alpha));
        } else {
            t.omega_c_values.push_back(std::numeric_limits<double>::infinity());
        }
    }
    return t;
}

}  // namespace patchlab
