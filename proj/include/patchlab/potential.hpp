#pragma once

#include "patchlab/geometry.hpp"
#include "patchlab/special.hpp"
#include "patchlab/types.hpp"

#include <optional>
#include <vector>

namespace patchlab {

// Scalar samples on a uniform grid; values(i,j) at origin + (i*h, j*h).
struct ScalarField {
    Vec2 origin{0.0, 0.0};
    double h = 1.0;
    int nx = 0, ny = 0;
    ArrXX values;

    Vec2 cell_center(int i, int j) const { return origin + Vec2(i * h, j * h); }
    double bilinear(const Vec2& p) const;
    Vec2 gradient(const Vec2& p) const;  // central differences of the samples
    double grid_integral() const { return values.sum() * h * h; }
    double max_value() const { return values.maxCoeff(); }
};

ScalarField make_field(const Vec2& origin, double h, int nx, int ny);

// A rotating state: weighted patch components or a smooth density, an angular
// velocity and a kernel.
struct RotatingState {
    Patch patch;                        // used when density is absent
    VecX weights;                       // one positive weight per component
    std::optional<ScalarField> density; // smooth branch
    double omega = 0.0;
    KernelSpec kernel;
    int boundary_nodes = 512;
};

RotatingState make_patch_state(Patch patch, double omega, const KernelSpec& k,
                               VecX weights = VecX(), int boundary_nodes = 512);
RotatingState make_smooth_state(ScalarField density, double omega, const KernelSpec& k);

// (1_D * K)(x) and its gradient, reduced by the divergence theorem to
// boundary integrals over the polygonized boundary: with F(z) = z g(|z|)
// chosen so div F = K, the value is -int_{dD} F(x-y).n dsigma. Composite
// Gauss-Legendre per edge with adaptive splitting near x; segments through x
// contribute zero to the value and closed-form pieces to the gradient.
double polygon_potential(const std::vector<PolygonShape>& polys, const KernelSpec& k,
                         const Vec2& x);
Vec2 polygon_potential_gradient(const std::vector<PolygonShape>& polys, const KernelSpec& k,
                                const Vec2& x);

// Quadrature evaluation of int_D K(x-y) dy for any patch representation.
double convolve_indicator(const Patch& patch, const KernelSpec& k, const Vec2& x,
                          int n_nodes = 512);

// f_Omega(x) = (omega * K)(x) - (Omega/2)|x|^2 for the state.
double f_omega(const RotatingState& state, const Vec2& x);

// u(x) = perp-gradient of omega * K; the relative-frame field is
// u - Omega x-perp.
Vec2 velocity(const RotatingState& state, const Vec2& x);

struct BoundaryResidualRow {
    int component = 0;  // patch component index
    bool is_hole = false;
    double mean_value = 0.0;  // the constant C_i candidate
    double oscillation = 0.0;
};

struct StationarityReport {
    std::vector<BoundaryResidualRow> rows;
    double max_oscillation = 0.0;
    double tolerance = 0.0;  // 5x the disk benchmark error at this resolution
    bool is_rotating_solution = false;
};

StationarityReport stationarity_residual(const RotatingState& state);

// Benchmark error of the boundary-integral pipeline: the oscillation of the
// computed f_Omega over the polygonized unit disk (exact value: constant).
double disk_benchmark_error(const KernelSpec& k, int n_nodes);

// Convolution of grid samples with the kernel via FFT, with near-diagonal
// kernel cells integrated by local polar/subcell rules.
ScalarField grid_kernel_potential(const ScalarField& density, const KernelSpec& k);
ScalarField raster_kernel_potential(const RasterShape& raster, const KernelSpec& k);

// Closed marching-squares contours of {field = level}.
std::vector<Loop> level_set_components(const ScalarField& field, double level);

struct SmoothResidualRow {
    int component_id = 0;
    double level = 0.0;
    double mean_C = 0.0;
    double oscillation = 0.0;
};

struct SmoothResidualReport {
    std::vector<SmoothResidualRow> rows;
    double max_oscillation = 0.0;
    double tolerance = 0.0;
    std::vector<double> skipped_levels;  // empty contour lists
};

SmoothResidualReport smooth_residual(const RotatingState& state,
                                     const std::vector<double>& levels);

struct StepApproximation {
    Patch patch;       // one raster component per connected band piece
    VecX weights;      // the step value r_i per component
    double sup_error = 0.0;       // max grid deviation |omega_n - omega|
    double total_integral = 0.0;  // sum r_i |D_i|
    std::vector<double> levels;
};

// Step-function approximation by n regular cut levels, components split by
// flood fill on the level bands; sup error <= 2 ||omega||_inf / n on the grid.
StepApproximation step_approximation(const ScalarField& density, int n);

}  // namespace patchlab
