#pragma once

#include "patchlab/types.hpp"

#include <vector>

namespace patchlab {

// Marching-squares contour extraction of {f = level} from samples
// values(i,j) at positions origin + (i*h, j*h). Returns closed loops,
// oriented CCW around the super-level region {f > level}. Saddle cells are
// split by the bilinear center value; a level colliding with a sample is
// perturbed by 1e-12 * range. The contour must not touch the grid border.
std::vector<std::vector<Vec2>> extract_contours(const ArrXX& values, double level,
                                                const Vec2& origin, double h);

}  // namespace patchlab
