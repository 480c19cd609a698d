#pragma once

#include <vector>

#include "madelab/types.hpp"

namespace madelab::interp {

// Per-axis Catmull-Rom cubic interpolation of a node field, tensor-product in
// higher dimensions, with periodic index wrap (fields on these grids are
// periodic by construction). Reproduces quadratics exactly; O(h^4) otherwise.
double cubic_at(const Grid& grid, const std::vector<double>& values, const Vec& x);

// Gradient of the same interpolant (derivative of the Catmull-Rom basis along
// each axis in turn).
Vec cubic_gradient_at(const Grid& grid, const std::vector<double>& values, const Vec& x);

// True when x lies inside the grid box on every axis (used to flag escapes;
// interpolation itself wraps periodically).
bool inside(const Grid& grid, const Vec& x);

} // namespace madelab::interp
