#include "madelab/interp.hpp"

#include <cmath>

namespace madelab::interp {

namespace {

// Catmull-Rom weights for the four nodes around fractional offset u in [0,1).
inline void cr_weights(double u, double w[4]) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2.0 * u2 - u);
    w[1] = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
    w[2] = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
}

inline void cr_dweights(double u, double w[4]) {
    const double u2 = u * u;
    w[0] = 0.5 * (-3.0 * u2 + 4.0 * u - 1.0);
    w[1] = 0.5 * (9.0 * u2 - 10.0 * u);
    w[2] = 0.5 * (-9.0 * u2 + 8.0 * u + 1.0);
    w[3] = 0.5 * (3.0 * u2 - 2.0 * u);
}

struct Stencil {
    int base[kMaxDim];   // index of node "1" of the 4-point stencil per axis
    double frac[kMaxDim];
};

Stencil locate(const Grid& grid, const Vec& x) {
    Stencil s{};
    for (int a = 0; a < grid.dim; ++a) {
        const double t = (x[a] - grid.lower[a]) / grid.spacing[a];
        double fl = std::floor(t);
        s.frac[a] = t - fl;
        int i = static_cast<int>(fl) % grid.points[a];
        if (i < 0) i += grid.points[a];
        s.base[a] = i;
    }
    return s;
}

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

template <typename WeightsX>
double gather(const Grid& grid, const std::vector<double>& values, const Stencil& s,
              int deriv_axis, WeightsX) {
    double w[kMaxDim][4];
    for (int a = 0; a < grid.dim; ++a) {
        if (a == deriv_axis)
            cr_dweights(s.frac[a], w[a]);
        else
            cr_weights(s.frac[a], w[a]);
    }
    // Tensor-product accumulation over the 4^dim stencil.
    double acc = 0.0;
    const int dim = grid.dim;
    int offs[kMaxDim] = {0, 0, 0};
    const int count = 1 << (2 * dim); // 4^dim
    for (int c = 0; c < count; ++c) {
        int rem = c;
        double weight = 1.0;
        std::array<int, kMaxDim> idx{};
        for (int a = 0; a < dim; ++a) {
            offs[a] = rem & 3;
            rem >>= 2;
            weight *= w[a][offs[a]];
            idx[a] = wrap(s.base[a] + offs[a] - 1, grid.points[a]);
        }
        acc += weight * values[grid.index(idx)];
    }
    return acc;
}

} // namespace

double cubic_at(const Grid& grid, const std::vector<double>& values, const Vec& x) {
    const Stencil s = locate(grid, x);
    return gather(grid, values, s, -1, 0);
}

Vec cubic_gradient_at(const Grid& grid, const std::vector<double>& values, const Vec& x) {
    const Stencil s = locate(grid, x);
    Vec g = vec0();
    for (int a = 0; a < grid.dim; ++a)
        g[a] = gather(grid, values, s, a, 0) / grid.spacing[a];
    return g;
}

bool inside(const Grid& grid, const Vec& x) {
    for (int a = 0; a < grid.dim; ++a)
        if (x[a] < grid.lower[a] || x[a] >= grid.upper[a]) return false;
    return true;
}

} // namespace madelab::interp
