#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "madelab/errors.hpp"
#include "madelab/vec.hpp"

namespace madelab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

// Periodic rectangular grid. Nodes sit at lower + i*spacing, i = 0..points-1;
// the upper bound is the periodic image of the lower one, so spacing is
// (upper-lower)/points. Points per axis must be a power of two (>= 8) to keep
// the spectral transforms fast. Storage is row-major with the last axis
// contiguous (the FFTW convention).
struct Grid {
    int dim = 1;
    std::array<double, kMaxDim> lower{};
    std::array<double, kMaxDim> upper{};
    std::array<int, kMaxDim> points{1, 1, 1};
    std::array<double, kMaxDim> spacing{};

    std::size_t size() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points[a]);
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }

    double length(int axis) const { return upper[axis] - lower[axis]; }

    double coord(int axis, int index) const { return lower[axis] + spacing[axis] * index; }

    std::size_t index(const std::array<int, kMaxDim>& idx) const {
        std::size_t lin = 0;
        for (int a = 0; a < dim; ++a) lin = lin * points[a] + static_cast<std::size_t>(idx[a]);
        return lin;
    }

    std::array<int, kMaxDim> unravel(std::size_t lin) const {
        std::array<int, kMaxDim> idx{};
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(lin % points[a]);
            lin /= points[a];
        }
        return idx;
    }

    Vec node(std::size_t lin) const {
        auto idx = unravel(lin);
        Vec x = vec0();
        for (int a = 0; a < dim; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    bool same_layout(const Grid& other) const {
        if (dim != other.dim) return false;
        for (int a = 0; a < dim; ++a) {
            if (points[a] != other.points[a] || lower[a] != other.lower[a] ||
                upper[a] != other.upper[a])
                return false;
        }
        return true;
    }
};

inline constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 24;

Grid make_grid(int dim, std::span<const std::pair<double, double>> bounds,
               std::span<const int> points, std::size_t node_cap = kDefaultNodeCap);

// Convenience for 1D.
Grid make_grid_1d(double lower, double upper, int points,
                  std::size_t node_cap = kDefaultNodeCap);

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

struct FreePotential {};

// V(x) = -force . x
struct LinearPotential {
    Vec force = vec0();
};

// V(x) = m omega^2 |x|^2 / 2
struct HarmonicPotential {
    double omega = 1.0;
};

// Values tabulated on a grid; evaluated off-node by cubic interpolation.
struct SampledPotential {
    Grid grid;
    std::vector<double> values;
};

using PotentialSpec =
    std::variant<FreePotential, LinearPotential, HarmonicPotential, SampledPotential>;

// ---------------------------------------------------------------------------
// Physical context
// ---------------------------------------------------------------------------

struct SystemParams {
    double mass = 1.0;
    double hbar = 1.0; // the sweep parameter; >= 0, but 0 only for classical runs
    PotentialSpec potential = FreePotential{};
    int dim = 1;

    void validate() const;
};

double potential_value(const PotentialSpec& pot, const SystemParams& params, const Vec& x);
Vec potential_gradient(const PotentialSpec& pot, const SystemParams& params, const Vec& x);

// ---------------------------------------------------------------------------
// Preparations
// ---------------------------------------------------------------------------

// Gaussian packet with hbar-independent width: density (2 pi sigma0^2)^{-dim/2}
// exp(-(x-zeta0)^2/(2 sigma0^2)), initial action S0(x) = m v0 . x.
struct GaussianPrep {
    Vec zeta0 = vec0();
    double sigma0 = 1.0;
    Vec v0 = vec0();

    void validate(int dim) const;
};

// Harmonic-oscillator coherent state: same Gaussian family, but with the
// hbar-dependent width sigma_hbar = sqrt(hbar / (2 m omega)).
struct CoherentPrep {
    Vec x0 = vec0();
    Vec v0 = vec0();
    double omega = 1.0;

    double sigma_hbar(const SystemParams& params) const;
    void validate(int dim) const;
};

using Preparation = std::variant<GaussianPrep, CoherentPrep>;

// ---------------------------------------------------------------------------
// Fields and trajectories
// ---------------------------------------------------------------------------

struct WaveField {
    Grid grid;
    double time = 0.0;
    std::vector<cplx> values;
};

struct MadelungFields {
    Grid grid;
    double time = 0.0;
    std::vector<double> rho;    // probability density, >= 0
    std::vector<double> action; // unwrapped phase * hbar; meaningful on the support
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> positions;
    std::vector<Vec> velocities;

    std::size_t steps() const { return times.size(); }
};

// A single classical path xi(t) together with the accumulated scalar g(t);
// the associated action field is S(x, t) = m xi'(t) . x + g(t), with the
// gauge g(0) = 0.
struct LocalAction {
    Trajectory trajectory;
    std::vector<double> g;
    double mass = 1.0;
    int dim = 1;

    // S(x, t_k) at a stored time index.
    double value_at(std::size_t k, const Vec& x) const {
        return mass * dot(trajectory.velocities[k], x) + g[k];
    }
};

// Initial offset from the packet center; the particle starts at zeta0 + eta0.
struct BohmSample {
    Vec eta0 = vec0();
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct PrepareOptions {
    double norm_tolerance = 1e-9;   // allowed |discrete norm - 1| before rescaling
    double tail_tolerance = 1e-12;  // allowed analytic mass outside the box
    double min_sigma_cells = 4.0;   // resolution rule: sigma >= 4 * spacing
    double min_box_sigmas = 8.0;    // coverage rule: bounds at least center +- 8 sigma
};

// Builds psi0 = sqrt(rho0) exp(i m v0 . x / hbar) on the grid, normalized to
// discrete norm 1. Rejects hbar = 0 and grids that violate the adequacy rules.
WaveField prepare_wavefunction(const Preparation& prep, const SystemParams& params,
                               const Grid& grid, const PrepareOptions& opts = {});

} // namespace madelab
