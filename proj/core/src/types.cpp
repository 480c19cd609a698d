#include "madelab/types.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "madelab/interp.hpp"

namespace madelab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

Grid make_grid(int dim, std::span<const std::pair<double, double>> bounds,
               std::span<const int> points, std::size_t node_cap) {
    if (dim < 1 || dim > kMaxDim)
        throw ValidationError("make_grid: dim must be 1, 2 or 3");
    if (bounds.size() != static_cast<std::size_t>(dim) ||
        points.size() != static_cast<std::size_t>(dim))
        throw ValidationError("make_grid: bounds/points arity does not match dim");

    Grid g;
    g.dim = dim;
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        const auto [lo, hi] = bounds[a];
        if (!(std::isfinite(lo) && std::isfinite(hi)) || hi <= lo) {
            std::ostringstream os;
            os << "make_grid: inverted or non-finite bounds on axis " << a;
            throw ValidationError(os.str());
        }
        const int n = points[a];
        if (n < 8 || !is_power_of_two(n)) {
            std::ostringstream os;
            os << "make_grid: points on axis " << a << " must be a power of two >= 8, got "
               << n;
            throw ValidationError(os.str());
        }
        g.lower[a] = lo;
        g.upper[a] = hi;
        g.points[a] = n;
        g.spacing[a] = (hi - lo) / n;
        total *= static_cast<std::size_t>(n);
    }
    if (total > node_cap) {
        std::ostringstream os;
        os << "make_grid: " << total << " nodes exceed the memory cap of " << node_cap;
        throw ValidationError(os.str());
    }
    return g;
}

Grid make_grid_1d(double lower, double upper, int points, std::size_t node_cap) {
    const std::pair<double, double> b{lower, upper};
    const int n = points;
    return make_grid(1, std::span<const std::pair<double, double>>(&b, 1),
                     std::span<const int>(&n, 1), node_cap);
}

void SystemParams::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw ValidationError("SystemParams: mass must be positive and finite");
    if (hbar < 0.0 || !std::isfinite(hbar))
        throw ValidationError("SystemParams: hbar must be >= 0 and finite");
    if (dim < 1 || dim > kMaxDim)
        throw ValidationError("SystemParams: dim must be 1, 2 or 3");
    if (const auto* lin = std::get_if<LinearPotential>(&potential)) {
        if (!finite(lin->force, dim))
            throw ValidationError("SystemParams: linear-potential force must be finite");
    } else if (const auto* har = std::get_if<HarmonicPotential>(&potential)) {
        if (!(har->omega > 0.0) || !std::isfinite(har->omega))
            throw ValidationError("SystemParams: harmonic omega must be positive");
    } else if (const auto* smp = std::get_if<SampledPotential>(&potential)) {
        if (smp->values.size() != smp->grid.size())
            throw ValidationError("SystemParams: sampled potential size mismatch");
        for (double v : smp->values)
            if (!std::isfinite(v))
                throw ValidationError("SystemParams: sampled potential has non-finite node");
    }
}

double potential_value(const PotentialSpec& pot, const SystemParams& params, const Vec& x) {
    if (std::holds_alternative<FreePotential>(pot)) return 0.0;
    if (const auto* lin = std::get_if<LinearPotential>(&pot)) return -dot(lin->force, x);
    if (const auto* har = std::get_if<HarmonicPotential>(&pot))
        return 0.5 * params.mass * har->omega * har->omega * norm2(x);
    const auto& smp = std::get<SampledPotential>(pot);
    return interp::cubic_at(smp.grid, smp.values, x);
}

Vec potential_gradient(const PotentialSpec& pot, const SystemParams& params, const Vec& x) {
    if (std::holds_alternative<FreePotential>(pot)) return vec0();
    if (const auto* lin = std::get_if<LinearPotential>(&pot)) return -1.0 * lin->force;
    if (const auto* har = std::get_if<HarmonicPotential>(&pot))
        return (params.mass * har->omega * har->omega) * x;
    const auto& smp = std::get<SampledPotential>(pot);
    return interp::cubic_gradient_at(smp.grid, smp.values, x);
}

void GaussianPrep::validate(int dim) const {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
        throw ValidationError("GaussianPrep: sigma0 must be positive and finite");
    if (!finite(zeta0, dim) || !finite(v0, dim))
        throw ValidationError("GaussianPrep: zeta0 and v0 must be finite");
}

double CoherentPrep::sigma_hbar(const SystemParams& params) const {
    return std::sqrt(params.hbar / (2.0 * params.mass * omega));
}

void CoherentPrep::validate(int dim) const {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw ValidationError("CoherentPrep: omega must be positive and finite");
    if (!finite(x0, dim) || !finite(v0, dim))
        throw ValidationError("CoherentPrep: x0 and v0 must be finite");
}

namespace {

struct PrepShape {
    Vec center;
    Vec v0;
    double sigma;
};

PrepShape prep_shape(const Preparation& prep, const SystemParams& params) {
    if (const auto* g = std::get_if<GaussianPrep>(&prep)) {
        g->validate(params.dim);
        return {g->zeta0, g->v0, g->sigma0};
    }
    const auto& c = std::get<CoherentPrep>(prep);
    c.validate(params.dim);
    return {c.x0, c.v0, c.sigma_hbar(params)};
}

} // namespace

WaveField prepare_wavefunction(const Preparation& prep, const SystemParams& params,
                               const Grid& grid, const PrepareOptions& opts) {
    params.validate();
    if (params.hbar == 0.0)
        throw ValidationError("prepare_wavefunction: hbar = 0 has no wave function; "
                              "use the classical module instead");
    if (grid.dim != params.dim)
        throw ValidationError("prepare_wavefunction: grid dim does not match params.dim");

    const PrepShape s = prep_shape(prep, params);

    // Grid adequacy: resolution and coverage per axis.
    for (int a = 0; a < grid.dim; ++a) {
        if (s.sigma < opts.min_sigma_cells * grid.spacing[a]) {
            std::ostringstream os;
            os << "prepare_wavefunction: packet width " << s.sigma << " under-resolved on axis "
               << a << " (need sigma >= " << opts.min_sigma_cells << " * spacing = "
               << opts.min_sigma_cells * grid.spacing[a] << ")";
            throw ValidationError(os.str());
        }
        const double margin = opts.min_box_sigmas * s.sigma;
        if (s.center[a] - margin < grid.lower[a] || s.center[a] + margin > grid.upper[a]) {
            std::ostringstream os;
            os << "prepare_wavefunction: grid does not cover center +- " << opts.min_box_sigmas
               << " sigma on axis " << a;
            throw ValidationError(os.str());
        }
    }

    // Analytic mass outside the box (product of per-axis tails).
    double inside = 1.0;
    for (int a = 0; a < grid.dim; ++a) {
        const double zl = (grid.lower[a] - s.center[a]) / (s.sigma * std::numbers::sqrt2);
        const double zu = (grid.upper[a] - s.center[a]) / (s.sigma * std::numbers::sqrt2);
        inside *= 0.5 * (std::erf(zu) - std::erf(zl));
    }
    if (1.0 - inside > opts.tail_tolerance)
        throw NumericalError("prepare_wavefunction: tail mass outside the grid exceeds "
                             "tolerance");

    WaveField psi;
    psi.grid = grid;
    psi.time = 0.0;
    psi.values.resize(grid.size());

    const double amp = std::pow(2.0 * std::numbers::pi * s.sigma * s.sigma,
                                -0.25 * grid.dim);
    const double inv_four_sigma2 = 1.0 / (4.0 * s.sigma * s.sigma);
    const double phase_scale = params.mass / params.hbar;

    std::array<int, kMaxDim> idx{};
    const std::size_t n = grid.size();
    for (std::size_t lin = 0; lin < n; ++lin) {
        idx = grid.unravel(lin);
        double q2 = 0.0;    // |x - center|^2
        double phase = 0.0; // S0(x) / hbar with S0 = m v0 . x, so S0(0) = 0
        for (int a = 0; a < grid.dim; ++a) {
            const double xa = grid.coord(a, idx[a]);
            const double d = xa - s.center[a];
            q2 += d * d;
            phase += phase_scale * s.v0[a] * xa;
        }
        psi.values[lin] = std::polar(amp * std::exp(-q2 * inv_four_sigma2), phase);
    }

    // Discrete norm should already be 1 to within the sampling error; rescale
    // exactly and reject grids where the raw value betrays poor sampling.
    double raw = 0.0;
    for (const cplx& v : psi.values) raw += std::norm(v);
    raw *= grid.cell_volume();
    if (std::abs(raw - 1.0) > 1e-6)
        throw NumericalError("prepare_wavefunction: discrete norm deviates from 1; "
                             "grid resolution is inadequate");
    const double rescale = 1.0 / std::sqrt(raw);
    for (cplx& v : psi.values) v *= rescale;
    return psi;
}

} // namespace madelab
