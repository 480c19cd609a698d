#include "madelab/schrodinger.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "madelab/fourier.hpp"

namespace madelab::schrodinger {

void PropagatorConfig::validate() const {
    if (dt == 0.0 || !std::isfinite(dt))
        throw ValidationError("PropagatorConfig: dt must be nonzero and finite");
    if (n_steps < 1) throw ValidationError("PropagatorConfig: n_steps must be >= 1");
    if (absorbing_margin < 0.0 || absorbing_margin > 0.25)
        throw ValidationError("PropagatorConfig: absorbing_margin must lie in [0, 0.25]");
    if (snapshot_stride < 1)
        throw ValidationError("PropagatorConfig: snapshot_stride must be >= 1");
}

double norm(const WaveField& psi) {
    double acc = 0.0;
    for (const cplx& v : psi.values) acc += std::norm(v);
    return acc * psi.grid.cell_volume();
}

namespace {

// Mass within three cells of any boundary; flags a packet reaching the seam.
double boundary_mass(const WaveField& psi) {
    const Grid& g = psi.grid;
    double acc = 0.0;
    const std::size_t n = g.size();
    std::array<int, kMaxDim> idx{};
    for (std::size_t lin = 0; lin < n; ++lin) {
        bool near = false;
        for (int a = 0; a < g.dim; ++a) {
            if (idx[a] < 3 || idx[a] >= g.points[a] - 3) {
                near = true;
                break;
            }
        }
        if (near) acc += std::norm(psi.values[lin]);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.points[a]) break;
            idx[a] = 0;
        }
    }
    return acc * g.cell_volume();
}

void check_snapshot(const WaveField& psi, const PropagatorConfig& cfg) {
    for (const cplx& v : psi.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("evolve: non-finite wave function value");
    }
    if (cfg.absorbing_margin == 0.0) {
        const double bm = boundary_mass(psi);
        if (bm > cfg.boundary_tail_tol) {
            std::ostringstream os;
            os << "evolve: tail mass " << bm << " near the periodic seam at t = " << psi.time
               << " exceeds " << cfg.boundary_tail_tol
               << "; enlarge the grid or enable the absorbing mask";
            throw NumericalError(os.str());
        }
    }
}

} // namespace

void evolve_stream(const WaveField& psi0, const SystemParams& params,
                   const PropagatorConfig& cfg,
                   const std::function<void(const WaveField&)>& sink) {
    params.validate();
    cfg.validate();
    if (params.hbar <= 0.0)
        throw ValidationError("evolve: hbar must be positive for wave propagation");
    if (psi0.grid.dim != params.dim)
        throw ValidationError("evolve: grid dim does not match params.dim");
    if (psi0.values.size() != psi0.grid.size())
        throw ValidationError("evolve: field size does not match grid");
    if (const auto* smp = std::get_if<SampledPotential>(&params.potential)) {
        if (!smp->grid.same_layout(psi0.grid))
            throw ValidationError("evolve: sampled potential must live on the psi grid");
    }

    const Grid& g = psi0.grid;
    const std::size_t n = g.size();
    fourier::Transformer fft(g);

    // Phase tables. Kinetic: exp(-i hbar |k|^2 dt / 2m). Potential half-step:
    // exp(-i V dt / 2 hbar). Optional cosine-ramp amplitude mask per step.
    std::vector<cplx> kinetic(n);
    {
        std::array<std::vector<double>, kMaxDim> k;
        for (int a = 0; a < g.dim; ++a) k[a] = fourier::wavenumbers(g, a);
        std::array<int, kMaxDim> idx{};
        const double c = params.hbar * cfg.dt / (2.0 * params.mass);
        for (std::size_t lin = 0; lin < n; ++lin) {
            double k2 = 0.0;
            for (int a = 0; a < g.dim; ++a) k2 += k[a][idx[a]] * k[a][idx[a]];
            kinetic[lin] = std::polar(1.0, -c * k2);
            for (int a = g.dim - 1; a >= 0; --a) {
                if (++idx[a] < g.points[a]) break;
                idx[a] = 0;
            }
        }
    }

    std::vector<cplx> half_pot(n);
    for (std::size_t lin = 0; lin < n; ++lin) {
        const double V = potential_value(params.potential, params, g.node(lin));
        half_pot[lin] = std::polar(1.0, -V * cfg.dt / (2.0 * params.hbar));
    }

    std::vector<double> mask;
    if (cfg.absorbing_margin > 0.0) {
        mask.assign(n, 1.0);
        std::array<int, kMaxDim> idx{};
        for (std::size_t lin = 0; lin < n; ++lin) {
            double m = 1.0;
            for (int a = 0; a < g.dim; ++a) {
                const double x = g.coord(a, idx[a]);
                const double w = cfg.absorbing_margin * g.length(a);
                const double d_lo = x - g.lower[a];
                const double d_hi = g.upper[a] - x;
                const double d = std::min(d_lo, d_hi);
                if (d < w) {
                    const double s = std::sin(0.5 * std::numbers::pi * d / w);
                    m *= s * s;
                }
            }
            mask[lin] = m;
            for (int a = g.dim - 1; a >= 0; --a) {
                if (++idx[a] < g.points[a]) break;
                idx[a] = 0;
            }
        }
    }

    WaveField psi = psi0;
    check_snapshot(psi, cfg);
    sink(psi);

    for (int step = 1; step <= cfg.n_steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) psi.values[i] *= half_pot[i];
        fft.forward(psi.values);
        for (std::size_t i = 0; i < n; ++i) psi.values[i] *= kinetic[i];
        fft.backward(psi.values);
        for (std::size_t i = 0; i < n; ++i) psi.values[i] *= half_pot[i];
        if (!mask.empty())
            for (std::size_t i = 0; i < n; ++i) psi.values[i] *= mask[i];
        psi.time = psi0.time + step * cfg.dt;
        if (step % cfg.snapshot_stride == 0 || step == cfg.n_steps) {
            check_snapshot(psi, cfg);
            sink(psi);
        }
    }
}

std::vector<WaveField> evolve(const WaveField& psi0, const SystemParams& params,
                              const PropagatorConfig& cfg) {
    std::vector<WaveField> snaps;
    evolve_stream(psi0, params, cfg, [&](const WaveField& s) { snaps.push_back(s); });
    return snaps;
}

} // namespace madelab::schrodinger
