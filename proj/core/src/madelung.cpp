#include "madelab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "madelab/fourier.hpp"

namespace madelab::madelung {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_pi(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double median(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

// Non-wrapping neighbors: the packet support never touches the seam (the grid
// adequacy rules see to that), so box connectivity is the right notion here.
template <typename F>
void for_each_neighbor(const Grid& g, std::size_t lin, F&& f) {
    const auto idx = g.unravel(lin);
    for (int a = 0; a < g.dim; ++a) {
        std::array<int, kMaxDim> nb = idx;
        if (idx[a] > 0) {
            nb[a] = idx[a] - 1;
            f(g.index(nb));
        }
        if (idx[a] + 1 < g.points[a]) {
            nb[a] = idx[a] + 1;
            f(g.index(nb));
        }
    }
}

} // namespace

MadelungFields decompose(const WaveField& psi, const SystemParams& params,
                         const DecomposeOptions& opts, DecomposeInfo* info) {
    params.validate();
    if (params.hbar <= 0.0)
        throw ValidationError("decompose: hbar must be positive (phase undefined at 0)");
    if (psi.values.size() != psi.grid.size())
        throw ValidationError("decompose: field size does not match grid");

    const Grid& g = psi.grid;
    const std::size_t n = g.size();

    MadelungFields out;
    out.grid = g;
    out.time = psi.time;
    out.rho.resize(n);
    out.action.assign(n, 0.0);

    std::vector<double> theta(n); // principal phases
    for (std::size_t i = 0; i < n; ++i) {
        out.rho[i] = std::norm(psi.values[i]);
        theta[i] = std::arg(psi.values[i]);
    }

    const std::size_t seed = argmax(out.rho);
    const double threshold = opts.mass_threshold_frac * out.rho[seed];

    std::vector<std::uint8_t> supported(n);
    for (std::size_t i = 0; i < n; ++i) supported[i] = out.rho[i] > threshold ? 1 : 0;

    // Flood-fill unwrap, one component at a time, each seeded at its own
    // density maximum with the principal branch.
    std::vector<std::uint8_t> visited(n, 0);
    std::vector<double> phase(n, 0.0);
    int components = 0;
    std::deque<std::size_t> queue;

    auto run_component = [&](std::size_t s) {
        ++components;
        phase[s] = theta[s];
        visited[s] = 1;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for_each_neighbor(g, u, [&](std::size_t v) {
                if (!supported[v] || visited[v]) return;
                phase[v] = theta[v] + kTwoPi * std::round((phase[u] - theta[v]) / kTwoPi);
                visited[v] = 1;
                queue.push_back(v);
            });
        }
    };

    run_component(seed);
    for (;;) {
        // Next unvisited supported node of highest density, if any.
        std::size_t next = n;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (supported[i] && !visited[i] && out.rho[i] > best) {
                best = out.rho[i];
                next = i;
            }
        }
        if (next == n) break;
        run_component(next);
    }

    // Residual inconsistencies on non-tree edges mark vortex neighborhoods.
    int defects = 0;
    std::vector<std::uint8_t> defective(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        if (!visited[u]) continue;
        const auto idx = g.unravel(u);
        for (int a = 0; a < g.dim; ++a) {
            if (idx[a] + 1 >= g.points[a]) continue;
            auto nb = idx;
            nb[a] = idx[a] + 1;
            const std::size_t v = g.index(nb);
            if (!visited[v]) continue;
            const double pd = wrap_to_pi(theta[u] - theta[v]);
            if (std::abs((phase[u] - phase[v]) - pd) > std::numbers::pi) {
                ++defects;
                defective[u] = defective[v] = 1;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (defective[i]) supported[i] = 0;
        if (visited[i]) out.action[i] = params.hbar * phase[i];
    }

    if (info) {
        info->threshold = threshold;
        info->seed_node = seed;
        info->gauge_constant = params.hbar * theta[seed];
        info->component_count = components;
        info->defect_count = defects;
        info->supported = std::move(supported);
    }
    return out;
}

WaveField recompose(const MadelungFields& fields, const SystemParams& params) {
    if (params.hbar <= 0.0) throw ValidationError("recompose: hbar must be positive");
    if (fields.rho.size() != fields.grid.size() || fields.action.size() != fields.rho.size())
        throw ValidationError("recompose: field sizes do not match grid");
    WaveField psi;
    psi.grid = fields.grid;
    psi.time = fields.time;
    psi.values.resize(fields.rho.size());
    for (std::size_t i = 0; i < fields.rho.size(); ++i)
        psi.values[i] = std::polar(std::sqrt(fields.rho[i]), fields.action[i] / params.hbar);
    return psi;
}

std::vector<double> quantum_potential(const MadelungFields& fields,
                                      const SystemParams& params,
                                      const DecomposeOptions& opts) {
    params.validate();
    const std::size_t n = fields.grid.size();
    if (fields.rho.size() != n) throw ValidationError("quantum_potential: size mismatch");

    std::vector<double> sqrt_rho(n);
    double max_rho = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sqrt_rho[i] = std::sqrt(std::max(fields.rho[i], 0.0));
        max_rho = std::max(max_rho, fields.rho[i]);
    }
    const double threshold = opts.mass_threshold_frac * max_rho;

    fourier::Transformer fft(fields.grid);
    const std::vector<double> lap = fft.laplacian(sqrt_rho);

    const double scale = -params.hbar * params.hbar / (2.0 * params.mass);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = fields.rho[i] > threshold ? scale * lap[i] / sqrt_rho[i]
                                         : std::numeric_limits<double>::quiet_NaN();
    }
    return q;
}

ResidualReport residuals(const MadelungFields& prev, const MadelungFields& mid,
                         const MadelungFields& next, const SystemParams& params,
                         const DecomposeOptions& opts) {
    params.validate();
    if (!prev.grid.same_layout(mid.grid) || !next.grid.same_layout(mid.grid))
        throw ValidationError("residuals: snapshots live on different grids");
    const double dt1 = mid.time - prev.time;
    const double dt2 = next.time - mid.time;
    if (!(dt1 > 0.0) || std::abs(dt2 - dt1) > 1e-9 * std::max(dt1, dt2))
        throw ValidationError("residuals: snapshots must be uniformly spaced in time");

    const Grid& g = mid.grid;
    const std::size_t n = g.size();
    const double dv = g.cell_volume();
    const double two_dt = next.time - prev.time;

    double max_rho = 0.0;
    for (double r : mid.rho) max_rho = std::max(max_rho, r);
    const double threshold = opts.mass_threshold_frac * max_rho;

    std::vector<std::uint8_t> support(n);
    for (std::size_t i = 0; i < n; ++i)
        support[i] = (mid.rho[i] > threshold && prev.rho[i] > threshold &&
                      next.rho[i] > threshold)
                         ? 1
                         : 0;

    // Unwrapping may land neighboring snapshots on different global branches;
    // realign by the 2*pi*hbar multiple nearest the median jump.
    const double branch = kTwoPi * params.hbar;
    auto branch_shift = [&](const MadelungFields& other) {
        std::vector<double> diffs;
        diffs.reserve(n / 4);
        for (std::size_t i = 0; i < n; ++i)
            if (support[i]) diffs.push_back(other.action[i] - mid.action[i]);
        return branch * std::round(median(diffs) / branch);
    };
    const double corr_prev = branch_shift(prev);
    const double corr_next = branch_shift(next);

    // Spatial derivatives through the recomposed psi.
    const WaveField psi = recompose(mid, params);
    fourier::Transformer fft(g);
    const auto grads = fft.gradient(psi.values);

    std::array<std::vector<double>, kMaxDim> grad_s;
    std::array<std::vector<double>, kMaxDim> flux;
    for (int a = 0; a < g.dim; ++a) {
        grad_s[a].assign(n, 0.0);
        flux[a].assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double im = std::imag(std::conj(psi.values[i]) * grads[a][i]);
            flux[a][i] = params.hbar * im / params.mass; // rho * v
            if (mid.rho[i] > threshold) grad_s[a][i] = params.hbar * im / mid.rho[i];
        }
    }
    const std::vector<double> div_flux = fft.divergence(flux);

    std::vector<double> sqrt_rho(n);
    for (std::size_t i = 0; i < n; ++i) sqrt_rho[i] = std::sqrt(std::max(mid.rho[i], 0.0));
    const std::vector<double> lap_sqrt = fft.laplacian(sqrt_rho);
    const double q_scale = -params.hbar * params.hbar / (2.0 * params.mass);

    ResidualReport rep;
    rep.mass_threshold = threshold;
    rep.gauge_correction_prev = corr_prev;
    rep.gauge_correction_next = corr_next;

    double hj2 = 0.0, cont2 = 0.0, lsq = 0.0, lsq_no_q = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!support[i]) continue;
        ++count;
        const double ds_dt =
            ((next.action[i] - corr_next) - (prev.action[i] - corr_prev)) / two_dt;
        double grad2 = 0.0;
        for (int a = 0; a < g.dim; ++a) grad2 += grad_s[a][i] * grad_s[a][i];
        const double V = potential_value(params.potential, params, g.node(i));
        const double Q = q_scale * lap_sqrt[i] / sqrt_rho[i];
        const double r_no_q = ds_dt + grad2 / (2.0 * params.mass) + V;
        const double r = r_no_q + Q;
        const double drho_dt = (next.rho[i] - prev.rho[i]) / two_dt;
        const double rc = drho_dt + div_flux[i];
        hj2 += r * r;
        cont2 += rc * rc;
        lsq += mid.rho[i] * r * r;
        lsq_no_q += mid.rho[i] * r_no_q * r_no_q;
    }
    rep.hj_residual_l2 = std::sqrt(hj2 * dv);
    rep.continuity_residual_l2 = std::sqrt(cont2 * dv);
    rep.lsq_functional = lsq * dv;
    rep.lsq_functional_no_q = lsq_no_q * dv;
    rep.supported_nodes = count;
    return rep;
}

} // namespace madelab::madelung
