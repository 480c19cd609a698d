#include "madelab/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "madelab/fourier.hpp"
#include "madelab/interp.hpp"
#include "madelab/madelung.hpp"
#include "madelab/rng.hpp"

namespace madelab::bohm {

void VelocityMode::validate(int dim) const {
    if (kind == Kind::SpinCurrent) {
        if (dim < 2)
            throw ValidationError("VelocityMode: the spin-current law needs dim >= 2");
        if (std::abs(norm(spin_axis) - 1.0) > 1e-12)
            throw ValidationError("VelocityMode: spin axis must have unit norm");
    }
}

VelocityField velocity_field(const MadelungFields& fields, const SystemParams& params,
                             const VelocityMode& mode, const VelocityFieldOptions& opts) {
    params.validate();
    mode.validate(params.dim);
    if (params.hbar <= 0.0) throw ValidationError("velocity_field: hbar must be positive");

    const Grid& g = fields.grid;
    const std::size_t n = g.size();

    const WaveField psi = madelung::recompose(fields, params);
    fourier::Transformer fft(g);
    const auto grads = fft.gradient(psi.values);

    double max_rho = 0.0;
    for (double r : fields.rho) max_rho = std::max(max_rho, r);
    const double threshold = opts.mass_threshold_frac * max_rho;
    const double cfl_cut = opts.cfl_density_frac * max_rho;

    VelocityField out;
    out.grid = g;
    out.time = fields.time;
    out.supported.assign(n, 0);
    for (int a = 0; a < g.dim; ++a) out.v[a].assign(n, 0.0);

    const double inv_m = 1.0 / params.mass;
    const double spin_coef = 0.5 * params.hbar * inv_m;
    double vmax = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        const double rho = fields.rho[i];
        if (!(rho > threshold)) continue;
        out.supported[i] = 1;

        Vec grad_s = vec0();
        Vec grad_ln_rho = vec0();
        for (int a = 0; a < g.dim; ++a) {
            const cplx d = std::conj(psi.values[i]) * grads[a][i];
            grad_s[a] = params.hbar * d.imag() / rho;
            grad_ln_rho[a] = 2.0 * d.real() / rho;
        }

        Vec v = inv_m * grad_s;
        if (mode.kind == VelocityMode::Kind::SpinCurrent)
            v += spin_coef * cross(grad_ln_rho, mode.spin_axis);

        for (int a = 0; a < g.dim; ++a) out.v[a][i] = v[a];
        if (rho >= cfl_cut) vmax = std::max(vmax, norm(v));
    }
    out.bulk_vmax = vmax;
    return out;
}

std::vector<BohmSample> sample_initial(const GaussianPrep& prep, int dim, int n,
                                       std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample_initial: n must be >= 1");
    if (dim < 1 || dim > kMaxDim) throw ValidationError("sample_initial: bad dim");
    Rng rng(seed);
    std::vector<BohmSample> out(n);
    for (int i = 0; i < n; ++i) out[i].eta0 = rng.normal_vec(dim, prep.sigma0);
    return out;
}

std::vector<BohmSample> sample_initial(const CoherentPrep& prep, const SystemParams& params,
                                       int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample_initial: n must be >= 1");
    const double sh = prep.sigma_hbar(params);
    Rng rng(seed);
    std::vector<BohmSample> out(n);
    for (int i = 0; i < n; ++i) out[i].eta0 = rng.normal_vec(params.dim, sh);
    return out;
}

GridVelocitySource::GridVelocitySource(std::vector<VelocityField> snapshots,
                                       double cfl_safety)
    : snaps_(std::move(snapshots)) {
    if (snaps_.size() < 2)
        throw ValidationError("GridVelocitySource: need at least two snapshots");
    for (std::size_t k = 1; k < snaps_.size(); ++k) {
        if (!(snaps_[k].time > snaps_[k - 1].time))
            throw ValidationError("GridVelocitySource: snapshot times must increase");
        if (!snaps_[k].grid.same_layout(snaps_[0].grid))
            throw ValidationError("GridVelocitySource: snapshots on different grids");
    }
    const Grid& g = snaps_[0].grid;
    double min_dx = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim; ++a) min_dx = std::min(min_dx, g.spacing[a]);
    double vmax = 0.0;
    for (const auto& s : snaps_) vmax = std::max(vmax, s.bulk_vmax);
    cfl_dt_ = vmax > 0.0 ? cfl_safety * min_dx / vmax
                         : (snaps_.back().time - snaps_.front().time);
}

bool GridVelocitySource::velocity(const Vec& x, double t, Vec& out) const {
    const Grid& g = snaps_[0].grid;
    if (!interp::inside(g, x)) return false;

    // Bracketing snapshot pair (clamped at the ends for stage evaluations
    // that poke just beyond the span).
    const double t0 = snaps_.front().time;
    const double t1 = snaps_.back().time;
    if (t < t0 - 1e-12 || t > t1 + 1e-12) return false;
    std::size_t k = 0;
    while (k + 2 < snaps_.size() && snaps_[k + 1].time <= t) ++k;
    const VelocityField& A = snaps_[k];
    const VelocityField& B = snaps_[k + 1];
    const double w = std::clamp((t - A.time) / (B.time - A.time), 0.0, 1.0);

    // Masked when the nearest node lacks support in either bracket.
    std::array<int, kMaxDim> nearest{};
    for (int a = 0; a < g.dim; ++a) {
        int i = static_cast<int>(std::lround((x[a] - g.lower[a]) / g.spacing[a]));
        i %= g.points[a];
        if (i < 0) i += g.points[a];
        nearest[a] = i;
    }
    const std::size_t node = g.index(nearest);
    if (!A.supported[node] || !B.supported[node]) return false;

    out = vec0();
    for (int a = 0; a < g.dim; ++a) {
        const double va = interp::cubic_at(g, A.v[a], x);
        const double vb = interp::cubic_at(g, B.v[a], x);
        out[a] = (1.0 - w) * va + w * vb;
    }
    return true;
}

double GridVelocitySource::t_begin() const { return snaps_.front().time; }
double GridVelocitySource::t_end() const { return snaps_.back().time; }
double GridVelocitySource::suggested_dt() const { return cfl_dt_; }

std::vector<double> GridVelocitySource::natural_times() const {
    std::vector<double> t(snaps_.size());
    for (std::size_t k = 0; k < snaps_.size(); ++k) t[k] = snaps_[k].time;
    return t;
}

CallableVelocitySource::CallableVelocitySource(Flow flow, double t0, double t1, double dt)
    : flow_(std::move(flow)), t0_(t0), t1_(t1), dt_(dt) {
    if (!(t1 > t0)) throw ValidationError("CallableVelocitySource: empty time span");
    if (!(dt > 0.0)) throw ValidationError("CallableVelocitySource: dt must be positive");
}

bool CallableVelocitySource::velocity(const Vec& x, double t, Vec& out) const {
    out = flow_(x, t);
    return true;
}

CallableVelocitySource::Flow analytic_flow(const analytic::LinearScenario& scen,
                                           const VelocityMode& mode) {
    mode.validate(scen.params.dim);
    const double inv_m = 1.0 / scen.params.mass;
    const double spin_coef = 0.5 * scen.params.hbar * inv_m;
    const bool spin = mode.kind == VelocityMode::Kind::SpinCurrent;
    const Vec axis = mode.spin_axis;
    return [scen, inv_m, spin_coef, spin, axis](const Vec& x, double t) {
        Vec v = inv_m * analytic::linear_grad_action(x, t, scen);
        if (spin) v += spin_coef * cross(analytic::linear_grad_log_rho(x, t, scen), axis);
        return v;
    };
}

CallableVelocitySource::Flow analytic_flow(const analytic::CoherentScenario& scen,
                                           const VelocityMode& mode) {
    mode.validate(scen.params.dim);
    const double inv_m = 1.0 / scen.params.mass;
    const double spin_coef = 0.5 * scen.params.hbar * inv_m;
    const bool spin = mode.kind == VelocityMode::Kind::SpinCurrent;
    const Vec axis = mode.spin_axis;
    return [scen, inv_m, spin_coef, spin, axis](const Vec& x, double t) {
        Vec v = inv_m * analytic::coherent_grad_action(x, t, scen);
        if (spin) v += spin_coef * cross(analytic::coherent_grad_log_rho(x, t, scen), axis);
        return v;
    };
}

std::size_t EnsembleRun::time_index(double t) const {
    if (trajectories.empty()) throw ValidationError("EnsembleRun: empty run");
    const auto& times = trajectories.front().times;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
    std::ostringstream os;
    os << "EnsembleRun: time " << t << " was not recorded";
    throw ValidationError(os.str());
}

namespace {

struct SampleState {
    Vec x = vec0();
    bool frozen = false;
};

// One RK4 step; freezes in place if any stage is masked.
void advance(const VelocitySource& src, SampleState& s, double t, double h) {
    if (s.frozen) return;
    Vec k1, k2, k3, k4;
    if (!src.velocity(s.x, t, k1) || !src.velocity(s.x + (0.5 * h) * k1, t + 0.5 * h, k2) ||
        !src.velocity(s.x + (0.5 * h) * k2, t + 0.5 * h, k3) ||
        !src.velocity(s.x + h * k3, t + h, k4)) {
        s.frozen = true;
        return;
    }
    s.x += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

} // namespace

EnsembleRun integrate_ensemble(const VelocitySource& source,
                               std::span<const BohmSample> samples, const Vec& center0,
                               const VelocityMode& mode, const IntegrateOptions& opts) {
    if (samples.empty()) throw ValidationError("integrate_ensemble: no samples");

    std::vector<double> record = opts.record_times.empty() ? source.natural_times()
                                                           : opts.record_times;
    if (record.size() < 2)
        throw ValidationError("integrate_ensemble: need at least two record times");
    for (std::size_t k = 1; k < record.size(); ++k)
        if (!(record[k] > record[k - 1]))
            throw ValidationError("integrate_ensemble: record times must increase");
    if (std::abs(record.front() - source.t_begin()) > 1e-12 ||
        record.back() > source.t_end() + 1e-12)
        throw ValidationError("integrate_ensemble: record times outside the source span");

    const double dt = opts.dt > 0.0 ? opts.dt : source.suggested_dt();
    if (!(dt > 0.0)) throw ValidationError("integrate_ensemble: no usable dt");

    const std::size_t n = samples.size();
    const std::size_t n_rec = record.size();

    EnsembleRun run;
    run.samples.assign(samples.begin(), samples.end());
    run.mode = mode;
    run.dt_used = dt;
    run.flagged.assign(n, 0);
    run.trajectories.resize(n);

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            SampleState s;
            s.x = center0 + samples[i].eta0;
            Trajectory& traj = run.trajectories[i];
            traj.times = record;
            traj.positions.resize(n_rec);
            traj.velocities.resize(n_rec);

            auto record_at = [&](std::size_t k, double t) {
                traj.positions[k] = s.x;
                Vec v = vec0();
                if (!s.frozen && !source.velocity(s.x, t, v)) s.frozen = true;
                traj.velocities[k] = s.frozen ? vec0() : v;
            };

            record_at(0, record[0]);
            for (std::size_t k = 1; k < n_rec; ++k) {
                const double span = record[k] - record[k - 1];
                const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
                const double h = span / n_sub;
                double t = record[k - 1];
                for (int sub = 0; sub < n_sub && !s.frozen; ++sub) {
                    advance(source, s, t, h);
                    t += h;
                }
                record_at(k, record[k]);
            }
            if (s.frozen) run.flagged[i] = 1;
        }
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1 || n < 64) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    run.flagged_count = 0;
    for (auto f : run.flagged) run.flagged_count += f;
    return run;
}

EnsembleRun integrate_ensemble(const std::vector<MadelungFields>& snapshots,
                               std::span<const BohmSample> samples, const Vec& center0,
                               const SystemParams& params, const VelocityMode& mode,
                               const IntegrateOptions& opts,
                               const VelocityFieldOptions& vf_opts) {
    std::vector<VelocityField> fields;
    fields.reserve(snapshots.size());
    for (const auto& s : snapshots) fields.push_back(velocity_field(s, params, mode, vf_opts));
    GridVelocitySource source(std::move(fields));
    return integrate_ensemble(source, samples, center0, mode, opts);
}

namespace {

double ks_statistic(std::vector<double>& coords, const std::function<double(double)>& cdf) {
    std::sort(coords.begin(), coords.end());
    const double n = static_cast<double>(coords.size());
    double d = 0.0;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const double f = cdf(coords[k]);
        d = std::max(d, std::abs(f - (k + 1) / n));
        d = std::max(d, std::abs(f - k / n));
    }
    return d;
}

std::vector<double> unflagged_axis(const EnsembleRun& run, std::size_t k, int axis,
                                   std::size_t min_unflagged) {
    std::vector<double> coords;
    coords.reserve(run.trajectories.size());
    for (std::size_t i = 0; i < run.trajectories.size(); ++i)
        if (!run.flagged[i]) coords.push_back(run.trajectories[i].positions[k][axis]);
    if (coords.size() < min_unflagged) {
        std::ostringstream os;
        os << "equivariance_distance: only " << coords.size() << " unflagged trajectories, need "
           << min_unflagged;
        throw NumericalError(os.str());
    }
    return coords;
}

} // namespace

double equivariance_distance(const EnsembleRun& run, const MadelungFields& fields, double t,
                             std::size_t min_unflagged) {
    const std::size_t k = run.time_index(t);
    const Grid& g = fields.grid;

    double dmax = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
        // Marginal pdf along this axis: integrate rho over the other axes.
        const int na = g.points[axis];
        std::vector<double> pdf(na, 0.0);
        double other_vol = 1.0;
        for (int a = 0; a < g.dim; ++a)
            if (a != axis) other_vol *= g.spacing[a];
        const std::size_t n = g.size();
        for (std::size_t lin = 0; lin < n; ++lin)
            pdf[g.unravel(lin)[axis]] += fields.rho[lin] * other_vol;

        // CDF at cell edges; cells are centered on the nodes.
        std::vector<double> cdf_edge(na + 1, 0.0);
        for (int i = 0; i < na; ++i)
            cdf_edge[i + 1] = cdf_edge[i] + pdf[i] * g.spacing[axis];
        const double total = cdf_edge[na];

        auto cdf = [&](double x) {
            const double u = (x - (g.lower[axis] - 0.5 * g.spacing[axis])) / g.spacing[axis];
            if (u <= 0.0) return 0.0;
            if (u >= na) return 1.0;
            const int cell = static_cast<int>(u);
            const double frac = u - cell;
            return (cdf_edge[cell] + frac * pdf[cell] * g.spacing[axis]) / total;
        };

        std::vector<double> coords = unflagged_axis(run, k, axis, min_unflagged);
        dmax = std::max(dmax, ks_statistic(coords, cdf));
    }
    return dmax;
}

double equivariance_distance_normal(const EnsembleRun& run, double t, const Vec& center,
                                    const Vec& sigma, int dim, std::size_t min_unflagged) {
    const std::size_t k = run.time_index(t);
    double dmax = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
        const double c = center[axis];
        const double s = sigma[axis];
        auto cdf = [c, s](double x) {
            return 0.5 * std::erfc(-(x - c) / (s * std::numbers::sqrt2));
        };
        std::vector<double> coords = unflagged_axis(run, k, axis, min_unflagged);
        dmax = std::max(dmax, ks_statistic(coords, cdf));
    }
    return dmax;
}

} // namespace madelab::bohm
