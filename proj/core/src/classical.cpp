#include "madelab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "madelab/rng.hpp"

namespace madelab::classical {

namespace {

// State for one characteristic: position, velocity, accumulated Lagrangian
// action, accumulated local-action scalar g.
struct CharState {
    Vec x = vec0();
    Vec v = vec0();
    double action = 0.0;
    double g = 0.0;
};

CharState axpy(const CharState& s, double h, const CharState& d) {
    CharState out;
    out.x = s.x + h * d.x;
    out.v = s.v + h * d.v;
    out.action = s.action + h * d.action;
    out.g = s.g + h * d.g;
    return out;
}

CharState derivative(const CharState& s, const SystemParams& params) {
    CharState d;
    const Vec grad_v = potential_gradient(params.potential, params, s.x);
    const double V = potential_value(params.potential, params, s.x);
    d.x = s.v;
    d.v = (-1.0 / params.mass) * grad_v;
    const double kin = 0.5 * params.mass * norm2(s.v);
    d.action = kin - V;
    d.g = -kin - V + dot(grad_v, s.x);
    return d;
}

CharState rk4_step(const CharState& s, double dt, const SystemParams& params) {
    const CharState k1 = derivative(s, params);
    const CharState k2 = derivative(axpy(s, 0.5 * dt, k1), params);
    const CharState k3 = derivative(axpy(s, 0.5 * dt, k2), params);
    const CharState k4 = derivative(axpy(s, dt, k3), params);
    CharState out = s;
    out.x += (dt / 6.0) * (k1.x + 2.0 * (k2.x + k3.x) + k4.x);
    out.v += (dt / 6.0) * (k1.v + 2.0 * (k2.v + k3.v) + k4.v);
    out.action += (dt / 6.0) * (k1.action + 2.0 * (k2.action + k3.action) + k4.action);
    out.g += (dt / 6.0) * (k1.g + 2.0 * (k2.g + k3.g) + k4.g);
    return out;
}

double det_dim(const std::array<Vec, kMaxDim>& cols, int dim) {
    if (dim == 1) return cols[0][0];
    if (dim == 2) return cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0];
    return dot(cols[0], cross(cols[1], cols[2]));
}

} // namespace

LocalAction local_action_evolve(const Vec& x0, const Vec& v0, const SystemParams& params,
                                double t_max, double dt) {
    params.validate();
    if (!(t_max > 0.0)) throw ValidationError("local_action_evolve: t_max must be positive");
    if (!(dt > 0.0)) throw ValidationError("local_action_evolve: dt must be positive");
    if (!finite(x0, params.dim) || !finite(v0, params.dim))
        throw ValidationError("local_action_evolve: non-finite initial state");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-12));
    LocalAction out;
    out.mass = params.mass;
    out.dim = params.dim;
    out.trajectory.times.reserve(n_steps + 1);
    out.trajectory.positions.reserve(n_steps + 1);
    out.trajectory.velocities.reserve(n_steps + 1);
    out.g.reserve(n_steps + 1);

    CharState s;
    s.x = x0;
    s.v = v0;
    double t = 0.0;
    for (std::size_t k = 0;; ++k) {
        out.trajectory.times.push_back(t);
        out.trajectory.positions.push_back(s.x);
        out.trajectory.velocities.push_back(s.v);
        out.g.push_back(s.g);
        if (!finite(s.x, params.dim) || !std::isfinite(s.g))
            throw NumericalError("local_action_evolve: trajectory diverged");
        if (k == n_steps) break;
        const double h = std::min(dt, t_max - t);
        s = rk4_step(s, h, params);
        t += h;
    }
    return out;
}

double local_hj_residual(const LocalAction& action, const SystemParams& params, double t) {
    const auto& tr = action.trajectory;
    const std::size_t n = tr.times.size();
    if (n < 3) throw ValidationError("local_hj_residual: need at least 3 samples");
    if (t < tr.times.front() || t > tr.times.back())
        throw ValidationError("local_hj_residual: t outside the computed range");

    // Nearest interior sample.
    auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - tr.times.begin());
    if (k > 0 && (k == n || tr.times[k] - t > t - tr.times[k - 1])) --k;
    k = std::clamp<std::size_t>(k, 1, n - 2);

    const Vec x = tr.positions[k];
    const double dt_c = tr.times[k + 1] - tr.times[k - 1];
    const double dS_dt = (action.value_at(k + 1, x) - action.value_at(k - 1, x)) / dt_c;
    const double kin = 0.5 * action.mass * norm2(tr.velocities[k]);
    const double V = potential_value(params.potential, params, x);
    return std::abs(dS_dt + kin + V);
}

CharacteristicField statistical_hj_evolve(const GaussianPrep& prep,
                                          const SystemParams& params,
                                          std::span<const double> t_grid, int n_particles,
                                          std::uint64_t seed, const EvolveOptions& opts) {
    params.validate();
    prep.validate(params.dim);
    if (n_particles < 100)
        throw ValidationError("statistical_hj_evolve: need at least 100 particles");
    if (t_grid.empty()) throw ValidationError("statistical_hj_evolve: empty time grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw ValidationError("statistical_hj_evolve: times must be >= 0 and increasing");
    }
    if (!(opts.dt > 0.0)) throw ValidationError("statistical_hj_evolve: dt must be positive");

    const int dim = params.dim;
    const double eps = opts.jacobian_offset * prep.sigma0;

    // Main characteristics plus dim offset companions each, all from rho0.
    Rng rng(seed);
    std::vector<CharState> main(n_particles);
    std::vector<std::array<CharState, kMaxDim>> aux(n_particles);
    for (int i = 0; i < n_particles; ++i) {
        const Vec x = prep.zeta0 + rng.normal_vec(dim, prep.sigma0);
        main[i].x = x;
        main[i].v = prep.v0;
        main[i].action = params.mass * dot(prep.v0, x); // S0 gauge: S0(0) = 0
        for (int a = 0; a < dim; ++a) {
            Vec xo = x;
            xo[a] += eps;
            aux[i][a].x = xo;
            aux[i][a].v = prep.v0;
        }
    }

    CharacteristicField field;
    field.dim = dim;
    field.times.assign(t_grid.begin(), t_grid.end());
    field.positions.resize(t_grid.size());
    field.velocities.resize(t_grid.size());
    field.actions.resize(t_grid.size());
    field.jacobians.resize(t_grid.size());

    auto jacobian_of = [&](int i) {
        std::array<Vec, kMaxDim> cols;
        for (int a = 0; a < dim; ++a) cols[a] = (1.0 / eps) * (aux[i][a].x - main[i].x);
        return det_dim(cols, dim);
    };

    auto record = [&](std::size_t slot) {
        auto& P = field.positions[slot];
        auto& W = field.velocities[slot];
        auto& A = field.actions[slot];
        auto& J = field.jacobians[slot];
        P.resize(n_particles);
        W.resize(n_particles);
        A.resize(n_particles);
        J.resize(n_particles);
        for (int i = 0; i < n_particles; ++i) {
            P[i] = main[i].x;
            W[i] = main[i].v;
            A[i] = main[i].action;
            J[i] = jacobian_of(i);
        }
    };

    double t = 0.0;
    std::size_t slot = 0;
    if (t_grid[0] == 0.0) record(slot++);

    while (slot < t_grid.size()) {
        const double target = t_grid[slot];
        while (t < target - 1e-12) {
            const double h = std::min(opts.dt, target - t);
            for (int i = 0; i < n_particles; ++i) {
                main[i] = rk4_step(main[i], h, params);
                for (int a = 0; a < dim; ++a) aux[i][a] = rk4_step(aux[i][a], h, params);
            }
            t += h;
            if (!field.caustic_found()) {
                for (int i = 0; i < n_particles; ++i) {
                    if (jacobian_of(i) <= 0.0) {
                        field.first_caustic_time = t;
                        break;
                    }
                }
            }
        }
        record(slot++);
    }
    return field;
}

double silverman_bandwidth(std::span<const double> samples, int dim) {
    const std::size_t n = samples.size();
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    const double factor = std::pow(4.0 / (dim + 2.0), 1.0 / (dim + 4.0));
    return factor * sd * std::pow(static_cast<double>(n), -1.0 / (dim + 4.0));
}

std::vector<double> reconstruct_density(const CharacteristicField& field,
                                        std::size_t time_index,
                                        std::span<const Vec> eval_points) {
    if (time_index >= field.times.size())
        throw ValidationError("reconstruct_density: time index out of range");
    if (field.caustic_found() && field.times[time_index] >= field.first_caustic_time) {
        std::ostringstream os;
        os << "reconstruct_density: characteristics crossed at t = " << field.first_caustic_time
           << "; the single-valued field does not extend to t = " << field.times[time_index];
        throw NumericalError(os.str());
    }

    const auto& pts = field.positions[time_index];
    const std::size_t n = pts.size();
    const int dim = field.dim;

    std::array<double, kMaxDim> h{};
    std::vector<double> coords(n);
    for (int a = 0; a < dim; ++a) {
        for (std::size_t i = 0; i < n; ++i) coords[i] = pts[i][a];
        h[a] = silverman_bandwidth(coords, dim);
    }

    double pref = 1.0 / static_cast<double>(n);
    for (int a = 0; a < dim; ++a) pref /= h[a] * std::sqrt(2.0 * std::numbers::pi);

    std::vector<double> out(eval_points.size(), 0.0);
    for (std::size_t e = 0; e < eval_points.size(); ++e) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double q = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double d = (eval_points[e][a] - pts[i][a]) / h[a];
                q += d * d;
            }
            acc += std::exp(-0.5 * q);
        }
        out[e] = pref * acc;
    }
    return out;
}

} // namespace madelab::classical
