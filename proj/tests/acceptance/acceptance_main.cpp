// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one line per criterion. Exit status 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "madelab/analytic.hpp"
#include "madelab/bohm.hpp"
#include "madelab/classical.hpp"
#include "madelab/lab.hpp"
#include "madelab/madelung.hpp"
#include "madelab/rng.hpp"
#include "madelab/run.hpp"
#include "madelab/schrodinger.hpp"

using namespace madelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Body = std::function<Outcome()>;

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    Body body;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

bool check(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
    return ok;
}

MadelungFields sample_linear_fields(const Grid& g, double t,
                                    const analytic::LinearScenario& scen) {
    MadelungFields f;
    f.grid = g;
    f.time = t;
    f.rho.resize(g.size());
    f.action.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = analytic::linear_fields(g.node(i), t, scen);
        f.rho[i] = s.rho;
        f.action[i] = s.action;
    }
    return f;
}

MadelungFields sample_coherent_fields(const Grid& g, double t,
                                      const analytic::CoherentScenario& scen) {
    MadelungFields f;
    f.grid = g;
    f.time = t;
    f.rho.resize(g.size());
    f.action.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = analytic::coherent_fields(g.node(i), t, scen);
        f.rho[i] = s.rho;
        f.action[i] = s.action;
    }
    return f;
}

// --- 1. Spreading law --------------------------------------------------------

Outcome criterion_spreading() {
    Outcome o;
    SystemParams params;
    params.dim = 1;
    const Grid g = make_grid_1d(-20.0, 20.0, 1024);
    const WaveField psi0 = prepare_wavefunction(GaussianPrep{}, params, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 2000;
    cfg.snapshot_stride = 200; // 10 probe times in (0, 2]
    const auto snaps = schrodinger::evolve(psi0, params, cfg);

    double worst = 0.0;
    int probes = 0;
    for (const auto& s : snaps) {
        if (s.time == 0.0) continue;
        ++probes;
        double mass = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = std::norm(s.values[i]);
            mass += r;
            mean += r * g.coord(0, static_cast<int>(i));
        }
        mean /= mass;
        double mom = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d = g.coord(0, static_cast<int>(i)) - mean;
            mom += std::norm(s.values[i]) * d * d;
        }
        const double fitted = std::sqrt(mom / mass);
        const double want = analytic::sigma_hbar(s.time, params, 1.0);
        worst = std::max(worst, std::abs(fitted / want - 1.0));
    }
    check(o, probes == 10, "expected 10 probe times");
    check(o, worst <= 1e-3, "width deviation " + fmt(worst) + " > 0.1%");
    o.detail = "max relative width deviation " + fmt(worst) + " over 10 times";
    return o;
}

// --- 2. Linear-potential exactness -------------------------------------------

Outcome criterion_linear_exact() {
    Outcome o;
    GaussianPrep prep;
    prep.v0 = vec(0.25);
    auto scen = analytic::make_linear_scenario(prep, vec(0.25), 1.0, 1.0, 1);
    const Grid g = make_grid_1d(-16.0, 16.0, 1024);
    const WaveField psi0 = prepare_wavefunction(prep, scen.params, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 1000;
    cfg.snapshot_stride = 1000;
    const auto snaps = schrodinger::evolve(psi0, scen.params, cfg);
    const MadelungFields f = madelung::decompose(snaps.back(), scen.params);

    double max_rho = 0.0;
    for (double r : f.rho) max_rho = std::max(max_rho, r);

    // Gauge: median offset of the unwrapped action against the closed form.
    std::vector<double> offsets;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (f.rho[i] <= 1e-8 * max_rho) continue;
        offsets.push_back(f.action[i] -
                          analytic::linear_fields(g.node(i), 1.0, scen).action);
    }
    std::nth_element(offsets.begin(), offsets.begin() + offsets.size() / 2, offsets.end());
    const double gauge = offsets[offsets.size() / 2];

    double rho_rel = 0.0, s_scale = 0.0, s_abs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (f.rho[i] <= 1e-8 * max_rho) continue;
        const auto want = analytic::linear_fields(g.node(i), 1.0, scen);
        rho_rel = std::max(rho_rel, std::abs(f.rho[i] - want.rho) / want.rho);
        s_abs = std::max(s_abs, std::abs(f.action[i] - gauge - want.action));
        s_scale = std::max(s_scale, std::abs(want.action));
    }
    const double s_rel = s_abs / s_scale;
    check(o, rho_rel <= 1e-6, "density Linf rel " + fmt(rho_rel) + " > 1e-6");
    check(o, s_rel <= 1e-6, "phase Linf rel " + fmt(s_rel) + " > 1e-6");
    o.detail = "Linf rel: density " + fmt(rho_rel) + ", action (gauge-aligned) " + fmt(s_rel);
    return o;
}

// --- 3. hbar -> 0 order for the linear scenario ------------------------------

Outcome criterion_theorem3_order() {
    Outcome o;
    GaussianPrep prep;
    prep.v0 = vec(0.25);
    lab::LinearGaussian lg;
    lg.scen = analytic::make_linear_scenario(prep, vec(0.25), 1.0, 1.0, 1);
    const std::vector<double> hbars = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    lab::SweepBudget budget;
    budget.t_probe = 1.0;
    budget.dt = 1e-3;
    budget.base_points = 256;
    const auto report = lab::hbar_sweep(lg, hbars, budget);

    std::ostringstream detail;
    for (const auto& [name, tol] :
         std::vector<std::pair<std::string, double>>{{"field_error_analytic", 0.1},
                                                     {"action_error_analytic", 0.1},
                                                     {"field_error_solver", 0.2},
                                                     {"action_error_solver", 0.2}}) {
        const auto& m = report.metric(name);
        if (!check(o, m.fitted_order.has_value(), name + ": no order fitted")) continue;
        const double order = *m.fitted_order;
        check(o, std::abs(order - 2.0) <= tol,
              name + " order " + fmt(order) + " outside 2.0 +- " + fmt(tol));
        detail << name << "=" << fmt(order) << " ";
    }
    o.detail = detail.str();
    return o;
}

// --- 4. Coherent-state metrics ------------------------------------------------

Outcome criterion_theorem4() {
    Outcome o;
    CoherentPrep prep;
    prep.x0 = vec(1.0, 0.0);
    prep.v0 = vec(0.0, 0.5);
    lab::HarmonicCoherent hc;
    hc.scen = analytic::make_coherent_scenario(prep, 1.0, 1.0, 2);
    const std::vector<double> hbars = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    lab::SweepBudget budget;
    budget.t_probe = 1.0;
    budget.dt = 1e-3;
    budget.base_points = 64;
    const auto report = lab::hbar_sweep(hc, hbars, budget);

    auto max_of = [&](const char* name) {
        double worst = 0.0;
        for (const double v : report.metric(name).values) worst = std::max(worst, v);
        return worst;
    };

    const double m_an = max_of("second_moment_error_analytic");
    const double m_so = max_of("second_moment_rel_error_solver");
    const double q_an = max_of("q_on_trajectory_error_analytic");
    const double q_so = max_of("q_on_trajectory_error_solver");
    const double sl = max_of("s_slope_error_solver");
    const double sr = max_of("s_residual_solver");
    check(o, m_an <= 1e-10, "analytic second moment err " + fmt(m_an) + " > 1e-10");
    check(o, m_so <= 5e-3, "solver second moment rel err " + fmt(m_so) + " > 0.5%");
    check(o, q_an <= 1e-12, "analytic Q-on-path err " + fmt(q_an));
    check(o, q_so <= 1e-6, "solver Q-on-path err " + fmt(q_so) + " > 1e-6");
    check(o, sl <= 1e-4, "S-regression slope err " + fmt(sl) + " > 1e-4");
    check(o, sr <= 1e-4, "S-regression residual " + fmt(sr) + " > 1e-4");
    o.detail = "moment(an/so) " + fmt(m_an) + "/" + fmt(m_so) + ", Q(an/so) " + fmt(q_an) +
               "/" + fmt(q_so) + ", slope " + fmt(sl) + ", resid " + fmt(sr);
    return o;
}

// --- 5. Closed-form trajectory oracles ----------------------------------------

Outcome criterion_bohm_oracles() {
    Outcome o;
    const int n = 1000;
    const double T = 1.5;

    // Standard law through the 1D fields.
    GaussianPrep prep1;
    prep1.v0 = vec(0.3);
    auto scen1 = analytic::make_linear_scenario(prep1, vec(0.2), 1.0, 1.0, 1);
    const auto flow1 = bohm::analytic_flow(scen1, bohm::VelocityMode::standard());
    const bohm::CallableVelocitySource src1(flow1, 0.0, T, 1e-3);
    const auto samples1 = bohm::sample_initial(prep1, 1, n, 101);
    bohm::IntegrateOptions opts;
    opts.record_times = {0.0, T};
    opts.threads = 2;
    const auto run1 = bohm::integrate_ensemble(src1, samples1, prep1.zeta0,
                                               bohm::VelocityMode::standard(), opts);
    double rel1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double want = analytic::bohm_trajectory_1d(samples1[i].eta0[0], T, scen1);
        const double got = run1.trajectories[i].positions.back()[0];
        rel1 = std::max(rel1, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
    check(o, rel1 <= 1e-4, "standard endpoint rel err " + fmt(rel1) + " > 1e-4");

    // Spin-current law through the 3D scenario, K along the spin axis.
    GaussianPrep prep3;
    prep3.v0 = vec(0.2, 0.0, 0.1);
    auto scen3 = analytic::make_linear_scenario(prep3, vec(0.0, 0.0, 0.3), 1.0, 1.0, 3);
    const auto mode3 = bohm::VelocityMode::spin_current({0.0, 0.0, 1.0});
    const bohm::CallableVelocitySource src3(bohm::analytic_flow(scen3, mode3), 0.0, T, 1e-3);
    const auto samples3 = bohm::sample_initial(prep3, 3, n, 102);
    const auto run3 = bohm::integrate_ensemble(src3, samples3, prep3.zeta0, mode3, opts);
    double rel3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec want = analytic::bohm_trajectory_3d_spin(samples3[i].eta0, T, scen3);
        const Vec got = run3.trajectories[i].positions.back();
        rel3 = std::max(rel3, norm(got - want) / std::max(1.0, norm(want)));
    }
    check(o, rel3 <= 1e-4, "spin endpoint rel err " + fmt(rel3) + " > 1e-4");
    o.detail = "endpoint rel err: standard " + fmt(rel1) + ", spin-current " + fmt(rel3);
    return o;
}

// --- 6. Equivariance ------------------------------------------------------------

Outcome criterion_equivariance() {
    Outcome o;
    const int n = 10000;
    const double T = 2.0;
    GaussianPrep prep;
    prep.v0 = vec(0.2, 0.0, 0.1);
    auto scen = analytic::make_linear_scenario(prep, vec(0.0, 0.0, 0.25), 1.0, 1.0, 3);

    bohm::IntegrateOptions opts;
    opts.record_times = {0.0, 0.5, 1.0, 1.5, 2.0};
    opts.threads = 2;
    const auto samples = bohm::sample_initial(prep, 3, n, 202);

    double worst = 0.0;
    for (const auto mode : {bohm::VelocityMode::standard(),
                            bohm::VelocityMode::spin_current({0.0, 0.0, 1.0})}) {
        const bohm::CallableVelocitySource src(bohm::analytic_flow(scen, mode), 0.0, T, 1e-3);
        const auto run = bohm::integrate_ensemble(src, samples, prep.zeta0, mode, opts);
        for (const double t : opts.record_times) {
            Vec sig;
            sig.fill(analytic::sigma_hbar(t, scen.params, 1.0));
            worst = std::max(worst, bohm::equivariance_distance_normal(
                                        run, t, scen.packet_center(t), sig, 3));
        }
    }
    check(o, worst <= 0.02, "analytic-flow KS " + fmt(worst) + " > 0.02");

    // Solver-field route, 1D standard: evolve, decompose, transport.
    GaussianPrep prep1;
    prep1.v0 = vec(0.25);
    auto scen1 = analytic::make_linear_scenario(prep1, vec(0.25), 1.0, 1.0, 1);
    const double smax = analytic::sigma_hbar(T, scen1.params, 1.0);
    const double c1 = scen1.packet_center(T)[0];
    const Grid g = make_grid_1d(-9.0 * smax, c1 + 9.0 * smax, 512);
    const WaveField psi0 = prepare_wavefunction(prep1, scen1.params, g);
    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 2000;
    cfg.snapshot_stride = 25;
    std::vector<MadelungFields> snaps;
    schrodinger::evolve_stream(psi0, scen1.params, cfg, [&](const WaveField& s) {
        snaps.push_back(madelung::decompose(s, scen1.params));
    });
    const auto samples1 = bohm::sample_initial(prep1, 1, n, 203);
    bohm::IntegrateOptions opts1;
    opts1.threads = 2;
    opts1.record_times = {0.0, 1.0, 2.0};
    const auto run1 = bohm::integrate_ensemble(snaps, samples1, prep1.zeta0, scen1.params,
                                               bohm::VelocityMode::standard(), opts1);
    double worst_grid = 0.0;
    for (const double t : opts1.record_times) {
        const auto it = std::find_if(snaps.begin(), snaps.end(), [&](const auto& f) {
            return std::abs(f.time - t) < 1e-9;
        });
        worst_grid = std::max(worst_grid, bohm::equivariance_distance(run1, *it, t));
    }
    check(o, worst_grid <= 0.02, "solver-field KS " + fmt(worst_grid) + " > 0.02");

    // Control: uniform misseeding must be detected.
    Rng rng(204);
    std::vector<BohmSample> uniform(n);
    for (auto& s : uniform) s.eta0 = vec(3.0 * (2.0 * rng.uniform01() - 1.0));
    const bohm::CallableVelocitySource src_ctl(
        bohm::analytic_flow(scen1, bohm::VelocityMode::standard()), 0.0, T, 1e-3);
    bohm::IntegrateOptions opts_ctl;
    opts_ctl.record_times = {0.0, T};
    opts_ctl.threads = 2;
    const auto broken = bohm::integrate_ensemble(src_ctl, uniform, prep1.zeta0,
                                                 bohm::VelocityMode::standard(), opts_ctl);
    Vec sig0;
    sig0.fill(1.0);
    const double ctl =
        bohm::equivariance_distance_normal(broken, 0.0, prep1.zeta0, sig0, 1);
    check(o, ctl > 0.1, "misseed control KS " + fmt(ctl) + " not > 0.1");
    o.detail = "KS analytic " + fmt(worst) + ", solver " + fmt(worst_grid) + ", control " +
               fmt(ctl);
    return o;
}

// --- 7. Classical baselines -----------------------------------------------------

Outcome criterion_classical() {
    Outcome o;
    const double dt = 1e-3;

    // Local HJ residual along xi(t) for the three closed-form potentials.
    double worst_local = 0.0;
    for (int which = 0; which < 3; ++which) {
        SystemParams params;
        params.dim = 1;
        params.hbar = 0.0;
        if (which == 1) params.potential = LinearPotential{vec(1.0)};
        if (which == 2) params.potential = HarmonicPotential{1.0};
        const auto action =
            classical::local_action_evolve(vec(1.0), vec(0.5), params, 2.0, dt);
        for (const double t : {0.5, 1.0, 1.5})
            worst_local = std::max(worst_local,
                                   classical::local_hj_residual(action, params, t));
    }
    check(o, worst_local <= 1e-6, "local HJ residual " + fmt(worst_local) + " > 1e-6");

    // Statistical characteristics against the classical closed forms.
    GaussianPrep prep;
    prep.v0 = vec(0.4);
    const Vec K = vec(0.6);
    SystemParams params;
    params.dim = 1;
    params.hbar = 0.0;
    params.potential = LinearPotential{K};
    const int n = 10000;
    const std::vector<double> times = {0.0, 0.5, 1.0};
    const auto field = classical::statistical_hj_evolve(prep, params, times, n, 301);
    auto scen = analytic::make_linear_scenario(prep, K, 1.0, 1.0, 1);

    double worst_pos = 0.0, worst_action = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = field.positions[0][i][0];
        const double want = x0 + 0.4 + 0.5 * K[0]; // t = 1
        worst_pos = std::max(worst_pos, std::abs(field.positions[2][i][0] - want));
        const auto cl =
            analytic::classical_limit_fields(field.positions[2][i], 1.0, scen);
        worst_action = std::max(worst_action, std::abs(field.actions[2][i] - cl.action));
    }
    check(o, worst_pos <= 1e-10, "characteristic position err " + fmt(worst_pos));
    check(o, worst_action <= 1e-8, "characteristic action err " + fmt(worst_action));

    // Density via the positions themselves (exact transport): KS against the
    // closed-form CDF at t = 1.
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = field.positions[2][i][0];
    std::sort(xs.begin(), xs.end());
    const double c = scen.packet_center(1.0)[0];
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = 0.5 * std::erfc(-(xs[i] - c) / std::numbers::sqrt2);
        ks = std::max(ks, std::abs(F - (i + 1.0) / n));
        ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    }
    check(o, ks <= 1.95 / std::sqrt(static_cast<double>(n)),
          "ensemble KS " + fmt(ks) + " above the null band");

    // Harmonic focusing time.
    SystemParams harm;
    harm.dim = 1;
    harm.hbar = 0.0;
    harm.potential = HarmonicPotential{1.0};
    GaussianPrep rest;
    classical::EvolveOptions eopts;
    eopts.dt = dt;
    const std::vector<double> tg = {0.0, 2.0};
    const auto hf = classical::statistical_hj_evolve(rest, harm, tg, 400, 302, eopts);
    const double caustic_err =
        std::abs(hf.first_caustic_time - 0.5 * std::numbers::pi);
    check(o, hf.caustic_found() && caustic_err <= dt + 1e-9,
          "caustic time off by " + fmt(caustic_err));

    o.detail = "local " + fmt(worst_local) + ", action " + fmt(worst_action) + ", KS " +
               fmt(ks) + ", caustic err " + fmt(caustic_err);
    return o;
}

// --- 8. Least-squares functional -------------------------------------------------

Outcome criterion_lsq() {
    Outcome o;
    const double dt = 1e-3;

    // Linear scenario, analytic fields sampled on the grid.
    GaussianPrep prep;
    prep.v0 = vec(0.3);
    auto scen = analytic::make_linear_scenario(prep, vec(0.4), 1.0, 1.0, 1);
    const Grid g = make_grid_1d(-16.0, 16.0, 1024);
    auto prev = sample_linear_fields(g, 1.0 - dt, scen);
    auto mid = sample_linear_fields(g, 1.0, scen);
    auto next = sample_linear_fields(g, 1.0 + dt, scen);
    const auto lin = madelung::residuals(prev, mid, next, scen.params);
    check(o, lin.lsq_functional <= 1e-8,
          "linear lsq " + fmt(lin.lsq_functional) + " > 1e-8");

    // Coherent scenario, dim 2 (box sized for sqrt(rho) tails, see the grid
    // builders in the lab module).
    CoherentPrep cp;
    cp.x0 = vec(1.0, 0.0);
    auto cscen = analytic::make_coherent_scenario(cp, 1.0, 0.5, 2);
    const std::pair<double, double> b[2] = {{-8.0, 8.0}, {-8.0, 8.0}};
    const int pts[2] = {256, 256};
    const Grid g2 = make_grid(2, {b, 2}, {pts, 2});
    const auto cprev = sample_coherent_fields(g2, 1.0 - dt, cscen);
    const auto cmid = sample_coherent_fields(g2, 1.0, cscen);
    const auto cnext = sample_coherent_fields(g2, 1.0 + dt, cscen);
    const auto coh = madelung::residuals(cprev, cmid, cnext, cscen.params);
    check(o, coh.lsq_functional <= 1e-8,
          "coherent lsq " + fmt(coh.lsq_functional) + " > 1e-8");

    // Control: S doubled is not a solution.
    for (auto* f : {&prev, &mid, &next})
        for (auto& s : f->action) s *= 2.0;
    const auto broken = madelung::residuals(prev, mid, next, scen.params);
    check(o, broken.lsq_functional > 1e-4,
          "S x 2 control lsq " + fmt(broken.lsq_functional) + " not > 1e-4");
    o.detail = "lsq linear " + fmt(lin.lsq_functional) + ", coherent " +
               fmt(coh.lsq_functional) + ", control " + fmt(broken.lsq_functional);
    return o;
}

// --- 9. Double-slit conjecture evidence -------------------------------------------

Outcome criterion_double_slit() {
    Outcome o;
    lab::DoubleSlit slit;
    slit.v0 = vec(0.0, 1.0);
    lab::SweepBudget budget;
    budget.t_probe = 0.4;
    budget.dt = 2e-3;
    budget.base_points = 128;
    budget.snapshot_stride = 5;
    budget.n_trajectories = 10000;
    budget.threads = 2;
    const std::vector<double> hbars = {1.0, 0.5, 0.25, 0.125};
    const auto report = lab::hbar_sweep(slit, hbars, budget);

    double worst_ks = 0.0;
    for (const char* name : {"equivariance_standard", "equivariance_spin"})
        for (const double v : report.metric(name).values) worst_ks = std::max(worst_ks, v);
    check(o, worst_ks <= 0.02, "slit KS " + fmt(worst_ks) + " > 0.02");

    const auto& env = report.metric("envelope_l1").values;
    bool monotone = true;
    for (std::size_t i = 1; i < env.size(); ++i) monotone = monotone && env[i] < env[i - 1];
    check(o, monotone, "envelope L1 not monotonically decreasing");

    std::ostringstream d;
    d << "KS " << fmt(worst_ks) << ", envelope L1 ";
    for (const double v : env) d << fmt(v) << " ";
    o.detail = d.str();
    return o;
}

// --- 10. Determinism ---------------------------------------------------------------

Outcome criterion_determinism() {
    Outcome o;
    auto cfg = run::preset("bohm-1d");
    const fs::path base = fs::temp_directory_path() / "madelab-acceptance";
    fs::remove_all(base);
    const fs::path dir_a = base / "a";
    const fs::path dir_b = base / "b";

    cfg.out_dir = dir_a.string();
    run::execute(cfg);
    cfg.out_dir = dir_b.string();
    run::execute(cfg);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue; // carries wall-clock timings
        ++compared;
        if (slurp(entry.path()) != slurp(dir_b / name)) {
            check(o, false, name + " differs between identical runs");
        }
    }
    check(o, compared >= 7, "expected at least 7 data files");
    o.detail = std::to_string(compared) + " data files byte-identical across reruns";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "spreading-law", 10.0, criterion_spreading},
        {2, "linear-potential-exactness", 30.0, criterion_linear_exact},
        {3, "theorem3-convergence-order", 60.0, criterion_theorem3_order},
        {4, "theorem4-coherent-metrics", 60.0, criterion_theorem4},
        {5, "bohm-closed-form-oracles", 60.0, criterion_bohm_oracles},
        {6, "equivariance", 120.0, criterion_equivariance},
        {7, "classical-baselines", 30.0, criterion_classical},
        {8, "least-squares-criterion", 10.0, criterion_lsq},
        {9, "double-slit-evidence", 300.0, criterion_double_slit},
        {10, "determinism", 60.0, criterion_determinism},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool pass = out.pass && in_time;
        all_pass = all_pass && pass;
        std::printf("[%2d] %-28s %s  (%.1fs / limit %.0fs) %s%s\n", c.id, c.name.c_str(),
                    pass ? "PASS" : "FAIL", secs, c.time_limit_s, out.detail.c_str(),
                    in_time ? "" : " [over time budget]");
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
