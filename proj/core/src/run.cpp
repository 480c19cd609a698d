#include "madelab/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "madelab/analytic.hpp"
#include "madelab/bohm.hpp"
#include "madelab/classical.hpp"
#include "madelab/csv.hpp"
#include "madelab/lab.hpp"
#include "madelab/madelung.hpp"
#include "madelab/schrodinger.hpp"

namespace madelab::run {

using nlohmann::json;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

const std::set<std::string> kKinds = {"linear-sweep",   "coherent-sweep",
                                      "double-slit-sweep", "bohm-linear-1d",
                                      "bohm-linear-3d-spin", "local-hj-demo"};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int kind_dim(const std::string& kind, int configured) {
    if (kind == "coherent-sweep" || kind == "double-slit-sweep") return 2;
    if (kind == "bohm-linear-1d") return 1;
    if (kind == "bohm-linear-3d-spin") return 3;
    return configured;
}

json vec_to_json(const Vec& v, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(v[i]);
    return a;
}

struct StageClock {
    json stages = json::object();
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void done(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        stages[name] = std::chrono::duration<double>(now - mark).count();
        mark = now;
    }
};

json metric_to_json(const lab::MetricSeries& m) {
    json j;
    j["name"] = m.name;
    j["values"] = m.values;
    if (m.fitted_order) j["fitted_order"] = *m.fitted_order;
    if (m.order_ci) j["order_ci"] = *m.order_ci;
    j["resolution_limited"] = m.resolution_limited;
    if (!m.note.empty()) j["note"] = m.note;
    return j;
}

json report_to_json(const lab::ConvergenceReport& r) {
    json j;
    j["scenario"] = r.scenario;
    j["classification"] = r.classification;
    j["hbars"] = r.hbars;
    json metrics = json::array();
    for (const auto& m : r.metrics) metrics.push_back(metric_to_json(m));
    j["metrics"] = metrics;
    return j;
}

void write_json(const std::filesystem::path& path, const json& j,
                std::vector<std::string>& files) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
    files.push_back(path.filename().string());
}

json base_tolerances(const RunConfig& cfg) {
    json t;
    t["prepare.norm_tolerance"] = PrepareOptions{}.norm_tolerance;
    t["prepare.tail_tolerance"] = PrepareOptions{}.tail_tolerance;
    t["prepare.min_sigma_cells"] = PrepareOptions{}.min_sigma_cells;
    t["prepare.min_box_sigmas"] = PrepareOptions{}.min_box_sigmas;
    t["propagator.boundary_tail_tol"] = schrodinger::PropagatorConfig{}.boundary_tail_tol;
    t["propagator.dt"] = cfg.dt;
    t["madelung.mass_threshold_frac"] = madelung::DecomposeOptions{}.mass_threshold_frac;
    t["bohm.cfl_density_frac"] = bohm::VelocityFieldOptions{}.cfl_density_frac;
    t["analytic.g_quadrature_tol"] = 1e-10;
    return t;
}

lab::SweepBudget budget_from(const RunConfig& cfg) {
    lab::SweepBudget b;
    b.t_probe = cfg.t_final;
    b.dt = cfg.dt;
    b.base_points = cfg.grid_points;
    b.snapshot_stride = cfg.snapshot_stride;
    b.solver_path = cfg.solver_path;
    b.n_trajectories = cfg.n_samples;
    b.seed = cfg.seed;
    b.threads = cfg.threads;
    return b;
}

analytic::LinearScenario linear_scenario_from(const RunConfig& cfg, int dim, double hbar) {
    GaussianPrep prep;
    prep.zeta0 = cfg.zeta0;
    prep.sigma0 = cfg.sigma0;
    prep.v0 = cfg.v0;
    return analytic::make_linear_scenario(prep, cfg.force, cfg.mass, hbar, dim);
}

// ---------------------------------------------------------------------------
// Per-kind run bodies. Each returns the report JSON and appends counts.
// ---------------------------------------------------------------------------

json run_linear_sweep(const RunConfig& cfg, const std::filesystem::path& out,
                      std::vector<std::string>& files, StageClock& clock, json& counts) {
    const auto scen = linear_scenario_from(cfg, kind_dim(cfg.kind, cfg.dim), cfg.hbars[0]);
    const auto report = lab::hbar_sweep(lab::LinearGaussian{scen}, cfg.hbars,
                                        budget_from(cfg));
    clock.done("sweep");

    // Field dump at the largest hbar: exact quantum pair and its Q, node by node.
    const Grid grid = lab::linear_sweep_grid(scen, cfg.t_final, budget_from(cfg));
    for (const double t : {0.0, cfg.t_final}) {
        MadelungFields f;
        f.grid = grid;
        f.time = t;
        f.rho.resize(grid.size());
        f.action.resize(grid.size());
        std::vector<double> q(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto s = analytic::linear_fields(grid.node(i), t, scen);
            f.rho[i] = s.rho;
            f.action[i] = s.action;
            q[i] = analytic::linear_quantum_potential(grid.node(i), t, scen);
        }
        const std::string name =
            t == 0.0 ? "fields_linear_t0.csv" : "fields_linear_tfinal.csv";
        csv::write_field(out / name, f, q);
        files.push_back(name);
    }
    clock.done("field-dump");

    counts["resolution_limited_metrics"] = 0;
    for (const auto& m : report.metrics)
        if (m.resolution_limited)
            counts["resolution_limited_metrics"] =
                counts["resolution_limited_metrics"].get<int>() + 1;
    return report_to_json(report);
}

json run_coherent_sweep(const RunConfig& cfg, const std::filesystem::path& out,
                        std::vector<std::string>& files, StageClock& clock, json& counts) {
    CoherentPrep prep;
    prep.x0 = cfg.x0;
    prep.v0 = cfg.v0;
    prep.omega = cfg.omega;
    const auto scen =
        analytic::make_coherent_scenario(prep, cfg.mass, cfg.hbars[0], 2);
    const auto report = lab::hbar_sweep(lab::HarmonicCoherent{scen}, cfg.hbars,
                                        budget_from(cfg));
    clock.done("sweep");

    const Grid grid = lab::coherent_sweep_grid(scen, budget_from(cfg));
    MadelungFields f;
    f.grid = grid;
    f.time = cfg.t_final;
    f.rho.resize(grid.size());
    f.action.resize(grid.size());
    std::vector<double> q(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto s = analytic::coherent_fields(grid.node(i), cfg.t_final, scen);
        f.rho[i] = s.rho;
        f.action[i] = s.action;
        q[i] = analytic::coherent_quantum_potential(grid.node(i), cfg.t_final, scen);
    }
    csv::write_field(out / "fields_coherent_tfinal.csv", f, q);
    files.push_back("fields_coherent_tfinal.csv");
    clock.done("field-dump");

    counts["resolution_limited_metrics"] = 0;
    for (const auto& m : report.metrics)
        if (m.resolution_limited)
            counts["resolution_limited_metrics"] =
                counts["resolution_limited_metrics"].get<int>() + 1;
    return report_to_json(report);
}

json run_double_slit(const RunConfig& cfg, const std::filesystem::path& out,
                     std::vector<std::string>& files, StageClock& clock, json& counts) {
    lab::DoubleSlit slit;
    slit.sigma0 = cfg.sigma0;
    slit.separation = cfg.separation;
    slit.v0 = cfg.v0;
    slit.mass = cfg.mass;
    slit.hbar = cfg.hbars[0];
    const auto report = lab::hbar_sweep(slit, cfg.hbars, budget_from(cfg));
    clock.done("sweep");

    // One extra run at the largest hbar for the data files.
    SystemParams params = slit.params();
    params.hbar = cfg.hbars[0];
    const Grid grid = lab::double_slit_grid(slit, params.hbar, cfg.t_final,
                                            budget_from(cfg));
    WaveField psi = prepare_wavefunction(slit.left(), params, grid);
    {
        const WaveField right = prepare_wavefunction(slit.right(), params, grid);
        for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] += right.values[i];
        const double nrm = schrodinger::norm(psi);
        for (auto& v : psi.values) v /= std::sqrt(nrm);
    }
    const int n_steps = std::max(8, static_cast<int>(std::lround(cfg.t_final / cfg.dt)));
    schrodinger::PropagatorConfig pcfg;
    pcfg.dt = cfg.t_final / n_steps;
    pcfg.n_steps = n_steps;
    pcfg.snapshot_stride = cfg.snapshot_stride;
    std::vector<MadelungFields> snaps;
    madelung::DecomposeInfo last_info;
    schrodinger::evolve_stream(psi, params, pcfg, [&](const WaveField& s) {
        snaps.push_back(madelung::decompose(s, params, {}, &last_info));
    });
    clock.done("evolve");

    csv::write_field(out / "fields_slit_tfinal.csv", snaps.back(),
                     madelung::quantum_potential(snaps.back(), params));
    files.push_back("fields_slit_tfinal.csv");

    const auto samples = lab::double_slit_samples(slit, cfg.n_samples, cfg.seed);
    bohm::IntegrateOptions opts;
    opts.threads = cfg.threads;
    opts.record_times = {snaps.front().time, snaps[snaps.size() / 2].time,
                         snaps.back().time};
    const auto mode = cfg.velocity_mode == "spin-current"
                          ? bohm::VelocityMode::spin_current({0.0, 0.0, 1.0})
                          : bohm::VelocityMode::standard();
    const auto run = bohm::integrate_ensemble(snaps, samples, vec0(), params, mode, opts);
    csv::write_trajectories(out / "trajectories_slit.csv", run, 2);
    files.push_back("trajectories_slit.csv");
    clock.done("trajectories");

    counts["unwrap_defects_final"] = last_info.defect_count;
    counts["support_components_final"] = last_info.component_count;
    counts["flagged_samples"] = run.flagged_count;
    return report_to_json(report);
}

json run_bohm_linear(const RunConfig& cfg, const std::filesystem::path& out,
                     std::vector<std::string>& files, StageClock& clock, json& counts) {
    const bool spin = cfg.kind == "bohm-linear-3d-spin";
    const int dim = spin ? 3 : 1;
    const auto scen = linear_scenario_from(cfg, dim, cfg.hbar);
    scen.validate();

    const auto mode = spin ? bohm::VelocityMode::spin_current({0.0, 0.0, 1.0})
                           : bohm::VelocityMode::standard();
    const auto flow = bohm::analytic_flow(scen, mode);
    const bohm::CallableVelocitySource source(flow, 0.0, cfg.t_final, cfg.dt);

    const auto samples = bohm::sample_initial(scen.prep, dim, cfg.n_samples, cfg.seed);
    bohm::IntegrateOptions opts;
    opts.threads = cfg.threads;
    for (int k = 0; k <= 4; ++k) opts.record_times.push_back(cfg.t_final * k / 4.0);

    const auto run = bohm::integrate_ensemble(source, samples, scen.prep.zeta0, mode, opts);
    clock.done("integrate");

    // Endpoint error against the closed forms.
    double max_rel = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec got = run.trajectories[i].positions.back();
        Vec want;
        if (spin) {
            want = analytic::bohm_trajectory_3d_spin(samples[i].eta0, cfg.t_final, scen);
        } else {
            want = vec0();
            want[0] = analytic::bohm_trajectory_1d(samples[i].eta0[0], cfg.t_final, scen);
        }
        const double scale = std::max(1.0, norm(want));
        max_rel = std::max(max_rel, norm(got - want) / scale);
    }

    // Equivariance against the closed-form normal marginals.
    json ks = json::array();
    if (cfg.n_samples >= 1000) {
        for (const double t : opts.record_times) {
            const double st = analytic::sigma_hbar(t, scen.params, scen.prep.sigma0);
            Vec sig;
            sig.fill(st);
            ks.push_back(bohm::equivariance_distance_normal(run, t, scen.packet_center(t),
                                                            sig, dim));
        }
    }
    clock.done("metrics");

    csv::write_trajectories(out / "trajectories.csv", run, dim);
    files.push_back("trajectories.csv");

    if (!spin) {
        // Closed-form field dump on a 1D grid wide enough for the run.
        const double smax = analytic::sigma_hbar(cfg.t_final, scen.params, scen.prep.sigma0);
        const double c0 = scen.prep.zeta0[0];
        const double c1 = scen.packet_center(cfg.t_final)[0];
        const Grid grid = make_grid_1d(std::min(c0, c1) - 8.5 * smax,
                                       std::max(c0, c1) + 8.5 * smax, cfg.grid_points);
        for (std::size_t k = 0; k < opts.record_times.size(); ++k) {
            const double t = opts.record_times[k];
            MadelungFields f;
            f.grid = grid;
            f.time = t;
            f.rho.resize(grid.size());
            f.action.resize(grid.size());
            std::vector<double> q(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto s = analytic::linear_fields(grid.node(i), t, scen);
                f.rho[i] = s.rho;
                f.action[i] = s.action;
                q[i] = analytic::linear_quantum_potential(grid.node(i), t, scen);
            }
            const std::string name = "fields_t" + std::to_string(k) + ".csv";
            csv::write_field(out / name, f, q);
            files.push_back(name);
        }
    }
    clock.done("field-dump");

    counts["flagged_samples"] = run.flagged_count;

    json rep;
    rep["scenario"] = spin ? "bohm-linear-3d-spin" : "bohm-linear-1d";
    rep["velocity_mode"] = mode.name();
    rep["hbar"] = cfg.hbar;
    rep["t_final"] = cfg.t_final;
    rep["n_samples"] = cfg.n_samples;
    rep["endpoint_max_rel_error"] = max_rel;
    rep["equivariance_ks"] = ks;
    rep["record_times"] = opts.record_times;
    rep["dt_used"] = run.dt_used;
    return rep;
}

json run_local_hj(const RunConfig& cfg, const std::filesystem::path& out,
                  std::vector<std::string>& files, StageClock& clock, json& counts) {
    json rep;
    rep["scenario"] = "local-hj-demo";
    json residuals = json::object();

    struct Case {
        const char* name;
        PotentialSpec potential;
    };
    const Case cases[] = {
        {"free", FreePotential{}},
        {"linear", LinearPotential{cfg.force}},
        {"harmonic", HarmonicPotential{cfg.omega}},
    };

    for (const auto& c : cases) {
        SystemParams params;
        params.mass = cfg.mass;
        params.hbar = 0.0; // classical module: no wave function here
        params.dim = cfg.dim;
        params.potential = c.potential;

        const auto action =
            classical::local_action_evolve(cfg.zeta0, cfg.v0, params, cfg.t_final, cfg.dt);
        double worst = 0.0;
        for (const double frac : {0.25, 0.5, 0.75})
            worst = std::max(worst,
                             classical::local_hj_residual(action, params, frac * cfg.t_final));
        residuals[c.name] = worst;

        // xi(t) and g(t) per potential.
        const std::string name = std::string("local_action_") + c.name + ".csv";
        std::ofstream tf(out / name);
        if (!tf) throw IoError("cannot open " + (out / name).string());
        tf << "time";
        for (int a = 0; a < cfg.dim; ++a) tf << ",x" << (a + 1);
        for (int a = 0; a < cfg.dim; ++a) tf << ",v" << (a + 1);
        tf << ",g\n";
        const auto& tr = action.trajectory;
        for (std::size_t k = 0; k < tr.times.size(); k += 10) {
            tf << csv::format_double(tr.times[k]);
            for (int a = 0; a < cfg.dim; ++a)
                tf << "," << csv::format_double(tr.positions[k][a]);
            for (int a = 0; a < cfg.dim; ++a)
                tf << "," << csv::format_double(tr.velocities[k][a]);
            tf << "," << csv::format_double(action.g[k]) << "\n";
        }
        files.push_back(name);
    }
    rep["local_hj_residual_max"] = residuals;
    clock.done("local-actions");

    // Statistical ensemble in the harmonic well: characteristics focus at
    // omega t = pi/2 when started at rest.
    SystemParams params;
    params.mass = cfg.mass;
    params.hbar = 0.0;
    params.dim = cfg.dim;
    params.potential = HarmonicPotential{cfg.omega};
    GaussianPrep prep;
    prep.zeta0 = cfg.zeta0;
    prep.sigma0 = cfg.sigma0;
    prep.v0 = vec0();
    const std::vector<double> t_grid = {0.0, 0.5 * cfg.t_final, cfg.t_final};
    const auto field = classical::statistical_hj_evolve(prep, params, t_grid,
                                                        cfg.n_samples, cfg.seed);
    rep["harmonic_caustic_time"] =
        field.caustic_found() ? json(field.first_caustic_time) : json();
    counts["caustic_detected"] = field.caustic_found();
    clock.done("statistical");
    return rep;
}

} // namespace

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> bad;
    auto req = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };

    req(kKinds.count(cfg.kind) == 1, "kind: unknown run kind '" + cfg.kind + "'");
    req(cfg.mass > 0.0 && std::isfinite(cfg.mass), "mass: must be positive and finite");
    req(cfg.sigma0 > 0.0 && std::isfinite(cfg.sigma0), "sigma0: must be positive and finite");
    req(cfg.omega > 0.0 && std::isfinite(cfg.omega), "omega: must be positive and finite");
    req(cfg.separation > 0.0, "separation: must be positive");
    req(cfg.dim >= 1 && cfg.dim <= 3, "dim: must be 1, 2 or 3");
    req(cfg.t_final > 0.0, "t_final: must be positive");
    req(cfg.dt > 0.0 && cfg.dt <= cfg.t_final, "dt: must be in (0, t_final]");
    req(is_power_of_two(cfg.grid_points) && cfg.grid_points >= 8,
        "grid_points: must be a power of two >= 8");
    req(cfg.snapshot_stride >= 1, "snapshot_stride: must be >= 1");
    req(cfg.n_samples >= 1, "n_samples: must be >= 1");
    req(cfg.threads >= 1, "threads: must be >= 1");
    req(!cfg.out_dir.empty(), "out_dir: must not be empty");
    req(cfg.velocity_mode == "standard" || cfg.velocity_mode == "spin-current",
        "velocity_mode: must be 'standard' or 'spin-current'");

    const bool sweep_kind = cfg.kind.ends_with("sweep");
    if (sweep_kind) {
        req(!cfg.hbars.empty(), "hbars: sweep kinds need a non-empty hbar list");
        for (std::size_t i = 0; i < cfg.hbars.size(); ++i) {
            if (!(cfg.hbars[i] > 0.0)) {
                bad.push_back("hbars: entries must be positive");
                break;
            }
            if (i > 0 && !(cfg.hbars[i] < cfg.hbars[i - 1])) {
                bad.push_back("hbars: entries must be strictly decreasing");
                break;
            }
        }
    } else {
        req(cfg.hbar > 0.0 || cfg.kind == "local-hj-demo",
            "hbar: must be positive for wave-function kinds");
    }
    if (cfg.kind == "bohm-linear-3d-spin")
        req(cfg.force[0] == 0.0 && cfg.force[1] == 0.0,
            "force: the 3d spin scenario needs K along axis 3");
    return bad;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    std::vector<std::string> bad;

    const std::set<std::string> known = {
        "kind",       "mass",       "hbar",      "sigma0",         "zeta0",
        "v0",         "force",      "x0",        "omega",          "separation",
        "dim",        "hbars",      "t_final",   "dt",             "grid_points",
        "snapshot_stride", "solver_path", "n_samples", "velocity_mode", "seed",
        "threads",    "out_dir"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) bad.push_back("unknown config key: " + key);
    }

    auto get_vec = [&](const char* key, Vec& target) {
        if (!j.contains(key)) return;
        const auto& a = j.at(key);
        if (!a.is_array() || a.size() > kMaxDim) {
            bad.push_back(std::string(key) + ": must be an array of up to 3 numbers");
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) target[i] = a[i].get<double>();
    };

    try {
        if (j.contains("kind")) cfg.kind = j.at("kind").get<std::string>();
        if (j.contains("mass")) cfg.mass = j.at("mass").get<double>();
        if (j.contains("hbar")) cfg.hbar = j.at("hbar").get<double>();
        if (j.contains("sigma0")) cfg.sigma0 = j.at("sigma0").get<double>();
        get_vec("zeta0", cfg.zeta0);
        get_vec("v0", cfg.v0);
        get_vec("force", cfg.force);
        get_vec("x0", cfg.x0);
        if (j.contains("omega")) cfg.omega = j.at("omega").get<double>();
        if (j.contains("separation")) cfg.separation = j.at("separation").get<double>();
        if (j.contains("dim")) cfg.dim = j.at("dim").get<int>();
        if (j.contains("hbars")) cfg.hbars = j.at("hbars").get<std::vector<double>>();
        if (j.contains("t_final")) cfg.t_final = j.at("t_final").get<double>();
        if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
        if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<int>();
        if (j.contains("snapshot_stride"))
            cfg.snapshot_stride = j.at("snapshot_stride").get<int>();
        if (j.contains("solver_path")) cfg.solver_path = j.at("solver_path").get<bool>();
        if (j.contains("n_samples")) cfg.n_samples = j.at("n_samples").get<int>();
        if (j.contains("velocity_mode"))
            cfg.velocity_mode = j.at("velocity_mode").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        bad.push_back(std::string("json: ") + e.what());
    }

    const auto more = validate(cfg);
    bad.insert(bad.end(), more.begin(), more.end());
    if (!bad.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ValidationError(msg);
    }
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["kind"] = cfg.kind;
    j["mass"] = cfg.mass;
    j["hbar"] = cfg.hbar;
    j["sigma0"] = cfg.sigma0;
    const int dim = kind_dim(cfg.kind, cfg.dim);
    j["zeta0"] = vec_to_json(cfg.zeta0, dim);
    j["v0"] = vec_to_json(cfg.v0, dim);
    j["force"] = vec_to_json(cfg.force, dim);
    j["x0"] = vec_to_json(cfg.x0, dim);
    j["omega"] = cfg.omega;
    j["separation"] = cfg.separation;
    j["dim"] = dim;
    j["hbars"] = cfg.hbars;
    j["t_final"] = cfg.t_final;
    j["dt"] = cfg.dt;
    j["grid_points"] = cfg.grid_points;
    j["snapshot_stride"] = cfg.snapshot_stride;
    j["solver_path"] = cfg.solver_path;
    j["n_samples"] = cfg.n_samples;
    j["velocity_mode"] = cfg.velocity_mode;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

std::vector<PresetInfo> list_presets() {
    return {
        {"linear-theorem3",
         "Gaussian packet in a linear potential; hbar sweep of (rho, S) against the "
         "fixed-width classical ensemble, order-2 fit expected"},
        {"coherent-theorem4",
         "2D harmonic coherent state; width collapse onto the classical path, Q on the "
         "trajectory, affine action structure across the sweep"},
        {"bohm-1d",
         "trajectory ensemble through the exact 1D linear-potential flow; endpoint match "
         "to the closed-form spreading path plus equivariance"},
        {"bohm-3d-spin",
         "spin-current velocity law in 3D with K along the spin axis; transverse spiral "
         "closed form vs the integrated ensemble"},
        {"double-slit",
         "two displaced packets, free flight; equivariance and monotone approach to the "
         "two-beam classical envelope over an hbar sweep"},
        {"local-hj-demo",
         "single classical trajectory with its local action for free/linear/harmonic "
         "potentials; residual along the path and the harmonic focusing time"},
    };
}

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.out_dir = "out-" + name;
    if (name == "linear-theorem3") {
        cfg.kind = "linear-sweep";
        cfg.dim = 1;
        cfg.sigma0 = 1.0;
        cfg.v0 = vec(0.25);
        cfg.force = vec(0.25);
        cfg.hbars = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
        cfg.t_final = 1.0;
        cfg.dt = 1e-3;
        cfg.grid_points = 256;
    } else if (name == "coherent-theorem4") {
        cfg.kind = "coherent-sweep";
        cfg.dim = 2;
        cfg.x0 = vec(1.0, 0.0);
        cfg.v0 = vec(0.0, 0.5);
        cfg.omega = 1.0;
        cfg.hbars = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
        cfg.t_final = 1.0;
        cfg.dt = 1e-3;
        cfg.grid_points = 64;
    } else if (name == "bohm-1d") {
        cfg.kind = "bohm-linear-1d";
        cfg.dim = 1;
        cfg.hbar = 1.0;
        cfg.v0 = vec(0.5);
        cfg.force = vec(0.2);
        cfg.t_final = 2.0;
        cfg.dt = 1e-3;
        cfg.n_samples = 2000;
        cfg.grid_points = 512;
    } else if (name == "bohm-3d-spin") {
        cfg.kind = "bohm-linear-3d-spin";
        cfg.dim = 3;
        cfg.hbar = 1.0;
        cfg.v0 = vec(0.2, 0.0, 0.1);
        cfg.force = vec(0.0, 0.0, 0.3);
        cfg.velocity_mode = "spin-current";
        cfg.t_final = 2.0;
        cfg.dt = 1e-3;
        cfg.n_samples = 1000;
    } else if (name == "double-slit") {
        cfg.kind = "double-slit-sweep";
        cfg.dim = 2;
        cfg.sigma0 = 0.25;
        cfg.separation = 2.0;
        cfg.v0 = vec(0.0, 1.0);
        cfg.hbars = {1.0, 0.5, 0.25, 0.125};
        cfg.t_final = 0.4;
        cfg.dt = 2e-3;
        cfg.grid_points = 128;
        cfg.snapshot_stride = 5;
        cfg.n_samples = 2000;
    } else if (name == "local-hj-demo") {
        cfg.kind = "local-hj-demo";
        cfg.dim = 1;
        cfg.zeta0 = vec(1.0);
        cfg.v0 = vec(0.0);
        cfg.force = vec(1.0);
        cfg.omega = 1.0;
        cfg.t_final = 2.0;
        cfg.dt = 1e-3;
        cfg.n_samples = 400;
    } else {
        throw ValidationError("unknown preset '" + name + "'");
    }
    return cfg;
}

RunResult execute(const RunConfig& cfg) {
    const auto bad = validate(cfg);
    if (!bad.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ValidationError(msg);
    }

    const std::filesystem::path out(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string());

    RunResult result;
    StageClock clock;
    json counts = json::object();
    json report;

    if (cfg.kind == "linear-sweep")
        report = run_linear_sweep(cfg, out, result.files_written, clock, counts);
    else if (cfg.kind == "coherent-sweep")
        report = run_coherent_sweep(cfg, out, result.files_written, clock, counts);
    else if (cfg.kind == "double-slit-sweep")
        report = run_double_slit(cfg, out, result.files_written, clock, counts);
    else if (cfg.kind == "bohm-linear-1d" || cfg.kind == "bohm-linear-3d-spin")
        report = run_bohm_linear(cfg, out, result.files_written, clock, counts);
    else
        report = run_local_hj(cfg, out, result.files_written, clock, counts);

    write_json(out / "report.json", report, result.files_written);

    json manifest;
    manifest["artifact"] = {{"name", "madelab"}, {"version", kArtifactVersion}};
    manifest["config"] = config_to_json(cfg);
    manifest["tolerances"] = base_tolerances(cfg);
    manifest["counts"] = counts;
    manifest["wall_clock_seconds"] = clock.stages;
    manifest["files"] = result.files_written;
    write_json(out / "manifest.json", manifest, result.files_written);
    return result;
}

} // namespace madelab::run
