#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "madelab/analytic.hpp"
#include "madelab/schrodinger.hpp"

using namespace madelab;

namespace {

SystemParams free_params_1d(double hbar = 1.0) {
    SystemParams p;
    p.dim = 1;
    p.hbar = hbar;
    return p;
}

double fitted_width(const WaveField& psi) {
    double mass = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double r = std::norm(psi.values[i]);
        mass += r;
        mean += r * psi.grid.coord(0, static_cast<int>(i));
    }
    mean /= mass;
    double mom = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double d = psi.grid.coord(0, static_cast<int>(i)) - mean;
        mom += std::norm(psi.values[i]) * d * d;
    }
    return std::sqrt(mom / mass);
}

} // namespace

TEST_CASE("norm is the plain Riemann sum") {
    const Grid g = make_grid_1d(-16.0, 16.0, 256);
    WaveField psi;
    psi.grid = g;
    psi.values.assign(g.size(), cplx(0.0, 0.0));
    CHECK(schrodinger::norm(psi) == 0.0);

    SystemParams p = free_params_1d();
    const WaveField prepared = prepare_wavefunction(GaussianPrep{}, p, g);
    CHECK(schrodinger::norm(prepared) == doctest::Approx(1.0).epsilon(1e-9));

    WaveField doubled = prepared;
    for (auto& v : doubled.values) v *= 2.0;
    CHECK(schrodinger::norm(doubled) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("plane-wave eigenstate: modulus fixed, phase advances by -hbar k^2 t / 2m") {
    const Grid g = make_grid_1d(0.0, 2.0 * std::numbers::pi, 64);
    SystemParams p = free_params_1d(0.7);
    p.mass = 1.3;

    const double k = 3.0 * 2.0 * std::numbers::pi / g.length(0); // a lattice mode
    WaveField psi;
    psi.grid = g;
    psi.values.resize(g.size());
    const double amp = 1.0 / std::sqrt(g.length(0));
    for (std::size_t i = 0; i < g.size(); ++i)
        psi.values[i] = std::polar(amp, k * g.coord(0, static_cast<int>(i)));

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 500;
    cfg.snapshot_stride = 500;
    cfg.boundary_tail_tol = 1.0; // a plane wave fills the box; the seam is fine
    const auto snaps = schrodinger::evolve(psi, p, cfg);
    const WaveField& fin = snaps.back();

    const double t = cfg.dt * cfg.n_steps;
    const double phase_shift = -p.hbar * k * k * t / (2.0 * p.mass);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        const cplx want =
            std::polar(amp, k * g.coord(0, static_cast<int>(i)) + phase_shift);
        CHECK(std::abs(fin.values[i] - want) < 1e-12);
    }
}

TEST_CASE("free packet spreads as sigma_hbar(t)") {
    const Grid g = make_grid_1d(-18.0, 18.0, 1024);
    SystemParams p = free_params_1d();
    const WaveField psi0 = prepare_wavefunction(GaussianPrep{}, p, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 1000;
    cfg.snapshot_stride = 250;
    const auto snaps = schrodinger::evolve(psi0, p, cfg);
    for (const auto& s : snaps) {
        const double want = analytic::sigma_hbar(s.time, p, 1.0);
        CHECK(std::abs(fitted_width(s) / want - 1.0) < 1e-3);
    }
}

TEST_CASE("norm drift and time reversibility") {
    const Grid g = make_grid_1d(-18.0, 18.0, 512);
    SystemParams p = free_params_1d();
    p.potential = LinearPotential{vec(0.4)};
    const WaveField psi0 = prepare_wavefunction(GaussianPrep{}, p, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 1000;
    cfg.snapshot_stride = 1000;
    const auto fwd = schrodinger::evolve(psi0, p, cfg);
    CHECK(std::abs(schrodinger::norm(fwd.back()) - 1.0) < 1e-12 * cfg.n_steps);

    schrodinger::PropagatorConfig back = cfg;
    back.dt = -cfg.dt;
    const auto rev = schrodinger::evolve(fwd.back(), p, back);
    double dev = 0.0;
    for (std::size_t i = 0; i < psi0.values.size(); ++i)
        dev = std::max(dev, std::abs(rev.back().values[i] - psi0.values[i]));
    CHECK(dev < 1e-10);
}

TEST_CASE("Strang splitting is second order in dt") {
    // The raw-psi error against the exact linear-potential evolution is a
    // global-phase drift of order dt^2; halving dt cuts it by about 4.
    const Grid g = make_grid_1d(-18.0, 18.0, 512);
    GaussianPrep prep;
    prep.v0 = vec(0.3);
    const Vec K = vec(0.5);
    auto scen = analytic::make_linear_scenario(prep, K, 1.0, 1.0, 1);
    const WaveField psi0 = prepare_wavefunction(prep, scen.params, g);

    auto run_error = [&](double dt) {
        schrodinger::PropagatorConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = static_cast<int>(std::lround(1.0 / dt));
        cfg.snapshot_stride = cfg.n_steps;
        const auto snaps = schrodinger::evolve(psi0, scen.params, cfg);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto f = analytic::linear_fields(g.node(i), 1.0, scen);
            const cplx want = std::polar(std::sqrt(f.rho), f.action / scen.params.hbar);
            err = std::max(err, std::abs(snaps.back().values[i] - want));
        }
        return err;
    };

    const double e1 = run_error(4e-3);
    const double e2 = run_error(2e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("coherent packet center follows the classical orbit") {
    const std::pair<double, double> b[2] = {{-8.0, 8.0}, {-8.0, 8.0}};
    const int pts[2] = {128, 128};
    const Grid g = make_grid(2, {b, 2}, {pts, 2});

    CoherentPrep prep;
    prep.x0 = vec(1.0, 0.0);
    prep.v0 = vec(0.0, 0.5);
    auto scen = analytic::make_coherent_scenario(prep, 1.0, 1.0, 2);
    const WaveField psi0 = prepare_wavefunction(prep, scen.params, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 5e-4;
    cfg.n_steps = static_cast<int>(std::lround(std::numbers::pi / cfg.dt));
    cfg.snapshot_stride = cfg.n_steps / 4;
    const auto snaps = schrodinger::evolve(psi0, scen.params, cfg);
    for (const auto& s : snaps) {
        double mass = 0.0;
        Vec mean = vec0();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = std::norm(s.values[i]);
            mass += r;
            mean += r * g.node(i);
        }
        mean = (1.0 / mass) * mean;
        CHECK(norm(mean - scen.xi(s.time)) < 1e-6);
    }
}

TEST_CASE("propagator flags seam leakage and non-finite states") {
    const Grid g = make_grid_1d(-9.0, 9.0, 256);
    SystemParams p = free_params_1d();
    GaussianPrep prep;
    prep.v0 = vec(2.0); // drifts toward the seam
    const WaveField psi0 = prepare_wavefunction(prep, p, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 4000;
    cfg.snapshot_stride = 100;
    CHECK_THROWS_AS(schrodinger::evolve(psi0, p, cfg), NumericalError);

    // Same run with the absorbing mask active completes (norm decays instead).
    schrodinger::PropagatorConfig masked = cfg;
    masked.absorbing_margin = 0.1;
    const auto snaps = schrodinger::evolve(psi0, p, masked);
    CHECK(schrodinger::norm(snaps.back()) < 1.0);

    WaveField poisoned = psi0;
    poisoned.values[3] = cplx(std::nan(""), 0.0);
    schrodinger::PropagatorConfig one = cfg;
    one.n_steps = 1;
    CHECK_THROWS_AS(schrodinger::evolve(poisoned, p, one), NumericalError);
}

TEST_CASE("config validation") {
    schrodinger::PropagatorConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.dt = 1e-3;
    cfg.absorbing_margin = 0.3;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.absorbing_margin = 0.0;
    cfg.n_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
