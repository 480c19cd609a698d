#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "madelab/analytic.hpp"
#include "madelab/types.hpp"

namespace madelab::lab {

// Sweep scenarios. The hbar stored inside each scenario is a template value;
// the sweep overrides it point by point.
struct LinearGaussian {
    analytic::LinearScenario scen;
};

struct HarmonicCoherent {
    analytic::CoherentScenario scen;
};

// Two displaced copies of the same Gaussian prep, equal weights, renormalized;
// free potential, dim 2, slit axis 0.
struct DoubleSlit {
    double sigma0 = 0.25;
    double separation = 2.0;
    Vec v0 = vec0();
    double mass = 1.0;
    double hbar = 1.0;

    GaussianPrep left() const;
    GaussianPrep right() const;
    SystemParams params() const;
};

using Scenario = std::variant<LinearGaussian, HarmonicCoherent, DoubleSlit>;

// Width-fixed initial density: the packets stay classical as hbar shrinks.
// The coherent state's width collapses with hbar instead.
std::string scenario_name(const Scenario& s);
std::string scenario_classification(const Scenario& s);

struct SweepBudget {
    double t_probe = 1.0;      // comparison time
    double dt = 1e-3;          // propagator step
    int base_points = 256;     // grid points per axis floor (raised as hbar needs)
    int snapshot_stride = 10;  // solver snapshot cadence for trajectory work
    bool solver_path = true;   // run the spectral propagator next to the closed forms
    int n_trajectories = 2000; // ensemble size for trajectory/equivariance metrics
    std::uint64_t seed = 20250801;
    int threads = 1;
};

struct MetricSeries {
    std::string name;
    std::vector<double> values; // one per hbar, aligned with ConvergenceReport::hbars
    std::optional<double> fitted_order;
    std::optional<double> order_ci;
    bool resolution_limited = false;
    std::string note;
};

struct ConvergenceReport {
    std::string scenario;
    std::string classification;
    std::vector<double> hbars;
    std::vector<MetricSeries> metrics;

    const MetricSeries& metric(const std::string& name) const;
};

struct OrderFit {
    double order = 0.0;
    double ci = 0.0; // standard error of the fitted slope
    int used_points = 0;
    std::string note;
};

// Least-squares slope of log(error) against log(hbar). Exact zeros are
// dropped with a note; negative entries are rejected.
OrderFit fit_order(std::span<const double> errors, std::span<const double> hbars);

// Probe stencil for pointwise field comparisons: the center plus 16 points
// per axis spread across +-3 sigma.
std::vector<Vec> probe_stencil(const Vec& center, double sigma, int dim);

// Grid builders that keep the spectral budget ahead of the model error for
// every hbar in a sweep (box from drift + 8 sigma, spacing from the packet's
// momentum content).
Grid linear_sweep_grid(const analytic::LinearScenario& scen, double t_final,
                       const SweepBudget& budget);
Grid coherent_sweep_grid(const analytic::CoherentScenario& scen, const SweepBudget& budget);
Grid double_slit_grid(const DoubleSlit& slit, double hbar, double t_final,
                      const SweepBudget& budget);

// Initial offsets from the slit midpoint distributed as the two-beam rho0
// (mixture of the two displaced Gaussians).
std::vector<BohmSample> double_slit_samples(const DoubleSlit& slit, int n,
                                            std::uint64_t seed);

// Runs the sweep and assembles per-hbar error metrics with fitted orders.
// Preconditions: hbars positive, strictly decreasing, geometric; at least 5
// values spanning a decade for the order-fitting scenarios, at least 4 for
// the double slit (which gets property metrics only, no order claims).
ConvergenceReport hbar_sweep(const Scenario& scenario, std::span<const double> hbars,
                             const SweepBudget& budget);

} // namespace madelab::lab
