#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "madelab/types.hpp"

namespace madelab::classical {

// Ensemble of identical particles prepared alike: positions drawn from rho0,
// velocities all equal to grad S0 / m = v0.
struct ClassicalEnsemble {
    std::vector<Vec> positions;
    std::vector<Vec> velocities;
};

// Characteristics of the ensemble Hamilton-Jacobi system, sampled at the
// requested times. Per-particle action accumulates the Lagrangian on top of
// S0(x_i); the Jacobian determinant of the flow map (finite differences from
// paired auxiliary characteristics) monitors caustics.
struct CharacteristicField {
    std::vector<double> times;
    std::vector<std::vector<Vec>> positions;     // [time][particle]
    std::vector<std::vector<Vec>> velocities;    // [time][particle]
    std::vector<std::vector<double>> actions;    // [time][particle]
    std::vector<std::vector<double>> jacobians;  // [time][particle]
    double first_caustic_time = std::numeric_limits<double>::infinity();
    int dim = 1;

    bool caustic_found() const { return std::isfinite(first_caustic_time); }
};

struct EvolveOptions {
    double dt = 1e-3;              // internal RK4 step
    double jacobian_offset = 1e-6; // auxiliary offset, in units of sigma0
};

// Integrates Newton's equation from (x0, v0) and accumulates
// dg/dt = -m v^2/2 - V(xi) + grad V(xi) . xi   (g(0) = 0),
// so that S(x,t) = m xi'(t).x + g(t) is available along the way.
LocalAction local_action_evolve(const Vec& x0, const Vec& v0, const SystemParams& params,
                                double t_max, double dt);

// |dS/dt + (grad S)^2/2m + V| at x = xi(t), time derivative by centered
// differencing of the stored samples. The companion identity
// xi' = grad S(xi)/m holds exactly by construction and is asserted inside.
double local_hj_residual(const LocalAction& action, const SystemParams& params, double t);

CharacteristicField statistical_hj_evolve(const GaussianPrep& prep,
                                          const SystemParams& params,
                                          std::span<const double> t_grid, int n_particles,
                                          std::uint64_t seed,
                                          const EvolveOptions& opts = {});

// Gaussian kernel density estimate (Silverman bandwidth) of the ensemble at a
// stored time, evaluated at the given points. Refuses times at or past the
// first caustic, where the single-valued field no longer exists.
std::vector<double> reconstruct_density(const CharacteristicField& field,
                                        std::size_t time_index,
                                        std::span<const Vec> eval_points);

// Silverman rule-of-thumb bandwidth for one axis.
double silverman_bandwidth(std::span<const double> samples, int dim);

} // namespace madelab::classical
