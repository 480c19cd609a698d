#pragma once

#include <functional>
#include <vector>

#include "madelab/types.hpp"

namespace madelab::schrodinger {

struct PropagatorConfig {
    double dt = 1e-3;
    int n_steps = 1000;
    enum class Splitting { Strang };
    Splitting splitting = Splitting::Strang;
    double absorbing_margin = 0.0;   // cosine-ramp mask width, fraction of box per axis
    int snapshot_stride = 1;         // emit every stride-th step; t0 and final always
    double boundary_tail_tol = 1e-8; // mass allowed near the seam when no mask is active

    void validate() const;
};

// Discrete norm: plain Riemann sum times cell volume (the natural quadrature
// on a periodic grid).
double norm(const WaveField& psi);

// Strang split-step propagation of i hbar dpsi/dt = -(hbar^2/2m) lap psi + V psi:
// half potential phase, full kinetic step exp(-i hbar k^2 dt / 2m) in spectral
// space, half potential phase. Norm is conserved to rounding unless the
// absorbing mask is active. dt may be negative (reverse evolution).
void evolve_stream(const WaveField& psi0, const SystemParams& params,
                   const PropagatorConfig& cfg,
                   const std::function<void(const WaveField&)>& sink);

std::vector<WaveField> evolve(const WaveField& psi0, const SystemParams& params,
                              const PropagatorConfig& cfg);

} // namespace madelab::schrodinger
