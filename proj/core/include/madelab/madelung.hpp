#pragma once

#include <cstdint>
#include <vector>

#include "madelab/types.hpp"

namespace madelab::madelung {

struct DecomposeOptions {
    // Nodes with rho below this fraction of max(rho) carry no usable phase.
    double mass_threshold_frac = 1e-10;
};

struct DecomposeInfo {
    double threshold = 0.0;        // absolute density cutoff used
    std::size_t seed_node = 0;     // density maximum, unwrap origin
    double gauge_constant = 0.0;   // S at the seed node (principal branch)
    int component_count = 0;       // disconnected support components (>1 is flagged)
    int defect_count = 0;          // edges left inconsistent by vortices
    std::vector<std::uint8_t> supported; // 1 = above threshold, cleanly unwrapped
};

// psi -> (rho, S): rho = |psi|^2, S = hbar * unwrapped phase. Unwrapping runs
// a breadth-first flood from the density maximum, correcting each edge to the
// nearest 2*pi branch; disconnected support components get their own gauge
// seed and are reported. Nodes adjacent to residual defects (vortices) are
// masked out of `supported`.
MadelungFields decompose(const WaveField& psi, const SystemParams& params,
                         const DecomposeOptions& opts = {}, DecomposeInfo* info = nullptr);

// (rho, S) -> sqrt(rho) exp(i S / hbar).
WaveField recompose(const MadelungFields& fields, const SystemParams& params);

// Q = -(hbar^2 / 2m) lap(sqrt rho) / sqrt(rho), spectral Laplacian; NaN below
// the mass threshold.
std::vector<double> quantum_potential(const MadelungFields& fields,
                                      const SystemParams& params,
                                      const DecomposeOptions& opts = {});

struct ResidualReport {
    double hj_residual_l2 = 0.0;         // |dS/dt + (grad S)^2/2m + V + Q|, L2 over support
    double continuity_residual_l2 = 0.0; // |drho/dt + div(rho grad S / m)|, L2 over support
    double lsq_functional = 0.0;         // int rho * (HJ residual)^2 dx, Q included
    double lsq_functional_no_q = 0.0;    // same functional with Q omitted
    double mass_threshold = 0.0;
    std::size_t supported_nodes = 0;
    // Global 2*pi*hbar branch mismatches between snapshots, fixed before
    // differencing; nonzero entries are worth surfacing in run reports.
    double gauge_correction_prev = 0.0;
    double gauge_correction_next = 0.0;
};

// Madelung residuals from three uniformly spaced snapshots (centered time
// differences). Spatial derivatives are taken spectrally through the
// recomposed psi, which stays periodic where the raw unwrapped S need not be.
ResidualReport residuals(const MadelungFields& prev, const MadelungFields& mid,
                         const MadelungFields& next, const SystemParams& params,
                         const DecomposeOptions& opts = {});

} // namespace madelab::madelung
