#pragma once

#include "madelab/types.hpp"

namespace madelab::analytic {

// Gaussian packet, hbar-independent width, in V(x) = -K.x (K = 0 for free).
struct LinearScenario {
    GaussianPrep prep;
    Vec force = vec0(); // K
    SystemParams params;

    void validate() const;

    // Center of the quantum density: zeta0 + v0 t + K t^2 / 2m. Newton's
    // equation for V = -K.x accelerates along +K; the closed-form density
    // moves with it, and the trajectory-ODE cross-checks pin this sign.
    Vec packet_center(double t) const;
};

// Coherent state of the isotropic harmonic oscillator.
struct CoherentScenario {
    CoherentPrep prep;
    SystemParams params; // potential must be Harmonic with the same omega

    void validate() const;

    Vec xi(double t) const;     // classical center: x0 cos wt + (v0/w) sin wt
    Vec xi_dot(double t) const;

    // g(t) = int_0^t (-m xi_dot^2 / 2 + m w^2 xi^2 / 2) ds, by adaptive
    // Simpson at 1e-10 so the same path serves any future trajectory source.
    double g(double t) const;
};

// Helpers that assemble consistent params/scenarios.
LinearScenario make_linear_scenario(const GaussianPrep& prep, const Vec& force, double mass,
                                    double hbar, int dim);
CoherentScenario make_coherent_scenario(const CoherentPrep& prep, double mass, double hbar,
                                        int dim);

// Packet width at time t: sigma0 * sqrt(1 + (hbar t / 2 m sigma0^2)^2).
double sigma_hbar(double t, const SystemParams& params, double sigma0);

struct FieldsSample {
    double rho;
    double action;
};

// Exact Madelung pair for the linear scenario. The phase-constant term is
// -(dim/2) hbar arctan(hbar t / 2 m sigma0^2); the dim-3 form has coefficient
// 3/2, and the family is separable, so the prefactor generalizes per axis.
FieldsSample linear_fields(const Vec& x, double t, const LinearScenario& scen);

// hbar-free limit: fixed-width Gaussian riding the classical center, with
// S(x,t) = -m v0^2 t / 2 + m v0.x + K.x t - K.v0 t^2 / 2 - K^2 t^3 / 6m.
FieldsSample classical_limit_fields(const Vec& x, double t, const LinearScenario& scen);

// Exact Madelung pair for the coherent state:
// rho = (2 pi sigma_h^2)^{-dim/2} exp(-(x-xi)^2 / 2 sigma_h^2),
// S   = m xi_dot.x + g(t) - t * coherent_phase_rate(...).
FieldsSample coherent_fields(const Vec& x, double t, const CoherentScenario& scen);

// The x-independent phase drift of the coherent state. The dim-2 state loses
// phase at rate hbar*omega; the separable family gives (dim/2)*hbar*omega.
double coherent_phase_rate(const SystemParams& params, double omega);

// Q(x,t) = (dim/2) hbar omega - m omega^2 (x - xi(t))^2 / 2.
double coherent_quantum_potential(const Vec& x, double t, const CoherentScenario& scen);

// Quantum potential of the moving Gaussian (width sigma_h(t)):
// Q = (hbar^2 / 4 m s^2) * (dim - |x-c|^2 / 2 s^2), s = sigma_h(t).
double linear_quantum_potential(const Vec& x, double t, const LinearScenario& scen);

// Gradients of the closed-form fields, for trajectory flows and oracles.
Vec linear_grad_action(const Vec& x, double t, const LinearScenario& scen);
Vec linear_grad_log_rho(const Vec& x, double t, const LinearScenario& scen);
Vec coherent_grad_action(const Vec& x, double t, const CoherentScenario& scen);
Vec coherent_grad_log_rho(const Vec& x, double t, const CoherentScenario& scen);

// Closed-form trajectory of a packet particle started at zeta0 + eta0 under
// the gradient-of-action velocity law (1D):
// xi_h(t) = zeta0 + v0 t + K t^2/2m + eta0 * sigma_h(t)/sigma0.
double bohm_trajectory_1d(double eta0, double t, const LinearScenario& scen);

// Spin-current law, spin axis = axis 3, K along axis 3. Transverse components
// spiral: radius sqrt(eta1^2+eta2^2) * sigma_h(t)/sigma0, angle
// atan2(eta2, eta1) + arctan(hbar t / 2 m sigma0^2); the axial component is
// the 1D formula. Component order and rotation sense are fixed by direct
// integration of the velocity law (see the trajectory tests).
Vec bohm_trajectory_3d_spin(const Vec& eta0, double t, const LinearScenario& scen);

} // namespace madelab::analytic
