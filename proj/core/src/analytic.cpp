#include "madelab/analytic.hpp"

#include <cmath>
#include <numbers>

#include "madelab/quadrature.hpp"

namespace madelab::analytic {

namespace {

double gaussian_density(const Vec& x, const Vec& center, double sigma, int dim) {
    double q2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = x[a] - center[a];
        q2 += d * d;
    }
    const double pref = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.5 * dim);
    return pref * std::exp(-q2 / (2.0 * sigma * sigma));
}

} // namespace

void LinearScenario::validate() const {
    params.validate();
    prep.validate(params.dim);
    if (params.hbar == 0.0)
        throw ValidationError("LinearScenario: hbar must be positive (the classical limit "
                              "is classical_limit_fields)");
    if (const auto* lin = std::get_if<LinearPotential>(&params.potential)) {
        for (int a = 0; a < params.dim; ++a)
            if (lin->force[a] != force[a])
                throw ValidationError("LinearScenario: potential force differs from K");
    } else if (std::holds_alternative<FreePotential>(params.potential)) {
        if (norm2(force) != 0.0)
            throw ValidationError("LinearScenario: free potential requires K = 0");
    } else {
        throw ValidationError("LinearScenario: potential must be Free or Linear");
    }
}

Vec LinearScenario::packet_center(double t) const {
    const double c = t * t / (2.0 * params.mass);
    return prep.zeta0 + t * prep.v0 + c * force;
}

void CoherentScenario::validate() const {
    params.validate();
    prep.validate(params.dim);
    if (params.hbar == 0.0)
        throw ValidationError("CoherentScenario: hbar must be positive");
    const auto* har = std::get_if<HarmonicPotential>(&params.potential);
    if (!har) throw ValidationError("CoherentScenario: potential must be Harmonic");
    if (har->omega != prep.omega)
        throw ValidationError("CoherentScenario: prep omega differs from potential omega");
}

Vec CoherentScenario::xi(double t) const {
    const double w = prep.omega;
    return std::cos(w * t) * prep.x0 + (std::sin(w * t) / w) * prep.v0;
}

Vec CoherentScenario::xi_dot(double t) const {
    const double w = prep.omega;
    return (-w * std::sin(w * t)) * prep.x0 + std::cos(w * t) * prep.v0;
}

double CoherentScenario::g(double t) const {
    const double m = params.mass;
    const double w = prep.omega;
    auto integrand = [&](double s) {
        const Vec xs = xi(s);
        const Vec vs = xi_dot(s);
        return -0.5 * m * norm2(vs) + 0.5 * m * w * w * norm2(xs);
    };
    return quadrature::adaptive_simpson(integrand, 0.0, t, 1e-10);
}

LinearScenario make_linear_scenario(const GaussianPrep& prep, const Vec& force, double mass,
                                    double hbar, int dim) {
    LinearScenario scen;
    scen.prep = prep;
    scen.force = force;
    scen.params.mass = mass;
    scen.params.hbar = hbar;
    scen.params.dim = dim;
    if (norm2(force) == 0.0)
        scen.params.potential = FreePotential{};
    else
        scen.params.potential = LinearPotential{force};
    return scen;
}

CoherentScenario make_coherent_scenario(const CoherentPrep& prep, double mass, double hbar,
                                        int dim) {
    CoherentScenario scen;
    scen.prep = prep;
    scen.params.mass = mass;
    scen.params.hbar = hbar;
    scen.params.dim = dim;
    scen.params.potential = HarmonicPotential{prep.omega};
    return scen;
}

double sigma_hbar(double t, const SystemParams& params, double sigma0) {
    const double tau = params.hbar * t / (2.0 * params.mass * sigma0 * sigma0);
    return sigma0 * std::sqrt(1.0 + tau * tau);
}

FieldsSample linear_fields(const Vec& x, double t, const LinearScenario& scen) {
    const double m = scen.params.mass;
    const double hbar = scen.params.hbar;
    const double s0 = scen.prep.sigma0;
    const int dim = scen.params.dim;
    const Vec& v0 = scen.prep.v0;
    const Vec& K = scen.force;

    const double st = sigma_hbar(t, scen.params, s0);
    const Vec center = scen.packet_center(t);
    double q2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = x[a] - center[a];
        q2 += d * d;
    }

    FieldsSample out;
    out.rho = gaussian_density(x, center, st, dim);

    const double tau = hbar * t / (2.0 * m * s0 * s0);
    double action = -0.5 * dim * hbar * std::atan(tau);
    action += -0.5 * m * norm2(v0) * t + m * dot(v0, x);
    action += dot(K, x) * t - 0.5 * dot(K, v0) * t * t - norm2(K) * t * t * t / (6.0 * m);
    action += q2 * hbar * hbar * t / (8.0 * m * s0 * s0 * st * st);
    out.action = action;
    return out;
}

FieldsSample classical_limit_fields(const Vec& x, double t, const LinearScenario& scen) {
    const double m = scen.params.mass;
    const Vec& v0 = scen.prep.v0;
    const Vec& K = scen.force;

    FieldsSample out;
    out.rho = gaussian_density(x, scen.packet_center(t), scen.prep.sigma0, scen.params.dim);
    out.action = -0.5 * m * norm2(v0) * t + m * dot(v0, x) + dot(K, x) * t -
                 0.5 * dot(K, v0) * t * t - norm2(K) * t * t * t / (6.0 * m);
    return out;
}

double coherent_phase_rate(const SystemParams& params, double omega) {
    return 0.5 * params.dim * params.hbar * omega;
}

FieldsSample coherent_fields(const Vec& x, double t, const CoherentScenario& scen) {
    const double m = scen.params.mass;
    const int dim = scen.params.dim;
    const double sh = scen.prep.sigma_hbar(scen.params);

    FieldsSample out;
    out.rho = gaussian_density(x, scen.xi(t), sh, dim);
    out.action = m * dot(scen.xi_dot(t), x) + scen.g(t) -
                 coherent_phase_rate(scen.params, scen.prep.omega) * t;
    return out;
}

double coherent_quantum_potential(const Vec& x, double t, const CoherentScenario& scen) {
    const double m = scen.params.mass;
    const double w = scen.prep.omega;
    const int dim = scen.params.dim;
    const Vec xi_t = scen.xi(t);
    double q2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = x[a] - xi_t[a];
        q2 += d * d;
    }
    return 0.5 * dim * scen.params.hbar * w - 0.5 * m * w * w * q2;
}

double linear_quantum_potential(const Vec& x, double t, const LinearScenario& scen) {
    const double m = scen.params.mass;
    const double hbar = scen.params.hbar;
    const double s = sigma_hbar(t, scen.params, scen.prep.sigma0);
    const Vec center = scen.packet_center(t);
    double q2 = 0.0;
    for (int a = 0; a < scen.params.dim; ++a) {
        const double d = x[a] - center[a];
        q2 += d * d;
    }
    return hbar * hbar / (4.0 * m * s * s) * (scen.params.dim - q2 / (2.0 * s * s));
}

Vec linear_grad_action(const Vec& x, double t, const LinearScenario& scen) {
    const double m = scen.params.mass;
    const double hbar = scen.params.hbar;
    const double s0 = scen.prep.sigma0;
    const double st = sigma_hbar(t, scen.params, s0);
    const Vec center = scen.packet_center(t);
    const double quad = hbar * hbar * t / (4.0 * m * s0 * s0 * st * st);
    Vec g = m * scen.prep.v0 + t * scen.force;
    for (int a = 0; a < scen.params.dim; ++a) g[a] += quad * (x[a] - center[a]);
    return g;
}

Vec linear_grad_log_rho(const Vec& x, double t, const LinearScenario& scen) {
    const double st = sigma_hbar(t, scen.params, scen.prep.sigma0);
    const Vec center = scen.packet_center(t);
    Vec g = vec0();
    for (int a = 0; a < scen.params.dim; ++a) g[a] = -(x[a] - center[a]) / (st * st);
    return g;
}

Vec coherent_grad_action(const Vec& x, double t, const CoherentScenario& scen) {
    (void)x;
    return scen.params.mass * scen.xi_dot(t);
}

Vec coherent_grad_log_rho(const Vec& x, double t, const CoherentScenario& scen) {
    const double sh = scen.prep.sigma_hbar(scen.params);
    const Vec xi_t = scen.xi(t);
    Vec g = vec0();
    for (int a = 0; a < scen.params.dim; ++a) g[a] = -(x[a] - xi_t[a]) / (sh * sh);
    return g;
}

double bohm_trajectory_1d(double eta0, double t, const LinearScenario& scen) {
    const double ratio = sigma_hbar(t, scen.params, scen.prep.sigma0) / scen.prep.sigma0;
    return scen.packet_center(t)[0] + eta0 * ratio;
}

Vec bohm_trajectory_3d_spin(const Vec& eta0, double t, const LinearScenario& scen) {
    const double s0 = scen.prep.sigma0;
    const double ratio = sigma_hbar(t, scen.params, s0) / s0;
    const double alpha =
        std::atan(scen.params.hbar * t / (2.0 * scen.params.mass * s0 * s0));

    const Vec center = scen.packet_center(t);
    const double r0 = std::hypot(eta0[0], eta0[1]);
    const double theta = std::atan2(eta0[1], eta0[0]) + alpha;

    Vec out;
    out[0] = center[0] + r0 * ratio * std::cos(theta);
    out[1] = center[1] + r0 * ratio * std::sin(theta);
    out[2] = center[2] + eta0[2] * ratio;
    return out;
}

} // namespace madelab::analytic
