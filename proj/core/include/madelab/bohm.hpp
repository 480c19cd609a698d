#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "madelab/analytic.hpp"
#include "madelab/types.hpp"

namespace madelab::bohm {

struct VelocityMode {
    enum class Kind { Standard, SpinCurrent };
    Kind kind = Kind::Standard;
    Vec spin_axis = {0.0, 0.0, 1.0};

    static VelocityMode standard() { return {}; }
    static VelocityMode spin_current(const Vec& axis) {
        return {Kind::SpinCurrent, axis};
    }
    void validate(int dim) const;
    const char* name() const {
        return kind == Kind::Standard ? "standard" : "spin-current";
    }
};

struct VelocityFieldOptions {
    double mass_threshold_frac = 1e-10; // below this, velocity is undefined (masked)
    double cfl_density_frac = 1e-6;     // density cut for the CFL speed scale; raw
                                        // near-node speeds would drive dt to zero
};

// Node-wise velocity field of one snapshot. Standard: v = grad S / m.
// SpinCurrent: v += (hbar/2m) grad(ln rho) x k. Gradients are spectral through
// the recomposed psi, matching the madelung module's differentiation scheme.
struct VelocityField {
    Grid grid;
    double time = 0.0;
    std::array<std::vector<double>, kMaxDim> v;
    std::vector<std::uint8_t> supported;
    double bulk_vmax = 0.0;
};

VelocityField velocity_field(const MadelungFields& fields, const SystemParams& params,
                             const VelocityMode& mode, const VelocityFieldOptions& opts = {});

// eta0 ~ N(0, sigma^2 I) in the scenario's dimension: sigma0 for the Gaussian
// prep, sigma_hbar for the coherent one. Deterministic per seed.
std::vector<BohmSample> sample_initial(const GaussianPrep& prep, int dim, int n,
                                       std::uint64_t seed);
std::vector<BohmSample> sample_initial(const CoherentPrep& prep, const SystemParams& params,
                                       int n, std::uint64_t seed);

// Time-dependent flow that trajectories integrate through. Implementations:
// snapshot stacks (cubic in space, linear in time) and closed-form callables.
class VelocitySource {
public:
    virtual ~VelocitySource() = default;
    // False when the point is masked or outside the usable region.
    virtual bool velocity(const Vec& x, double t, Vec& out) const = 0;
    virtual double t_begin() const = 0;
    virtual double t_end() const = 0;
    virtual double suggested_dt() const = 0;
    virtual std::vector<double> natural_times() const = 0;
};

class GridVelocitySource final : public VelocitySource {
public:
    GridVelocitySource(std::vector<VelocityField> snapshots, double cfl_safety = 0.5);
    bool velocity(const Vec& x, double t, Vec& out) const override;
    double t_begin() const override;
    double t_end() const override;
    double suggested_dt() const override;
    std::vector<double> natural_times() const override;

private:
    std::vector<VelocityField> snaps_;
    double cfl_dt_;
};

class CallableVelocitySource final : public VelocitySource {
public:
    using Flow = std::function<Vec(const Vec&, double)>;
    CallableVelocitySource(Flow flow, double t0, double t1, double dt);
    bool velocity(const Vec& x, double t, Vec& out) const override;
    double t_begin() const override { return t0_; }
    double t_end() const override { return t1_; }
    double suggested_dt() const override { return dt_; }
    std::vector<double> natural_times() const override { return {t0_, t1_}; }

private:
    Flow flow_;
    double t0_, t1_, dt_;
};

// Closed-form flows for the analytic scenarios (both velocity laws).
CallableVelocitySource::Flow analytic_flow(const analytic::LinearScenario& scen,
                                           const VelocityMode& mode);
CallableVelocitySource::Flow analytic_flow(const analytic::CoherentScenario& scen,
                                           const VelocityMode& mode);

struct IntegrateOptions {
    std::vector<double> record_times; // empty: the source's natural times
    double dt = 0.0;                  // 0: use the source's CFL suggestion
    int threads = 1;
};

struct EnsembleRun {
    std::vector<BohmSample> samples;
    std::vector<Trajectory> trajectories;
    VelocityMode mode;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> flagged; // frozen in a masked region or escaped
    int flagged_count = 0;
    double dt_used = 0.0;

    std::size_t time_index(double t) const; // throws if t is not recorded
};

// RK4 transport of every sample through the flow, one global dt, samples
// independent (parallel over threads, reductions in fixed order). A sample
// whose stage evaluation lands in masked territory is frozen and flagged.
EnsembleRun integrate_ensemble(const VelocitySource& source,
                               std::span<const BohmSample> samples, const Vec& center0,
                               const VelocityMode& mode, const IntegrateOptions& opts = {});

// Convenience: build grid velocity fields from Madelung snapshots first.
EnsembleRun integrate_ensemble(const std::vector<MadelungFields>& snapshots,
                               std::span<const BohmSample> samples, const Vec& center0,
                               const SystemParams& params, const VelocityMode& mode,
                               const IntegrateOptions& opts = {},
                               const VelocityFieldOptions& vf_opts = {});

// Kolmogorov-Smirnov distance, per axis and maxed over axes, between the
// unflagged ensemble positions at time t and the marginal CDF of rho.
double equivariance_distance(const EnsembleRun& run, const MadelungFields& fields, double t,
                             std::size_t min_unflagged = 1000);

// Same statistic against a per-axis normal law (closed-form scenarios).
double equivariance_distance_normal(const EnsembleRun& run, double t, const Vec& center,
                                    const Vec& sigma, int dim,
                                    std::size_t min_unflagged = 1000);

} // namespace madelab::bohm
