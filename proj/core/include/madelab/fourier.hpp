#pragma once

#include <array>
#include <vector>

#include "madelab/types.hpp"

struct fftw_plan_s;

namespace madelab::fourier {

// Angular wavenumbers for one axis in FFT storage order:
// k_j = 2*pi*j/L for j < n/2, and 2*pi*(j-n)/L above.
std::vector<double> wavenumbers(const Grid& grid, int axis);

// Spectral calculus on one grid. Owns the FFTW plans (created with
// FFTW_ESTIMATE so runs are reproducible bit for bit). An instance may be
// shared across threads only for read-only access to grid(); the transform
// calls themselves are not re-entrant per instance.
class Transformer {
public:
    explicit Transformer(const Grid& grid);
    ~Transformer();
    Transformer(const Transformer&) = delete;
    Transformer& operator=(const Transformer&) = delete;

    const Grid& grid() const { return grid_; }

    void forward(std::vector<cplx>& f) const;  // in place, unnormalized
    void backward(std::vector<cplx>& f) const; // in place, scaled by 1/N

    // d f / d x_axis of a complex node field (Nyquist mode dropped, as usual
    // for odd-order spectral derivatives).
    std::vector<cplx> derivative(const std::vector<cplx>& f, int axis) const;

    std::array<std::vector<cplx>, kMaxDim> gradient(const std::vector<cplx>& f) const;

    // Real-field wrappers (complex embedding; grids here are small).
    std::vector<double> derivative(const std::vector<double>& f, int axis) const;
    std::vector<double> laplacian(const std::vector<double>& f) const;
    std::vector<double> divergence(const std::array<std::vector<double>, kMaxDim>& flux) const;

private:
    void apply_ik(std::vector<cplx>& spectrum, int axis) const;
    void apply_minus_k2(std::vector<cplx>& spectrum) const;

    Grid grid_;
    std::array<std::vector<double>, kMaxDim> k_;
    fftw_plan_s* fwd_ = nullptr;
    fftw_plan_s* bwd_ = nullptr;
};

} // namespace madelab::fourier
