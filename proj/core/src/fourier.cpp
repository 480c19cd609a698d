#include "madelab/fourier.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>

namespace madelab::fourier {

namespace {

// FFTW planning is not thread-safe; execution through the new-array API is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

std::vector<double> wavenumbers(const Grid& grid, int axis) {
    const int n = grid.points[axis];
    const double dk = 2.0 * std::numbers::pi / grid.length(axis);
    std::vector<double> k(n);
    for (int j = 0; j < n; ++j) k[j] = dk * (j <= n / 2 ? j : j - n);
    return k;
}

Transformer::Transformer(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid_.dim; ++a) k_[a] = wavenumbers(grid_, a);

    int n[kMaxDim];
    for (int a = 0; a < grid_.dim; ++a) n[a] = grid_.points[a];

    std::vector<cplx> scratch(grid_.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft(
        grid_.dim, n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
    bwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft(
        grid_.dim, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
}

Transformer::~Transformer() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(bwd_));
}

void Transformer::forward(std::vector<cplx>& f) const {
    auto* ptr = reinterpret_cast<fftw_complex*>(f.data());
    fftw_execute_dft(reinterpret_cast<fftw_plan>(fwd_), ptr, ptr);
}

void Transformer::backward(std::vector<cplx>& f) const {
    auto* ptr = reinterpret_cast<fftw_complex*>(f.data());
    fftw_execute_dft(reinterpret_cast<fftw_plan>(bwd_), ptr, ptr);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (cplx& v : f) v *= scale;
}

void Transformer::apply_ik(std::vector<cplx>& spectrum, int axis) const {
    const int dim = grid_.dim;
    const std::size_t n = spectrum.size();
    std::array<int, kMaxDim> idx{};
    for (std::size_t lin = 0; lin < n; ++lin) {
        const int j = idx[axis];
        const int na = grid_.points[axis];
        // Zero the Nyquist mode: its first derivative has no consistent sign.
        const double k = (2 * j == na) ? 0.0 : k_[axis][j];
        spectrum[lin] *= cplx(0.0, k);
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[a] < grid_.points[a]) break;
            idx[a] = 0;
        }
    }
}

void Transformer::apply_minus_k2(std::vector<cplx>& spectrum) const {
    const int dim = grid_.dim;
    const std::size_t n = spectrum.size();
    std::array<int, kMaxDim> idx{};
    for (std::size_t lin = 0; lin < n; ++lin) {
        double k2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double k = k_[a][idx[a]];
            k2 += k * k;
        }
        spectrum[lin] *= -k2;
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[a] < grid_.points[a]) break;
            idx[a] = 0;
        }
    }
}

std::vector<cplx> Transformer::derivative(const std::vector<cplx>& f, int axis) const {
    std::vector<cplx> work = f;
    forward(work);
    apply_ik(work, axis);
    backward(work);
    return work;
}

std::array<std::vector<cplx>, kMaxDim> Transformer::gradient(const std::vector<cplx>& f) const {
    std::array<std::vector<cplx>, kMaxDim> g;
    std::vector<cplx> hat = f;
    forward(hat);
    for (int a = 0; a < grid_.dim; ++a) {
        std::vector<cplx> work = hat;
        apply_ik(work, a);
        backward(work);
        g[a] = std::move(work);
    }
    return g;
}

std::vector<double> Transformer::derivative(const std::vector<double>& f, int axis) const {
    std::vector<cplx> work(f.begin(), f.end());
    forward(work);
    apply_ik(work, axis);
    backward(work);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = work[i].real();
    return out;
}

std::vector<double> Transformer::laplacian(const std::vector<double>& f) const {
    std::vector<cplx> work(f.begin(), f.end());
    forward(work);
    apply_minus_k2(work);
    backward(work);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = work[i].real();
    return out;
}

std::vector<double> Transformer::divergence(
    const std::array<std::vector<double>, kMaxDim>& flux) const {
    std::vector<double> out(grid_.size(), 0.0);
    for (int a = 0; a < grid_.dim; ++a) {
        const std::vector<double> da = derivative(flux[a], a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += da[i];
    }
    return out;
}

} // namespace madelab::fourier
