#include "mfg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace mfg {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SpectralPoisson::SpectralPoisson(const Grid& g) : grid_(g) {
    const int n = g.total_cells();
    work_.assign(static_cast<size_t>(n), 0.0);

    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (g.dim == 1) {
            fwd_ = fftw_plan_r2r_1d(g.cells[0], work_.data(), work_.data(),
                                    FFTW_REDFT10, FFTW_ESTIMATE);
            bwd_ = fftw_plan_r2r_1d(g.cells[0], work_.data(), work_.data(),
                                    FFTW_REDFT01, FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_r2r_2d(g.cells[0], g.cells[1], work_.data(), work_.data(),
                                    FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
            bwd_ = fftw_plan_r2r_2d(g.cells[0], g.cells[1], work_.data(), work_.data(),
                                    FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
        }
    }

    // Unnormalized DCT-II followed by DCT-III scales by 2*n per axis.
    double scale = 1.0;
    for (int k = 0; k < g.dim; ++k) scale *= 2.0 * g.cells[k];

    poisson_coef_.assign(static_cast<size_t>(n), 0.0);
    precond_coef_.assign(static_cast<size_t>(n), 0.0);
    const int n1 = g.dim == 2 ? g.cells[1] : 1;
    for (int idx = 0; idx < n; ++idx) {
        const int j0 = g.dim == 1 ? idx : idx / n1;
        const int j1 = g.dim == 1 ? 0 : idx % n1;
        double omega = 0.0;
        const double s0 = std::sin(0.5 * M_PI * j0 / g.cells[0]);
        omega += 4.0 / (g.h[0] * g.h[0]) * s0 * s0;
        if (g.dim == 2) {
            const double s1 = std::sin(0.5 * M_PI * j1 / g.cells[1]);
            omega += 4.0 / (g.h[1] * g.h[1]) * s1 * s1;
        }
        if (idx != 0) {
            poisson_coef_[idx] = 1.0 / (scale * omega);
            precond_coef_[idx] = 1.0 / (scale * (omega + 0.5 * omega * omega));
        }
    }
}

SpectralPoisson::~SpectralPoisson() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

CellField SpectralPoisson::apply(const CellField& rhs,
                                 const std::vector<double>& coef) const {
    const size_t n = rhs.size();
    std::copy(rhs.begin(), rhs.end(), work_.begin());
    fftw_execute_r2r(static_cast<fftw_plan>(fwd_), work_.data(), work_.data());
    for (size_t i = 0; i < n; ++i) work_[i] *= coef[i];
    fftw_execute_r2r(static_cast<fftw_plan>(bwd_), work_.data(), work_.data());
    return CellField(work_.begin(), work_.end());
}

CellField SpectralPoisson::poisson(const CellField& rhs) const {
    return apply(rhs, poisson_coef_);
}

CellField SpectralPoisson::projection_preconditioner(const CellField& rhs) const {
    return apply(rhs, precond_coef_);
}

}  // namespace mfg
