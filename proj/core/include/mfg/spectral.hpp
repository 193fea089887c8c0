#pragma once

#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

// Cosine-transform solver for the cell-centered Neumann Laplacian. The
// DCT-II basis diagonalizes divergence(gradient(.)) exactly on the box, so
// inverses of symbol functions of -laplacian are applied in O(N log N).
// Not thread safe: each instance owns its transform buffers.
class SpectralPoisson {
public:
    explicit SpectralPoisson(const Grid& g);
    ~SpectralPoisson();
    SpectralPoisson(const SpectralPoisson&) = delete;
    SpectralPoisson& operator=(const SpectralPoisson&) = delete;

    // Mean-zero solution of -laplacian(x) = rhs (zero mode discarded).
    CellField poisson(const CellField& rhs) const;

    // Preconditioner for the constraint-projection Schur complement:
    // modes scaled by 1 / (omega + omega^2 / 2), omega the -laplacian symbol.
    CellField projection_preconditioner(const CellField& rhs) const;

private:
    Grid grid_;
    std::vector<double> poisson_coef_;
    std::vector<double> precond_coef_;
    mutable std::vector<double> work_;
    void* fwd_ = nullptr;  // fftw_plan
    void* bwd_ = nullptr;

    CellField apply(const CellField& rhs, const std::vector<double>& coef) const;
};

}  // namespace mfg
