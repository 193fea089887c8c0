#pragma once

#include "mfg/coupling.hpp"
#include "mfg/grid.hpp"
#include "mfg/perspective.hpp"

namespace mfg {

// The discrete congestion problem
//   min  sum_c vol * [ ell(m_c, wbar_c) + F(x_c, m_c) ]
//   s.t. -laplacian(m) + divergence(w) = 0, integrate(m) = 1, 0 <= m <= 1,
// with wbar the face-to-cell average of the staggered momentum w.
struct ProblemSpec {
    Grid grid;
    CongestionParams congestion;
    Coupling coupling;

    ProblemSpec(Grid g, CongestionParams cong, Coupling coup)
        : grid(std::move(g)), congestion(cong), coupling(std::move(coup)) {
        congestion.validate_for_dim(grid.dim);
        if (static_cast<int>(coupling.V.size()) != grid.total_cells())
            throw SpecError("coupling potential does not match the grid");
    }

    ProblemSpec with_eps(double eps) const {
        return ProblemSpec(grid, CongestionParams(congestion.q, congestion.r, eps),
                           coupling);
    }
};

}  // namespace mfg
