#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

// Axis-aligned box domain in dimension 1 or 2, uniform cells per axis.
// Scalars are cell-centered, vector fields are face-staggered with zero
// normal component on the boundary (the no-flux condition is structural,
// boundary faces are simply not stored).
struct Grid {
    int dim = 0;
    std::array<double, 2> extent{};  // physical length per axis
    std::array<int, 2> cells{};      // cell count per axis
    std::array<double, 2> h{};       // spacing per axis
    double cell_volume = 0.0;

    Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells);

    static Grid make_1d(double length, int n) { return Grid(1, {length, 0.0}, {n, 0}); }
    static Grid make_2d(double lx, double ly, int nx, int ny) {
        return Grid(2, {lx, ly}, {nx, ny});
    }

    int total_cells() const;
    double domain_measure() const;

    // Interior face count along `axis`: (cells[axis]-1) * prod(other cells).
    int face_count(int axis) const;

    // Row-major (last axis fastest) cell index.
    int cell_index(int i0, int i1 = 0) const { return dim == 1 ? i0 : i0 * cells[1] + i1; }

    // Physical coordinate of a cell center.
    std::array<double, 2> cell_center(int flat_index) const;
};

using CellField = std::vector<double>;

// One scalar per interior face, per axis. axis[k] is row-major over a
// (cells[0] or cells[0]-1) x (cells[1] or cells[1]-1) array, reduced by one
// along axis k. Boundary faces carry an implicit zero.
struct FaceField {
    std::array<std::vector<double>, 2> axis;
};

// d scalar components per cell (cell-centered samples of a vector field).
struct CellVecField {
    std::array<std::vector<double>, 2> comp;
};

CellField make_cell_field(const Grid& g, double value = 0.0);
FaceField make_face_field(const Grid& g, double value = 0.0);
CellVecField make_cell_vec_field(const Grid& g, double value = 0.0);

// ---- reductions -----------------------------------------------------------

// Pairwise (cascade) summation; deterministic regardless of threading.
double pairwise_sum(std::span<const double> v);

double integrate(const Grid& g, const CellField& m);

// Volume-weighted inner products and L2 norms.
double dot(const Grid& g, const CellField& a, const CellField& b);
double dot(const Grid& g, const FaceField& a, const FaceField& b);
double dot(const Grid& g, const CellVecField& a, const CellVecField& b);
double norm_l2(const Grid& g, const CellField& a);
double norm_l2(const Grid& g, const FaceField& a);
double norm_l2(const Grid& g, const CellVecField& a);
double norm_linf(const CellField& a);

// ---- discrete differential operators --------------------------------------

// Two-point difference per face; boundary faces are zero by construction.
FaceField gradient(const Grid& g, const CellField& m);

// Exact negative transpose of gradient in the volume-weighted pairing.
CellField divergence(const Grid& g, const FaceField& v);

// divergence(gradient(m)): symmetric, negative semidefinite, kernel = constants.
CellField laplacian(const Grid& g, const CellField& m);

// ---- interpolation between staggered and centered layouts -----------------

// Face-to-cell average per axis (boundary faces contribute zero).
CellVecField face_to_cell(const Grid& g, const FaceField& w);

// Adjoint of face_to_cell in the volume-weighted pairing.
FaceField face_to_cell_adjoint(const Grid& g, const CellVecField& u);

// Solves (face_to_cell_adjoint . face_to_cell) x = rhs, a constant-coefficient
// tridiagonal system per grid line. SPD because boundary faces anchor the
// alternating mode.
FaceField face_mass_solve(const Grid& g, const FaceField& rhs);

// ---- Neumann solvers -------------------------------------------------------

// Unique solution of -laplacian(m) = rhs with prescribed mean, by conjugate
// gradient on the mean-zero subspace with Jacobi preconditioning.
// Relative residual tolerance `tol`, iteration cap 10 * total_cells.
// Throws IncompatibleRhs when |integrate(rhs)| > 1e-10 * ||rhs||.
CellField neumann_poisson(const Grid& g, const CellField& rhs, double mean,
                          double tol = 1e-10);

// Right-inverse of the divergence: returns v with divergence(v) = f,
// built from the potential of a Neumann solve.
FaceField solve_divergence(const Grid& g, const CellField& f, double tol = 1e-10);

}  // namespace mfg
