#include "mfg/grid.hpp"

#include <cmath>
#include <numeric>

namespace mfg {

Grid::Grid(int dim_, std::array<double, 2> extent_, std::array<int, 2> cells_)
    : dim(dim_), extent(extent_), cells(cells_) {
    if (dim != 1 && dim != 2) throw SpecError("grid dimension must be 1 or 2");
    double measure = 1.0;
    for (int k = 0; k < dim; ++k) {
        if (!(extent[k] > 0.0)) throw SpecError("grid extent must be positive");
        if (cells[k] < 2) throw SpecError("grid needs at least 2 cells per axis");
        h[k] = extent[k] / cells[k];
        measure *= extent[k];
    }
    if (!(measure > 1.0))
        throw SpecError("the domain measure must be strictly greater than 1 (got " +
                        std::to_string(measure) + ")");
    cell_volume = 1.0;
    for (int k = 0; k < dim; ++k) cell_volume *= h[k];
    for (int k = dim; k < 2; ++k) {
        extent[k] = 0.0;
        cells[k] = 1;
        h[k] = 0.0;
    }
}

int Grid::total_cells() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }

double Grid::domain_measure() const {
    double m = 1.0;
    for (int k = 0; k < dim; ++k) m *= extent[k];
    return m;
}

int Grid::face_count(int axis) const {
    if (dim == 1) return cells[0] - 1;
    return axis == 0 ? (cells[0] - 1) * cells[1] : cells[0] * (cells[1] - 1);
}

std::array<double, 2> Grid::cell_center(int flat) const {
    if (dim == 1) return {(flat + 0.5) * h[0], 0.0};
    const int i0 = flat / cells[1], i1 = flat % cells[1];
    return {(i0 + 0.5) * h[0], (i1 + 0.5) * h[1]};
}

CellField make_cell_field(const Grid& g, double value) {
    return CellField(static_cast<size_t>(g.total_cells()), value);
}

FaceField make_face_field(const Grid& g, double value) {
    FaceField f;
    for (int k = 0; k < g.dim; ++k)
        f.axis[k].assign(static_cast<size_t>(g.face_count(k)), value);
    return f;
}

CellVecField make_cell_vec_field(const Grid& g, double value) {
    CellVecField f;
    for (int k = 0; k < g.dim; ++k)
        f.comp[k].assign(static_cast<size_t>(g.total_cells()), value);
    return f;
}

double pairwise_sum(std::span<const double> v) {
    const size_t n = v.size();
    if (n <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double integrate(const Grid& g, const CellField& m) {
    return g.cell_volume * pairwise_sum(m);
}

namespace {
double weighted_dot(double vol, std::span<const double> a, std::span<const double> b) {
    const size_t n = a.size();
    std::vector<double> prod(n);
    for (size_t i = 0; i < n; ++i) prod[i] = a[i] * b[i];
    return vol * pairwise_sum(prod);
}
}  // namespace

double dot(const Grid& g, const CellField& a, const CellField& b) {
    return weighted_dot(g.cell_volume, a, b);
}

double dot(const Grid& g, const FaceField& a, const FaceField& b) {
    double s = 0.0;
    for (int k = 0; k < g.dim; ++k) s += weighted_dot(g.cell_volume, a.axis[k], b.axis[k]);
    return s;
}

double dot(const Grid& g, const CellVecField& a, const CellVecField& b) {
    double s = 0.0;
    for (int k = 0; k < g.dim; ++k) s += weighted_dot(g.cell_volume, a.comp[k], b.comp[k]);
    return s;
}

double norm_l2(const Grid& g, const CellField& a) { return std::sqrt(dot(g, a, a)); }
double norm_l2(const Grid& g, const FaceField& a) { return std::sqrt(dot(g, a, a)); }
double norm_l2(const Grid& g, const CellVecField& a) { return std::sqrt(dot(g, a, a)); }

double norm_linf(const CellField& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

FaceField gradient(const Grid& g, const CellField& m) {
    FaceField out = make_face_field(g);
    if (g.dim == 1) {
        const int n = g.cells[0];
        for (int i = 0; i + 1 < n; ++i) out.axis[0][i] = (m[i + 1] - m[i]) / g.h[0];
        return out;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    for (int i = 0; i + 1 < n0; ++i)
        for (int j = 0; j < n1; ++j)
            out.axis[0][i * n1 + j] = (m[(i + 1) * n1 + j] - m[i * n1 + j]) / g.h[0];
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j + 1 < n1; ++j)
            out.axis[1][i * (n1 - 1) + j] = (m[i * n1 + j + 1] - m[i * n1 + j]) / g.h[1];
    return out;
}

CellField divergence(const Grid& g, const FaceField& v) {
    CellField out = make_cell_field(g);
    if (g.dim == 1) {
        const int n = g.cells[0];
        for (int i = 0; i < n; ++i) {
            const double right = (i + 1 < n) ? v.axis[0][i] : 0.0;
            const double left = (i > 0) ? v.axis[0][i - 1] : 0.0;
            out[i] = (right - left) / g.h[0];
        }
        return out;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            const double r0 = (i + 1 < n0) ? v.axis[0][i * n1 + j] : 0.0;
            const double l0 = (i > 0) ? v.axis[0][(i - 1) * n1 + j] : 0.0;
            const double r1 = (j + 1 < n1) ? v.axis[1][i * (n1 - 1) + j] : 0.0;
            const double l1 = (j > 0) ? v.axis[1][i * (n1 - 1) + j - 1] : 0.0;
            out[i * n1 + j] = (r0 - l0) / g.h[0] + (r1 - l1) / g.h[1];
        }
    return out;
}

CellField laplacian(const Grid& g, const CellField& m) {
    return divergence(g, gradient(g, m));
}

CellVecField face_to_cell(const Grid& g, const FaceField& w) {
    CellVecField out = make_cell_vec_field(g);
    if (g.dim == 1) {
        const int n = g.cells[0];
        for (int i = 0; i < n; ++i) {
            const double right = (i + 1 < n) ? w.axis[0][i] : 0.0;
            const double left = (i > 0) ? w.axis[0][i - 1] : 0.0;
            out.comp[0][i] = 0.5 * (left + right);
        }
        return out;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            const double r0 = (i + 1 < n0) ? w.axis[0][i * n1 + j] : 0.0;
            const double l0 = (i > 0) ? w.axis[0][(i - 1) * n1 + j] : 0.0;
            const double r1 = (j + 1 < n1) ? w.axis[1][i * (n1 - 1) + j] : 0.0;
            const double l1 = (j > 0) ? w.axis[1][i * (n1 - 1) + j - 1] : 0.0;
            out.comp[0][i * n1 + j] = 0.5 * (l0 + r0);
            out.comp[1][i * n1 + j] = 0.5 * (l1 + r1);
        }
    return out;
}

FaceField face_to_cell_adjoint(const Grid& g, const CellVecField& u) {
    FaceField out = make_face_field(g);
    if (g.dim == 1) {
        const int n = g.cells[0];
        for (int i = 0; i + 1 < n; ++i)
            out.axis[0][i] = 0.5 * (u.comp[0][i] + u.comp[0][i + 1]);
        return out;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    for (int i = 0; i + 1 < n0; ++i)
        for (int j = 0; j < n1; ++j)
            out.axis[0][i * n1 + j] =
                0.5 * (u.comp[0][i * n1 + j] + u.comp[0][(i + 1) * n1 + j]);
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j + 1 < n1; ++j)
            out.axis[1][i * (n1 - 1) + j] =
                0.5 * (u.comp[1][i * n1 + j] + u.comp[1][i * n1 + j + 1]);
    return out;
}

namespace {

// Thomas solve of the constant tridiagonal (1/4, 1/2, 1/4), Dirichlet ends.
struct FaceMassLine {
    std::vector<double> cp;     // forward-eliminated upper coefficients
    std::vector<double> denom;  // pivots
    explicit FaceMassLine(int s) : cp(s), denom(s) {
        const double a = 0.25, b = 0.5, c = 0.25;
        denom[0] = b;
        cp[0] = c / b;
        for (int i = 1; i < s; ++i) {
            denom[i] = b - a * cp[i - 1];
            cp[i] = c / denom[i];
        }
    }
    void solve(double* x, int stride) const {
        const double a = 0.25;
        const int s = static_cast<int>(cp.size());
        x[0] /= denom[0];
        for (int i = 1; i < s; ++i)
            x[i * stride] = (x[i * stride] - a * x[(i - 1) * stride]) / denom[i];
        for (int i = s - 2; i >= 0; --i)
            x[i * stride] -= cp[i] * x[(i + 1) * stride];
    }
};

}  // namespace

FaceField face_mass_solve(const Grid& g, const FaceField& rhs) {
    FaceField x = rhs;
    if (g.dim == 1) {
        FaceMassLine line(g.cells[0] - 1);
        line.solve(x.axis[0].data(), 1);
        return x;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    {
        FaceMassLine line(n0 - 1);  // axis-0 faces couple along axis 0, stride n1
        for (int j = 0; j < n1; ++j) line.solve(x.axis[0].data() + j, n1);
    }
    {
        FaceMassLine line(n1 - 1);  // axis-1 faces couple along axis 1, stride 1
        for (int i = 0; i < n0; ++i) line.solve(x.axis[1].data() + i * (n1 - 1), 1);
    }
    return x;
}

namespace {

// Diagonal of -laplacian: one 1/h^2 contribution per existing adjacent face.
CellField neumann_diagonal(const Grid& g) {
    CellField d = make_cell_field(g);
    if (g.dim == 1) {
        const int n = g.cells[0];
        const double ih2 = 1.0 / (g.h[0] * g.h[0]);
        for (int i = 0; i < n; ++i)
            d[i] = ((i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0)) * ih2;
        return d;
    }
    const int n0 = g.cells[0], n1 = g.cells[1];
    const double ih0 = 1.0 / (g.h[0] * g.h[0]), ih1 = 1.0 / (g.h[1] * g.h[1]);
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            d[i * n1 + j] = ((i > 0 ? 1 : 0) + (i + 1 < n0 ? 1 : 0)) * ih0 +
                            ((j > 0 ? 1 : 0) + (j + 1 < n1 ? 1 : 0)) * ih1;
    return d;
}

}  // namespace

CellField neumann_poisson(const Grid& g, const CellField& rhs, double mean, double tol) {
    const int n = g.total_cells();
    const double rhs_norm = norm_l2(g, rhs);
    const double total = integrate(g, rhs);
    if (std::abs(total) > 1e-10 * rhs_norm)
        throw IncompatibleRhs("neumann_poisson: rhs integral " + std::to_string(total) +
                              " exceeds the compatibility tolerance");

    CellField x = make_cell_field(g);
    if (rhs_norm == 0.0) {
        for (double& v : x) v = mean;
        return x;
    }

    // b := rhs with the (tolerance-level) mean removed.
    CellField b = rhs;
    const double shift = total / g.domain_measure();
    for (double& v : b) v -= shift;

    const CellField diag = neumann_diagonal(g);
    CellField r = b;
    CellField z(r.size());
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    CellField p = z;
    double rz = dot(g, r, z);
    const double b_norm = norm_l2(g, b);
    const int max_iter = 10 * n;

    int it = 0;
    for (; it < max_iter; ++it) {
        if (norm_l2(g, r) <= tol * b_norm) break;
        CellField ap = laplacian(g, p);
        for (double& v : ap) v = -v;
        const double alpha = rz / dot(g, p, ap);
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_new = dot(g, r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (it >= max_iter && norm_l2(g, r) > tol * b_norm)
        throw NoConvergence("neumann_poisson CG", max_iter);

    const double current_mean = integrate(g, x) / g.domain_measure();
    for (double& v : x) v += mean - current_mean;
    return x;
}

FaceField solve_divergence(const Grid& g, const CellField& f, double tol) {
    const CellField u = neumann_poisson(g, f, 0.0, tol);
    FaceField v = gradient(g, u);
    for (int k = 0; k < g.dim; ++k)
        for (double& a : v.axis[k]) a = -a;
    return v;
}

}  // namespace mfg
