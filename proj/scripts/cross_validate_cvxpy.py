#!/usr/bin/env python3
"""Independent cross-check of a 1-D q=2 run against CVXPY.

For q = 2 and eps = 0 the congestion term is the quadratic-over-linear
perspective, so the exact discrete problem (same staggered operators, same
cell-averaged momentum) can be restated verbatim for an interior-point
solver. Solves the same instance as the C++ pipeline and reports the
density and objective disagreement.

Usage:
  mfg solve --config scripts/cross_validate_cvxpy.ini --out /tmp/cvx_run
  python3 scripts/cross_validate_cvxpy.py /tmp/cvx_run
"""

import sys

import cvxpy as cp
import numpy as np


def main(run_dir: str) -> int:
    n, L = 32, 2.0
    h = L / n
    vol = h
    x = (np.arange(n) + 0.5) * h
    d = np.abs(x - 0.8)
    V = np.where(d < 0.5, -3.0 * np.cos(0.5 * np.pi * d / 0.5) ** 2, 0.0)
    rho = 0.3

    m = cp.Variable(n, nonneg=True)
    w = cp.Variable(n - 1)

    # face-to-cell average (boundary faces carry zero)
    A = np.zeros((n, n - 1))
    for i in range(n):
        if i > 0:
            A[i, i - 1] += 0.5
        if i < n - 1:
            A[i, i] += 0.5
    b = A @ w

    cost = vol * cp.sum(cp.hstack([0.5 * cp.quad_over_lin(b[i], m[i]) for i in range(n)]))
    cost = cost + vol * cp.sum(cp.multiply(V, m)) + vol * rho / 2 * cp.sum_squares(m)

    G = np.zeros((n - 1, n))
    for f in range(n - 1):
        G[f, f] = -1.0 / h
        G[f, f + 1] = 1.0 / h
    D = -G.T
    lap = D @ G

    constraints = [(-lap @ m + D @ w) == 0, vol * cp.sum(m) == 1, m <= 1]
    prob = cp.Problem(cp.Minimize(cost), constraints)
    prob.solve(solver=cp.CLARABEL)

    m_ours = np.fromfile(f"{run_dir}/m.f64")
    linf = np.abs(m_ours - m.value).max()
    print(f"cvxpy status: {prob.status}, objective {prob.value:.12f}")
    print(f"L_inf(m_cpp - m_cvxpy) = {linf:.3e}")
    ok = prob.status == "optimal" and linf < 1e-4
    print("agreement:", "ok" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "/tmp/cvx_run"))
