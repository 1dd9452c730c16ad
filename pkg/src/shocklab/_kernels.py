"""JIT-compiled inner loops for the explicit time steppers.

All kernels use the same spatial discretization: uniform grid, 2nd-order
central differences in divergence form (pressure gradient and viscous flux
(u_x / v**(alpha+1)) with arithmetic-mean v at half-nodes), classic RK4 in
time with dt = cfl * min(dx/c_max, dx**2/(2 max stress_coeff)) recomputed
every step.

fastmath stays off: IEEE-ordered arithmetic makes the schemes exactly
equivariant under the reflection (x, u) -> (-x, -u), so mirrored data stay
mirrored bitwise and the wall value u(0, t) of a symmetric whole-line run
is exactly 0.0.
"""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=False)
def _fill_pressure(v, a, gamma, p):
    n = v.shape[0]
    if gamma == 1.0:
        for j in range(n):
            p[j] = a / v[j]
    else:
        for j in range(n):
            p[j] = a * v[j] ** (-gamma)


@numba.njit(cache=True, fastmath=False)
def _half_node_coeff(vl, vr, alpha):
    # stress_coeff at the half node: ((vl+vr)/2)**-(alpha+1)
    if alpha == 0.0:
        return 2.0 / (vl + vr)
    return (0.5 * (vl + vr)) ** (-(alpha + 1.0))


@numba.njit(cache=True, fastmath=False)
def periodic_rhs(v, u, dx, a, gamma, alpha, p, sig, dv, du):
    """Semi-discrete RHS on the period cell (wraparound indexing).

    sig[j] holds the viscous flux at the half node j+1/2.
    """
    n = v.shape[0]
    _fill_pressure(v, a, gamma, p)
    inv_dx = 1.0 / dx
    inv_2dx = 0.5 / dx
    for j in range(n):
        jp = j + 1 if j + 1 < n else 0
        sig[j] = (u[jp] - u[j]) * _half_node_coeff(v[j], v[jp], alpha) * inv_dx
    for j in range(n):
        jp = j + 1 if j + 1 < n else 0
        jm = j - 1 if j >= 1 else n - 1
        dv[j] = (u[jp] - u[jm]) * inv_2dx
        du[j] = -(p[jp] - p[jm]) * inv_2dx + (sig[j] - sig[jm]) * inv_dx


@numba.njit(cache=True, fastmath=False)
def _cfl_dt(v, dx, a, gamma, alpha, cfl):
    n = v.shape[0]
    v_min = v[0]
    for j in range(1, n):
        if v[j] < v_min:
            v_min = v[j]
    if v_min <= 0.0:
        return -1.0  # signals blow-up to the caller
    c_max = np.sqrt(a * gamma * v_min ** (-gamma - 1.0))
    s_max = v_min ** (-(alpha + 1.0))
    dt_adv = dx / c_max
    dt_diff = dx * dx / (2.0 * s_max)
    return cfl * min(dt_adv, dt_diff)


@numba.njit(cache=True, fastmath=False)
def periodic_advance(v, u, dx, a, gamma, alpha, t, t_target, cfl):
    """Advance the period cell in place from t to exactly t_target.

    Returns the final time (== t_target) or -1.0 on positivity loss.
    """
    n = v.shape[0]
    p = np.empty(n)
    sig = np.empty(n)
    k1v = np.empty(n); k1u = np.empty(n)
    k2v = np.empty(n); k2u = np.empty(n)
    k3v = np.empty(n); k3u = np.empty(n)
    k4v = np.empty(n); k4u = np.empty(n)
    vs = np.empty(n); us = np.empty(n)

    while t < t_target:
        dt = _cfl_dt(v, dx, a, gamma, alpha, cfl)
        if dt <= 0.0:
            return -1.0
        last = False
        if t + dt >= t_target:
            dt = t_target - t
            last = True
        half = 0.5 * dt
        sixth = dt / 6.0

        periodic_rhs(v, u, dx, a, gamma, alpha, p, sig, k1v, k1u)
        for j in range(n):
            vs[j] = v[j] + half * k1v[j]
            us[j] = u[j] + half * k1u[j]
        periodic_rhs(vs, us, dx, a, gamma, alpha, p, sig, k2v, k2u)
        for j in range(n):
            vs[j] = v[j] + half * k2v[j]
            us[j] = u[j] + half * k2u[j]
        periodic_rhs(vs, us, dx, a, gamma, alpha, p, sig, k3v, k3u)
        for j in range(n):
            vs[j] = v[j] + dt * k3v[j]
            us[j] = u[j] + dt * k3u[j]
        periodic_rhs(vs, us, dx, a, gamma, alpha, p, sig, k4v, k4u)
        for j in range(n):
            v[j] = v[j] + sixth * (k1v[j] + 2.0 * (k2v[j] + k3v[j]) + k4v[j])
            u[j] = u[j] + sixth * (k1u[j] + 2.0 * (k2u[j] + k3u[j]) + k4u[j])
        if last:
            t = t_target
        else:
            t = t + dt
    return t


@numba.njit(cache=True, fastmath=False)
def line_rhs(
    vf, uf, dxf, vc, uc, dxc, widx, wgt, a, gamma, alpha, wall_mode,
    pf, sigf, pc, sigc, dvf, duf, dvc, duc,
):
    """Semi-discrete RHS of the truncated-line field coupled to the
    evolving periodic background cells (right background; the left far
    field is its reflection).

    Interior nodes use the same central scheme as the cells.  The edge
    nodes are slaved to the background: their rates are the 4-point
    Lagrange interpolation (widx, wgt) of the cell rates at the position
    of the right edge, reflected (u negated) for the left edge.  In wall
    mode the left edge is the wall itself: u pinned to 0, v driven by the
    one-sided 2nd-order u_x (using u[0] = 0).
    """
    nf = vf.shape[0]
    periodic_rhs(vc, uc, dxc, a, gamma, alpha, pc, sigc, dvc, duc)

    _fill_pressure(vf, a, gamma, pf)
    inv_dx = 1.0 / dxf
    inv_2dx = 0.5 / dxf
    for j in range(nf - 1):
        sigf[j] = (uf[j + 1] - uf[j]) * _half_node_coeff(vf[j], vf[j + 1], alpha) * inv_dx
    for j in range(1, nf - 1):
        dvf[j] = (uf[j + 1] - uf[j - 1]) * inv_2dx
        duf[j] = -(pf[j + 1] - pf[j - 1]) * inv_2dx + (sigf[j] - sigf[j - 1]) * inv_dx

    dv_edge = 0.0
    du_edge = 0.0
    for m in range(4):
        dv_edge += wgt[m] * dvc[widx[m]]
        du_edge += wgt[m] * duc[widx[m]]
    dvf[nf - 1] = dv_edge
    duf[nf - 1] = du_edge
    if wall_mode:
        duf[0] = 0.0
        dvf[0] = (4.0 * uf[1] - uf[2]) * inv_2dx
    else:
        dvf[0] = dv_edge
        duf[0] = -du_edge


@numba.njit(cache=True, fastmath=False)
def line_advance(
    vf, uf, dxf, vc, uc, dxc, widx, wgt, a, gamma, alpha, t, t_target, cfl, wall_mode
):
    """Advance field + background cells in place to exactly t_target.

    Returns the final time (== t_target) or -1.0 on positivity loss.
    """
    nf = vf.shape[0]
    nc = vc.shape[0]
    pf = np.empty(nf); sigf = np.empty(nf)
    pc = np.empty(nc); sigc = np.empty(nc)
    k1vf = np.empty(nf); k1uf = np.empty(nf); k1vc = np.empty(nc); k1uc = np.empty(nc)
    k2vf = np.empty(nf); k2uf = np.empty(nf); k2vc = np.empty(nc); k2uc = np.empty(nc)
    k3vf = np.empty(nf); k3uf = np.empty(nf); k3vc = np.empty(nc); k3uc = np.empty(nc)
    k4vf = np.empty(nf); k4uf = np.empty(nf); k4vc = np.empty(nc); k4uc = np.empty(nc)
    vfs = np.empty(nf); ufs = np.empty(nf); vcs = np.empty(nc); ucs = np.empty(nc)

    while t < t_target:
        dt_f = _cfl_dt(vf, dxf, a, gamma, alpha, cfl)
        dt_c = _cfl_dt(vc, dxc, a, gamma, alpha, cfl)
        if dt_f <= 0.0 or dt_c <= 0.0:
            return -1.0
        dt = min(dt_f, dt_c)
        last = False
        if t + dt >= t_target:
            dt = t_target - t
            last = True
        half = 0.5 * dt
        sixth = dt / 6.0

        line_rhs(vf, uf, dxf, vc, uc, dxc, widx, wgt, a, gamma, alpha, wall_mode,
                 pf, sigf, pc, sigc, k1vf, k1uf, k1vc, k1uc)
        for j in range(nf):
            vfs[j] = vf[j] + half * k1vf[j]
            ufs[j] = uf[j] + half * k1uf[j]
        for j in range(nc):
            vcs[j] = vc[j] + half * k1vc[j]
            ucs[j] = uc[j] + half * k1uc[j]
        line_rhs(vfs, ufs, dxf, vcs, ucs, dxc, widx, wgt, a, gamma, alpha, wall_mode,
                 pf, sigf, pc, sigc, k2vf, k2uf, k2vc, k2uc)
        for j in range(nf):
            vfs[j] = vf[j] + half * k2vf[j]
            ufs[j] = uf[j] + half * k2uf[j]
        for j in range(nc):
            vcs[j] = vc[j] + half * k2vc[j]
            ucs[j] = uc[j] + half * k2uc[j]
        line_rhs(vfs, ufs, dxf, vcs, ucs, dxc, widx, wgt, a, gamma, alpha, wall_mode,
                 pf, sigf, pc, sigc, k3vf, k3uf, k3vc, k3uc)
        for j in range(nf):
            vfs[j] = vf[j] + dt * k3vf[j]
            ufs[j] = uf[j] + dt * k3uf[j]
        for j in range(nc):
            vcs[j] = vc[j] + dt * k3vc[j]
            ucs[j] = uc[j] + dt * k3uc[j]
        line_rhs(vfs, ufs, dxf, vcs, ucs, dxc, widx, wgt, a, gamma, alpha, wall_mode,
                 pf, sigf, pc, sigc, k4vf, k4uf, k4vc, k4uc)
        for j in range(nf):
            vf[j] = vf[j] + sixth * (k1vf[j] + 2.0 * (k2vf[j] + k3vf[j]) + k4vf[j])
            uf[j] = uf[j] + sixth * (k1uf[j] + 2.0 * (k2uf[j] + k3uf[j]) + k4uf[j])
        for j in range(nc):
            vc[j] = vc[j] + sixth * (k1vc[j] + 2.0 * (k2vc[j] + k3vc[j]) + k4vc[j])
            uc[j] = uc[j] + sixth * (k1uc[j] + 2.0 * (k2uc[j] + k3uc[j]) + k4uc[j])
        if last:
            t = t_target
        else:
            t = t + dt
    return t
