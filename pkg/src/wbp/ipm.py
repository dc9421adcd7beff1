"""Dense primal-dual interior point solver for small standard-form LPs.

Solves

    min c.z   subject to   G z = b,  z >= 0

with Mehrotra's predictor-corrector iteration.  Each step solves the normal
equations (G D G^T) dy = rhs with D = diag(z/s) by Cholesky plus one round
of iterative refinement, which keeps the search direction accurate once the
iterates approach the boundary and D spans many orders of magnitude.  The
loop tracks the best iterate seen (by worst relative residual) and returns
it, so a late-stage numerical breakdown cannot spoil an already-converged
point.  G must have full row rank (callers preprocess).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

_STEP_SCALE = 0.99995
_MAX_CORRECTORS = 2
_D_CAP = 1e16  # keeps G*diag(d)*G^T finite near the boundary


@dataclass
class LPResult:
    """Primal/dual iterates and convergence data for one LP solve."""

    z: np.ndarray
    y: np.ndarray
    s: np.ndarray
    converged: bool
    iterations: int
    gap: float
    primal_residual: float
    dual_residual: float


def _initial_point(c, G, b):
    # Least-squares primal/dual start (Mehrotra's heuristic): project b and c
    # through G G^T, then shift into the positive orthant.
    try:
        K = cho_factor(G @ G.T)
        z = G.T @ cho_solve(K, b)
        y = cho_solve(K, G @ c)
    except LinAlgError:  # pragma: no cover - callers preprocess to full rank
        z = np.linalg.lstsq(G, b, rcond=None)[0]
        y = np.linalg.lstsq(G.T, c, rcond=None)[0]
    s = c - G.T @ y

    dz = max(-1.5 * z.min(initial=0.0), 0.0)
    ds = max(-1.5 * s.min(initial=0.0), 0.0)
    z = z + dz
    s = s + ds
    zs = z @ s
    if zs <= 0.0:
        z = z + 1.0
        s = s + 1.0
        zs = z @ s
    z = z + 0.5 * zs / max(s.sum(), 1e-12)
    s = s + 0.5 * zs / max(z.sum(), 1e-12)
    return z, y, s


def _factor_normal(G, d):
    M = (G * d) @ G.T
    bump = 0.0
    scale = max(np.max(np.diag(M)), 1.0)
    for _ in range(8):
        try:
            return M, cho_factor(M + bump * np.eye(M.shape[0]))
        except LinAlgError:
            bump = max(10.0 * bump, 1e-14 * scale)
    raise LinAlgError("normal equations not positive definite")


def _solve_refined(M, K, rhs):
    # one round of iterative refinement recovers accuracy lost to the
    # extreme dynamic range of D near convergence
    dy = cho_solve(K, rhs)
    dy += cho_solve(K, rhs - M @ dy)
    return dy


def _newton_step(M, K, G, d, z, s, rp, rd, rc):
    rhs = rp + G @ (d * rd - rc / s)
    dy = _solve_refined(M, K, rhs)
    dz = d * (G.T @ dy - rd) + rc / s
    ds = (rc - s * dz) / z
    return dz, dy, ds


def _step_length(v, dv, scale=1.0):
    neg = dv < 0.0
    if not np.any(neg):
        return 1.0
    return min(1.0, scale * np.min(-v[neg] / dv[neg]))


def solve_lp(c, G, b, tol: float = 1e-8, max_iter: int = 100) -> LPResult:
    """Run the predictor-corrector iteration until residuals and gap fall below tol.

    Convergence means relative primal/dual infeasibility and the
    complementarity gap z.s / (1 + |c.z|) are all <= tol.
    """
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = G.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    if m == 0 or n == 0:
        raise ValueError("empty linear program")

    z, y, s = _initial_point(c, G, b)
    b_scale = 1.0 + np.linalg.norm(b)
    c_scale = 1.0 + np.linalg.norm(c)

    best = None
    best_merit = np.inf
    for it in range(max_iter + 1):
        rp = b - G @ z
        rd = c - G.T @ y - s
        comp = z @ s
        rp_norm = np.linalg.norm(rp)
        rd_norm = np.linalg.norm(rd)
        gap = comp / (1.0 + abs(c @ z))
        merit = max(rp_norm / b_scale, rd_norm / c_scale, gap)
        if not np.isfinite(merit):  # pragma: no cover - capped d prevents this
            break
        if merit < best_merit:
            best_merit = merit
            best = (z.copy(), y.copy(), s.copy(), it, gap, rp_norm, rd_norm)
        if merit <= tol or it == max_iter:
            break
        mu = comp / n
        if mu <= 1e-2 * tol * tol:
            # complementarity has outrun feasibility; further steps only
            # amplify roundoff, so stop on the best iterate found
            break

        d = np.minimum(z / s, _D_CAP)
        try:
            M, K = _factor_normal(G, d)
        except LinAlgError:  # pragma: no cover
            break

        # predictor: pure Newton step toward complementarity zero
        dz_a, dy_a, ds_a = _newton_step(M, K, G, d, z, s, rp, rd, -z * s)
        alpha_pa = _step_length(z, dz_a)
        alpha_da = _step_length(s, ds_a)
        mu_aff = ((z + alpha_pa * dz_a) @ (s + alpha_da * ds_a)) / n

        # corrector with Mehrotra centering
        sigma = min(max((mu_aff / mu) ** 3, 0.0), 1.0) if mu > 0 else 0.0
        rc = sigma * mu - z * s - dz_a * ds_a
        dz, dy, ds = _newton_step(M, K, G, d, z, s, rp, rd, rc)
        alpha_p = _step_length(z, dz, _STEP_SCALE)
        alpha_d = _step_length(s, ds, _STEP_SCALE)

        # centrality correctors: straggler pairs whose product sits far from
        # the centering target stall the gap even when mu itself collapses, so
        # push outliers back into [0.1, 10] * target and keep the extra
        # direction only if it does not shorten either step
        mu_t = sigma * mu
        zero_m = np.zeros(m)
        zero_n = np.zeros(n)
        for _ in range(_MAX_CORRECTORS):
            v = (z + alpha_p * dz) * (s + alpha_d * ds)
            t = np.clip(v, 0.1 * mu_t, 10.0 * mu_t) - v
            if not np.any(t):
                break
            dz_c, dy_c, ds_c = _newton_step(M, K, G, d, z, s, zero_m, zero_n, t)
            dz_t, dy_t, ds_t = dz + dz_c, dy + dy_c, ds + ds_c
            alpha_pt = _step_length(z, dz_t, _STEP_SCALE)
            alpha_dt = _step_length(s, ds_t, _STEP_SCALE)
            if alpha_pt < alpha_p or alpha_dt < alpha_d:
                break
            dz, dy, ds = dz_t, dy_t, ds_t
            alpha_p, alpha_d = alpha_pt, alpha_dt

        z = z + alpha_p * dz
        y = y + alpha_d * dy
        s = s + alpha_d * ds

    if best is None:  # pragma: no cover - first merit is always finite
        return LPResult(z, y, s, False, 0, np.inf, np.inf, np.inf)
    z, y, s, it, gap, rp_norm, rd_norm = best
    return LPResult(z, y, s, best_merit <= tol, it, gap, rp_norm, rd_norm)
