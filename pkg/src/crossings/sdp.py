"""Primal-dual interior-point solver for the reduced relaxations.

Both relaxations share one shape: columns indexed by constraint classes,
one normalization row, and semidefinite block constraints,

    minimize  c.x   over  x >= 0,  n.x = 1,  sum_j x_j A_Bj >= 0 per block,

whose dual asks for the best uniform lower bound,

    maximize  t   over  Y_B >= 0,  sum_B <Y_B, A_Bj> + n_j t <= c_j.

Nesterov-Todd scaled Newton steps with Mehrotra's corrector on the
nonnegative part.  Problems here are small (blocks of a few dozen rows,
at most a few thousand columns), so the Schur complement is formed and
factored densely each iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass
class ConicSolution:
    status: str
    t: float
    x: np.ndarray
    y: list[np.ndarray]
    s: np.ndarray
    gap: float
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _sqrt_and_inv_sqrt(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric square root and its inverse, eigenvalues clamped from
    below so nearly singular iterates stay usable."""
    vals, vecs = np.linalg.eigh(a)
    floor = max(vals[-1], 1.0) * 1e-15
    vals = np.maximum(vals, floor)
    root = np.sqrt(vals)
    return (vecs * root) @ vecs.T, (vecs / root) @ vecs.T


class _Scaling:
    """Nesterov-Todd scaling W Y W = M for one block, with the pieces the
    corrected Newton step needs: W^-1, W^(1/2), W^(-1/2), and the scaled
    point V = W^(-1/2) M W^(-1/2) = W^(1/2) Y W^(1/2)."""

    def __init__(self, m_mat: np.ndarray, y_mat: np.ndarray):
        sq, sqinv = _sqrt_and_inv_sqrt(m_mat)
        vals, vecs = np.linalg.eigh(sq @ y_mat @ sq)
        vals = np.maximum(vals, max(vals[-1], 1.0) * 1e-16)
        inner = (vecs * np.sqrt(vals)) @ vecs.T
        self.winv = sqinv @ inner @ sqinv
        self.whalf, self.winvhalf = _sqrt_and_inv_sqrt(
            sq @ ((vecs / np.sqrt(vals)) @ vecs.T) @ sq
        )
        self.v = self.winvhalf @ m_mat @ self.winvhalf
        self.vvals, self.vvecs = np.linalg.eigh(0.5 * (self.v + self.v.T))

    def lyapunov_rhs(self, target: np.ndarray) -> np.ndarray:
        """R with dM + W dY W = R equivalent to the scaled Newton equation
        (V dV' + dV' V)/2 = target; for target = -V^2/... the plain affine
        right side -M falls out."""
        q, lam = self.vvecs, self.vvals
        denom = 0.5 * (lam[:, None] + lam[None, :])
        np.maximum(denom, max(lam[-1], 1.0) * 1e-15, out=denom)
        solved = q @ ((q.T @ target @ q) / denom) @ q.T
        solved = 0.5 * (solved + solved.T)
        return self.whalf @ solved @ self.whalf


def _psd_step(m_mat: np.ndarray, dm: np.ndarray) -> float:
    """Largest step a with M + a dM still positive semidefinite."""
    _, sqinv = _sqrt_and_inv_sqrt(m_mat)
    w = np.linalg.eigvalsh(sqinv @ dm @ sqinv)
    low = w[0]
    return np.inf if low >= -1e-14 else 1.0 / -low


def _vec_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    return float((-v[neg] / dv[neg]).min()) if neg.any() else np.inf


def solve_bound_problem(
    n: np.ndarray,
    c: np.ndarray,
    blocks: list[np.ndarray],
    x0: np.ndarray,
    tol: float = 1e-9,
    max_iter: int = 100,
) -> ConicSolution:
    """Solve one relaxation instance to relative tolerance tol.

    blocks holds one (cols, d, d) stack of symmetric coefficient matrices
    per semidefinite block; x0 must put the block sums strictly inside the
    cone.  The returned t is the dual bound; y holds one matrix per block,
    feasible up to roundoff (certify exactly downstream before quoting t).
    """
    n = np.asarray(n, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    cols = n.size
    stacks = [np.ascontiguousarray(b, dtype=np.float64) for b in blocks]
    vecs = [b.reshape(cols, -1) for b in stacks]
    dims = [b.shape[1] for b in stacks]

    x = np.asarray(x0, dtype=np.float64).copy()
    if (x <= 0).any():
        raise ArgumentError("starting point must be strictly positive")
    t = 0.0
    y = [np.eye(d) for d in dims]
    s = np.maximum(np.abs(c), 1.0)
    degree = cols + sum(dims)

    def mats_of(xv):
        return [np.tensordot(xv, b, axes=([0], [0])) for b in stacks]

    m_list = mats_of(x)
    for m_mat in m_list:
        np.linalg.cholesky(m_mat)

    status, it = "max_iter", 0
    for it in range(1, max_iter + 1):
        adj_y = sum(v @ ym.ravel() for v, ym in zip(vecs, y))
        rp = 1.0 - n @ x
        rd = c - n * t - adj_y - s
        mu = (x @ s + sum(float((m * ym).sum()) for m, ym in zip(m_list, y))) / degree
        obj = c @ x
        gap = abs(obj - t) / (1.0 + abs(obj) + abs(t))
        if (
            gap <= tol
            and abs(rp) <= tol * 10
            and np.abs(rd).max() <= tol * 10 * (1.0 + np.abs(c).max())
        ):
            status = "optimal"
            break

        scals = [_Scaling(m, ym) for m, ym in zip(m_list, y)]
        winvs = [sc.winv for sc in scals]
        kmat = np.zeros((cols, cols))
        for b, v, wi in zip(stacks, vecs, winvs):
            tb = (wi @ (b @ wi)).reshape(cols, -1)
            kmat += tb @ v.T
        kmat = 0.5 * (kmat + kmat.T)
        kmat[np.diag_indices_from(kmat)] += s / x
        try:
            kchol = np.linalg.cholesky(kmat)
        except np.linalg.LinAlgError:
            kmat[np.diag_indices_from(kmat)] += 1e-12 * np.trace(kmat) / cols
            kchol = np.linalg.cholesky(kmat)

        def ksolve(rhs):
            sol = np.linalg.solve(kchol.T, np.linalg.solve(kchol, rhs))
            resid = rhs - kmat @ sol
            return sol + np.linalg.solve(kchol.T, np.linalg.solve(kchol, resid))

        kn = ksolve(n)
        denom = n @ kn

        def direction(rc, r_blocks):
            # eliminate dY = Winv (R - dM) Winv and ds = (rc - s dx)/x,
            # leaving (K + diag(s/x)) dx = n dt - (rd - p - rc/x)
            p = np.zeros(cols)
            for v, wi, rb in zip(vecs, winvs, r_blocks):
                p += v @ (wi @ rb @ wi).ravel()
            g = rd - p - rc / x
            kg = ksolve(g)
            dt = (rp + n @ kg) / denom
            dx = kn * dt - kg
            ds = (rc - s * dx) / x
            dm_list = mats_of(dx)
            dy = [
                wi @ (rb - dm) @ wi
                for wi, rb, dm in zip(winvs, r_blocks, dm_list)
            ]
            dy = [0.5 * (d_ + d_.T) for d_ in dy]
            return dx, dt, ds, dy, dm_list

        # predictor: pure Newton toward complementarity zero
        rc_aff = -x * s
        r_aff = [-m for m in m_list]
        dxa, dta, dsa, dya, dma = direction(rc_aff, r_aff)
        ap_aff = min(1.0, _vec_step(x, dxa), *(_psd_step(m, dm) for m, dm in zip(m_list, dma)))
        ad_aff = min(1.0, _vec_step(s, dsa), *(_psd_step(ym, dy_) for ym, dy_ in zip(y, dya)))
        mu_aff = (
            (x + ap_aff * dxa) @ (s + ad_aff * dsa)
            + sum(
                float(((m + ap_aff * dm) * (ym + ad_aff * dy_)).sum())
                for m, dm, ym, dy_ in zip(m_list, dma, y, dya)
            )
        ) / degree
        sigma = min(0.8, max((max(mu_aff, 0.0) / mu) ** 3, 1e-8))

        bound = 0.98 if mu > 1e-7 else 0.999

        def corrected(center, with_second):
            rc = center * mu - x * s
            if with_second:
                rc = rc - dxa * dsa
            r_blocks = []
            for sc, dm_, dy_ in zip(scals, dma, dya):
                target = center * mu * np.eye(sc.v.shape[0]) - sc.v @ sc.v
                if with_second:
                    dmt = sc.winvhalf @ dm_ @ sc.winvhalf
                    dyt = sc.whalf @ dy_ @ sc.whalf
                    target = target - 0.5 * (dmt @ dyt + dyt @ dmt)
                r_blocks.append(sc.lyapunov_rhs(target))
            return direction(rc, r_blocks)

        def step_pair(dx, ds, dm_list, dy):
            ap = bound * min(
                1.0 / bound,
                _vec_step(x, dx),
                *(_psd_step(m, dm) for m, dm in zip(m_list, dm_list)),
            )
            ad = bound * min(
                1.0 / bound,
                _vec_step(s, ds),
                *(_psd_step(ym, dy_) for ym, dy_ in zip(y, dy)),
            )
            return ap, ad

        dx, dt, ds, dy, dm_list = corrected(sigma, True)
        ap, ad = step_pair(dx, ds, dm_list, dy)
        # Near convergence the second-order term can point straight out of
        # the cone; a plain centering step keeps progress alive.
        if min(ap, ad) < 0.1 * min(ap_aff, ad_aff):
            cand = corrected(max(sigma, 0.5), False)
            cp, cd = step_pair(cand[0], cand[2], cand[4], cand[3])
            if min(cp, cd) > min(ap, ad):
                dx, dt, ds, dy, dm_list = cand
                ap, ad = cp, cd
        if ap < 1e-10 and ad < 1e-10:
            status = "stalled"
            break
        x = x + ap * dx
        t = t + ad * dt
        s = s + ad * ds
        y = [ym + ad * dy_ for ym, dy_ in zip(y, dy)]
        m_list = mats_of(x)

    adj_y = sum(v @ ym.ravel() for v, ym in zip(vecs, y))
    gap = abs(c @ x - t) / (1.0 + abs(c @ x) + abs(t))
    return ConicSolution(status=status, t=float(t), x=x, y=y, s=s, gap=float(gap), iterations=it)


def feasible_value(
    n: np.ndarray, c: np.ndarray, blocks: list[np.ndarray], y: list[np.ndarray]
) -> float:
    """Largest t keeping (t, y) dual feasible: the worst slack over all
    columns.  Well defined because the normalization row is positive."""
    n = np.asarray(n, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    cols = n.size
    adj = np.zeros(cols)
    for b, ym in zip(blocks, y):
        adj += np.asarray(b, dtype=np.float64).reshape(cols, -1) @ ym.ravel()
    return float(((c - adj) / n).min())


def polish_dual(
    n: np.ndarray,
    c: np.ndarray,
    blocks: list[np.ndarray],
    y: list[np.ndarray],
    x: np.ndarray | None = None,
    rank_tol: float = 1e-6,
    tight_tol: float = 1e-4,
) -> tuple[float, list[np.ndarray]]:
    """Refine a near-optimal dual point onto its active face.

    The interior-point endgame is conditioning-limited; the optimum itself
    is not.  Factoring each block as B B^T at its apparent rank and running
    Gauss-Newton on the nearly tight columns drives the active slacks to
    roundoff, after which the worst slack over every column prices the
    refined point.  Whatever the face guess, the returned pair is feasible,
    so a wrong guess costs accuracy, never soundness.  Returns the better
    of the refined and the incoming point."""
    n = np.asarray(n, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    cols = n.size
    stacks = [np.ascontiguousarray(b, dtype=np.float64) for b in blocks]
    t_in = feasible_value(n, c, stacks, y)

    factors = []
    for ym in y:
        vals, vecs_ = np.linalg.eigh(np.asarray(ym, dtype=np.float64))
        keep = vals > rank_tol * max(vals[-1], 0.0)
        factors.append(vecs_[:, keep] * np.sqrt(vals[keep]))
    sizes = [f.size for f in factors]
    if sum(sizes) == 0:
        return t_in, y

    scale = 1.0 + np.abs(c).max()

    def slacks(fs, t):
        adj = np.zeros(cols)
        for b, f in zip(stacks, fs):
            adj += b.reshape(cols, -1) @ (f @ f.T).ravel()
        return c - n * t - adj

    active = slacks(factors, t_in) <= tight_tol * scale
    if x is not None:
        # degenerate columns sit with both x and slack small; the primal
        # support resolves what the slacks alone cannot
        active |= np.asarray(x, dtype=np.float64) >= 1e-5 * np.abs(x).max()
    tight = np.flatnonzero(active)
    if tight.size == 0:
        return t_in, y

    theta_t = t_in
    best = (-np.inf, None)
    res = slacks(factors, theta_t)[tight]
    for _ in range(40):
        norm = np.abs(res).max()
        if norm < 1e-14 * scale:
            break
        jac = np.empty((tight.size, sum(sizes) + 1))
        col = 0
        for b, f in zip(stacks, factors):
            if f.size:
                jac[:, col : col + f.size] = (b[tight] @ f).reshape(tight.size, -1)
                col += f.size
        jac[:, -1] = 0.5 * n[tight]
        step, *_ = np.linalg.lstsq(jac, 0.5 * res, rcond=None)
        scale_step = 1.0
        for _ in range(6):
            trial = []
            col = 0
            for f in factors:
                trial.append(f + scale_step * step[col : col + f.size].reshape(f.shape))
                col += f.size
            trial_t = theta_t + scale_step * step[-1]
            trial_res = slacks(trial, trial_t)[tight]
            if np.abs(trial_res).max() < norm:
                break
            scale_step *= 0.5
        else:
            break
        factors, theta_t, res = trial, trial_t, trial_res
        t_now = feasible_value(n, c, stacks, [f @ f.T for f in factors])
        if t_now > best[0]:
            best = (t_now, [f.copy() for f in factors])

    if best[1] is not None and best[0] > t_in:
        return best[0], [f @ f.T for f in best[1]]
    return t_in, y
