"""Drivers that turn coefficient tables into certified optimum values.

Both relaxations reduce to the same conic shape, so the flow is shared:
assemble the equilibrated instance (every class block divided by its class
size, costs the plain distances), solve in floating point, polish the dual
onto its active face, then certify.  Certification rounds the dual blocks
to dyadic rationals and rebuilds them as integer-weighted sums of integer
rank-one terms; positive semidefiniteness then holds by construction, and
every class constraint is priced with exact integer arithmetic against the
stored integer tables.  The certified value is a true lower bound no
matter what the floating-point stages did.

The full relaxation stays small enough to solve over all classes at once.
The single-block instance outgrows dense Schur factorizations around
twenty thousand classes, so past a configurable threshold a cutting-plane
loop solves restricted instances, scans every class for violated columns,
adds the worst offenders, and repeats until the scan comes back clean.
The scan result is advisory; soundness rests on the certificate alone.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cache
from .coeffs import PairTables, block_constraint_tables, hook_constraint_table
from .errors import ArgumentError, ResourceError, SolverError
from .repsets import build_blocks
from .sdp import feasible_value, polish_dual, solve_bound_problem


@dataclass
class RoundRecord:
    round: int
    active: int
    objective: float
    max_violation: float
    worst_class: int
    wall_ms: float


@dataclass
class Certificate:
    """Exactly positive semidefinite dual point with its priced value.

    Each numerator matrix N and the common denominator D describe the
    block N/D, assembled as a nonnegative-integer-weighted sum of integer
    rank-one terms.  value is the exact minimum over classes of
    (|w| q_w - <N/D, A_w>) / |w|, so value <= the relaxation optimum."""

    numerators: list[np.ndarray]
    denominator: int
    value: Fraction
    worst_class: int

    @property
    def bound(self) -> float:
        return float(self.value)


@dataclass
class RelaxationOutcome:
    m: int
    kind: str
    value: float
    raw: float
    certificate: Certificate
    status: str
    class_count: int
    rounds: list[RoundRecord] = field(default_factory=list)
    y: list[np.ndarray] = field(default_factory=list)
    x: np.ndarray | None = None
    active: np.ndarray | None = None


# -- table acquisition -------------------------------------------------------


def hook_tables(
    m: int, cache_dir=None, route: str = "poly"
) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Integer single-block tables (d, sizes, costs, upper triangles),
    through the coefficient cache when a valid file is present."""
    if m < 4:
        raise ArgumentError("single-block relaxation needs m >= 4")
    cd = cache.resolve_cache_dir(cache_dir)
    path = cache.coeffs_beta_path(cd, m)
    if path.exists():
        d, _, sizes, qs, tri = cache.read_coeffs_beta(path, m)
        return d, sizes.astype(np.int64), qs.astype(np.int64), tri
    tables = PairTables.build(m)
    tri = hook_constraint_table(tables, route)
    d = (m - 1) // 2
    cache.write_coeffs_beta(
        path, m, d, tables.classes.rep_orbits, tables.classes.sizes,
        tables.classes.q, tri,
    )
    return d, tables.classes.sizes.astype(np.int64), tables.classes.q.astype(np.int64), tri


def full_tables(
    m: int, cache_dir=None, route: str = "poly"
) -> tuple[tuple[int, ...], np.ndarray, np.ndarray, np.ndarray]:
    """Integer tables for every symmetrized block, concatenated triangles."""
    if m < 4:
        raise ArgumentError("full relaxation needs m >= 4")
    if m > 9:
        raise ResourceError(
            f"full relaxation tables at m={m} exceed the memory budget"
        )
    cd = cache.resolve_cache_dir(cache_dir)
    path = cache.coeffs_alpha_path(cd, m)
    if path.exists():
        dims, _, sizes, qs, tri = cache.read_coeffs_alpha(path, m)
        return dims, sizes.astype(np.int64), qs.astype(np.int64), tri
    tables = PairTables.build(m)
    blocks = build_blocks(tables.index)
    stacks = block_constraint_tables(tables, blocks, route)
    dims = tuple(b.dim for b in blocks)
    tris = []
    for s, d in zip(stacks, dims):
        iu = np.triu_indices(d)
        tris.append(s[:, iu[0], iu[1]])
    tri = np.concatenate(tris, axis=1)
    cache.write_coeffs_alpha(
        path, m, dims, tables.classes.rep_orbits, tables.classes.sizes,
        tables.classes.q, tri,
    )
    return dims, tables.classes.sizes.astype(np.int64), tables.classes.q.astype(np.int64), tri


def split_triangles(tri: np.ndarray, dims: tuple[int, ...]) -> list[np.ndarray]:
    """Rebuild full symmetric (C, d, d) integer stacks from packed rows."""
    out = []
    off = 0
    for d in dims:
        t = d * (d + 1) // 2
        iu = np.triu_indices(d)
        block = np.zeros((tri.shape[0], d, d), dtype=tri.dtype)
        block[:, iu[0], iu[1]] = tri[:, off : off + t]
        block[:, iu[1], iu[0]] = tri[:, off : off + t]
        off += t
        out.append(block)
    return out


def _scaled_mats(tri: np.ndarray, dims: tuple[int, ...], sizes: np.ndarray) -> list[np.ndarray]:
    inv = 1.0 / sizes.astype(np.float64)
    return [s * inv[:, None, None] for s in split_triangles(tri, dims)]


# -- instance assembly -------------------------------------------------------


def _anchor_index(qs: np.ndarray, mats: list[np.ndarray]) -> int:
    """A class whose blocks are all positive definite anchors the strictly
    feasible start; the class of equal-component pairs is one such, and it
    sits at maximal cost, so the search from the top ends immediately."""
    order = np.lexsort((np.arange(qs.size), -qs))
    for idx in order[:10000]:
        try:
            for mat in mats:
                np.linalg.cholesky(mat[idx])
        except np.linalg.LinAlgError:
            continue
        return int(idx)
    raise SolverError("no positive definite class block found for the start")


def _strict_start(mats: list[np.ndarray], sizes: np.ndarray, anchor: int) -> np.ndarray:
    base = sizes.astype(np.float64)
    base /= base.sum()
    for eps in (0.5, 0.1, 0.01, 1e-3, 1e-4):
        x0 = eps * base
        x0[anchor] += 1.0 - eps
        try:
            for mat in mats:
                np.linalg.cholesky(np.tensordot(x0, mat, axes=([0], [0])))
        except np.linalg.LinAlgError:
            continue
        return x0
    raise SolverError("could not build a strictly feasible starting point")


def _tri_weights(d: int) -> tuple[tuple[np.ndarray, np.ndarray], np.ndarray]:
    iu = np.triu_indices(d)
    return iu, np.where(iu[0] == iu[1], 1.0, 2.0)


def class_slacks(
    y: np.ndarray, t: float, sizes: np.ndarray, qs: np.ndarray, tri: np.ndarray
) -> np.ndarray:
    """Per-element slack of every class constraint at the dual point."""
    iu, w = _tri_weights(y.shape[0])
    inner = tri @ (y[iu] * w)
    return qs - t - inner / sizes


def scan_violations(
    y: np.ndarray,
    t: float,
    sizes: np.ndarray,
    qs: np.ndarray,
    tri: np.ndarray,
    top: int = 50,
) -> tuple[float, np.ndarray]:
    """Worst per-element violation over all classes and the ids of the top
    offenders, worst first, ties broken toward the smaller id."""
    v = -class_slacks(y, t, sizes, qs, tri)
    order = np.lexsort((np.arange(v.size), -v))
    picked = order[: max(top, 1)]
    return float(v.max()), picked[v[picked] > 0].astype(np.int64)


# -- exact certification -----------------------------------------------------


def _dyadic_numerator(y: np.ndarray, bits: int) -> np.ndarray:
    """Integer N with N / 2^(3 bits) an exactly PSD rounding of y: each
    retained eigenpair is rounded to dyadic rationals and re-expanded, so N
    is a nonnegative-integer combination of integer rank-one terms."""
    scale = 1 << bits
    vals, vecs = np.linalg.eigh(np.asarray(y, dtype=np.float64))
    n_mat = np.zeros(y.shape, dtype=object)
    for lam, w in zip(vals, vecs.T):
        lw = int(round(lam * scale))
        if lw <= 0:
            continue
        wi = np.array([int(round(c * scale)) for c in w], dtype=object)
        n_mat += lw * np.outer(wi, wi)
    return n_mat


def _certified_min(
    inners: np.ndarray, sizes: np.ndarray, qs: np.ndarray, denom: int
) -> tuple[Fraction, int]:
    best_num = best_den = None
    worst = 0
    for i in range(len(inners)):
        num = int(qs[i]) * denom * int(sizes[i]) - int(inners[i])
        den = denom * int(sizes[i])
        if best_num is None or num * best_den < best_num * den:
            best_num, best_den, worst = num, den, i
    return Fraction(best_num, best_den), worst


def certify_single(
    y: np.ndarray, sizes: np.ndarray, qs: np.ndarray, tri: np.ndarray, bits: int = 48
) -> Certificate:
    """Exact lower bound certificate from one near-optimal dual block."""
    n_mat = _dyadic_numerator(y, bits)
    denom = 1 << (3 * bits)
    iu, w = _tri_weights(y.shape[0])
    nvec = np.array(
        [int(n_mat[i, j]) * int(k) for i, j, k in zip(iu[0], iu[1], w)],
        dtype=object,
    )
    inners = tri.astype(object) @ nvec
    value, worst = _certified_min(inners, sizes, qs, denom)
    return Certificate([n_mat], denom, value, worst)


def certify_full(
    ys: list[np.ndarray],
    sizes: np.ndarray,
    qs: np.ndarray,
    stacks: list[np.ndarray],
    bits: int = 48,
) -> Certificate:
    """Exact lower bound certificate from one dual block per shape."""
    denom = 1 << (3 * bits)
    numerators = [_dyadic_numerator(y, bits) for y in ys]
    inners = np.zeros(len(qs), dtype=object)
    for n_mat, stack in zip(numerators, stacks):
        inners += stack.reshape(len(qs), -1).astype(object) @ n_mat.ravel()
    value, worst = _certified_min(inners, sizes, qs, denom)
    return Certificate(numerators, denom, value, worst)


def exactly_psd(numerator: np.ndarray) -> bool:
    """Pivoted rational elimination; no rounding anywhere."""
    a = [[Fraction(int(v)) for v in row] for row in np.asarray(numerator, dtype=object)]
    idx = list(range(len(a)))
    while idx:
        piv = max(idx, key=lambda i: a[i][i])
        if a[piv][piv] < 0:
            return False
        if a[piv][piv] == 0:
            return all(a[i][j] == 0 for i in idx for j in idx)
        idx.remove(piv)
        for i in idx:
            r = a[i][piv] / a[piv][piv]
            for j in idx:
                a[i][j] -= r * a[piv][j]
    return True


def rank_report(y: np.ndarray, tol: float = 1e-6) -> tuple[int, np.ndarray | None]:
    """Numerical rank of an optimal dual block, and for rank one the
    vector v with y = 2 v v^T; the factor two mirrors the ordered-pair
    counting in the class forms."""
    vals, vecs = np.linalg.eigh(np.asarray(y, dtype=np.float64))
    rank = int((vals > tol * max(vals[-1], 0.0)).sum())
    if rank != 1:
        return rank, None
    v = vecs[:, -1] * np.sqrt(vals[-1] / 2.0)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return rank, v


# -- drivers -----------------------------------------------------------------


def _state_path(cache_dir, m: int):
    return cache.resolve_cache_dir(cache_dir) / f"cuts_{m}.json"


def _solve_polished(n, c, mats, x0, tol):
    try:
        sol = solve_bound_problem(n, c, mats, x0, tol=tol)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"factorization failed inside the solver: {exc}") from exc
    t_pol, y_pol = polish_dual(n, c, mats, sol.y, x=sol.x)
    return sol, t_pol, y_pol


def run_single(
    m: int,
    cache_dir=None,
    route: str = "poly",
    tol: float = 1e-9,
    tol_cut: float = 1e-7,
    batch: int = 50,
    cut_threshold: int = 4000,
    max_rounds: int = 200,
    resume: bool = False,
    bits: int = 48,
    progress=None,
) -> RelaxationOutcome:
    """Certified optimum of the single-block relaxation.

    Solves directly while the class count fits a dense Schur complement,
    otherwise runs the cutting-plane loop.  progress, when given, receives
    one RoundRecord per round as it completes."""
    d, sizes, qs, tri = hook_tables(m, cache_dir, route)
    count = len(qs)
    fsizes = sizes.astype(np.float64)
    c = qs.astype(np.float64)
    rounds: list[RoundRecord] = []

    def emit(rec):
        rounds.append(rec)
        if progress is not None:
            progress(rec)

    if count <= cut_threshold:
        mats = _scaled_mats(tri, (d,), sizes)
        anchor = _anchor_index(qs, mats)
        x0 = _strict_start(mats, sizes, anchor)
        started = time.monotonic()
        sol, t_pol, y_pol = _solve_polished(np.ones(count), c, mats, x0, tol)
        maxv, _ = scan_violations(y_pol[0], t_pol, fsizes, c, tri, top=1)
        cert = certify_single(y_pol[0], sizes, qs, tri, bits)
        emit(RoundRecord(1, count, t_pol, maxv, cert.worst_class,
                         (time.monotonic() - started) * 1e3))
        return RelaxationOutcome(
            m=m, kind="single", value=float(class_slacks(y_pol[0], 0.0, fsizes, c, tri).min()),
            raw=sol.t, certificate=cert, status=sol.status, class_count=count,
            rounds=rounds, y=y_pol, x=sol.x, active=np.arange(count, dtype=np.int64),
        )

    mats_all = split_triangles(tri, (d,))[0]
    anchor = _anchor_index(qs, [mats_all / fsizes[:, None, None]])
    active = [anchor]
    state_file = _state_path(cache_dir, m)
    if resume and state_file.exists():
        saved = json.loads(state_file.read_text())
        if saved.get("m") == m and saved.get("active"):
            active = [int(i) for i in saved["active"]]
            if anchor not in active:
                active.insert(0, anchor)

    streaks: dict[int, int] = {}
    sol = t_pol = None
    y_best = None
    for rnd in range(1, max_rounds + 1):
        started = time.monotonic()
        ids = np.array(sorted(active), dtype=np.int64)
        sub = [mats_all[ids] / fsizes[ids, None, None]]
        x0 = _strict_start(sub, sizes[ids], int(np.searchsorted(ids, anchor)))
        sol, t_pol, y_pol = _solve_polished(np.ones(ids.size), c[ids], sub, x0, tol)
        y_best = y_pol[0]
        maxv, offenders = scan_violations(y_best, t_pol, fsizes, c, tri, top=batch)
        emit(RoundRecord(rnd, ids.size, t_pol,
                         maxv, int(offenders[0]) if offenders.size else -1,
                         (time.monotonic() - started) * 1e3))
        state_file.write_text(json.dumps({"m": m, "round": rnd, "active": sorted(active)}))
        if maxv <= tol_cut:
            break
        # dual multipliers of the cuts are the primal weights; cuts that
        # stay slack and weightless for five rounds get dropped
        slacks_here = class_slacks(y_best, t_pol, fsizes, c, tri)
        xmax = sol.x.max()
        for pos, cls in enumerate(ids):
            cls = int(cls)
            if cls != anchor and sol.x[pos] < 1e-12 * xmax and slacks_here[cls] > 10 * tol_cut:
                streaks[cls] = streaks.get(cls, 0) + 1
            else:
                streaks.pop(cls, None)
        drop = {cls for cls, k in streaks.items() if k >= 5}
        active = [cls for cls in active if cls not in drop]
        known = set(active)
        active.extend(int(i) for i in offenders if int(i) not in known)
    else:
        raise SolverError(f"cutting-plane loop did not settle in {max_rounds} rounds")

    cert = certify_single(y_best, sizes, qs, tri, bits)
    state_file.unlink(missing_ok=True)
    return RelaxationOutcome(
        m=m, kind="single", value=float(class_slacks(y_best, 0.0, fsizes, c, tri).min()),
        raw=sol.t, certificate=cert, status=sol.status, class_count=count,
        rounds=rounds, y=[y_best], x=sol.x,
        active=np.array(sorted(active), dtype=np.int64),
    )


def run_full(
    m: int,
    cache_dir=None,
    route: str = "poly",
    tol: float = 1e-9,
    bits: int = 48,
) -> RelaxationOutcome:
    """Certified optimum of the full relaxation, all blocks at once."""
    dims, sizes, qs, tri = full_tables(m, cache_dir, route)
    count = len(qs)
    c = qs.astype(np.float64)
    mats = _scaled_mats(tri, dims, sizes)
    anchor = _anchor_index(qs, mats)
    x0 = _strict_start(mats, sizes, anchor)
    started = time.monotonic()
    sol, t_pol, y_pol = _solve_polished(np.ones(count), c, mats, x0, tol)
    stacks = split_triangles(tri, dims)
    cert = certify_full(y_pol, sizes, qs, stacks, bits)
    rec = RoundRecord(1, count, t_pol, float(-min(
        feasible_value(np.ones(count), c, mats, y_pol) - t_pol, 0.0)),
        cert.worst_class, (time.monotonic() - started) * 1e3)
    return RelaxationOutcome(
        m=m, kind="full", value=feasible_value(np.ones(count), c, mats, y_pol),
        raw=sol.t, certificate=cert, status=sol.status, class_count=count,
        rounds=[rec], y=y_pol, x=sol.x, active=np.arange(count, dtype=np.int64),
    )
