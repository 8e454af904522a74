"""Command line front end for the crossing-bound pipeline.

Stages share one cache directory and build on each other's files, so any
subcommand can start from an empty cache and pull in what it needs.  The
numeric imports happen inside the handlers: --threads pins the BLAS pool
sizes through the environment, which only works before the libraries load.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from .errors import ArgumentError, CrossingsError, DataError


def _add_common(p: argparse.ArgumentParser, with_m: bool = True) -> None:
    if with_m:
        p.add_argument("--m", type=int, required=True, help="cycle length")
    p.add_argument(
        "--cache-dir", default=None,
        help="cache directory (default: CROSSING_CACHE_DIR or a per-user path)",
    )
    p.add_argument("--threads", type=int, default=None, help="BLAS thread count")
    p.add_argument(
        "--precision", choices=("double", "extended"), default="double",
        help="floating point width of the solver",
    )


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-gap", type=float, default=1e-9, help="solver gap tolerance")
    p.add_argument("--json", default=None, metavar="PATH", help="also write the result object here")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="crossings",
        description="certified lower bounds on crossing numbers of complete bipartite graphs",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("q", help="cost table: swap distances between cycles")
    _add_common(p)
    p.add_argument("--verify", action="store_true", help="check the self-pair cost law")

    p = sub.add_parser("orbits", help="pair orbits and swap classes")
    _add_common(p)
    p.add_argument("--verify", action="store_true", help="check counts against the reference census")

    p = sub.add_parser("coeffs", help="constraint coefficient tables for the single block")
    _add_common(p)

    p = sub.add_parser("alpha", help="optimum of the full relaxation")
    _add_common(p)
    _add_solver(p)

    p = sub.add_parser("beta", help="optimum of the single-block relaxation")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--tol-cut", type=float, default=1e-7, help="violation scan tolerance")
    p.add_argument("--batch", type=int, default=50, help="cuts added per round")
    p.add_argument("--resume", action="store_true", help="continue a saved cutting-plane run")

    p = sub.add_parser("bounds", help="derived crossing-number bounds, CSV on stdout")
    _add_common(p, with_m=False)
    p.add_argument("--m", type=int, default=None, help="compute the optimum at this level first")
    p.add_argument("--from-table", default=None, metavar="PATH",
                   help="JSON of known optima: {level: value} or {alpha: {...}, beta: {...}}")
    p.add_argument("--n", default=None, metavar="RANGE",
                   help="column counts, like 13, 10..13 or 10,12 (default: n = level)")
    p.add_argument("--source", choices=("alpha", "beta"), default="beta",
                   help="tag for values given without one")

    p = sub.add_parser("certify", help="exact certificate for the single-block optimum")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--tol-cut", type=float, default=1e-7, help="violation scan tolerance")
    p.add_argument("--batch", type=int, default=50, help="cuts added per round")
    p.add_argument("--resume", action="store_true", help="continue a saved cutting-plane run")

    p = sub.add_parser("verify", help="cross-check computed values against known-good ones")
    _add_common(p)

    return top


def _parse_n_values(text: str | None, fallback) -> list[int]:
    if text is None:
        return list(fallback)
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _result_out(args, result: dict) -> None:
    print(json.dumps(result))
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")


def _cmd_q(args) -> int:
    from . import cache
    from .cycles import Cycle, CycleIndex
    from .swapgraph import distances_from_base, self_cost

    cd = cache.resolve_cache_dir(args.cache_dir)
    index = CycleIndex(args.m)
    path = cache.q_table_path(cd, args.m)
    if path.exists():
        dist = cache.read_q_table(path, args.m)
    else:
        dist = distances_from_base(index)
        cache.write_q_table(path, args.m, dist, index.seqs)
    diag = int(dist[index.id_of(Cycle.base(args.m).invert())])
    print(f"m={args.m}: {len(index)} cycles, self-pair cost {diag}, table {path}")
    if args.verify:
        want = self_cost(args.m)
        if diag != want:
            raise DataError(f"self-pair cost {diag} differs from the closed form {want}")
        print(f"ok: self-pair cost matches floor((m-1)^2/4) = {want}")
    return 0


def _cmd_orbits(args) -> int:
    from . import cache, reference
    from .cycles import CycleIndex
    from .orbits import build_pair_orbits, count_relabel_only_orbits
    from .swapgraph import distances_from_base

    cd = cache.resolve_cache_dir(args.cache_dir)
    index = CycleIndex(args.m)
    orbits = build_pair_orbits(index, distances_from_base(index))
    path = cache.orbits_path(cd, args.m)
    if not path.exists():
        cache.write_orbits(path, args.m, orbits.rep_seqs, orbits.n_tau, orbits.q)
    triple = (count_relabel_only_orbits(index), orbits.num_orbits,
              orbits.symmetric_classes().count)
    print(f"m={args.m}: {triple[0]} relabel-only orbits, {triple[1]} / {triple[2]} "
          f"pair orbits / swap classes")
    if args.verify:
        want = reference.CENSUS.get(args.m)
        if want is None:
            print(f"no reference census for m={args.m}")
        elif triple != want:
            raise DataError(f"census {triple} differs from the reference {want}")
        else:
            print("ok: census matches the reference")
    return 0


def _cmd_coeffs(args) -> int:
    from . import cache
    from .relaxations import hook_tables

    cd = cache.resolve_cache_dir(args.cache_dir)
    d, sizes, qs, tri = hook_tables(args.m, cd)
    print(f"m={args.m}: {len(qs)} classes, block size {d}, "
          f"table {cache.coeffs_beta_path(cd, args.m)}")
    return 0


def _cmd_alpha(args) -> int:
    from .relaxations import run_full

    started = time.monotonic()
    out = run_full(args.m, cache_dir=args.cache_dir, tol=args.tol_gap)
    result = {
        "m": args.m,
        "alpha": out.value,
        "certified_bound": out.certificate.bound,
        "classes": out.class_count,
        "blocks": [int(y.shape[0]) for y in out.y],
        "total_time": time.monotonic() - started,
    }
    _result_out(args, result)
    return 0


def _run_single(args):
    from .relaxations import run_single

    def progress(rec):
        line = {
            "round": rec.round,
            "active": rec.active,
            "objective": rec.objective,
            "max_violation": rec.max_violation,
            "wall_time_ms": rec.wall_ms,
        }
        print(json.dumps(line), file=sys.stderr, flush=True)

    return run_single(
        args.m, cache_dir=args.cache_dir, tol=args.tol_gap, tol_cut=args.tol_cut,
        batch=args.batch, resume=args.resume, progress=progress,
    )


def _cmd_beta(args) -> int:
    from .relaxations import rank_report

    started = time.monotonic()
    out = _run_single(args)
    rank, vector = rank_report(out.y[0])
    result = {
        "m": args.m,
        "beta": out.value,
        "certified_bound": out.certificate.bound,
        "rank": rank,
        "eigenvector": None if vector is None else [float(v) for v in vector],
        "rounds": len(out.rounds),
        "total_time": time.monotonic() - started,
    }
    _result_out(args, result)
    return 0


def _cmd_certify(args) -> int:
    from .relaxations import exactly_psd

    out = _run_single(args)
    cert = out.certificate
    result = {
        "m": args.m,
        "certified_bound": cert.bound,
        "value": f"{cert.value.numerator}/{cert.value.denominator}",
        "worst_class": cert.worst_class,
        "psd_verified": all(exactly_psd(n) for n in cert.numerators),
    }
    _result_out(args, result)
    return 0


def _cmd_bounds(args) -> int:
    from .bounds import asymptotic_ratio, exact, lift_bound, plain, quadratic_bound, truncated

    levels: dict[int, tuple[object, str]] = {}
    if args.from_table:
        with open(args.from_table, encoding="utf-8") as fh:
            data = json.load(fh)
        if set(data) <= {"alpha", "beta"}:
            # take the stronger optimum where both relaxations are present
            for source in ("beta", "alpha"):
                for key, value in data.get(source, {}).items():
                    level = int(key)
                    if level not in levels or exact(value) > exact(levels[level][0]):
                        levels[level] = (value, source)
        else:
            levels = {int(k): (v, args.source) for k, v in data.items()}
    if args.m is not None:
        from .relaxations import run_single

        out = run_single(args.m, cache_dir=args.cache_dir)
        levels[args.m] = (out.certificate.value, "beta")
    if not levels:
        raise ArgumentError("bounds needs --from-table or --m")

    rows = []
    for level in sorted(levels):
        value, source = levels[level]
        qb = quadratic_bound(level, value, source)
        ratio = asymptotic_ratio(level, value)
        lifted = lift_bound(qb)
        print(
            f"cr(K_{{{level},n}}) >= {truncated(qb.a, 5)} n^2 - {plain(qb.b)} n"
            f"   [{source}; >= {truncated(lifted.c, 4)} m(m-1)n^2 - {plain(lifted.e)} m(m-1)n"
            f" for m >= {level}; ratio >= {truncated(ratio, 4)}]",
            file=sys.stderr,
        )
        for n in _parse_n_values(args.n, [level]):
            rows.append((level, n, qb.evaluate(n), source, True))

    writer = csv.writer(sys.stdout)
    writer.writerow(["m", "n", "bound", "source", "certified"])
    writer.writerows(rows)
    return 0


def _cmd_verify(args) -> int:
    from . import cache, reference
    from .bounds import exact
    from .cycles import Cycle, CycleIndex
    from .orbits import build_pair_orbits, count_relabel_only_orbits
    from .swapgraph import distances_from_base, self_cost

    m = args.m
    cd = cache.resolve_cache_dir(args.cache_dir)
    index = CycleIndex(m)
    dist = distances_from_base(index)
    diag = int(dist[index.id_of(Cycle.base(m).invert())])
    if diag != self_cost(m):
        raise DataError(f"self-pair cost {diag} differs from the closed form {self_cost(m)}")
    print(f"ok: self-pair cost {diag}")

    orbits = build_pair_orbits(index, dist)
    triple = (count_relabel_only_orbits(index), orbits.num_orbits,
              orbits.symmetric_classes().count)
    want = reference.CENSUS.get(m)
    if want is not None:
        if triple != want:
            raise DataError(f"census {triple} differs from the reference {want}")
        print(f"ok: census {triple}")
    else:
        print(f"skip: no reference census for m={m}")

    if m in reference.BLOCK_DIMS and m <= 7:
        from collections import Counter

        from .repsets import build_blocks

        dims = Counter(b.dim for b in build_blocks(index))
        if dict(dims) != reference.BLOCK_DIMS[m]:
            raise DataError(f"block dimensions {dict(dims)} differ from the reference")
        print(f"ok: block dimensions {sorted(dims.elements(), reverse=True)}")
    else:
        print(f"skip: block check not run at m={m}")

    if m <= 7:
        from .relaxations import run_single

        out = run_single(m, cache_dir=cd)
        want_value = exact(reference.SINGLE_BLOCK_OPTIMA[m])
        gap = abs(float(out.certificate.value - want_value))
        if gap > 1e-6:
            raise DataError(f"single-block optimum off by {gap:.2e} at m={m}")
        print(f"ok: single-block optimum {out.value:.10f}")
    else:
        print(f"skip: optimum check not run at m={m}")

    checked = 0
    for path in (cache.q_table_path(cd, m), cache.orbits_path(cd, m),
                 cache.coeffs_beta_path(cd, m), cache.coeffs_alpha_path(cd, m)):
        if path.exists():
            cache._read_payload(path)
            checked += 1
    print(f"ok: {checked} cache files pass their checksums")
    return 0


_HANDLERS = {
    "q": _cmd_q,
    "orbits": _cmd_orbits,
    "coeffs": _cmd_coeffs,
    "alpha": _cmd_alpha,
    "beta": _cmd_beta,
    "bounds": _cmd_bounds,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return ArgumentError.exit_code
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        if args.precision == "extended":
            raise ArgumentError(
                "no extended-precision linear algebra is available; "
                "results are certified in exact arithmetic instead"
            )
        return _HANDLERS[args.command](args)
    except CrossingsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
