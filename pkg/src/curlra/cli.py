"""``curlra`` command line.

Subcommands: ``gen``, ``spsd``, ``ca``, ``hss-bench`` and ``oracle``.
Exit status is 0 on success, 2 when a run ends in a FAILURE outcome and 1
on errors (bad arguments, unreadable files, invalid inputs).  Reports are
deterministic for a fixed configuration except for the final ``time:``
line.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .access import EntryOracle
from .cross import CaConfig, DegenerateStripError, ca_iterations
from .cur import cheb_error
from .generators import GRAMMAR, SpecError, generate, oracle_for, spec_shape
from .hss import DENSE_LIMIT, hss_benchmark
from .linalg import singular_values
from .matrixfile import MatrixFileError, format_matrix, read_matrix
from .oracle import (
    EnumerationLimitError,
    adversary_demo,
    brute_force_max_volume,
    repo_procedures,
    theorem_suite,
    zero_procedure,
)
from .spsd import (
    MaxUpdatesExceeded,
    NotSpsdError,
    SingularGeneratorError,
    SpsdConfig,
    ZeroVolumeError,
    build_cur_spsd,
    log_update_bound,
    spsd_main,
)

OK, ERROR, FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be positive")
    return vals


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="matrix file")
    src.add_argument("--gen", metavar="SPEC", help=f"generator spec: {GRAMMAR}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="curlra", description="Sublinear CUR low-rank approximation.")
    p.add_argument("--version", action="version", version=f"curlra {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    g = sub.add_parser("gen", help="write a generated matrix file")
    g.add_argument("--spec", required=True, help=GRAMMAR)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", metavar="PATH")

    s = sub.add_parser("spsd", help="CUR of an SPSD matrix by principal volume maximization")
    _add_source(s)
    s.add_argument("--seed", type=int, help="required with --gen")
    s.add_argument("--rank", type=_positive_int, required=True)
    s.add_argument("--gen-size", type=_positive_int, help="principal generator size K (default rank)")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--max-updates", type=_positive_int)
    s.add_argument("--out", metavar="PATH")

    c = sub.add_parser("ca", help="cross-approximation iterations")
    _add_source(c)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--rank", type=_positive_int, required=True)
    c.add_argument("--gen-rows", type=_positive_int, help="generator rows k (default rank)")
    c.add_argument("--gen-cols", type=_positive_int, help="generator columns l (default rank)")
    c.add_argument("--strip-rows", type=_positive_int, help="rows kept per vertical step p (default k)")
    c.add_argument("--strip-cols", type=_positive_int, help="columns kept per horizontal step q (default l)")
    c.add_argument("--iters", type=_positive_int, default=10, help="C-A steps (two per loop)")
    c.add_argument("--tau", type=float, default=0.0, help="sampled Chebyshev error target")
    c.add_argument("--samples", type=_positive_int, default=100)
    c.add_argument("--out", metavar="PATH")

    h = sub.add_parser("hss-bench", help="HSS compression benchmark (CSV)")
    h.add_argument("--seed", type=int, required=True)
    h.add_argument("--sizes", type=_int_list, default=[256])
    h.add_argument("--max-rank", type=_int_list, default=[24])
    h.add_argument("--loops", type=_int_list, default=[1, 5])
    h.add_argument("--trials", type=_positive_int, default=20)
    h.add_argument("--leaf", type=_positive_int, default=32)
    h.add_argument("--xi", type=float, default=1e-8)
    h.add_argument("--kind", choices=["cauchy", "rank"], default="cauchy")
    h.add_argument("--out", metavar="PATH")

    o = sub.add_parser("oracle", help="brute-force verifiers and theorem checks")
    o.add_argument("--suite", choices=["theorems", "adversary", "maxvol"], required=True)
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--trials", type=_positive_int, default=100)
    o.add_argument("--size", type=_positive_int, default=32, help="adversary input order")
    o.add_argument("--input", metavar="PATH", help="matrix file (maxvol)")
    o.add_argument("--gen", metavar="SPEC", help="generator spec (maxvol)")
    o.add_argument("--rank", type=_positive_int)
    o.add_argument("--gen-rows", type=_positive_int)
    o.add_argument("--gen-cols", type=_positive_int)
    o.add_argument("--out", metavar="PATH")
    return p


def _load(args) -> tuple[EntryOracle, str]:
    if args.input:
        return EntryOracle.from_dense(read_matrix(args.input)), f"file {args.input}"
    if args.seed is None:
        raise UsageError("--seed is required with --gen")
    return oracle_for(args.gen, args.seed), f"generated {args.gen} seed={args.seed}"


def _dense(W: EntryOracle) -> np.ndarray | None:
    """Uncounted dense copy for verification, or ``None`` above the size guard."""
    return W.to_dense() if max(W.shape) <= DENSE_LIMIT else None


def _fmt_indices(ix) -> str:
    return " ".join(str(i) for i in ix) if len(ix) else "(none)"


def cmd_gen(args) -> tuple[list[str], int]:
    text = format_matrix(generate(args.spec, args.seed))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
        m, n = spec_shape(args.spec)
        return [f"wrote {m} x {n} matrix to {args.out}"], OK
    sys.stdout.write(text)
    return [], OK


def cmd_spsd(args) -> tuple[list[str], int]:
    W, source = _load(args)
    if W.m != W.n:
        raise ValueError(f"SPSD input must be square, got {W.m} x {W.n}")
    cfg = SpsdConfig(r=args.rank, K=args.gen_size, eps=args.eps, max_updates=args.max_updates)
    r, K, n = cfg.r, cfg.gen_size, W.n
    if r >= n:
        raise ValueError(f"rank {r} must be below n = {n}")
    out = [
        "command: spsd",
        f"input: {source}",
        f"shape: {n} x {n}",
        f"rank: {r}",
        f"generator size: {K}",
        f"eps: {cfg.eps:g}",
    ]
    status = OK
    try:
        res = spsd_main(W, cfg)
    except MaxUpdatesExceeded as exc:
        out += [f"index updates accepted: {exc.updates}",
                "status: FAILURE (index update cap reached before a locally maximal generator)"]
        return out, FAILURE
    projective = K > r
    bound_updates = math.ceil(log_update_bound(r, n, cfg.eps, projective) - 1e-12)
    out += [
        f"indices: {_fmt_indices(res.indices)}",
        f"elimination stopped early: {'yes' if res.early_stop else 'no'}",
        f"index update calls: {res.calls}",
        f"index updates accepted: {res.updates}",
        f"update count bound (log base 1+eps of the starting volume gap): {bound_updates}",
    ]
    cur = build_cur_spsd(W, res.indices, r)
    out.append(f"accesses: {W.access_count} ({W.access_count / n ** 2:.4f} of n^2)")
    A = _dense(W)
    if A is None:
        out.append("error check: skipped (input above the dense verification limit)")
    else:
        err = cheb_error(W, cur)
        s = singular_values(A)
        sigma = float(s[r]) if r < s.size else 0.0
        cheb = float(np.max(np.abs(A)))
        if projective:
            factor = (1 + cfg.eps) * (K + 1) / (K - r + 1)
            name = "bound (locally maximal r-projective volume, K > r): (1+eps)(K+1)/(K-r+1)"
        else:
            factor = (1 + cfg.eps) * (r + 1)
            name = "bound (locally maximal principal volume, K = r): (1+eps)(r+1)"
        ratio = err / sigma if sigma > 0 else (0.0 if err <= 1e-9 * cheb else math.inf)
        out += [
            f"chebyshev error: {err:.6e}",
            f"sigma_(r+1): {sigma:.6e}",
            f"error / sigma_(r+1): {ratio:.6f}",
            f"{name} = {factor:.6f}",
        ]
        if err > factor * sigma + 1e-9 * cheb:
            status = FAILURE
    out.append("status: " + ("OK" if status == OK else "FAILURE (error bound violated)"))
    return out, status


def cmd_ca(args) -> tuple[list[str], int]:
    W, source = _load(args)
    cfg = CaConfig(r=args.rank, k=args.gen_rows, l=args.gen_cols, p=args.strip_rows,
                   q=args.strip_cols, max_iters=args.iters, tau=args.tau, seed=args.seed,
                   verify_samples=args.samples)
    k, l, p, q = cfg.dims
    if p > W.m or q > W.n:
        raise ValueError(f"strips of {p} rows / {q} columns do not fit {W.m} x {W.n}")
    out = [
        "command: ca",
        f"input: {source}",
        f"shape: {W.m} x {W.n}",
        f"rank: {cfg.r}",
        f"generator: {k} x {l}; strips keep {p} rows / {q} columns",
        f"steps allowed: {cfg.max_iters}",
        f"tau: {cfg.tau:g}",
        f"seed: {cfg.seed}",
    ]
    try:
        res = ca_iterations(W, cfg)
    except DegenerateStripError as exc:
        out += [f"degenerate strip: {exc}", "status: FAILURE (zero approximation)"]
        return out, FAILURE
    cur = res.cur
    out += [
        f"steps run: {res.steps} (loops: {res.loops_executed})",
        f"rows: {_fmt_indices(cur.row_set)}",
        f"cols: {_fmt_indices(cur.col_set)}",
        "certified strip factors: " + " ".join(f"{h:.6f}" for h in res.factors),
        f"sampled chebyshev error: {res.estimated_error:.6e}",
        f"sampled frobenius error: {res.frobenius_estimate:.6e}",
        f"accesses: {res.access_count} ({res.access_count / (W.m * W.n):.4f} of m n)",
    ]
    A = _dense(W)
    if A is not None:
        err = cheb_error(W, cur)
        s = singular_values(A)
        sigma = float(s[cfg.r]) if cfg.r < s.size else 0.0
        out += [f"chebyshev error: {err:.6e}", f"sigma_(r+1): {sigma:.6e}"]
        if min(k, l) == cfg.r and sigma > max(W.shape) * np.finfo(float).eps * s[0]:
            f = math.sqrt((k + 1) * (l + 1) / (abs(l - k) + 1))
            h = float(np.prod(res.factors[-2:]))
            out.append(f"reference bound (locally h-maximal volume generator, h = product of "
                       f"the last two strip factors): h sqrt((k+1)(l+1)/(|l-k|+1)) = {h * f:.6f}; "
                       f"observed error / sigma_(r+1) = {err / sigma:.6f}")
    if res.converged:
        out.append("status: OK (sampled error within tau)")
        return out, OK
    out.append("status: FAILURE (sampled error above tau after the last step)")
    return out, FAILURE


def cmd_hss(args) -> tuple[list[str], int]:
    if any(lp < 1 for lp in args.loops):
        raise ValueError("loop counts must be positive")
    if args.xi <= 0:
        raise ValueError("xi must be positive")
    report = hss_benchmark(args.sizes, args.max_rank, loops=tuple(args.loops), trials=args.trials,
                           seed=args.seed, kind=args.kind, leaf_size=args.leaf, xi=args.xi)
    return report.to_csv().splitlines(), OK


def cmd_oracle(args) -> tuple[list[str], int]:
    if args.suite == "theorems":
        rep = theorem_suite(args.seed, args.trials)
        lines = rep.lines()
        failed = sum(not r.passed for r in rep.results)
        lines.append(f"summary: {len(rep.worst())} checks x {args.trials} trials, {failed} failures")
        return lines, OK if rep.passed else FAILURE
    if args.suite == "adversary":
        n = args.size
        if n < 2:
            raise ValueError("adversary input order must be at least 2")
        procs = {"zero-answer": zero_procedure, **repo_procedures(seed=args.seed)}
        lines, status = [f"adversary: null matrix vs unit-entry matrices, {n} x {n}"], OK
        for name, proc in procs.items():
            rep = adversary_demo(n, n, proc, n * n - 1)
            ok = rep.certified
            status = status if ok else FAILURE
            lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {rep.summary()}")
        return lines, status
    # maxvol
    if (args.input is None) == (args.gen is None):
        raise UsageError("maxvol needs exactly one of --input or --gen")
    if args.gen_rows is None or args.gen_cols is None:
        raise UsageError("maxvol needs --gen-rows and --gen-cols")
    A = read_matrix(args.input) if args.input else generate(args.gen, args.seed)
    best = brute_force_max_volume(A, args.gen_rows, args.gen_cols, args.rank)
    vol = best.volume
    return [
        "command: oracle maxvol",
        f"shape: {A.shape[0]} x {A.shape[1]}",
        f"rows: {_fmt_indices(best.rows)}",
        f"cols: {_fmt_indices(best.cols)}",
        "log volume: " + ("-inf (zero)" if vol.is_zero else f"{vol.log_value:.12e}"),
    ], OK


COMMANDS = {"gen": cmd_gen, "spsd": cmd_spsd, "ca": cmd_ca, "hss-bench": cmd_hss,
            "oracle": cmd_oracle}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        lines, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (MatrixFileError, SpecError, EnumerationLimitError, NotSpsdError, ZeroVolumeError,
            SingularGeneratorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    elapsed = f"time: {time.perf_counter() - t0:.3f} s"
    if args.command in ("gen", "hss-bench"):
        print(elapsed, file=sys.stderr)
    if not lines:
        return status
    text = "\n".join(lines) + "\n"
    if args.command not in ("gen", "hss-bench"):
        text += elapsed + "\n"
    if getattr(args, "out", None) and args.command != "gen":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
