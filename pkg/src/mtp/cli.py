"""Command-line front end: CSV data for the success curves, count tables,
Monte Carlo verification and the swapping comparison.

Exit codes: 0 success, 1 usage error, 2 statistical/verification failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from contextlib import contextmanager

import numpy as np

from mtp.errors import DomainError, ResourceError
from mtp.protocols import (
    DEFAULT_SHARD_SIZE,
    MAX_STEPS,
    Protocol,
    count_A,
    count_B,
    cumulative_success,
    monte_carlo,
    schedule_for,
)
from mtp.qstate import QubitState
from mtp.swapping import compare_configurations, crossing_point

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STAT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def n_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid ``start, start+step, ..., <= stop`` rounded to 12 decimals."""
    if not step > 0:
        raise UsageError("--n-step must be positive")
    if not (0 < start <= 1 and 0 < stop <= 1):
        raise UsageError("grid bounds must lie in (0, 1]")
    if stop < start:
        raise UsageError("--n-stop must not be below --n-start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def cmd_curve(args, out) -> int:
    kind = Protocol(args.protocol)
    if args.q < 1:
        raise UsageError("--q must be >= 1")
    if kind is not Protocol.P3 and args.q > MAX_STEPS:
        raise UsageError(f"--q must be <= {MAX_STEPS} for protocols 1 and 2")
    out.write("n,q,p_step,p_cumulative\n")
    for n in n_grid(args.n_start, args.n_stop, args.n_step):
        profile = cumulative_success(kind, n, args.q)
        for j, (p, c) in enumerate(zip(profile.per_step, profile.running), start=1):
            out.write(f"{fmt(n)},{j},{fmt(p)},{fmt(c)}\n")
    return EXIT_OK


def cmd_counts(args, out) -> int:
    if not 1 <= args.max_q <= MAX_STEPS:
        raise UsageError(f"--max-q must be in 1..{MAX_STEPS}")
    counter = count_A if args.which == "A" else count_B
    out.write(f"q,{args.which}\n")
    for q in range(1, args.max_q + 1):
        out.write(f"{q},{counter(q)}\n")
    return EXIT_OK


def simulate_report(protocol: int, n: float, q: int, trials: int, seed: int,
                    state: QubitState, workers: int | None = None,
                    sigmas: float = 5.0) -> tuple[str, bool]:
    """Run the sampler against the closed forms; returns the report text and overall verdict."""
    kind = Protocol(protocol)
    sch = schedule_for(kind, n, q)
    analytic = cumulative_success(kind, n, q).per_step
    res = monte_carlo(sch, state, trials, seed, workers=workers)
    ok = res.within(analytic, sigmas)
    buf = io.StringIO()
    buf.write(f"# protocol={int(kind)} n={fmt(n)} q={q} trials={trials} seed={seed} "
              f"shard_size={DEFAULT_SHARD_SIZE}\n")
    buf.write("step,successes,empirical,stderr,analytic,within_5sigma\n")
    for j in range(q):
        buf.write(f"{j + 1},{res.successes[j]},{fmt(res.frequencies[j])},"
                  f"{fmt(res.stderr[j])},{fmt(analytic[j])},{int(ok[j])}\n")
    buf.write(f"cumulative_empirical={fmt(float(res.frequencies.sum()))}\n")
    buf.write(f"cumulative_analytic={fmt(math.fsum(analytic))}\n")
    buf.write(f"status={'PASS' if ok.all() else 'FAIL'}\n")
    return buf.getvalue(), bool(ok.all())


def cmd_simulate(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.q < 1 or (args.protocol != 3 and args.q > MAX_STEPS):
        raise UsageError(f"--q must be in 1..{MAX_STEPS}")
    if not 0 < args.n <= 1:
        raise UsageError("--n must lie in (0, 1]")
    amps = np.array([complex(args.alpha), complex(args.beta)])
    if not np.any(amps):
        raise UsageError("input amplitudes must not both vanish")
    state = QubitState.from_array(amps / np.linalg.norm(amps))
    text, passed = simulate_report(args.protocol, args.n, args.q, args.trials,
                                   args.seed, state, workers=args.workers)
    out.write(text)
    return EXIT_OK if passed else EXIT_STAT


def cmd_compare(args, out) -> int:
    if args.pairs < 2:
        raise UsageError("--pairs must be >= 2")
    out.write("n,p2_c2,p3_c2,swap_c4,swap_c1,p1_c4\n")
    for n in n_grid(args.n_start, args.n_stop, args.n_step):
        row = compare_configurations(n, args.pairs).as_row()
        out.write(",".join(fmt(x) for x in row) + "\n")
    if args.pairs % 2 == 0 and args.pairs >= 4:
        cross = crossing_point(args.pairs)
        out.write(f"crossing_n={'none' if cross is None else f'{cross:.3f}'}\n")
    return EXIT_OK


def _add_grid(p):
    p.add_argument("--n-start", type=float, default=0.01)
    p.add_argument("--n-stop", type=float, default=0.99)
    p.add_argument("--n-step", type=float, default=0.01)
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="per-step and cumulative success over an n grid")
    p.add_argument("--protocol", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--q", type=int, required=True)
    _add_grid(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("counts", help="A(q) or B(q) counting table")
    p.add_argument("--which", choices=("A", "B"), required=True)
    p.add_argument("--max-q", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo check of the per-step success probabilities",
        description=(
            "Trials run in shards of %d; shard k uses "
            "numpy.random.SeedSequence(seed).spawn(n_shards)[k], so the report "
            "depends only on the seed, never on --workers." % DEFAULT_SHARD_SIZE
        ),
    )
    p.add_argument("--protocol", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", default="0.6", help="amplitude of |0> (complex literal)")
    p.add_argument("--beta", default="0.8j", help="amplitude of |1> (complex literal)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="direct protocols against entanglement swapping")
    p.add_argument("--pairs", type=int, default=6)
    _add_grid(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _sink(args.out) as out:
            return args.func(args, out)
    except (UsageError, DomainError, ResourceError, ValueError) as exc:
        print(f"mtp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
