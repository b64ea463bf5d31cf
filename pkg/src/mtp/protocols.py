"""Multiple-teleportation protocols: schedules, branch enumeration and success laws.

Three schedules are supported:

* ``P1``: every hop uses the channel ``n`` and a standard Bell measurement.
* ``P2``: every hop uses channel ``n`` measured in the matching basis ``m = n``.
* ``P3``: standard Bell measurements, channels ``n, n, n^2, n^4, ...``.

Success at step ``j`` means the cumulative amplitude factors first become
equal at ``j``; the qubit then stops travelling, so success events at
different steps are disjoint and their probabilities add up.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from mtp.errors import DomainError, ResourceError
from mtp.qstate import BELL_LABELS, BellLabel, QubitState, check_param, concurrence
from mtp.teleport import (
    BALANCE_TOL,
    IDENTITY_FACTORS,
    TransformFactors,
    is_unity_fidelity,
    step_factor_table,
)

MAX_STEPS = 12
MES_LIMIT_TOL = 1e-9
DEFAULT_SHARD_SIZE = 10_000


class Protocol(enum.IntEnum):
    P1 = 1
    P2 = 2
    P3 = 3


def _protocol(kind) -> Protocol:
    if isinstance(kind, str):
        kind = kind.upper().lstrip("P")
    try:
        return Protocol(int(kind))
    except (TypeError, ValueError) as exc:
        raise DomainError(f"unknown protocol {kind!r}") from exc


def _steps(q, minimum: int = 1) -> int:
    if isinstance(q, bool) or int(q) != q:
        raise DomainError(f"step count must be an integer, got {q!r}")
    q = int(q)
    if q < minimum:
        raise DomainError(f"step count must be >= {minimum}, got {q}")
    return q


def _guard(q: int) -> None:
    if q > MAX_STEPS:
        raise ResourceError(f"{q} steps exceeds the enumeration guard of {MAX_STEPS}")


@dataclass(frozen=True)
class Schedule:
    """Per-step ``(channel n_j, measurement basis m_j)`` pairs."""

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        steps = tuple(
            (check_param(n, "n_j"), check_param(m, "m_j")) for n, m in self.steps
        )
        if not steps:
            raise DomainError("a schedule needs at least one step")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def channels(self) -> tuple[float, ...]:
        return tuple(n for n, _ in self.steps)

    @property
    def bases(self) -> tuple[float, ...]:
        return tuple(m for _, m in self.steps)

    def prefix(self, q: int) -> Schedule:
        return Schedule(self.steps[:q])

    def factor_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays of shape ``(q, 4)`` holding ``h_alpha`` and ``h_beta`` per step and label."""
        tables = [step_factor_table(n, m) for n, m in self.steps]
        ha = np.array([[h.h_alpha for h in t] for t in tables])
        hb = np.array([[h.h_beta for h in t] for t in tables])
        return ha, hb


def schedule_for(kind, n: float, q: int) -> Schedule:
    """Build the schedule of protocol ``kind`` for ``q`` hops starting from channel ``n``."""
    kind = _protocol(kind)
    n = check_param(n)
    q = _steps(q)
    if kind is Protocol.P1:
        return Schedule(((n, 1.0),) * q)
    if kind is Protocol.P2:
        return Schedule(((n, n),) * q)
    # P3: n_1 = n_2 = n, then n_j = n_{j-1}^2
    channels = [n] + [n ** (2 ** (j - 2)) for j in range(2, q + 1)]
    if any(c == 0.0 for c in channels):
        raise DomainError(f"channel parameter underflows for n={n}, q={q}")
    return Schedule(tuple((c, 1.0) for c in channels))


@dataclass(frozen=True)
class Branch:
    """One full sequence of outcomes with its cumulative factors and exact probability."""

    labels: tuple[BellLabel, ...]
    h_alpha: float
    h_beta: float
    probability: float

    @property
    def factors(self) -> TransformFactors:
        return TransformFactors(self.h_alpha, self.h_beta)

    def output_state(self, s: QubitState) -> QubitState:
        return self.factors.apply(s)


def _check_input(state: QubitState) -> None:
    if not state.is_normalized:
        raise DomainError(f"input state must be normalized (norm^2 = {state.norm_sq!r})")


def iter_branches(sch: Schedule, state: QubitState) -> Iterator[Branch]:
    """Yield all ``4^q`` branches depth first, in lexicographic label order."""
    q = len(sch)
    _guard(q)
    _check_input(state)
    tables = [step_factor_table(n, m) for n, m in sch.steps]

    def walk(depth, labels, h):
        if depth == q:
            yield Branch(labels, h.h_alpha, h.h_beta, h.probability(state))
            return
        for label, step in zip(BELL_LABELS, tables[depth]):
            yield from walk(depth + 1, labels + (label,), h * step)

    yield from walk(0, (), IDENTITY_FACTORS)


def enumerate_branches(sch: Schedule, state: QubitState) -> list[Branch]:
    """Materialize every branch of ``sch``; see :func:`iter_branches`."""
    return list(iter_branches(sch, state))


def first_balanced_step(
    sch: Schedule, labels: Sequence[BellLabel], tol: float = BALANCE_TOL
) -> int | None:
    """First prefix length whose cumulative factors are equal, judged numerically."""
    h = IDENTITY_FACTORS
    for j, ((n, m), label) in enumerate(zip(sch.steps, labels), start=1):
        h = h * step_factor_table(n, m)[BELL_LABELS.index(label)]
        if is_unity_fidelity(h, tol):
            return j
    return None


def first_success_step(labels: Sequence[BellLabel], kind) -> int | None:
    """First prefix length at which the protocol's counting rule is balanced.

    P1 balances Phi-type against Psi-type outcomes; P2 balances Phi+ against
    Psi- (Phi- and Psi+ are neutral under the matching condition). In P3 each
    channel catches up with the whole deficit accumulated so far, so success
    is the first outcome whose type differs from the first one.
    """
    kind = _protocol(kind)
    if kind is Protocol.P3:
        for j, label in enumerate(labels[1:], start=2):
            if label.is_phi != labels[0].is_phi:
                return j
        return None
    diff = 0
    for j, label in enumerate(labels, start=1):
        if kind is Protocol.P2:
            diff += (label is BellLabel.PHI_PLUS) - (label is BellLabel.PSI_MINUS)
        else:
            diff += 1 if label.is_phi else -1
        if diff == 0:
            return j
    return None


@lru_cache(maxsize=None)
def count_A(q: int) -> int:
    """Length-``q`` Bell sequences first balanced (Phi-type vs Psi-type) at ``q``.

    Each label is Phi- or Psi-type with two signs, so this is ``2^q`` times
    the number of +-1 strings whose partial sums first hit zero at ``q``.
    """
    q = _steps(q)
    _guard(q)
    if q % 2:
        return 0
    walks = 0
    for signs in itertools.product((1, -1), repeat=q):
        partial = list(itertools.accumulate(signs))
        if partial[-1] == 0 and all(partial[:-1]):
            walks += 1
    return walks << q


@lru_cache(maxsize=None)
def count_B(q: int) -> int:
    """Length-``q`` GBM sequences with #Phi+ == #Psi- first at step ``q``."""
    q = _steps(q)
    _guard(q)
    # walk on d = #Phi+ - #Psi-; Phi- and Psi+ leave d unchanged (2 ways)
    ways = {0: 1}
    for step in range(1, q + 1):
        nxt: dict[int, int] = {}
        for d, w in ways.items():
            for delta, mult in ((1, 1), (-1, 1), (0, 2)):
                nxt[d + delta] = nxt.get(d + delta, 0) + w * mult
        if step == q:
            return nxt.get(0, 0)
        nxt.pop(0, None)
        ways = nxt
    raise AssertionError("unreachable")


def p_step_analytic(kind, n: float, q: int) -> float:
    """Closed-form probability of first succeeding at hop ``q``."""
    kind = _protocol(kind)
    n = check_param(n)
    q = _steps(q)
    n2 = n * n
    if kind is Protocol.P1:
        return count_A(q) * n**q / (2**q * (1.0 + n2) ** q)
    if kind is Protocol.P2:
        return count_B(q) * n ** (2 * q) / (1.0 + n2) ** (2 * q)
    if q == 1:
        return 0.0
    if abs(1.0 - n) < MES_LIMIT_TOL:
        return 2.0 ** (1 - q)
    return 2.0 * n ** (2 ** (q - 1)) * (1.0 - n2) / ((1.0 + n2) * (1.0 - n ** (2**q)))


def p_event_p3(n: float, q: int) -> float:
    """Probability of one particular successful P3 sequence of length ``q``."""
    n = check_param(n)
    q = _steps(q, minimum=2)
    prod = math.prod(1.0 + n ** (2**j) for j in range(1, q))
    return n ** (2 ** (q - 1)) / (2**q * (1.0 + n * n) * prod)


def p_step_concurrence_form(kind, sch: Schedule, q: int) -> float:
    """The step-``q`` success probability written through channel concurrences."""
    kind = _protocol(kind)
    q = _steps(q, minimum=2 if kind is Protocol.P3 else 1)
    if q > len(sch):
        raise DomainError(f"schedule has {len(sch)} steps, need {q}")
    steps = sch.steps[:q]
    if kind is Protocol.P3:
        return 2.0 * math.prod(concurrence(n) / 2.0 for n, _ in steps)
    if kind is Protocol.P1:
        return count_A(q) / 2**q * math.prod(concurrence(n) / 2.0 for n, _ in steps)
    return count_B(q) * math.prod(concurrence(n) * concurrence(m) / 4.0 for n, m in steps)


@dataclass(frozen=True)
class SuccessProfile:
    per_step: tuple[float, ...]

    @property
    def cumulative(self) -> float:
        return math.fsum(self.per_step)

    @property
    def running(self) -> tuple[float, ...]:
        """Cumulative success after each step."""
        return tuple(math.fsum(self.per_step[: j + 1]) for j in range(len(self.per_step)))


def cumulative_success(kind, n: float, q: int) -> SuccessProfile:
    """Per-step and total success of protocol ``kind`` after ``q`` hops."""
    q = _steps(q)
    return SuccessProfile(tuple(p_step_analytic(kind, n, j) for j in range(1, q + 1)))


def _balanced(ha: np.ndarray, hb: np.ndarray, tol: float) -> np.ndarray:
    return np.abs(ha - hb) <= tol * np.maximum(np.abs(ha), np.abs(hb))


def _subtree_success(ha_steps, hb_steps, first, p0, p1, tol):
    q = ha_steps.shape[0]
    out = np.zeros(q)
    ha = ha_steps[0, [first]]
    hb = hb_steps[0, [first]]
    for j in range(q):
        if j:
            ha = np.multiply.outer(ha, ha_steps[j]).ravel()
            hb = np.multiply.outer(hb, hb_steps[j]).ravel()
        bal = _balanced(ha, hb, tol)
        if bal.any():
            out[j] = math.fsum(ha[bal] ** 2 * p0 + hb[bal] ** 2 * p1)
            ha, hb = ha[~bal], hb[~bal]
        if ha.size == 0:
            break
    return out


def enumerated_success(sch: Schedule, state: QubitState, tol: float = BALANCE_TOL) -> SuccessProfile:
    """Exact per-step success probabilities by exhaustive enumeration.

    Every prefix is classified by numeric factor balance; prefixes that have
    already succeeded are pruned, mirroring stop-on-success. The tree is
    processed one first-outcome subtree at a time.
    """
    q = len(sch)
    _guard(q)
    _check_input(state)
    ha_steps, hb_steps = sch.factor_arrays()
    p0, p1 = abs(state.a0) ** 2, abs(state.a1) ** 2
    parts = [_subtree_success(ha_steps, hb_steps, k, p0, p1, tol) for k in range(4)]
    return SuccessProfile(tuple(math.fsum(col) for col in zip(*parts)))


def final_balance_probability(sch: Schedule, state: QubitState, tol: float = BALANCE_TOL) -> tuple[int, float]:
    """Count and total probability of full-length sequences balanced at the end.

    Intermediate balance is ignored: the qubit must traverse every hop.
    """
    q = len(sch)
    _guard(q)
    _check_input(state)
    ha_steps, hb_steps = sch.factor_arrays()
    ha = np.ones(1)
    hb = np.ones(1)
    for j in range(q):
        ha = np.multiply.outer(ha, ha_steps[j]).ravel()
        hb = np.multiply.outer(hb, hb_steps[j]).ravel()
    bal = _balanced(ha, hb, tol)
    p0, p1 = abs(state.a0) ** 2, abs(state.a1) ** 2
    return int(bal.sum()), math.fsum(ha[bal] ** 2 * p0 + hb[bal] ** 2 * p1)


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    seed: int
    successes: tuple[int, ...]

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.successes, dtype=float) / self.trials

    @property
    def stderr(self) -> np.ndarray:
        p = self.frequencies
        return np.sqrt(p * (1.0 - p) / self.trials)

    def within(self, analytic: Sequence[float], sigmas: float = 5.0) -> np.ndarray:
        """Per-step agreement with ``analytic`` at ``sigmas`` binomial standard errors.

        The standard error is taken from the analytic value, so an exact zero
        must be matched by zero observed successes.
        """
        p = np.asarray(analytic, dtype=float)
        se = np.sqrt(p * (1.0 - p) / self.trials)
        return np.abs(self.frequencies - p) <= sigmas * se + 1e-15


def _mc_shard(ha_steps, hb_steps, a0, a1, trials, seed_seq, stop_on_success, tol):
    rng = np.random.default_rng(seed_seq)
    q = ha_steps.shape[0]
    x0 = np.full(trials, a0, dtype=np.complex128)
    x1 = np.full(trials, a1, dtype=np.complex128)
    ca = np.ones(trials)
    cb = np.ones(trials)
    active = np.ones(trials, dtype=bool)
    done = np.zeros(trials, dtype=bool)
    counts = np.zeros(q, dtype=np.int64)
    for j in range(q):
        u = rng.random(trials)
        probs = (np.abs(x0)[:, None] * ha_steps[j]) ** 2 + (np.abs(x1)[:, None] * hb_steps[j]) ** 2
        cum = np.cumsum(probs, axis=1)
        idx = np.minimum((u[:, None] >= cum).sum(axis=1), 3)
        idx = np.where(active, idx, 0)
        ha = np.where(active, ha_steps[j, idx], 1.0)
        hb = np.where(active, hb_steps[j, idx], 1.0)
        x0 = x0 * ha
        x1 = x1 * hb
        norm = np.sqrt(np.abs(x0) ** 2 + np.abs(x1) ** 2)
        x0 /= norm
        x1 /= norm
        ca = ca * ha
        cb = cb * hb
        scale = np.maximum(ca, cb)
        ca /= scale
        cb /= scale
        hit = active & ~done & _balanced(ca, cb, tol)
        counts[j] = int(hit.sum())
        done |= hit
        if stop_on_success:
            active &= ~hit
    return counts


def _mc_shard_args(args):
    return _mc_shard(*args)


def monte_carlo(
    sch: Schedule,
    state: QubitState,
    trials: int,
    seed: int,
    stop_on_success: bool = True,
    shard_size: int = DEFAULT_SHARD_SIZE,
    workers: int | None = None,
    tol: float = BALANCE_TOL,
) -> MonteCarloResult:
    """Sample outcome sequences hop by hop and count first successes per step.

    Trials are split into shards of ``shard_size``; shard ``k`` draws from
    ``numpy.random.SeedSequence(seed).spawn(n_shards)[k]``. Counts only depend
    on ``seed`` and ``shard_size``, not on ``workers``.

    Args:
        sch: hop schedule.
        state: normalized input qubit.
        trials: number of independent runs, at least 1.
        seed: root seed.
        stop_on_success: freeze a trial once it succeeds (the default). When
            False the qubit keeps hopping, but only its first success counts.
        shard_size: trials per shard.
        workers: process count for shards; ``None`` or 1 runs serially.
        tol: relative tolerance of the factor-balance test.
    """
    trials = int(trials)
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if shard_size < 1:
        raise DomainError("shard_size must be >= 1")
    _check_input(state)
    ha_steps, hb_steps = sch.factor_arrays()
    n_shards = -(-trials // shard_size)
    children = np.random.SeedSequence(int(seed)).spawn(n_shards)
    jobs = []
    for k, child in enumerate(children):
        size = min(shard_size, trials - k * shard_size)
        jobs.append((ha_steps, hb_steps, state.a0, state.a1, size, child, stop_on_success, tol))
    if workers and workers > 1 and n_shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_shard_args, jobs))
    else:
        parts = [_mc_shard(*job) for job in jobs]
    total = np.sum(parts, axis=0)
    return MonteCarloResult(trials, int(seed), tuple(int(c) for c in total))
