"""Comparison of the direct (teleportation) approach with multiple entanglement swapping.

Configurations of six PES's between Alice and Bob:

* ``C1``: three pairs of PES's, each pair swapped into a Bell state, tried in turn.
* ``C2``: Alice holds one PES, the rest sit at Bob's (protocols 2 and 3).
* ``C3``: a chain of PES's with decreasing entanglement, one hop per PES.
* ``C4``: a chain of identical PES's, one hop per PES.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from mtp.errors import DomainError
from mtp.protocols import (
    Protocol,
    Schedule,
    cumulative_success,
    final_balance_probability,
    schedule_for,
)
from mtp.qstate import QubitState, check_param, pes_coefficients

CROSSING_BRACKET = (0.01, 0.99)
CROSSING_XTOL = 1e-6


class ChainConfig(enum.Enum):
    C1 = 1
    C2 = 2
    C3 = 3
    C4 = 4


def _even_pairs(N: int, minimum: int = 2) -> int:
    if int(N) != N or N < minimum:
        raise DomainError(f"pair count must be an integer >= {minimum}, got {N!r}")
    N = int(N)
    if N % 2:
        raise DomainError(f"no balanced end-to-end sequence exists for odd N={N}")
    return N


def p_swap(N: int, n: float) -> float:
    """Probability of distilling one Bell pair out of a chain of ``N`` identical PES's."""
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    f, g = pes_coefficients(n)
    f2, g2 = f * f, g * g
    tail = math.fsum((f2 * g2) ** j * math.comb(2 * j, j) for j in range(int(N) // 2 + 1))
    return min(1.0, max(0.0, 1.0 - (f2 - g2) * tail))


def s_opt(n: float) -> float:
    """Optimal Bell-pair yield from two PES's, ``2n^2/(1+n^2)``."""
    n = check_param(n)
    return 2.0 * n * n / (1.0 + n * n)


def staged_swap(n: float, stages: int = 3) -> float:
    """Success of trying ``stages`` pairs of pairs in turn, stage ``j`` at ``n^(4^(j-1))``."""
    n = check_param(n)
    total = 0.0
    miss = 1.0
    for j in range(stages):
        nj = n ** (4**j)
        s = s_opt(nj) if nj > 0.0 else 0.0
        total += miss * s
        miss *= 1.0 - s
    return total


def three_stage_swap(n: float) -> float:
    """Swapping success for configuration C1 (channels ``n``, ``n^4``, ``n^16``)."""
    return staged_swap(n, 3)


def protocol1_chain_success(N: int, n: float) -> tuple[int, float]:
    """Balanced end-to-end BM sequences over ``N`` identical hops and their total probability.

    Every balanced sequence has amplitude ``(f_n g_n / 2)^(N/2)`` on both
    components, giving ``C(N, N/2) 2^N`` sequences of weight ``n^N / (2(1+n^2))^N``.
    """
    N = _even_pairs(N)
    n = check_param(n)
    central = math.comb(N, N // 2)
    return central << N, central * n**N / (1.0 + n * n) ** N


def chain_success_enumerated(sch: Schedule) -> tuple[int, float]:
    """Brute-force end-to-end balance over a hop schedule; the probability is input-independent."""
    return final_balance_probability(sch, QubitState(1.0, 0.0))


def protocol3_chain_success(N: int, n: float) -> tuple[int, float]:
    """Configuration C3: the protocol-3 channel schedule traversed hop by hop without stopping."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    return chain_success_enumerated(schedule_for(Protocol.P3, n, int(N)))


def _chain_gap(n: float, N: int) -> float:
    return protocol1_chain_success(N, n)[1] - p_swap(N, n)


def crossing_point(N: int) -> float | None:
    """The ``n`` where direct protocol-1 relaying and swapping tie, or None without a sign change."""
    N = _even_pairs(N, minimum=4)
    lo, hi = CROSSING_BRACKET
    if np.sign(_chain_gap(lo, N)) == np.sign(_chain_gap(hi, N)):
        return None
    return float(bisect(_chain_gap, lo, hi, args=(N,), xtol=CROSSING_XTOL))


@dataclass(frozen=True)
class ConfigComparison:
    n: float
    p2_c2: float
    p3_c2: float
    swap_c4: float
    swap_c1: float
    p1_c4: float

    def as_row(self) -> tuple[float, ...]:
        return (self.n, self.p2_c2, self.p3_c2, self.swap_c4, self.swap_c1, self.p1_c4)


def compare_configurations(n: float, q: int = 6) -> ConfigComparison:
    """Success probabilities of the competing strategies for ``q`` PES's of parameter ``n``."""
    n = check_param(n)
    if int(q) != q or q < 2:
        raise DomainError(f"q must be an integer >= 2, got {q!r}")
    q = int(q)
    p1_c4 = protocol1_chain_success(q, n)[1] if q % 2 == 0 else 0.0
    return ConfigComparison(
        n=n,
        p2_c2=cumulative_success(Protocol.P2, n, q).cumulative,
        p3_c2=cumulative_success(Protocol.P3, n, q).cumulative,
        swap_c4=p_swap(q, n),
        swap_c1=staged_swap(n, q // 2),
        p1_c4=p1_c4,
    )
