"""One teleportation step over a PES channel with a generalized Bell measurement.

Expanding ``(a0|0> + a1|1>) (f_n|00> + g_n|11>)`` in the ``m``-parameterized
Bell basis, every outcome leaves Bob (after his Pauli correction) with
``h_alpha a0|0> + h_beta a1|1>``. The pair ``(h_alpha, h_beta)`` depends only
on the outcome and on ``(n, m)``, so a chain of steps multiplies these factors
and a branch is faithful exactly when the two cumulative products coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from mtp.errors import DomainError
from mtp.qstate import (
    BELL_LABELS,
    BellLabel,
    QubitState,
    check_param,
    pes_coefficients,
)

BALANCE_TOL = 1e-12


@dataclass(frozen=True)
class TransformFactors:
    h_alpha: float
    h_beta: float

    def __mul__(self, other: TransformFactors) -> TransformFactors:
        return TransformFactors(self.h_alpha * other.h_alpha, self.h_beta * other.h_beta)

    def apply(self, s: QubitState) -> QubitState:
        return QubitState(self.h_alpha * s.a0, self.h_beta * s.a1)

    def probability(self, s: QubitState) -> float:
        """Squared norm of the (unnormalized) state this factor pair produces from ``s``."""
        return (self.h_alpha * abs(s.a0)) ** 2 + (self.h_beta * abs(s.a1)) ** 2


IDENTITY_FACTORS = TransformFactors(1.0, 1.0)


@dataclass(frozen=True)
class StepOutcome:
    label: BellLabel
    probability: float
    post_state: QubitState
    factors: TransformFactors

    @property
    def norm_sq(self) -> float:
        return self.post_state.norm_sq


def transform_factors(label: BellLabel, n: float, m: float) -> TransformFactors:
    """Amplitude factors for outcome ``label`` on channel ``n`` measured in basis ``m``.

    Args:
        label: measurement outcome.
        n: channel parameter of ``f_n|00> + g_n|11>``.
        m: parameter of the generalized Bell basis (1 for a standard BM).

    Returns:
        The multipliers of ``a0`` and ``a1`` after Bob's correction.
    """
    fn, gn = pes_coefficients(check_param(n, "n"))
    fm, gm = pes_coefficients(check_param(m, "m"))
    if label is BellLabel.PHI_PLUS:
        return TransformFactors(fm * fn, gm * gn)
    if label is BellLabel.PHI_MINUS:
        return TransformFactors(gm * fn, fm * gn)
    if label is BellLabel.PSI_PLUS:
        return TransformFactors(fm * gn, gm * fn)
    if label is BellLabel.PSI_MINUS:
        return TransformFactors(gm * gn, fm * fn)
    raise TypeError(f"not a BellLabel: {label!r}")


def step_factor_table(n: float, m: float) -> tuple[TransformFactors, ...]:
    """Factors for all four outcomes, in ``BELL_LABELS`` order."""
    return tuple(transform_factors(label, n, m) for label in BELL_LABELS)


def teleport_step(s: QubitState, n: float, m: float) -> list[StepOutcome]:
    """Teleport a normalized qubit once; one outcome per Bell label.

    Post states are left unnormalized: their squared norm is the outcome
    probability.
    """
    if not s.is_normalized:
        raise DomainError(f"input state must be normalized (norm^2 = {s.norm_sq!r})")
    outcomes = []
    for label, h in zip(BELL_LABELS, step_factor_table(n, m)):
        outcomes.append(StepOutcome(label, h.probability(s), h.apply(s), h))
    return outcomes


def is_unity_fidelity(h: TransformFactors, tol: float = BALANCE_TOL) -> bool:
    """True when the two factors agree to relative tolerance ``tol``.

    Equal factors mean the output is proportional to the input for every input.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    return abs(h.h_alpha - h.h_beta) <= tol * max(abs(h.h_alpha), abs(h.h_beta))
