"""Complex-amplitude primitives for a single qubit and a two-qubit PES.

A partially entangled state (PES) with parameter ``n`` in (0, 1] is
``f_n|00> + g_n|11>`` with ``f_n = 1/sqrt(1+n^2)`` and ``g_n = n/sqrt(1+n^2)``.
The same pair of coefficients parameterizes the generalized Bell basis used
for measurements, in which case the parameter is usually called ``m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from mtp.errors import DomainError

NORM_TOL = 1e-12


class BellLabel(enum.Enum):
    """Outcome of a (generalized) Bell measurement."""

    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"
    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"

    @property
    def is_phi(self) -> bool:
        return self in (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS)

    @property
    def is_psi(self) -> bool:
        return not self.is_phi

    def __str__(self) -> str:
        return self.value


# Canonical outcome order used by every enumeration in the package.
BELL_LABELS: tuple[BellLabel, ...] = (
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
)


def check_param(n: float, name: str = "n") -> float:
    """Validate an entanglement parameter and return it as a float.

    Raises:
        DomainError: if ``n`` is not a finite real in (0, 1].
    """
    try:
        value = float(n)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {n!r}") from exc
    if not math.isfinite(value) or not 0.0 < value <= 1.0:
        raise DomainError(f"{name} must lie in (0, 1], got {n!r}")
    return value


@dataclass(frozen=True)
class QubitState:
    """Amplitudes ``(a0, a1)`` of ``a0|0> + a1|1>``; normalization is not enforced."""

    a0: complex
    a1: complex

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))
        if self.a0 == 0 and self.a1 == 0:
            raise DomainError("a qubit state needs at least one nonzero amplitude")

    @property
    def norm_sq(self) -> float:
        return abs(self.a0) ** 2 + abs(self.a1) ** 2

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) <= NORM_TOL

    def normalized(self) -> QubitState:
        norm = math.sqrt(self.norm_sq)
        return QubitState(self.a0 / norm, self.a1 / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=np.complex128)

    @classmethod
    def from_array(cls, vec) -> QubitState:
        a0, a1 = np.asarray(vec, dtype=np.complex128).reshape(2)
        return cls(complex(a0), complex(a1))


@dataclass(frozen=True)
class TwoQubitVector:
    """Amplitudes over the computational basis ``|00>, |01>, |10>, |11>``."""

    c00: complex
    c01: complex
    c10: complex
    c11: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c00, self.c01, self.c10, self.c11], dtype=np.complex128)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1.0) <= NORM_TOL

    def inner(self, other: TwoQubitVector) -> complex:
        """Return ``<self|other>``."""
        return complex(np.vdot(self.as_array(), other.as_array()))


def pes_coefficients(n: float) -> tuple[float, float]:
    """Return ``(f_n, g_n)`` for the PES ``f_n|00> + g_n|11>``."""
    n = check_param(n)
    f = 1.0 / math.sqrt(1.0 + n * n)
    return f, n * f


def pes_state(n: float) -> TwoQubitVector:
    """The channel state ``f_n|00> + g_n|11>``."""
    return generalized_bell_state(BellLabel.PHI_PLUS, n)


def generalized_bell_state(label: BellLabel, m: float) -> TwoQubitVector:
    """Member of the ``m``-parameterized Bell basis; ``m = 1`` is the standard basis."""
    f, g = pes_coefficients(check_param(m, "m"))
    if label is BellLabel.PHI_PLUS:
        return TwoQubitVector(f, 0, 0, g)
    if label is BellLabel.PHI_MINUS:
        return TwoQubitVector(g, 0, 0, -f)
    if label is BellLabel.PSI_PLUS:
        return TwoQubitVector(0, f, g, 0)
    if label is BellLabel.PSI_MINUS:
        return TwoQubitVector(0, g, -f, 0)
    raise TypeError(f"not a BellLabel: {label!r}")


def concurrence(n: float) -> float:
    """Concurrence ``2n/(1+n^2)`` of the PES with parameter ``n``."""
    n = check_param(n)
    return 2.0 * n / (1.0 + n * n)


PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

CORRECTIONS: dict[BellLabel, np.ndarray] = {
    BellLabel.PHI_PLUS: PAULI_I,
    BellLabel.PHI_MINUS: PAULI_Z,
    BellLabel.PSI_PLUS: PAULI_X,
    BellLabel.PSI_MINUS: PAULI_Z @ PAULI_X,
}


def correction_unitary(label: BellLabel) -> np.ndarray:
    """Pauli correction Bob applies after outcome ``label``."""
    return CORRECTIONS[label].copy()


def apply_correction(label: BellLabel, s: QubitState) -> QubitState:
    """Apply I, Z, X or ZX for Phi+, Phi-, Psi+, Psi- respectively."""
    if label is BellLabel.PHI_PLUS:
        return s
    if label is BellLabel.PHI_MINUS:
        return QubitState(s.a0, -s.a1)
    if label is BellLabel.PSI_PLUS:
        return QubitState(s.a1, s.a0)
    if label is BellLabel.PSI_MINUS:
        return QubitState(s.a1, -s.a0)
    raise TypeError(f"not a BellLabel: {label!r}")


def fidelity(s1: QubitState, s2: QubitState) -> float:
    """Overlap ``|<s1|s2>|^2 / (||s1||^2 ||s2||^2)``, insensitive to normalization."""
    den = s1.norm_sq * s2.norm_sq
    if den == 0.0:
        raise DomainError("fidelity is undefined for a zero vector")
    overlap = s1.a0.conjugate() * s2.a0 + s1.a1.conjugate() * s2.a1
    return min(1.0, abs(overlap) ** 2 / den)
