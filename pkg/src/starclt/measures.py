"""Value types shared by the spectral and transform code.

Moments and Jacobi parameters hold plain Python numbers. ``int`` and
``Fraction`` entries are treated as exact and propagate exactly through
every conversion; ``float`` entries switch the arithmetic to floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import PreconditionError


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def as_float(x) -> float:
    return float(x)


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_0 = 1, m_1, ..., m_p``."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise PreconditionError("a moment sequence needs m_0")
        if self.values[0] != 1:
            raise PreconditionError(f"m_0 must be 1, got {self.values[0]}")

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def __iter__(self):
        return iter(self.values)

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def hankel(self, q: int | None = None) -> np.ndarray:
        """Float Hankel matrix ``[m_{i+j}]`` for ``0 <= i, j <= q``."""
        if q is None:
            q = self.order // 2
        m = self.as_floats()
        idx = np.add.outer(np.arange(q + 1), np.arange(q + 1))
        return m[idx]

    def hankel_is_psd(self, tol: float = 1e-10) -> bool:
        ev = np.linalg.eigvalsh(self.hankel())
        return bool(ev[0] >= -tol * max(abs(ev[-1]), 1e-300))


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite atomic probability measure with sorted, distinct atoms."""

    positions: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_atoms(cls, positions, weights, *, tol: float = 1e-12) -> "DiscreteMeasure":
        x = np.asarray(positions, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if x.shape != w.shape or x.size == 0:
            raise PreconditionError("positions and weights must be non-empty and the same length")
        if np.any(w < 0):
            raise PreconditionError("weights must be non-negative")
        if abs(w.sum() - 1.0) > tol:
            raise PreconditionError(f"weights sum to {w.sum()!r}, not 1")
        ux, inv = np.unique(x, return_inverse=True)
        uw = np.zeros(len(ux))
        np.add.at(uw, inv, w)
        return cls(ux, uw)

    @classmethod
    def point_mass(cls, c: float = 0.0) -> "DiscreteMeasure":
        return cls.from_atoms([c], [1.0])

    @classmethod
    def bernoulli(cls) -> "DiscreteMeasure":
        """The centred Bernoulli law with atoms at -1 and +1."""
        return cls.from_atoms([-1.0, 1.0], [0.5, 0.5])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    def __len__(self):
        return len(self.positions)

    def moments(self, p: int) -> MomentSequence:
        vals = [1.0] + [float(np.dot(self.weights, self.positions ** j)) for j in range(1, p + 1)]
        vals[0] = 1
        return MomentSequence(tuple(vals))

    def scaled(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure.from_atoms(self.positions * s, self.weights)


@dataclass(frozen=True)
class JacobiParams:
    """Three-term recurrence coefficients of a measure's monic orthogonal polynomials.

    ``gammas`` has either one entry fewer than ``betas`` or the same number.
    When ``terminated`` is set the last gamma is zero and the measure has
    exactly ``len(gammas)`` atoms.
    """

    betas: tuple
    gammas: tuple
    terminated: bool = False

    def __post_init__(self):
        nb, ng = len(self.betas), len(self.gammas)
        if nb < 1:
            raise PreconditionError("at least one beta is required")
        if ng not in (nb - 1, nb):
            raise PreconditionError(f"{nb} betas need {nb - 1} or {nb} gammas, got {ng}")
        if any(g < 0 for g in self.gammas):
            raise PreconditionError("gammas must be non-negative")
        if self.terminated:
            if not self.gammas or self.gammas[-1] != 0:
                raise PreconditionError("a terminated sequence ends with a zero gamma")
            if any(g == 0 for g in self.gammas[:-1]):
                raise PreconditionError("only the last gamma of a terminated sequence may vanish")

    @property
    def depth(self) -> int:
        return len(self.betas)

    @property
    def support_size(self) -> int | None:
        return len(self.gammas) if self.terminated else None

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.betas + self.gammas)

    @classmethod
    def bernoulli(cls) -> "JacobiParams":
        return cls((0, 0), (1, 0), True)

    @classmethod
    def point_mass(cls, c=0) -> "JacobiParams":
        return cls((c,), (0,), True)

    def scaled(self, s) -> "JacobiParams":
        """Parameters of the image measure under ``x -> s*x``."""
        return JacobiParams(tuple(b * s for b in self.betas),
                            tuple(g * s * s for g in self.gammas), self.terminated)

    def truncated(self, depth: int) -> "JacobiParams":
        if depth >= self.depth:
            return self
        return JacobiParams(self.betas[:depth], self.gammas[:depth - 1], False)

    def first_moments(self) -> tuple:
        """``(m_1, m_2)`` of the measure whose transform the zero-tail fraction gives."""
        b0 = self.betas[0]
        g0 = self.gammas[0] if self.depth >= 2 or self.terminated else 0
        return b0, b0 * b0 + g0

    def matrix(self) -> np.ndarray:
        """Symmetric tridiagonal Jacobi matrix on the first ``depth`` levels."""
        d = self.depth
        J = np.diag(np.array([float(b) for b in self.betas]))
        off = np.sqrt(np.array([float(g) for g in self.gammas[:d - 1]]))
        J[np.arange(d - 1), np.arange(1, d)] = off
        J[np.arange(1, d), np.arange(d - 1)] = off
        return J


def to_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
