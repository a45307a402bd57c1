"""Moments <-> Jacobi parameters, Cauchy transforms and the transform metric.

The metric between two probability measures is the sup of the difference
of their Cauchy transforms over ``Im z >= 1``. The difference is analytic
there and vanishes at infinity, so the sup sits on the line ``Im z = 1``;
:func:`metric_d` scans that line on a grid and bounds the rest.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Number
from typing import Callable

import numpy as np

from .errors import NotAMomentSequenceError, PreconditionError
from .measures import DiscreteMeasure, JacobiParams, MomentSequence

SUPPORT_TOL = 1e-10


def _inner(p, q, m):
    return sum(a * b * m[i + j] for i, a in enumerate(p) if a for j, b in enumerate(q) if b)


def _axpy(*terms):
    """Linear combination of coefficient lists: ``sum c * p``."""
    size = max(len(p) for _, p in terms)
    out = [0] * size
    for c, p in terms:
        for i, a in enumerate(p):
            out[i] += c * a
    return out


def moments_to_jacobi(m: MomentSequence, depth: int | None = None, *,
                      tol: float = SUPPORT_TOL) -> JacobiParams:
    """Jacobi parameters by Gram-Schmidt on the monomials in the Hankel inner product.

    With exact moments the arithmetic is exact and termination means a gamma
    that is exactly zero. With float moments a gamma below ``tol`` times the
    running scale counts as zero.

    Parameters
    ----------
    m : MomentSequence
        ``m_0..m_p``. Level ``l`` needs ``m_{2l+1}`` for its beta and
        ``m_{2l+2}`` for its gamma.
    depth : int, optional
        Number of betas to extract. Defaults to as many as ``m`` allows.

    Raises
    ------
    NotAMomentSequenceError
        If the Hankel form is indefinite beyond tolerance.
    """
    p = m.order
    if depth is not None:
        if depth < 1:
            raise PreconditionError("depth must be positive")
        if 2 * depth - 1 > p:
            raise PreconditionError(f"depth {depth} needs moments up to order {2 * depth - 1}, got {p}")
    exact = m.exact
    mv = [Fraction(v) for v in m.values] if exact else list(m.values)
    if not exact:
        mv = [float(v) for v in mv]
        if p >= 2 and not m.hankel_is_psd(tol):
            raise NotAMomentSequenceError("Hankel matrix is indefinite")

    betas, gammas = [], []
    prev, cur = [], [1]
    h = mv[0]
    scale = 1.0
    level = 0
    terminated = False
    while 2 * level + 1 <= p and (depth is None or level < depth):
        xcur = [0] + cur
        beta = _inner(xcur, cur, mv) / h
        betas.append(beta)
        scale = max(scale, abs(float(beta)) ** 2)
        if 2 * level + 2 > p:
            break
        gprev = gammas[-1] if gammas else 0
        nxt = _axpy((1, xcur), (-beta, cur), (-gprev, prev))
        h_next = _inner(nxt, nxt, mv)
        gamma = h_next / h
        if exact:
            if gamma < 0:
                raise NotAMomentSequenceError(f"negative norm at level {level + 1}")
            vanished = gamma == 0
        else:
            if gamma < -tol * scale:
                raise NotAMomentSequenceError(f"negative norm at level {level + 1}")
            vanished = gamma <= tol * scale
        if vanished:
            gammas.append(0 if exact else 0.0)
            terminated = True
            break
        gammas.append(gamma)
        scale = max(scale, abs(float(gamma)))
        prev, cur, h = cur, nxt, h_next
        level += 1

    jp = JacobiParams(tuple(betas), tuple(gammas), terminated)
    if terminated:
        _check_consistent_tail(jp, m, tol)
    return jp


def _check_consistent_tail(jp, m, tol):
    # a finitely supported law fixes every higher moment
    implied = jacobi_to_moments(jp, m.order)
    for j, (a, b) in enumerate(zip(implied, m)):
        if m.exact:
            bad = a != b
        else:
            bad = abs(float(a) - float(b)) > 1e-8 * max(1.0, abs(float(b)))
        if bad:
            raise NotAMomentSequenceError(
                f"moment {j} = {b} is inconsistent with a {jp.support_size}-atom law")


def jacobi_to_moments(j: JacobiParams, p: int) -> MomentSequence:
    """Moments ``m_0..m_p`` as weighted Motzkin path sums.

    An up-step from level ``h`` has weight 1, a flat step ``beta_h`` and a
    down-step to level ``h`` weight ``gamma_h``.
    """
    if p < 0:
        raise PreconditionError("p must be non-negative")
    nb, ng = len(j.betas), len(j.gammas)
    if j.terminated:
        top = nb - 1
    else:
        limit = min(2 * nb, 2 * ng + 1)
        if p > limit:
            raise PreconditionError(f"{nb} betas and {ng} gammas determine moments up to {limit}, not {p}")
        top = min(nb - 1, p // 2)
    # w[h] = weighted count of paths from 0 ending at level h
    w = [1] + [0] * top
    out = [1]
    for _ in range(p):
        new = [0] * (top + 1)
        for h, val in enumerate(w):
            if not val:
                continue
            new[h] += val * j.betas[h]
            if h < top:
                new[h + 1] += val
            if h > 0:
                new[h - 1] += val * j.gammas[h - 1]
        w = new
        out.append(w[0])
    return MomentSequence(tuple(out))


# -- Cauchy transforms -------------------------------------------------------

def bernoulli_cauchy(z):
    """Transform of the centred Bernoulli law, ``1/(z - 1/z)``."""
    return 1.0 / (z - 1.0 / z)


def semicircle_cauchy(z):
    """Transform of the standard semicircle law on ``[-2, 2]``."""
    z = np.asarray(z, dtype=complex)
    return (z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2


def cauchy_from_jacobi(j: JacobiParams, z, tail: Callable | None = None):
    """Evaluate the continued fraction bottom-up at ``z`` (scalar or array).

    Below the last available beta the fraction is closed with
    ``gamma_{d-1} * tail(z)``; without a tail, or when the sequence is
    terminated, that term is zero.
    """
    z = np.asarray(z, dtype=complex)
    d = j.depth
    betas = [float(b) for b in j.betas]
    gammas = [float(g) for g in j.gammas]
    acc = np.zeros_like(z)
    if tail is not None and not j.terminated and len(gammas) == d:
        acc = gammas[d - 1] * tail(z)
    val = acc
    for h in range(d - 1, -1, -1):
        denom = z - betas[h] - acc
        if np.any(denom == 0):
            raise ValueError(f"continued fraction has a pole at level {h}")
        val = 1.0 / denom
        if h > 0:
            acc = gammas[h - 1] * val
    return val[()] if val.ndim == 0 else val


def cauchy_from_measure(mu: DiscreteMeasure, z):
    z = np.asarray(z, dtype=complex)
    vals = (mu.weights / (z[..., None] - mu.positions)).sum(axis=-1)
    return vals[()] if vals.ndim == 0 else vals


def cauchy_transform(mu, z):
    """Dispatch on measure representation."""
    if isinstance(mu, DiscreteMeasure):
        return cauchy_from_measure(mu, z)
    if isinstance(mu, JacobiParams):
        return cauchy_from_jacobi(mu, z)
    raise TypeError(f"cannot take the Cauchy transform of {type(mu).__name__}")


def _first_moments(mu):
    if isinstance(mu, DiscreteMeasure):
        return (float(np.dot(mu.weights, mu.positions)),
                float(np.dot(mu.weights, mu.positions ** 2)))
    m1, m2 = mu.first_moments()
    return float(m1), float(m2)


@dataclass(frozen=True)
class MetricDistance:
    """Grid estimate of the transform metric.

    ``value`` is the max over the grid and hence a lower bound. ``tail_bound``
    covers ``|Re z| > R``. ``upper`` adds the Lipschitz slack between grid
    points and is a certified upper bound.
    """

    value: float
    upper: float
    tail_bound: float
    R: float
    h: float
    argmax_re: float

    @property
    def estimate(self) -> float:
        return max(self.value, self.tail_bound)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["estimate"] = self.estimate
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def metric_d(mu1, mu2, *, R: float = 20.0, h: float = 0.01) -> MetricDistance:
    """Sup of ``|G_mu1 - G_mu2|`` over ``Im z >= 1``, scanned on ``Im z = 1``.

    Arguments are :class:`DiscreteMeasure` or :class:`JacobiParams` (read
    with a zero tail).

    Off the grid: on ``Im z >= 1`` each transform is 1-Lipschitz, so points
    between grid nodes exceed the grid max by at most ``h``. For
    ``|Re z| > R``, expanding ``1/(z-x)`` to second order gives
    ``|G_1 - G_2| <= (|m_1 - m_1'| + m_2 + m_2') / (R^2 + 1)``.
    """
    if R <= 0 or h <= 0:
        raise PreconditionError("R and h must be positive")
    steps = int(round(2 * R / h))
    x = np.linspace(-R, R, steps + 1)
    z = x + 1j
    diff = np.abs(cauchy_transform(mu1, z) - cauchy_transform(mu2, z))
    i = int(np.argmax(diff))
    value = min(float(diff[i]), 2.0)
    a1, a2 = _first_moments(mu1)
    b1, b2 = _first_moments(mu2)
    tail = min((abs(a1 - b1) + a2 + b2) / (R * R + 1), 2.0)
    upper = min(max(value + h, tail), 2.0)
    return MetricDistance(value, upper, tail, R, h, float(x[i]))


def bernoulli_bound_check(m4, *, tol: float = 1e-12) -> float:
    """``4 * sqrt(m4 - 1)``: upper bound on the metric to the Bernoulli law.

    Valid for any measure with mean 0 and variance 1. Values above 1 carry no
    information since the metric never exceeds 2 and the bound is only
    sharp once ``m4 - 1 <= 1/16``.
    """
    if not isinstance(m4, Number):
        raise TypeError("m4 must be a number")
    excess = m4 - 1
    if excess < -tol:
        raise PreconditionError(f"m4 = {m4} < 1 is impossible for a standardized measure")
    return 4.0 * math.sqrt(max(float(excess), 0.0))
