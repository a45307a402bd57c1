"""Vacuum-state spectral data of adjacency matrices.

The vacuum state evaluates a matrix at its (root, root) entry, so the j-th
vacuum moment of an adjacency matrix counts closed walks of length j at the
root. Moments are computed in exact integer arithmetic; floating point only
enters the Lanczos recurrence and the eigendecompositions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import PreconditionError, SizeCapError
from .graphs import RootedGraph
from .measures import DiscreteMeasure, JacobiParams, MomentSequence

DENSE_CAP = 4096
MOMENT_BUDGET = 512
BREAKDOWN_TOL = 1e-12

_LIMB_BITS = 31
_LIMB_MASK = (1 << _LIMB_BITS) - 1
_INT64_SAFE = 1 << 62


def exact_matvec(A: sp.csr_matrix, v: np.ndarray, max_row_sum: int) -> np.ndarray:
    """``A @ v`` for a non-negative integer CSR ``A`` and non-negative integer ``v``.

    Stays in int64 while the result provably fits. Otherwise ``v`` is split
    into 31-bit limbs, each limb product is done in int64 (safe while row sums
    stay below ``2**31``) and the partial results are recombined as Python
    integers.
    """
    if v.dtype != object:
        top = int(v.max()) if v.size else 0
        if top * max_row_sum < _INT64_SAFE:
            return A @ v
        v = v.astype(object)
    if max_row_sum >= 1 << _LIMB_BITS:
        raise SizeCapError("row sums too large for limb arithmetic")
    out = np.zeros(len(v), dtype=object)
    shift = 0
    rem = v
    while np.any(rem):
        limb = (rem & _LIMB_MASK).astype(np.int64)
        out = out + ((A @ limb).astype(object) << shift)
        rem = rem >> _LIMB_BITS
        shift += _LIMB_BITS
    if all(x < _INT64_SAFE for x in out):
        return out.astype(np.int64)
    return out


def walk_vectors(A: sp.csr_matrix, start: np.ndarray, steps: int):
    """Yield ``A^j @ start`` for ``j = 0..steps`` exactly."""
    max_row_sum = int(A.sum(axis=1).max()) if A.shape[0] else 0
    v = start
    yield v
    for _ in range(steps):
        v = exact_matvec(A, v, max_row_sum)
        yield v


def vacuum_moments(g: RootedGraph, p: int, *, budget: int = MOMENT_BUDGET,
                   overflow: str = "bigint") -> MomentSequence:
    """Closed-walk counts ``(A^j)_{root,root}`` for ``j = 0..p``.

    ``overflow="error"`` refuses to leave int64 instead of switching to
    big integers.
    """
    if p < 1:
        raise PreconditionError("p must be a positive integer")
    if p > budget:
        raise SizeCapError(f"p = {p} exceeds the exact-arithmetic budget {budget}")
    A = g.adjacency_matrix(np.int64)
    e = np.zeros(g.n, dtype=np.int64)
    e[g.root] = 1
    values = []
    for v in walk_vectors(A, e, p):
        if overflow == "error" and v.dtype == object:
            raise SizeCapError("walk counts overflow int64")
        values.append(int(v[g.root]))
    return MomentSequence(tuple(values))


def lanczos(A, v0: np.ndarray, depth: int, *, tol: float = BREAKDOWN_TOL) -> JacobiParams:
    """Lanczos tridiagonalization of symmetric ``A`` from ``v0``, fully reorthogonalized.

    Parameters
    ----------
    A : matrix-like
        Anything supporting ``A @ x`` for float vectors.
    v0 : ndarray
        Starting vector; normalized internally.
    depth : int
        Maximum number of diagonal entries.
    tol : float
        A squared residual norm below ``tol`` times the running squared
        scale ends the recurrence (invariant subspace found).

    Returns
    -------
    JacobiParams
        Diagonal entries as betas, squared off-diagonals as gammas.
    """
    if depth < 1:
        raise PreconditionError("depth must be a positive integer")
    q = np.asarray(v0, dtype=float)
    q = q / np.linalg.norm(q)
    Q = [q]
    betas, gammas = [], []
    scale = 0.0
    for level in range(depth):
        w = np.asarray(A @ Q[-1], dtype=float).ravel()
        alpha = float(Q[-1] @ w)
        betas.append(alpha)
        scale = max(scale, alpha * alpha, float(w @ w))
        w = w - alpha * Q[-1]
        if level > 0:
            w = w - np.sqrt(gammas[-1]) * Q[-2]
        # two passes of classical Gram-Schmidt against the whole basis
        B = np.array(Q)
        w = w - B.T @ (B @ w)
        w = w - B.T @ (B @ w)
        nrm2 = float(w @ w)
        if nrm2 <= tol * max(scale, 1e-300):
            gammas.append(0.0)
            return JacobiParams(tuple(betas), tuple(gammas), True)
        if level == depth - 1:
            break
        gammas.append(nrm2)
        Q.append(w / np.sqrt(nrm2))
    return JacobiParams(tuple(betas), tuple(gammas), False)


def lanczos_jacobi(g: RootedGraph, depth: int, *, tol: float = BREAKDOWN_TOL) -> JacobiParams:
    """Jacobi parameters of the vacuum distribution, from the root indicator."""
    e = np.zeros(g.n)
    e[g.root] = 1.0
    return lanczos(g.adjacency_matrix(np.float64), e, depth, tol=tol)


def _check_cap(g, cap):
    if g.n > cap:
        raise SizeCapError(f"graph has {g.n} vertices, dense cap is {cap}")


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted values whose consecutive gaps are at most ``tol``."""
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    return np.split(np.arange(len(values)), breaks)


def vacuum_distribution(g: RootedGraph, *, cap: int = DENSE_CAP,
                        drop: float = 1e-14) -> DiscreteMeasure:
    """Spectral measure of ``A`` at the root indicator vector.

    Each eigenspace contributes an atom at its eigenvalue whose weight is the
    squared norm of the root vector's projection onto it.
    """
    _check_cap(g, cap)
    A = g.adjacency_matrix(np.float64).toarray()
    lam, U = np.linalg.eigh(A)
    w = U[g.root, :] ** 2
    span = max(1.0, float(np.abs(lam).max()) if lam.size else 1.0)
    pos, wt = [], []
    for idx in _cluster(lam, 1e-9 * span):
        mass = float(w[idx].sum())
        if mass < drop:
            continue
        pos.append(float(np.dot(w[idx], lam[idx]) / mass))
        wt.append(mass)
    wt = np.array(wt)
    return DiscreteMeasure.from_atoms(pos, wt / wt.sum())


@dataclass(frozen=True, eq=False)
class Histogram:
    """Equal-weight eigenvalue histogram.

    ``measure`` places each non-empty bin's mass at the mean of the
    eigenvalues in that bin.
    """

    edges: np.ndarray
    masses: np.ndarray
    measure: DiscreteMeasure


def eigenvalues(g: RootedGraph, *, cap: int = DENSE_CAP) -> np.ndarray:
    _check_cap(g, cap)
    return np.linalg.eigvalsh(g.adjacency_matrix(np.float64).toarray())


def eigenvalue_histogram(g: RootedGraph, bins: int, *, cap: int = DENSE_CAP) -> Histogram:
    if bins < 1:
        raise PreconditionError("bins must be a positive integer")
    lam = eigenvalues(g, cap=cap)
    n = len(lam)
    lo, hi = float(lam[0]), float(lam[-1])
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(lam, bins=bins, range=(lo, hi))
    which = np.clip(np.searchsorted(edges, lam, side="right") - 1, 0, bins - 1)
    pos, wt = [], []
    for b in range(bins):
        sel = lam[which == b]
        if sel.size:
            pos.append(float(sel.mean()))
            wt.append(sel.size / n)
    return Histogram(edges, counts / n, DiscreteMeasure.from_atoms(pos, wt))
