"""Convergence of star-power distance-k graphs to the centred Bernoulli law.

For a rooted base graph ``g`` and ``k >= 1`` let ``A`` be the adjacency
matrix of the distance-k graph of the ``N``-fold star power and
``sigma`` the number of vertices at distance ``k`` from the root of ``g``.
The vacuum moments of ``A / sqrt(N*sigma)`` satisfy ``m1 = 0``, ``m2 = 1``
and ``1 <= m4 <= 1 + M/N`` with ``M`` the largest distance-k degree in
``g``; everything here checks those facts exactly and measures the
transform distance to the Bernoulli law.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PreconditionError, SizeCapError
from .graphs import (
    RootedGraph,
    bfs_distances,
    cartesian_power,
    distance_k_graph,
    is_connected,
    star_power,
)
from .formats import fmt_number
from .jacobi import bernoulli_bound_check, metric_d
from .measures import JacobiParams, MomentSequence
from .vacuum import DENSE_CAP, eigenvalues, lanczos, vacuum_moments

DEFAULT_SCHEDULE = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)
SCAN_DEPTH = 6


def sigma_count(g: RootedGraph, k: int) -> int:
    """Number of vertices at distance exactly ``k`` from the root."""
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    return int(len(bfs_distances(g, g.root, max_depth=k).at(k)))


def big_m(g: RootedGraph, k: int) -> int:
    """Largest number of vertices at distance exactly ``k`` from any vertex."""
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    return int(distance_k_graph(g, k).degrees().max())


def star_distance_k_graph(g: RootedGraph, N: int, k: int) -> RootedGraph:
    return distance_k_graph(star_power(g, N), k)


@lru_cache(maxsize=512)
def _base_blocks(g: RootedGraph, k: int):
    """Root row, within-copy block and depth masks of ``g``'s distance-k graph.

    Rows are ordered root first, then the other vertices increasing, which is
    the order of each copy in the star power. Arrays are read-only since they
    are shared between operators.
    """
    if g.n < 2 or not is_connected(g):
        raise PreconditionError("star power needs a connected graph with at least two vertices")
    order = [g.root] + [v for v in range(g.n) if v != g.root]
    B = distance_k_graph(g, k).adjacency_matrix(np.int64).toarray()[np.ix_(order, order)]
    root_row = B[0, 1:].copy()
    within = B[1:, 1:].T.copy()
    depth = bfs_distances(g, g.root).dist[order][1:]
    masks = {d: depth == d for d in range(1, k)}
    for a in (root_row, within, *masks.values()):
        a.setflags(write=False)
    return root_row, within, masks


class StarDistanceOperator:
    """Adjacency of the distance-k graph of a star power, without the edges.

    Two vertices in one copy are joined iff they are at distance ``k`` in
    ``g``; vertices of different copies are joined iff their depths below
    the root add up to ``k``. Products cost ``O(N * n^2)`` for an
    ``n``-vertex base graph instead of touching the ``O((N*sigma)^2)`` cross
    edges. Works on int, float and object (big integer) vectors.
    """

    def __init__(self, g: RootedGraph, N: int, k: int):
        if N < 1 or k < 1:
            raise PreconditionError("N and k must be positive integers")
        self.root_row, self.within, self.depth_masks = _base_blocks(g, k)
        self.N, self.k, self.n_base = N, k, g.n
        self.n = 1 + N * (g.n - 1)
        self.shape = (self.n, self.n)

    def __matmul__(self, v):
        v = np.asarray(v)
        V = v[1:].reshape(self.N, self.n_base - 1)
        out = np.empty_like(v)
        out[0] = (V @ self.root_row).sum()
        W = V @ self.within + self.root_row[None, :] * v[0]
        for d, mask in self.depth_masks.items():
            per_copy = V[:, self.depth_masks[self.k - d]].sum(axis=1)
            W[:, mask] += (per_copy.sum() - per_copy)[:, None]
        out[1:] = W.ravel()
        return out


def _root_vector(n, dtype):
    e = np.zeros(n, dtype=dtype)
    e[0] = 1
    return e


def star_vacuum_moments(g: RootedGraph, k: int, N: int, p: int,
                        method: str = "explicit") -> MomentSequence:
    """Unnormalized vacuum moments of the distance-k graph of ``g``'s star power."""
    if method == "explicit":
        return vacuum_moments(star_distance_k_graph(g, N, k), p)
    if method == "structured":
        op = StarDistanceOperator(g, N, k)
        # walk counts are at most (max degree)^p and every degree is below N*n
        small = p * math.log2(N * g.n) < 62
        v = _root_vector(op.n, np.int64 if small else object)
        vals = [1]
        for _ in range(p):
            v = op @ v
            vals.append(int(v[0]))
        return MomentSequence(tuple(vals))
    raise ValueError(f"unknown method {method!r}")


def scale_moment(mj: int, s: int, j: int):
    """``mj / s**(j/2)``, exact whenever the result is rational."""
    if j % 2 == 0:
        return Fraction(mj, s ** (j // 2))
    if mj == 0:
        return 0
    r = math.isqrt(s)
    if r * r == s:
        return Fraction(mj, r ** j)
    return float(Fraction(mj, s ** (j // 2))) / math.sqrt(s)


def normalize_moments(raw: MomentSequence, s: int) -> MomentSequence:
    return MomentSequence(tuple(scale_moment(int(m), s, j) for j, m in enumerate(raw)))


def normalized_vacuum_moments(g: RootedGraph, k: int, N: int, p: int = 4,
                              method: str = "explicit") -> MomentSequence:
    """Vacuum moments of ``A / sqrt(N*sigma)`` for the star power's distance-k graph."""
    if p < 4:
        raise PreconditionError("p must be at least 4")
    sigma = sigma_count(g, k)
    if sigma == 0:
        raise PreconditionError(f"no vertex at distance {k} from the root: distance-{k} graph is trivial there")
    return normalize_moments(star_vacuum_moments(g, k, N, p, method), N * sigma)


class WalkCensus(NamedTuple):
    type1: int
    type2: int

    @property
    def total(self) -> int:
        return self.type1 + self.type2


def census_from_graph(G: RootedGraph) -> WalkCensus:
    """Closed length-4 root walks of ``G`` split into the two types."""
    A = G.adjacency_matrix(np.int64)
    nbr = np.zeros(G.n, dtype=np.int64)
    nbr[G.neighbors(G.root)] = 1
    c = [int(x) for x in A @ nbr]
    type1 = c[G.root] ** 2
    type2 = sum(x * x for y, x in enumerate(c) if y != G.root)
    return WalkCensus(type1, type2)


def walk_census(g: RootedGraph, k: int, N: int, method: str = "explicit") -> WalkCensus:
    """Split closed length-4 root walks by whether step 2 is back at the root.

    A walk ``e x y z e`` is counted through ``y``: with ``c[y]`` the number
    of root neighbours adjacent to ``y`` there are ``c[y]**2`` choices of
    ``(x, z)``. ``y == e`` gives type 1, everything else type 2.
    """
    if method == "explicit":
        return census_from_graph(star_distance_k_graph(g, N, k))
    if method == "structured":
        op = StarDistanceOperator(g, N, k)
        c = [int(x) for x in op @ (op @ _root_vector(op.n, np.int64))]
        return WalkCensus(c[0] ** 2, sum(x * x for x in c[1:]))
    raise ValueError(f"unknown method {method!r}")


@dataclass
class ScanPoint:
    N: int
    sigma: int
    bigM: int
    m1: object
    m2: object
    m3: object
    m4: object
    type1: int
    type2: int
    raw_m4: int
    beta1: float
    gamma1: float
    d_to_bernoulli: float
    d_upper: float
    d_tail: float
    bound_4sqrt: float
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


CSV_COLUMNS = ("N", "sigma", "bigM", "m1", "m2", "m3", "m4", "m4_exact", "type1", "type2",
               "beta1", "gamma1", "d_to_bernoulli", "d_upper", "d_tail", "bound_4sqrt", "ok")


def _exact_str(x) -> str:
    return str(x) if isinstance(x, (int, Fraction)) else ""


def _json_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def make_scan_point(g: RootedGraph, k: int, N: int, *, sigma: int, bigM: int,
                    method: str = "explicit", depth: int = SCAN_DEPTH,
                    R: float = 20.0, h: float = 0.01) -> ScanPoint:
    s = N * sigma
    if method == "explicit":
        G = star_distance_k_graph(g, N, k)
        raw = vacuum_moments(G, 4)
        census = census_from_graph(G)
        op = G.adjacency_matrix(np.float64)
    elif method == "structured":
        raw = star_vacuum_moments(g, k, N, 4, method)
        census = walk_census(g, k, N, method)
        op = StarDistanceOperator(g, N, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    m = normalize_moments(raw, s)
    jp = lanczos(op, _root_vector(op.shape[0], float), depth).scaled(1 / math.sqrt(s))
    d = metric_d(jp, JacobiParams.bernoulli(), R=R, h=h)
    bound = bernoulli_bound_check(m[4])
    m4 = m[4]
    checks = {
        "m1_zero": m[1] == 0,
        "m2_one": m[2] == 1,
        "m4_at_least_one": m4 >= 1,
        "m4_le_1_plus_M_over_N": m4 <= 1 + Fraction(bigM, N),
        "type1_square": census.type1 == s * s,
        "census_total": census.total == raw[4],
        "type2_bound": census.type2 <= s * bigM * sigma,
        "d_le_bound": d.value <= bound + 1e-6,
    }
    return ScanPoint(
        N=N, sigma=sigma, bigM=bigM, m1=m[1], m2=m[2], m3=m[3], m4=m4,
        type1=census.type1, type2=census.type2, raw_m4=int(raw[4]),
        beta1=float(jp.betas[1]) if jp.depth > 1 else 0.0,
        gamma1=float(jp.gammas[1]) if len(jp.gammas) > 1 else 0.0,
        d_to_bernoulli=d.value, d_upper=d.upper, d_tail=d.tail_bound,
        bound_4sqrt=bound, checks=checks,
    )


@dataclass
class ScanReport:
    graph: dict
    k: int
    points: list
    config: dict = field(default_factory=dict)

    @property
    def max_scaled_residual(self):
        """``max N * (m4 - 1)`` over the schedule, exact."""
        return max(p.N * (p.m4 - 1) for p in self.points)

    @property
    def residual_within_M(self) -> bool:
        return all(p.N * (p.m4 - 1) <= p.bigM for p in self.points)

    @property
    def m4_nonincreasing(self) -> bool:
        return all(a.m4 >= b.m4 for a, b in zip(self.points, self.points[1:]))

    @property
    def d_nonincreasing(self) -> bool:
        return all(a.d_to_bernoulli >= b.d_to_bernoulli for a, b in zip(self.points, self.points[1:]))

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points) and self.residual_within_M

    def rows(self) -> list[list[str]]:
        out = []
        for p in self.points:
            out.append([fmt_number(p.N), fmt_number(p.sigma), fmt_number(p.bigM),
                        fmt_number(p.m1), fmt_number(p.m2), fmt_number(p.m3),
                        fmt_number(p.m4), _exact_str(p.m4),
                        fmt_number(p.type1), fmt_number(p.type2),
                        fmt_number(p.beta1), fmt_number(p.gamma1),
                        fmt_number(p.d_to_bernoulli), fmt_number(p.d_upper),
                        fmt_number(p.d_tail), fmt_number(p.bound_4sqrt), fmt_number(p.ok)])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.rows())
        return buf.getvalue()

    def to_dict(self) -> dict:
        pts = []
        for p in self.points:
            pts.append({
                "N": p.N, "sigma": p.sigma, "bigM": p.bigM,
                "m1": _json_number(p.m1), "m2": _json_number(p.m2),
                "m3": _json_number(p.m3), "m4": _json_number(p.m4),
                "m4_exact": _exact_str(p.m4),
                "type1": p.type1, "type2": p.type2, "raw_m4": p.raw_m4,
                "beta1": p.beta1, "gamma1": p.gamma1,
                "d_to_bernoulli": p.d_to_bernoulli, "d_upper": p.d_upper,
                "d_tail": p.d_tail, "bound_4sqrt": p.bound_4sqrt,
                "checks": p.checks, "ok": p.ok,
            })
        return {
            "graph": self.graph,
            "k": self.k,
            "config": self.config,
            "points": pts,
            "verdict": {
                "max_scaled_residual": str(self.max_scaled_residual),
                "residual_within_M": self.residual_within_M,
                "m4_nonincreasing": self.m4_nonincreasing,
                "d_nonincreasing": self.d_nonincreasing,
                "ok": self.ok,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def describe_graph(g: RootedGraph) -> dict:
    return {"n": g.n, "edges": g.num_edges, "root": g.root}


def convergence_scan(g: RootedGraph, k: int, schedule: Sequence[int] = DEFAULT_SCHEDULE, *,
                     method: str = "explicit", depth: int = SCAN_DEPTH,
                     R: float = 20.0, h: float = 0.01) -> ScanReport:
    """Scan ``N`` over ``schedule`` and check the exact moment ledger at each point."""
    schedule = list(schedule)
    if not schedule:
        raise PreconditionError("schedule must be non-empty")
    if any(a >= b for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise PreconditionError("schedule must be strictly increasing positive integers")
    sigma = sigma_count(g, k)
    if sigma == 0:
        raise PreconditionError(f"no vertex at distance {k} from the root")
    M = big_m(g, k)
    points = [make_scan_point(g, k, N, sigma=sigma, bigM=M, method=method, depth=depth, R=R, h=h)
              for N in schedule]
    config = {"schedule": schedule, "method": method, "depth": depth, "R": R, "h": h}
    return ScanReport(describe_graph(g), k, points, config)


# -- cartesian baseline ------------------------------------------------------

def hermite_monic(k: int, x):
    """Monic (probabilists') Hermite polynomial of degree ``k`` at ``x``."""
    if k < 0:
        raise PreconditionError("degree must be non-negative")
    prev, cur = 0 * x + 1, x
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, x * cur - j * prev
    return cur


def gaussian_limit_moments(g: RootedGraph, k: int, p: int) -> MomentSequence:
    """Moments of ``(2|E|/|V|)^(k/2) / k! * He_k(Z)`` for standard normal ``Z``."""
    c = (2 * g.num_edges / g.n) ** (k / 2) / math.factorial(k)
    nodes, weights = np.polynomial.hermite_e.hermegauss(k * p // 2 + 1)
    weights = weights / math.sqrt(2 * math.pi)
    x = c * hermite_monic(k, nodes)
    vals = [1] + [float(np.dot(weights, x ** j)) for j in range(1, p + 1)]
    return MomentSequence(tuple(vals))


def _trace_powers(A, p):
    """Exact ``tr(A^j)`` for ``j = 0..p`` via ``tr(A^(2i)) = |A^i|_F^2``."""
    n = A.shape[0]
    top = int(A.sum(axis=1).max()) if n else 0
    if top > 1 and (p // 2 + 1) * math.log2(top) >= 62:
        raise SizeCapError("matrix powers would overflow int64")
    powers = [None, A]
    for _ in range(2, p // 2 + 2):
        powers.append(powers[-1] @ A)
    tr = [n]
    for j in range(1, p + 1):
        i = j // 2
        if j % 2 == 0:
            P = powers[i] if i else None
            tr.append(int((P.data.astype(object) ** 2).sum()))
        else:
            if i == 0:
                tr.append(int(A.diagonal().sum()))
            else:
                prod = powers[i].multiply(powers[i + 1])
                tr.append(int(prod.data.astype(object).sum()))
    return tr


@dataclass(frozen=True)
class BaselineResult:
    N: int
    k: int
    n: int
    empirical: MomentSequence
    limit: MomentSequence


def cartesian_baseline(g: RootedGraph, k: int, N: int, p: int = 4, *,
                       cap: int = DENSE_CAP, method: str = "trace") -> BaselineResult:
    """Eigenvalue moments of ``N^(-k/2) A`` for the distance-k graph of ``g``'s cartesian power.

    ``method="trace"`` computes ``tr(A^j)/n`` exactly with sparse integer
    powers; ``method="eigen"`` diagonalizes densely.
    """
    if p < 4:
        raise PreconditionError("p must be at least 4")
    if g.n ** N > cap:
        raise SizeCapError(f"cartesian power has {g.n ** N} vertices, cap is {cap}")
    G = distance_k_graph(cartesian_power(g, N, cap=cap), k)
    n = G.n
    if method == "trace":
        tr = _trace_powers(G.adjacency_matrix(np.int64), p)
        emp = []
        for j, t in enumerate(tr):
            jk = j * k
            if jk % 2 == 0:
                emp.append(Fraction(t, n * N ** (jk // 2)))
            else:
                emp.append(0 if t == 0 else t / (n * N ** (jk / 2)))
    elif method == "eigen":
        lam = eigenvalues(G, cap=cap) / N ** (k / 2)
        emp = [1] + [float(np.mean(lam ** j)) for j in range(1, p + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    emp[0] = 1
    return BaselineResult(N, k, n, MomentSequence(tuple(emp)), gaussian_limit_moments(g, k, p))
