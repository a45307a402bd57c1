"""Brute-force reference computations, deliberately naive.

Nothing here calls into the library's algorithms; graphs are read only
through their edge lists.
"""
import itertools
import math

import numpy as np


def floyd_warshall(n, edges):
    """All-pairs shortest path lengths; ``inf`` for unreachable pairs."""
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0)
    for u, v in edges:
        D[u, v] = D[v, u] = 1
    for m in range(n):
        D = np.minimum(D, D[:, [m]] + D[[m], :])
    return D


def distance_k_edges(n, edges, k):
    D = floyd_warshall(n, edges)
    return {(u, v) for u in range(n) for v in range(u + 1, n) if D[u, v] == k}


def adjacency_lists(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def closed_walks(n, edges, root, length):
    """Every closed walk of the given length at ``root``, as vertex tuples."""
    adj = adjacency_lists(n, edges)
    out = []

    def extend(path):
        if len(path) == length + 1:
            if path[-1] == root:
                out.append(tuple(path))
            return
        for w in adj[path[-1]]:
            extend(path + [w])

    extend([root])
    return out


def closed_walk_counts(n, edges, root, p):
    return [len(closed_walks(n, edges, root, j)) for j in range(p + 1)]


def dyck_count(length):
    """Number of +-1 sequences of the given length with non-negative partial sums ending at 0."""
    count = 0
    for steps in itertools.product((1, -1), repeat=length):
        s = 0
        for x in steps:
            s += x
            if s < 0:
                break
        else:
            count += s == 0
    return count


def hypercube_spectrum(N):
    """Eigenvalues ``N - 2i`` with multiplicity ``C(N, i)``."""
    return [(N - 2 * i, math.comb(N, i)) for i in range(N + 1)]


def gaussian_moment(j):
    return 0 if j % 2 else math.prod(range(1, j, 2))


def semicircle_transform(z):
    return (z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2


def star_power_edges(n, edges, root, N):
    """Glue ``N`` copies of a graph at ``root`` with copy-major labels."""
    others = [v for v in range(n) if v != root]
    out = []
    for c in range(N):
        label = {root: 0}
        for j, v in enumerate(others):
            label[v] = 1 + c * (n - 1) + j
        out.extend((label[u], label[v]) for u, v in edges)
    return N * (n - 1) + 1, out
