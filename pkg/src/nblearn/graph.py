"""Directed social networks, path counts and Perron-Frobenius centrality.

Edges point in the direction information flows: ``adjacency[i, j]`` is true
when agent ``j`` hears from agent ``i`` (``i`` is an in-neighbor of ``j``).
Every node carries a self-loop.
"""

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import NoConvergence, NotStronglyConnected

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


def _frozen(array):
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "adjacency", _frozen(np.asarray(self.adjacency, dtype=bool)))

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))

    @property
    def matrix(self):
        """Adjacency as a 0/1 float matrix."""
        return self.adjacency.astype(float)

    def in_neighbors(self, i):
        return np.flatnonzero(self.adjacency[:, i])

    def out_neighbors(self, i):
        return np.flatnonzero(self.adjacency[i])

    def edges(self):
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.adjacency))]

    @property
    def num_edges(self):
        return int(self.adjacency.sum())

    def permute(self, perm):
        """Relabel nodes so that old node ``perm[k]`` becomes node ``k``."""
        perm = np.asarray(perm)
        return DirectedGraph(self.n, self.adjacency[np.ix_(perm, perm)])

    def to_json(self):
        return {"n": self.n, "edges": [list(e) for e in self.edges()], "undirected": False}


def _reachable(adjacency, start):
    seen = np.zeros(len(adjacency), dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in np.flatnonzero(adjacency[u] & ~seen):
            seen[w] = True
            queue.append(w)
    return seen


def _check_strongly_connected(adjacency):
    forward = _reachable(adjacency, 0)
    if not forward.all():
        raise NotStronglyConnected(0, int(np.flatnonzero(~forward)[0]))
    backward = _reachable(adjacency.T, 0)
    if not backward.all():
        raise NotStronglyConnected(int(np.flatnonzero(~backward)[0]), 0)


def build_graph(n: int, edges: Iterable[Sequence[int]], undirected: bool = False) -> DirectedGraph:
    """Build a validated graph from an edge list.

    Self-loops are added when missing and repeated edges are harmless.
    Raises :class:`NotStronglyConnected` naming a pair ``(source, target)``
    with no path from source to target.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"a social network needs at least 2 nodes, got n={n}")
    n = int(n)
    adjacency = np.eye(n, dtype=bool)
    for edge in edges:
        i, j = (int(x) for x in edge)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) has an endpoint outside [0, {n})")
        adjacency[i, j] = True
        if undirected:
            adjacency[j, i] = True
    _check_strongly_connected(adjacency)
    return DirectedGraph(n, adjacency)


def complete_graph(n: int) -> DirectedGraph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(n)])


def build_ab_graph(a: int, b: int) -> DirectedGraph:
    """The (a, b)-graph: two teams simulating a weighted pair of agents.

    With ``c = max(a, b)`` the nodes are ``x_0..x_{c-1}`` (indices ``0..c-1``)
    followed by ``y_0..y_{c-1}`` (indices ``c..2c-1``). Within a team,
    ``i -> j`` whenever ``(j - i) mod c < a``; across teams whenever
    ``(j - i) mod c < b``.
    """
    if a < 1 or b < 1:
        raise ValueError("a and b must be at least 1")
    c = max(a, b)
    edges = []
    for i in range(c):
        for j in range(c):
            d = (j - i) % c
            if d < a:
                edges += [(i, j), (c + i, c + j)]
            if d < b:
                edges += [(i, c + j), (c + i, j)]
    return build_graph(2 * c, edges)


def cycle_graph(n: int, undirected: bool = True) -> DirectedGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], undirected=undirected)


def graph_from_json(obj) -> DirectedGraph:
    """Parse ``{"n": int, "edges": [[i, j], ...], "undirected": bool}``."""
    return build_graph(obj["n"], obj.get("edges", []), undirected=bool(obj.get("undirected", False)))


@dataclass(frozen=True, eq=False)
class PathCountMatrix:
    """Exact numbers of length-``t`` paths; ``counts[i, j]`` counts paths i -> j."""

    t: int
    counts: np.ndarray  # object dtype, Python ints

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen(self.counts))

    def max_count(self):
        return max(int(x) for x in self.counts.flat)

    def as_float(self):
        return np.array([[float(x) for x in row] for row in self.counts])


def path_counts(g: DirectedGraph, t: int) -> PathCountMatrix:
    """Count paths of length ``t`` with exact integer arithmetic.

    Uses the recurrence ``P(t+1) = P(t) A`` starting from the identity.
    """
    if t < 0:
        raise ValueError("path length must be nonnegative")
    a = g.adjacency.astype(int).astype(object)
    p = np.identity(g.n, dtype=int).astype(object)
    for _ in range(t):
        p = p.dot(a)
    return PathCountMatrix(t, p)


@dataclass(frozen=True, eq=False)
class CentralityData:
    r: float
    v: np.ndarray
    w: np.ndarray
    residual: float
    iterations: int

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen(self.v))
        object.__setattr__(self, "w", _frozen(self.w))

    @property
    def projection(self):
        """The Perron projection ``v w^T / (w^T v)``."""
        return np.outer(self.v, self.w) / float(self.w @ self.v)


def _residual(a, x, r):
    return float(np.max(np.abs(a @ x - r * x)))


def perron(g: DirectedGraph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CentralityData:
    """Spectral radius and right/left Perron vectors by power iteration.

    Both iterations start from the uniform vector and are renormalized to
    unit l1 norm every step; ``v`` (right vector) is the eigenvector
    centrality. Stops once ``max(|Av - rv|, |w A - r w|) <= tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = g.matrix
    at = a.T.copy()
    n = g.n
    v = np.full(n, 1.0 / n)
    w = np.full(n, 1.0 / n)
    residual = np.inf
    r = 1.0
    for it in range(1, max_iter + 1):
        av = a @ v
        aw = at @ w
        # l1 norms of the images are the ratio estimates since |v|_1 = |w|_1 = 1
        rv, rw = av.sum(), aw.sum()
        v, w = av / rv, aw / rw
        r = 0.5 * (rv + rw)
        residual = max(_residual(a, v, r), _residual(at, w, r))
        if residual <= tol:
            break
    else:
        raise NoConvergence(max_iter, residual)
    # the pair of estimates can disagree in the last bits; re-estimate from v
    r = float((a @ v).sum())
    residual = max(_residual(a, v, r), _residual(at, w, r))
    return CentralityData(r=r, v=v, w=w, residual=residual, iterations=it)


def perron_projection_error(g: DirectedGraph, c: CentralityData, t: int) -> float:
    """Max-norm distance between ``A^t / r^t`` and the Perron projection."""
    if t < 1:
        raise ValueError("t must be at least 1")
    a = g.matrix / c.r
    m = np.identity(g.n)
    for _ in range(t):
        m = m @ a
    return float(np.max(np.abs(m - c.projection)))


def graph_family(name: str, **params) -> DirectedGraph:
    """Named constructors used by scenario configs."""
    builders = {
        "complete": lambda p: complete_graph(p["n"]),
        "cycle": lambda p: cycle_graph(p["n"], p.get("undirected", True)),
        "ab": lambda p: build_ab_graph(p["a"], p["b"]),
    }
    if name not in builders:
        raise KeyError(name)
    return builders[name](params)

