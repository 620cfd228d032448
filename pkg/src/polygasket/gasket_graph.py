"""Level-n approximating graphs of the 3N-gasket.

The gasket has 3N cell maps F_1..F_3N and boundary V_0 = {v1, v2, v3}. Cells
are glued in a ring, F_i(v2) = F_j(v3) whenever i = j + 1 (mod 3N), and the
boundary sits at the outer corners of cells N, 2N and 3N: F_kN(v1) = v_k.

V_n is built as the union of the 3N images F_i(V_{n-1}). A vertex is an
equivalence class of addresses ``(word, corner)`` with ``len(word) == n`` and
corner in {1, 2, 3}; its canonical address is the lexicographically smallest
member of the class and vertex ids follow the order of canonical addresses.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "GasketParams",
    "LevelGraph",
    "params",
    "build",
    "vertex_count",
    "graph_distance",
    "geodesic_distance",
    "distances_from",
    "diameter",
    "edgelist_text",
    "graph_json",
    "MAX_VERTICES",
]

MAX_VERTICES = 10**7


@dataclass(frozen=True)
class GasketParams:
    N: int
    c: int
    rho: Fraction
    alpha: float
    d_H: float
    d_w: float
    d_s: float


def params(N: int) -> GasketParams:
    """Renormalization and dimension constants of the 3N-gasket."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    c = 3 * N + 2 * N * N
    rho = Fraction(c, 3 * N)
    log_scale = math.log(N + 1)
    alpha = math.log(rho) / log_scale
    d_H = math.log(3 * N) / log_scale
    d_w = alpha + d_H
    d_s = 2.0 * d_H / d_w
    return GasketParams(N=N, c=c, rho=rho, alpha=alpha, d_H=d_H, d_w=d_w, d_s=d_s)


def vertex_count(N: int, n: int) -> int:
    """|V_n| = (3N + (6N-3)(3N)^n) / (3N-1), the solution of
    |V_{n+1}| = 3N |V_n| - 3N with |V_0| = 3."""
    if N < 1 or n < 0:
        raise ValueError("need N >= 1 and n >= 0")
    m = 3 * N
    num = m + (2 * m - 3) * m**n
    if m == 1:  # pragma: no cover - N >= 1 means m >= 3
        raise ValueError
    return num // (m - 1)


@dataclass(frozen=True, eq=False)
class LevelGraph:
    """Immutable vertex/edge structure of V_n.

    ``copies[i, x]`` is the id in this graph of F_{i+1}(x) for x a vertex of
    the child graph V_{n-1}; ``parent_map[x]`` is the id of the V_{n-1} vertex
    x seen as a point of V_n.
    """

    N: int
    level: int
    addresses: tuple          # canonical (word, corner) per vertex id
    edges: np.ndarray         # (E, 2) int array, u < v, lexicographically sorted
    boundary: tuple           # ids of v1, v2, v3
    parent_map: np.ndarray | None
    copies: np.ndarray | None
    child: "LevelGraph | None" = field(repr=False, default=None)
    _adj: tuple = field(repr=False, default=())

    @property
    def num_vertices(self) -> int:
        return len(self.addresses)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> tuple:
        return self._adj

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=int)

    def locate(self, word, corner: int) -> int:
        """Vertex id of the point F_word(v_corner)."""
        word = tuple(word)
        if len(word) != self.level or corner not in (1, 2, 3):
            raise ValueError(f"address must have length {self.level} and corner in 1..3")
        g = self
        for letter in word:
            if not 1 <= letter <= 3 * self.N:
                raise ValueError(f"letter {letter} outside 1..{3 * self.N}")
        x = corner - 1  # V_0 ids are v1, v2, v3 in order
        # unwind from level 0 upward: F_{w1}(F_{w2}(...F_{wn}(v)))
        chain = []
        while g is not None:
            chain.append(g)
            g = g.child
        chain.reverse()  # chain[k] is V_k
        for k in range(1, self.level + 1):
            letter = word[self.level - k]
            x = int(chain[k].copies[letter - 1, x])
        return x

    def check_vertex(self, x) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.num_vertices:
            raise ValueError(f"invalid vertex id {x!r} for a graph with {self.num_vertices} vertices")
        return int(x)


def _finalize(N, level, addresses, edges, boundary, parent_map, copies, child):
    nv = len(addresses)
    adj = [[] for _ in range(nv)]
    for u, v in edges:
        adj[u].append(int(v))
        adj[v].append(int(u))
    adj = tuple(tuple(sorted(a)) for a in adj)
    return LevelGraph(
        N=N,
        level=level,
        addresses=tuple(addresses),
        edges=edges,
        boundary=tuple(int(b) for b in boundary),
        parent_map=parent_map,
        copies=copies,
        child=child,
        _adj=adj,
    )


def _base(N: int) -> LevelGraph:
    addresses = [((), 1), ((), 2), ((), 3)]
    edges = np.array([[0, 1], [0, 2], [1, 2]], dtype=int)
    return _finalize(N, 0, addresses, edges, (0, 1, 2), None, None, None)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _refine(g: LevelGraph) -> LevelGraph:
    N = g.N
    m = 3 * N
    nv = g.num_vertices
    b1, b2, b3 = g.boundary
    uf = _UnionFind(m * nv)
    slot = lambda i, x: i * nv + x  # copy i (0-based) of vertex x
    for i in range(m):
        j = (i - 1) % m  # F_{i+1}(v2) = F_{j+1}(v3) with i+1 = (j+1) + 1 mod 3N
        uf.union(slot(i, b2), slot(j, b3))

    # canonical address = min over the members of each class
    best = {}
    for i in range(m):
        for x in range(nv):
            word, corner = g.addresses[x]
            addr = ((i + 1,) + word, corner)
            r = uf.find(slot(i, x))
            if r not in best or addr < best[r]:
                best[r] = addr
    roots = sorted(best, key=best.get)
    new_id = {r: k for k, r in enumerate(roots)}
    addresses = [best[r] for r in roots]

    copies = np.empty((m, nv), dtype=int)
    for i in range(m):
        for x in range(nv):
            copies[i, x] = new_id[uf.find(slot(i, x))]

    e = copies[:, g.edges]  # (m, E, 2)
    e = e.reshape(-1, 2)
    e = np.sort(e, axis=1)
    edges = np.unique(e, axis=0)

    boundary = (copies[N - 1, b1], copies[2 * N - 1, b1], copies[3 * N - 1, b1])

    # F_u(v_k) = F_u(F_{kN}(v1)): a V_{n-1} vertex is the v1 corner of its kN child cell
    parent_map = np.empty(nv, dtype=int)
    for x in range(nv):
        word, corner = g.addresses[x]
        parent_map[x] = _locate_in(g, copies, word + (corner * N,), 1)
    return _finalize(N, g.level + 1, addresses, edges, boundary, parent_map, copies, g)


def _locate_in(child: LevelGraph, copies: np.ndarray, word, corner: int) -> int:
    inner = child.locate(word[1:], corner)
    return int(copies[word[0] - 1, inner])


def build(N: int, n: int) -> LevelGraph:
    """Construct V_n for the 3N-gasket."""
    params(N)
    if n < 0:
        raise ValueError("level must be >= 0")
    size = vertex_count(N, n)
    if size > MAX_VERTICES:
        raise ValueError(f"V_{n} for N={N} has {size} vertices, above the guard of {MAX_VERTICES}")
    g = _base(N)
    for _ in range(n):
        g = _refine(g)
    return g


def distances_from(g: LevelGraph, source: int) -> np.ndarray:
    """Breadth-first edge counts from ``source`` to every vertex."""
    source = g.check_vertex(source)
    dist = np.full(g.num_vertices, -1, dtype=int)
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def graph_distance(g: LevelGraph, x: int, y: int) -> int:
    x = g.check_vertex(x)
    y = g.check_vertex(y)
    if x == y:
        return 0
    return int(distances_from(g, x)[y])


def geodesic_distance(N: int, n: int, x: int, y: int, graph: LevelGraph | None = None) -> float:
    """Self-similar geodesic distance (N+1)^(-n) d_n(x, y) between points of V_n."""
    g = graph if graph is not None else build(N, n)
    if g.N != N or g.level != n:
        raise ValueError("graph does not match (N, n)")
    return graph_distance(g, x, y) / float((N + 1) ** n)


def diameter(g: LevelGraph) -> int:
    return int(max(distances_from(g, x).max() for x in range(g.num_vertices)))


def edgelist_text(g: LevelGraph) -> str:
    lines = [f"# N={g.N} level={g.level} vertices={g.num_vertices} boundary={' '.join(map(str, g.boundary))}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def graph_json(g: LevelGraph) -> dict:
    return {
        "N": g.N,
        "level": g.level,
        "num_vertices": g.num_vertices,
        "boundary": list(g.boundary),
        "edges": [[int(u), int(v)] for u, v in g.edges],
    }
