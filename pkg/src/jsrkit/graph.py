"""Dependency graph of a matrix set and its combinatorial structure.

The dependency graph has an edge i -> j exactly when some matrix in the
set has a positive (i, j) entry.  Its strongly connected components, the
condensation DAG with pairwise distances, and the per-vertex periods
drive the trace and diagonal asymptotics elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PeriodOverflow
from .matset import MatrixSet

_INT64_MAX = 2**63 - 1


class _Unreachable:
    """Sentinel for component pairs with no connecting path.

    Kept as a distinct object (not a big integer) so that accidental
    arithmetic on it raises instead of silently producing garbage.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unreachable"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


@dataclass(frozen=True)
class DependencyGraph:
    n_vertices: int
    adjacency: np.ndarray  # (d, d) bool, read-only

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    def successors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def predecessors(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[:, j])


@dataclass(frozen=True)
class Condensation:
    comp_of: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    dag_edges: tuple[tuple[int, int], ...]
    # delta[a][b]: shortest-path distance (in edges) from component a to
    # component b in the condensation DAG, or UNREACHABLE.
    delta: tuple[tuple[object, ...], ...]
    is_connected: tuple[bool, ...]

    def n_components(self) -> int:
        return len(self.components)

    def vertex_distance(self, i: int, j: int):
        """Distance between the components of vertices i and j."""
        return self.delta[self.comp_of[i]][self.comp_of[j]]


@dataclass(frozen=True)
class PeriodInfo:
    delta_i: tuple[int, ...]
    Delta: int


def build_graph(S: MatrixSet) -> DependencyGraph:
    adjacency = np.zeros((S.dim, S.dim), dtype=bool)
    for a in S:
        adjacency |= a > 0
    return DependencyGraph(n_vertices=S.dim, adjacency=adjacency)


def _tarjan_sccs(adjacency: np.ndarray) -> list[list[int]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    n = adjacency.shape[0]
    succ = [np.flatnonzero(adjacency[v]).tolist() for v in range(n)]
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        # explicit DFS stack of (vertex, iterator position)
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pos < len(succ[v]):
                w = succ[v][pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return sccs


def condense(G: DependencyGraph) -> Condensation:
    sccs = _tarjan_sccs(G.adjacency)
    ncomp = len(sccs)
    comp_of = [0] * G.n_vertices
    components = []
    for cid, comp in enumerate(sccs):
        comp.sort()
        components.append(tuple(comp))
        for v in comp:
            comp_of[v] = cid

    edges: set[tuple[int, int]] = set()
    connected = [False] * ncomp
    rows, cols = np.nonzero(G.adjacency)
    for u, v in zip(rows.tolist(), cols.tolist()):
        a, b = comp_of[u], comp_of[v]
        if a == b:
            connected[a] = True
        else:
            edges.add((a, b))
    # a multi-vertex SCC always contains an edge; the flag above catches
    # it anyway since any intra-SCC edge sets it
    dag_edges = tuple(sorted(edges))

    out: list[list[int]] = [[] for _ in range(ncomp)]
    for a, b in dag_edges:
        out[a].append(b)
    delta_rows = []
    for src in range(ncomp):
        dist: list[object] = [UNREACHABLE] * ncomp
        dist[src] = 0
        frontier = [src]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for a in frontier:
                for b in out[a]:
                    if dist[b] is UNREACHABLE:
                        dist[b] = level
                        nxt.append(b)
            frontier = nxt
        delta_rows.append(tuple(dist))

    return Condensation(
        comp_of=tuple(comp_of),
        components=tuple(components),
        dag_edges=dag_edges,
        delta=tuple(delta_rows),
        is_connected=tuple(connected),
    )


def _scc_of_vertex(adjacency: np.ndarray, i: int) -> list[int]:
    """Vertices reachable from i that can also reach i (plus i itself)."""
    n = adjacency.shape[0]
    fwd = np.zeros(n, dtype=bool)
    fwd[i] = True
    frontier = [i]
    while frontier:
        nxt = np.flatnonzero(adjacency[frontier].any(axis=0) & ~fwd)
        fwd[nxt] = True
        frontier = nxt.tolist()
    bwd = np.zeros(n, dtype=bool)
    bwd[i] = True
    frontier = [i]
    while frontier:
        nxt = np.flatnonzero(adjacency[:, frontier].any(axis=1) & ~bwd)
        bwd[nxt] = True
        frontier = nxt.tolist()
    return np.flatnonzero(fwd & bwd).tolist()


def _period_of_scc(adjacency: np.ndarray, members: list[int], root: int) -> int:
    """gcd over intra-SCC edges (u, v) of level(u) + 1 - level(v).

    level is a BFS layering from root restricted to the SCC.  The gcd of
    the empty set is 0, which we map to 1 (no closed walk at all).
    """
    member_set = set(members)
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adjacency[u]).tolist():
                if v in member_set and v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in members:
        lu = level[u]
        for v in np.flatnonzero(adjacency[u]).tolist():
            if v in member_set:
                g = math.gcd(g, lu + 1 - level[v])
    return g if g > 0 else 1


def vertex_period(G: DependencyGraph, i: int) -> int:
    """gcd of the lengths of all closed walks through i; 1 if there are none."""
    members = _scc_of_vertex(G.adjacency, i)
    if len(members) == 1 and not G.adjacency[i, i]:
        return 1
    return _period_of_scc(G.adjacency, members, i)


def global_period(delta_i) -> int:
    """lcm of the per-vertex periods; errors past the int64 range."""
    result = 1
    for d in delta_i:
        result = result // math.gcd(result, int(d)) * int(d)
        if result > _INT64_MAX:
            raise PeriodOverflow(
                f"lcm of vertex periods exceeds {_INT64_MAX}"
            )
    return result


def periods(G: DependencyGraph) -> PeriodInfo:
    """Per-vertex periods and their lcm, computed once per SCC."""
    cond = condense(G)
    delta_i = [1] * G.n_vertices
    for cid, comp in enumerate(cond.components):
        if not cond.is_connected[cid]:
            continue
        p = _period_of_scc(G.adjacency, list(comp), comp[0])
        for v in comp:
            delta_i[v] = p
    return PeriodInfo(delta_i=tuple(delta_i), Delta=global_period(delta_i))


def is_radius_trivially_zero(C: Condensation) -> bool:
    """True iff the dependency graph has no cycle at all."""
    return not any(C.is_connected)
