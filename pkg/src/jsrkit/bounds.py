"""Certified brackets on the joint spectral radius.

Four curves come out of a norm table, all exact k-th roots of recorded
maxima:

* diag_lower(k): max_i ||Sigma^k||_{i,i} ^ (1/k) -- always a lower bound.
* spectral_lower(k): max recorded rho(A_w1...A_wk)^(1/k) -- a lower bound
  because every factor product's spectral radius is; this curve is what
  typically closes the bracket (it hits single-product Perron roots
  exactly instead of approaching them at 1/k speed).
* comp_lower/comp_upper(k): the component-norm sandwich
  ((V/(U*D))^D * max_C ||Sigma^k||_C)^(1/k) <= rho <= (D * max_C ...)^(1/k).
* submult_upper(k): (d * ||Sigma^k||)^(1/k).

Upper bounds are only drawn from exact lengths: a capacity-pruned norm is
a subset maximum, safe below, unsound above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RequiresExact
from .graph import (
    Condensation,
    DependencyGraph,
    build_graph,
    condense,
    is_radius_trivially_zero,
    periods,
)
from .matset import EntryStats, MatrixSet
from .products import DEFAULT_CAP, NEG_INF, NormTable, norm_table


@dataclass(frozen=True)
class Certificate:
    """What achieved an envelope value.

    kind is one of "diag", "comp", "spectral", "submult", "trivial_zero";
    index is the diagonal index (diag), the component id (comp/submult
    certificates use the achieving component where applicable), else None.
    """

    kind: str
    k: int | None
    index: int | None = None
    word: tuple[int, ...] | None = None


@dataclass(frozen=True)
class BoundsReport:
    N: int
    dim: int
    trivial_zero: bool
    diag_lower: tuple[float, ...]
    comp_lower: tuple[float, ...]
    spectral_lower: tuple[float, ...]
    comp_upper: tuple[float | None, ...]  # None where not exact
    submult_upper: tuple[float | None, ...]
    exact: tuple[bool, ...]
    best_lower: float
    best_upper: float | None
    lower_certificate: Certificate | None
    upper_certificate: Certificate | None
    m_indices: tuple[int, ...]
    K_hat: tuple[float | None, ...]
    delta_i: tuple[int, ...]
    Delta: int

    def midpoint(self) -> float | None:
        if self.best_upper is None:
            return None
        return 0.5 * (self.best_lower + self.best_upper)

    def width(self) -> float | None:
        if self.best_upper is None:
            return None
        return self.best_upper - self.best_lower


def diag_lower(T: NormTable, k: int) -> float:
    """max_i (||Sigma^k||_{i,i})^(1/k); valid even at inexact lengths."""
    block = T.log_entry(k)
    dg = np.diagonal(block).max()
    return float(np.exp(dg / k)) if dg > NEG_INF else 0.0


def spectral_lower(T: NormTable, k: int) -> float:
    """Best recorded single-product spectral radius root at length k."""
    v = T.log_spectral(k)
    return float(np.exp(v / k)) if v > NEG_INF else 0.0


def component_sandwich(
    T: NormTable, C: Condensation, E: EntryStats | None, k: int
) -> tuple[float, float]:
    """The component-norm bracket at length k.

    Requires an exact length (the upper side reads the true max); an
    all-zero length gives (0, 0) regardless of entry stats.
    """
    if not T.exact(k):
        raise RequiresExact(k)
    best = T.log_max_comp_norm(k)
    if best == NEG_INF:
        return 0.0, 0.0
    D = T.dim
    lower = math.exp(
        (D * (math.log(E.smallest) - math.log(E.largest) - math.log(D)) + best) / k
    )
    upper = math.exp((math.log(D) + best) / k)
    return lower, upper


def _comp_lower_value(T: NormTable, E: EntryStats | None, k: int) -> float:
    """Lower side of the sandwich; safe at any length (subset maxima
    under-estimate, and the lower formula is monotone in the norm)."""
    best = T.log_max_comp_norm(k)
    if best == NEG_INF or E is None:
        return 0.0
    D = T.dim
    return math.exp(
        (D * (math.log(E.smallest) - math.log(E.largest) - math.log(D)) + best) / k
    )


def m_indices(G: DependencyGraph, C: Condensation) -> tuple[int, ...]:
    """Shortest closed-walk length through each vertex; 1 when none exists."""
    d = G.n_vertices
    out = []
    for i in range(d):
        cid = C.comp_of[i]
        if not C.is_connected[cid]:
            out.append(1)
            continue
        members = set(C.components[cid])
        # BFS from i inside the SCC; shortest closed walk is
        # min over edges (u -> i) of dist(i, u) + 1
        dist = {i: 0}
        frontier = [i]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.flatnonzero(G.adjacency[u]).tolist():
                    if v in members and v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        best = None
        for u in np.flatnonzero(G.adjacency[:, i]).tolist():
            if u in dist:
                cand = dist[u] + 1
                if best is None or cand < best:
                    best = cand
        out.append(best if best is not None else 1)
    return tuple(out)


def best_bracket(
    S: MatrixSet,
    N: int,
    cap: int = DEFAULT_CAP,
    keep_witness: bool = False,
    prune: bool = True,
    table: NormTable | None = None,
) -> BoundsReport:
    """Assemble every curve and the tightest certified bracket.

    A precomputed table may be passed to avoid recomputation; it must
    come from the same set with the same horizon.
    """
    G = build_graph(S)
    C = condense(G)
    E = S.entry_stats()
    P = periods(G)
    mi = m_indices(G, C)
    trivial = is_radius_trivially_zero(C)
    if table is None:
        table = norm_table(S, N, cap=cap, keep_witness=keep_witness, prune=prune)

    d = S.dim
    diag_curve, comp_curve, spec_curve = [], [], []
    comp_up, sub_up = [], []
    exact = []
    for k in range(1, N + 1):
        diag_curve.append(diag_lower(table, k))
        comp_curve.append(_comp_lower_value(table, E, k))
        spec_curve.append(spectral_lower(table, k))
        ex = table.exact(k)
        exact.append(ex)
        if ex:
            _, up = component_sandwich(table, C, E, k)
            comp_up.append(up)
            ln = table.log_norm(k)
            sub_up.append(
                float(np.exp((np.log(d) + ln) / k)) if ln > NEG_INF else 0.0
            )
        else:
            comp_up.append(None)
            sub_up.append(None)

    if trivial:
        best_lower = 0.0
        best_upper = 0.0
        lower_cert = Certificate(kind="trivial_zero", k=None)
        upper_cert = Certificate(kind="trivial_zero", k=None)
    else:
        # lower envelope: max over k and curves; ties resolved toward
        # smallest k, then diag before comp before spectral, then the
        # smallest diagonal index
        best_lower = 0.0
        lower_cert = None
        for k in range(1, N + 1):
            block = table.log_entry(k)
            dval = diag_curve[k - 1]
            if dval > best_lower:
                dg = np.diagonal(block)
                i = int(np.argmax(dg))
                best_lower = dval
                lower_cert = Certificate(
                    kind="diag", k=k, index=i, word=table.witness(k, i, i)
                )
            cval = comp_curve[k - 1]
            if cval > best_lower:
                row = [table.log_comp_norm(k, c) for c in range(len(table.components))]
                best_lower = cval
                lower_cert = Certificate(
                    kind="comp", k=k, index=int(np.argmax(row))
                )
            sval = spec_curve[k - 1]
            if sval > best_lower:
                best_lower = sval
                lower_cert = Certificate(
                    kind="spectral", k=k, word=table.spectral_witness(k)
                )
        best_upper = None
        upper_cert = None
        for k in range(1, N + 1):
            if not exact[k - 1]:
                continue
            cu, su = comp_up[k - 1], sub_up[k - 1]
            if best_upper is None or cu < best_upper:
                row = [table.log_comp_norm(k, c) for c in range(len(table.components))]
                best_upper = cu
                upper_cert = Certificate(kind="comp", k=k, index=int(np.argmax(row)))
            if su < best_upper:
                best_upper = su
                upper_cert = Certificate(kind="submult", k=k)

    K_hat: list[float | None] = []
    for i in range(d):
        m_i = mi[i]
        if best_upper is None or m_i > N:
            K_hat.append(None)
            continue
        dg = table.log_entry(m_i, i, i)
        if dg == NEG_INF:
            K_hat.append(None)
        elif best_upper == 0.0:
            K_hat.append(None)
        else:
            K_hat.append(float(np.exp(m_i * np.log(best_upper) - dg)))

    return BoundsReport(
        N=N,
        dim=d,
        trivial_zero=trivial,
        diag_lower=tuple(diag_curve),
        comp_lower=tuple(comp_curve),
        spectral_lower=tuple(spec_curve),
        comp_upper=tuple(comp_up),
        submult_upper=tuple(sub_up),
        exact=tuple(exact),
        best_lower=best_lower,
        best_upper=best_upper,
        lower_certificate=lower_cert,
        upper_certificate=upper_cert,
        m_indices=mi,
        K_hat=tuple(K_hat),
        delta_i=P.delta_i,
        Delta=P.Delta,
    )
