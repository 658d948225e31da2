"""Sequence-level diagnostics: supermultiplicative root convergence,
bounded diagonal ratios, the trace-root limit along multiples of the
period, and the polynomial growth exponent.

These work on finite horizons, so convergence is always reported under a
stated window rule rather than asserted: the true statements are
asymptotic and a horizon can only ever be suggestive ("horizon-limited").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComputeError, MalformedInput, NotSupermultiplicative
from .matset import MatrixSet
from .products import DEFAULT_CAP, NEG_INF, NormTable

CONVERGENCE_RTOL = 1e-3


@dataclass(frozen=True)
class SequenceDiagnosis:
    """Summary of a supermultiplicative sequence's n-th roots.

    sup_root is the sup of a_n^(1/n) over positive terms (0 when there
    are none); converged means the last max(5, N//10) positive roots all
    lie within 1e-3 relative of sup_root (vacuously true when the
    positive subsequence is empty).
    """

    sup_root: float
    tail_estimates: tuple[tuple[int, float], ...]
    converged: bool
    support_period: int


def _fekete_from_logs(log_a: np.ndarray, slack: float) -> SequenceDiagnosis:
    N = len(log_a)
    for m in range(1, N + 1):
        for n in range(m, N + 1 - m):
            lhs = log_a[m + n - 1]
            rhs = log_a[m - 1] + log_a[n - 1]
            if lhs < rhs - slack:
                raise NotSupermultiplicative(
                    m, n, float(np.exp(lhs)), float(np.exp(rhs))
                )
    positive = [(k, float(np.exp(log_a[k - 1] / k)))
                for k in range(1, N + 1) if log_a[k - 1] > NEG_INF]
    if not positive:
        return SequenceDiagnosis(
            sup_root=0.0, tail_estimates=(), converged=True, support_period=1
        )
    sup_root = max(r for _, r in positive)
    w = max(5, N // 10)
    tail = positive[-w:]
    converged = all(
        abs(r - sup_root) <= CONVERGENCE_RTOL * sup_root for _, r in tail
    )
    support = 0
    for k, _ in positive:
        support = math.gcd(support, k)
    return SequenceDiagnosis(
        sup_root=float(sup_root),
        tail_estimates=tuple(positive),
        converged=converged,
        support_period=support if support else 1,
    )


def fekete_check(a, slack: float = 1e-9) -> SequenceDiagnosis:
    """Diagnose a finite nonnegative sequence a_1..a_N.

    Supermultiplicativity (a_{m+n} >= a_m * a_n, up to a relative float
    slack) is verified on every index pair first; a violation raises
    NotSupermultiplicative with the pair, it is not a diagnosis.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1 or len(arr) == 0:
        raise MalformedInput("need a non-empty 1-d sequence")
    if not np.isfinite(arr).all() or (arr < 0).any():
        raise MalformedInput("sequence terms must be finite and nonnegative")
    with np.errstate(divide="ignore"):
        log_a = np.where(arr > 0, np.log(np.where(arr > 0, arr, 1.0)), NEG_INF)
    return _fekete_from_logs(log_a, slack)


def fekete_check_log(log_a, slack: float = 1e-9) -> SequenceDiagnosis:
    """fekete_check for a sequence already in log domain (-inf = zero term).

    This is the form the norm-table diagonals use; it cannot overflow no
    matter how fast the true values grow.
    """
    arr = np.asarray(log_a, dtype=np.float64)
    if arr.ndim != 1 or len(arr) == 0:
        raise MalformedInput("need a non-empty 1-d sequence")
    if np.isnan(arr).any() or (arr == np.inf).any():
        raise MalformedInput("log terms must be finite or -inf")
    return _fekete_from_logs(arr, slack)


@dataclass(frozen=True)
class RatioCheck:
    """max over the window of ||Sigma^{n+b}||_{i,i} / ||Sigma^n||_{i,i}."""

    max_ratio: float
    at_n: int
    i: int
    gap: int


def bounded_ratio_check(
    T: NormTable, i: int, b: int, window: tuple[int, int]
) -> RatioCheck | None:
    """Largest diagonal ratio across a fixed gap b, over n in [lo, hi].

    Only n with both diagonals positive count; None when no such n
    exists in the window (for instance when the period of i does not
    divide b).
    """
    if b < 1:
        raise MalformedInput(f"gap must be >= 1, got {b}")
    lo, hi = window
    lo = max(lo, 1)
    hi = min(hi, T.N - b)
    best = None
    best_n = None
    for n in range(lo, hi + 1):
        a0 = T.log_entry(n, i, i)
        a1 = T.log_entry(n + b, i, i)
        if a0 == NEG_INF or a1 == NEG_INF:
            continue
        ratio = float(np.exp(a1 - a0))
        if best is None or ratio > best:
            best = ratio
            best_n = n
    if best is None:
        return None
    return RatioCheck(max_ratio=best, at_n=best_n, i=i, gap=b)


@dataclass(frozen=True)
class TraceLimit:
    """Trace roots along multiples of the global period Delta.

    trace_roots: (k, root) for every k <= N (root 0 at zero trace);
    subsequence: the same restricted to multiples of Delta;
    diag_roots: (k, max_i ||Sigma^k||_{i,i}^(1/k)) along multiples of
    Delta -- the quantity whose limit the period construction actually
    stabilizes; sandwich_ok: per-k check that
    max_i ||Sigma^k||_{i,i} <= t_k <= d * max_i ||Sigma^k||_{i,i};
    within_bracket: last subsequence root against a supplied bracket.
    """

    Delta: int
    trace_roots: tuple[tuple[int, float], ...]
    subsequence: tuple[tuple[int, float], ...]
    diag_roots: tuple[tuple[int, float], ...]
    sandwich_ok: bool
    within_bracket: bool | None


def trace_limit(
    S: MatrixSet,
    N: int,
    cap: int = DEFAULT_CAP,
    prune: bool = True,
    table: NormTable | None = None,
    bracket: tuple[float, float] | None = None,
) -> TraceLimit:
    """Trace-root subsequence along multiples of the global period.

    Needs N >= Delta so the subsequence is non-empty.  A precomputed
    table and a (lower, upper) bracket can be supplied; the bracket
    check is skipped when absent.
    """
    from .graph import build_graph, periods
    from .products import norm_table as _norm_table

    P = periods(build_graph(S))
    if N < P.Delta:
        raise MalformedInput(
            f"horizon {N} is below the global period {P.Delta}"
        )
    if table is None:
        table = _norm_table(S, N, cap=cap, prune=prune)

    d = S.dim
    roots = []
    sandwich_ok = True
    slack = 1e-9
    for k in range(1, N + 1):
        t = table.log_max_trace(k)
        roots.append((k, float(np.exp(t / k)) if t > NEG_INF else 0.0))
        dg = np.diagonal(table.log_entry(k)).max()
        lo = dg
        hi = dg + np.log(d)
        if t == NEG_INF and dg == NEG_INF:
            continue
        if not (lo - slack <= t <= hi + slack):
            sandwich_ok = False
    sub = tuple((k, r) for k, r in roots if k % P.Delta == 0)
    diag_roots = []
    for k in range(P.Delta, N + 1, P.Delta):
        dg = np.diagonal(table.log_entry(k)).max()
        diag_roots.append((k, float(np.exp(dg / k)) if dg > NEG_INF else 0.0))
    within = None
    if bracket is not None and sub:
        lo, hi = bracket
        last = sub[-1][1]
        within = (lo - 1e-9) <= last <= (hi + 1e-9)
    return TraceLimit(
        Delta=P.Delta,
        trace_roots=tuple(roots),
        subsequence=sub,
        diag_roots=tuple(diag_roots),
        sandwich_ok=sandwich_ok,
        within_bracket=within,
    )


def growth_fit(T: NormTable, rho_hat: float, k_range: tuple[int, int]) -> float:
    """Least-squares estimate of the polynomial degree r in
    ||Sigma^k|| ~ const * k^r * rho^k.

    Fits the slope of (ln k, ln ||Sigma^k|| - k ln rho_hat) over exact
    lengths in k_range with positive norms; meaningful only when rho_hat
    is tight.  Needs at least 3 usable points.
    """
    if rho_hat <= 0:
        raise MalformedInput(f"rho_hat must be positive, got {rho_hat!r}")
    lo, hi = k_range
    lo = max(lo, 1)
    hi = min(hi, T.N)
    xs, ys = [], []
    log_rho = math.log(rho_hat)
    for k in range(lo, hi + 1):
        if not T.exact(k):
            continue
        ln = T.log_norm(k)
        if ln == NEG_INF:
            continue
        xs.append(math.log(k))
        ys.append(ln - k * log_rho)
    if len(xs) < 3:
        raise ComputeError(
            f"growth fit needs at least 3 usable points, found {len(xs)}"
        )
    slope, _ = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return float(slope)
