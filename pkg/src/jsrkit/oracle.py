"""Brute-force references: single-matrix spectral radius and the
generalized lower bound from exhaustive word enumeration.

These are deliberately simple so they can serve as ground truth for the
pruned pipeline on small instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded, MalformedInput
from .matset import MatrixSet

ENUM_GUARD = 10_000_000


@dataclass(frozen=True)
class OracleEstimate:
    """max over enumerated words w of rho(product(w))^(1/|w|)."""

    value: float
    horizon: int
    achieving_word: tuple[int, ...]


def _diag_root_estimate(A: np.ndarray, t_max: int) -> float:
    """max over t <= t_max of max_i ((A^t)_{i,i})^(1/t), log-scaled."""
    d = A.shape[0]
    mx = A.max()
    if mx == 0:
        return 0.0
    P = A / mx
    log_scale = float(np.log(mx))
    best = -np.inf
    cur = P.copy()
    cur_scale = log_scale
    for t in range(1, t_max + 1):
        dg = np.diag(cur).max()
        if dg > 0:
            best = max(best, (np.log(dg) + cur_scale) / t)
        if t < t_max:
            cur = cur @ P
            m = cur.max()
            if m == 0:
                break
            cur /= m
            cur_scale += float(np.log(m)) + log_scale
    return float(np.exp(best)) if best > -np.inf else 0.0


def single_spectral_radius(
    A, tol: float = 1e-10, max_iter: int = 20_000
) -> float:
    """Spectral radius of one nonnegative matrix.

    Power iteration on A + eps*I; the shift makes every iterate strictly
    positive and moves the radius by exactly eps (the Perron root
    dominates, so rho(A + eps*I) = rho(A) + eps), which is subtracted at
    the end.  Iterates carry Collatz-Wielandt ratio brackets; when the
    bracket closes to tol the midpoint is certified.  Otherwise the run
    stops after three consecutive stable norms or max_iter, with a
    warning.  A diagonal-power cross-check (a lower bound by the
    diagonal formula) guards against undershoot; disagreement beyond
    10*tol is warned about and the larger value wins.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MalformedInput(f"need a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all() or (A < 0).any():
        raise MalformedInput("matrix must be nonnegative and finite")
    if tol <= 0:
        raise MalformedInput(f"tol must be positive, got {tol!r}")
    d = A.shape[0]
    if A.max() == 0:
        return 0.0

    eps = 1e-12 * (1.0 + float(A.max()))
    B = A + eps * np.eye(d)
    x = np.ones(d)
    lam = 1.0
    stable = 0
    certified = None
    for _ in range(max_iter):
        y = B @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * hi:
            certified = 0.5 * (lo + hi)
            break
        new_lam = float(y.max())
        if abs(new_lam - lam) <= tol * max(new_lam, 1e-300):
            stable += 1
            if stable >= 3:
                break
        else:
            stable = 0
        lam = new_lam
        x = y / new_lam
    else:
        warnings.warn(
            "power iteration did not converge; returning best estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    rho_pi = (certified if certified is not None else lam) - eps
    rho_diag = _diag_root_estimate(A, 4 * d)
    scale = max(rho_pi, rho_diag, 1e-300)
    if rho_diag > rho_pi + 10 * tol * scale:
        warnings.warn(
            f"power iteration ({rho_pi}) disagrees with the diagonal "
            f"cross-check ({rho_diag}); returning the larger",
            RuntimeWarning,
            stacklevel=2,
        )
    return max(rho_pi, rho_diag, 0.0)


def generalized_lower(S: MatrixSet, n: int) -> OracleEstimate:
    """Exhaustive max of rho(A_w1 ... A_wk)^(1/k) over all words, k <= n.

    Depth-first, no pruning; each node's product is kept normalized with
    a log scale so long horizons cannot overflow.  Refuses when m**n
    exceeds the enumeration guard.  This is a certified lower bound on
    the joint spectral radius.
    """
    if n < 1:
        raise MalformedInput(f"horizon must be >= 1, got {n}")
    m = len(S)
    if m**n > ENUM_GUARD:
        raise GuardExceeded(m**n, ENUM_GUARD, "words")
    stacked = S.stacked()

    best_value = -np.inf
    best_word: tuple[int, ...] = (0,)
    # stack of (entries, log_scale) along the current word prefix
    path: list[tuple[np.ndarray, float]] = []
    word: list[int] = []

    def visit(entries: np.ndarray, log_scale: float) -> None:
        nonlocal best_value, best_word
        k = len(word)
        radius = float(np.abs(np.linalg.eigvals(entries)).max())
        if radius > 0:
            val = (np.log(radius) + log_scale) / k
        else:
            val = -np.inf
        if val > best_value:
            best_value = val
            best_word = tuple(word)

    def dfs() -> None:
        if path:
            base, base_scale = path[-1]
        else:
            base, base_scale = None, 0.0
        for g in range(m):
            if base is None:
                prod = stacked[g].copy()
            else:
                prod = base @ stacked[g]
            mx = float(prod.max())
            if mx > 0:
                prod /= mx
                scale = base_scale + np.log(mx)
            else:
                scale = 0.0
            word.append(g)
            if mx > 0:
                visit(prod, scale)
            # zero products (and their extensions) have value 0, which the
            # -inf fallback below already reports; no need to descend
            if len(word) < n and mx > 0:
                path.append((prod, scale))
                dfs()
                path.pop()
            word.pop()

    dfs()
    if best_value == -np.inf:
        return OracleEstimate(value=0.0, horizon=n, achieving_word=(0,))
    return OracleEstimate(
        value=float(np.exp(best_value)), horizon=n, achieving_word=best_word
    )
