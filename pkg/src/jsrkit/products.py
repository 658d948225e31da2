"""Product enumeration in log-scaled arithmetic.

Products of length k are kept as frontiers: batches of matrices normalized
to max entry 1 with the true magnitude folded into a log scale.  Two
reductions keep frontiers small without touching any recorded maximum:

* exact duplicates collapse to the lexicographically smallest word;
* elementwise-dominated products are dropped.  Nonnegativity makes this
  hereditary (P <= Q entrywise implies PA <= QA and AP <= AQ for A >= 0),
  so a dominated product can never contribute a maximal entry, trace, or
  spectral radius at any later length.

Capacity pruning (the cap) is the only lossy step; it keeps the items
with the largest scale and clears the exact flag, after which recorded
values are lower bounds on the true maxima rather than the maxima
themselves.

Consequences worth knowing: scaled copies of a generator vanish from the
seed frontier immediately (c*A with c < 1 is dominated by A), zero
products never enter a frontier at all, and a frontier that empties out
stays empty, so the table short-circuits the remaining lengths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardExceeded, InvariantViolation
from .graph import Condensation, build_graph, condense
from .matset import MatrixSet

DEFAULT_CAP = 100_000
BRUTE_GUARD = 10_000_000

# How many frontier items (taken by descending scale) feed the per-length
# spectral-radius maximum.  A subset maximum is still a certified lower
# bound; the limit only caps eigenvalue work on huge frontiers.
SPECTRAL_ITEM_LIMIT = 4096

NEG_INF = float("-inf")


@dataclass(frozen=True)
class ScaledProduct:
    """One product A_w1 ... A_wk with entries normalized to max 1.

    True entry (i, j) is entries[i, j] * exp(log_scale).  The zero product
    keeps entries all 0 with log_scale 0 by convention.
    """

    entries: np.ndarray
    log_scale: float
    word: tuple[int, ...] | None = None

    def true_value(self) -> np.ndarray:
        return self.entries * np.exp(self.log_scale)


class Frontier:
    """All non-dominated products of one length.

    exact is False once capacity pruning has dropped items at this length
    or any earlier one; from then on the frontier maxima under-estimate
    the true values.
    """

    __slots__ = ("length", "entries", "log_scale", "words", "exact")

    def __init__(self, length, entries, log_scale, words, exact):
        self.length = length
        self.entries = entries  # (n, d, d)
        self.log_scale = log_scale  # (n,)
        self.words = words  # (n, length) int32
        self.exact = exact

    def __len__(self) -> int:
        return len(self.log_scale)

    @property
    def items(self) -> tuple[ScaledProduct, ...]:
        return tuple(
            ScaledProduct(
                entries=self.entries[i],
                log_scale=float(self.log_scale[i]),
                word=tuple(int(x) for x in self.words[i]),
            )
            for i in range(len(self))
        )


def _log_values(entries: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """Per-item flattened log true values, -inf at exact zeros."""
    n = len(log_scale)
    with np.errstate(divide="ignore"):
        return np.log(entries).reshape(n, -1) + log_scale[:, None]


def _dedupe(entries, log_scale, words):
    """Collapse byte-identical (entries, log_scale) items, keeping the
    positionally first (= lexicographically smallest word)."""
    n = len(log_scale)
    if n <= 1:
        return entries, log_scale, words
    rec = np.ascontiguousarray(
        np.concatenate([entries.reshape(n, -1), log_scale[:, None]], axis=1)
    )
    fields = [("", rec.dtype)] * rec.shape[1]
    _, first = np.unique(rec.view(fields).ravel(), return_index=True)
    first.sort()
    if len(first) == n:
        return entries, log_scale, words
    return entries[first], log_scale[first], words[first]


def _antichain_indices(entries: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """Indices (ascending) of items not dominated by any other item.

    A dominator must have log_scale >= the dominated item's (its max true
    entry is at least as large), so a single sweep in descending scale
    order catches everything except equal-scale pairs pointing backwards,
    which a second pass over equal-scale runs cleans up.  Checking against
    earlier items that were themselves dominated is harmless: domination
    is transitive, so their surviving dominator rejects the same items.
    """
    n = len(log_scale)
    if n <= 1:
        return np.arange(n)
    L = _log_values(entries, log_scale)
    order = np.argsort(-log_scale, kind="stable")
    Lo = np.ascontiguousarray(L[order])

    width = Lo.shape[1]
    kept = np.empty_like(Lo)
    nk = 0
    kept_pos: list[int] = []
    block = max(64, min(1024, 1 << 21 // max(width, 1) // 64))
    for s in range(0, n, block):
        blk = Lo[s : s + block]
        b = len(blk)
        alive = np.ones(b, dtype=bool)
        t = 0
        while t < nk and alive.any():
            sub = kept[t : min(t + 4096, nk)]
            idx = np.flatnonzero(alive)
            dom = (sub[None, :, :] >= blk[idx][:, None, :]).all(-1).any(-1)
            alive[idx[dom]] = False
            t += len(sub)
        # within the block, any earlier row may dominate a later one
        mat = (blk[None, :, :] >= blk[:, None, :]).all(-1)
        earlier = np.tri(b, k=-1, dtype=bool)
        alive &= ~(mat & earlier).any(axis=1)
        cnt = int(alive.sum())
        if cnt:
            kept[nk : nk + cnt] = blk[alive]
            kept_pos.extend((s + np.flatnonzero(alive)).tolist())
            nk += cnt

    pos = np.asarray(kept_pos, dtype=np.intp)
    orig = order[pos]
    scales = log_scale[orig]
    final = np.ones(nk, dtype=bool)
    # equal-scale runs: a later (lex-larger) item can still dominate an
    # earlier one; pass 1 only checked the other direction
    run_start = 0
    for i in range(1, nk + 1):
        if i == nk or scales[i] != scales[run_start]:
            if i - run_start > 1:
                sub = L[orig[run_start:i]]
                mat = (sub[None, :, :] >= sub[:, None, :]).all(-1)
                later = ~np.tri(i - run_start, k=0, dtype=bool)
                final[run_start:i] &= ~(mat & later).any(axis=1)
            run_start = i
    orig = orig[final]
    orig.sort()
    return orig


def _reduce(entries, log_scale, words, cap, prune, exact):
    """Shared dedupe / domination / capacity pipeline.

    Items must arrive in word-lexicographic order; the result preserves
    that order, so positional order always encodes word order.
    """
    entries, log_scale, words = _dedupe(entries, log_scale, words)
    if prune and len(log_scale) > 1:
        keep = _antichain_indices(entries, log_scale)
        entries, log_scale, words = entries[keep], log_scale[keep], words[keep]
    if len(log_scale) > cap:
        sel = np.argsort(-log_scale, kind="stable")[:cap]
        sel.sort()
        entries, log_scale, words = entries[sel], log_scale[sel], words[sel]
        exact = False
    return entries, log_scale, words, exact


def seed_frontier(S: MatrixSet, cap: int = DEFAULT_CAP, prune: bool = True) -> Frontier:
    """Length-1 frontier: the generators themselves."""
    stacked = S.stacked()
    m, d, _ = stacked.shape
    mx = stacked.max(axis=(1, 2))
    nz = mx > 0
    entries = stacked[nz] / mx[nz, None, None]
    with np.errstate(divide="ignore"):
        log_scale = np.log(mx[nz])
    words = np.flatnonzero(nz).astype(np.int32)[:, None]
    entries, log_scale, words, exact = _reduce(
        entries, log_scale, words, cap, prune, True
    )
    return Frontier(1, entries, log_scale, words, exact)


def extend(
    F: Frontier, S: MatrixSet, cap: int = DEFAULT_CAP, prune: bool = True
) -> Frontier:
    """All products of length F.length + 1, reduced.

    Right-multiplies every item by every generator (canonical witness
    order), renormalizes, and runs the reduction pipeline.
    """
    stacked = S.stacked()
    m, d, _ = stacked.shape
    n = len(F)
    if n == 0:
        return Frontier(
            F.length + 1,
            np.empty((0, d, d)),
            np.empty(0),
            np.empty((0, F.length + 1), dtype=np.int32),
            F.exact,
        )
    prod = np.matmul(F.entries[:, None, :, :], stacked[None, :, :, :])
    prod = prod.reshape(n * m, d, d)
    log_scale = np.repeat(F.log_scale, m)
    words = np.concatenate(
        [
            np.repeat(F.words, m, axis=0),
            np.tile(np.arange(m, dtype=np.int32), n)[:, None],
        ],
        axis=1,
    )
    mx = prod.max(axis=(1, 2))
    nz = mx > 0
    prod = prod[nz] / mx[nz, None, None]
    log_scale = log_scale[nz] + np.log(mx[nz])
    words = words[nz]
    entries, log_scale, words, exact = _reduce(
        prod, log_scale, words, cap, prune, F.exact
    )
    return Frontier(F.length + 1, entries, log_scale, words, exact)


class NormTable:
    """Per-length maxima of the product semigroup, in log domain.

    For each k in 1..N the table holds ln ||Sigma^k||_{i,j} entrywise
    (-inf for exact zeros), the global max, per-component maxima, the max
    trace, the max single-product spectral radius, an exactness flag, and
    optional witness words.
    """

    def __init__(self, N, dim, condensation, log_entries, log_comp_norms,
                 log_max_traces, log_spectrals, exact_flags, witnesses=None,
                 spectral_witnesses=None, frontier_dump=None):
        self.N = N
        self.dim = dim
        self.condensation: Condensation = condensation
        self.components = condensation.components
        self._log_entries = log_entries  # (N, d, d)
        self._log_comp_norms = log_comp_norms  # (N, ncomp)
        self._log_max_traces = log_max_traces  # (N,)
        self._log_spectrals = log_spectrals  # (N,)
        self._exact = exact_flags  # (N,) bool
        self._witnesses = witnesses  # per k: (d, d) object array or None
        self._spectral_witnesses = spectral_witnesses  # per k: word or None
        self.frontier_dump = frontier_dump

    # -- accessors (k is 1-based) ---------------------------------------

    def log_entry(self, k: int, i: int | None = None, j: int | None = None):
        block = self._log_entries[k - 1]
        if i is None:
            return block
        return float(block[i, j])

    def log_norm(self, k: int) -> float:
        return float(self._log_entries[k - 1].max())

    def log_comp_norm(self, k: int, c: int) -> float:
        return float(self._log_comp_norms[k - 1, c])

    def log_max_comp_norm(self, k: int) -> float:
        row = self._log_comp_norms[k - 1]
        return float(row.max()) if row.size else NEG_INF

    def log_max_trace(self, k: int) -> float:
        return float(self._log_max_traces[k - 1])

    def log_spectral(self, k: int) -> float:
        return float(self._log_spectrals[k - 1])

    def exact(self, k: int) -> bool:
        return bool(self._exact[k - 1])

    def witness(self, k: int, i: int, j: int):
        if self._witnesses is None or self._witnesses[k - 1] is None:
            return None
        return self._witnesses[k - 1][i, j]

    def spectral_witness(self, k: int):
        if self._spectral_witnesses is None:
            return None
        return self._spectral_witnesses[k - 1]

    def diag_sequence(self, i: int) -> np.ndarray:
        """ln ||Sigma^k||_{i,i} for k = 1..N."""
        return self._log_entries[:, i, i].copy()

    # -- invariants ------------------------------------------------------

    def validate(self, slack: float = 1e-9) -> None:
        """Cross-check the table against the identities its values must
        satisfy; raises InvariantViolation on failure.

        Super/submultiplicative identities hold for the true maxima, so
        they are only asserted on exact lengths; the trace sandwich holds
        item by item and is asserted everywhere.
        """
        N, d = self.N, self.dim
        diag = np.einsum("kii->ki", self._log_entries)
        maxdiag = diag.max(axis=1)
        norms = self._log_entries.reshape(N, -1).max(axis=1)
        # trace sandwich: max_i ||.||_ii <= max trace <= d * max_i ||.||_ii
        for k in range(N):
            t = self._log_max_traces[k]
            lo, hi = maxdiag[k], maxdiag[k] + np.log(d)
            if t == NEG_INF and lo == NEG_INF:
                continue
            if not (lo - slack <= t <= hi + slack):
                raise InvariantViolation(
                    f"trace sandwich fails at k={k + 1}: "
                    f"{lo} <= {t} <= {hi} is false"
                )
        exact = self._exact
        for a in range(1, N + 1):
            for b in range(a, N + 1 - a):
                if not (exact[a - 1] and exact[b - 1] and exact[a + b - 1]):
                    continue
                lhs = diag[a + b - 1]
                rhs = diag[a - 1] + diag[b - 1]
                bad = lhs < rhs - slack
                if bad.any():
                    i = int(np.flatnonzero(bad)[0])
                    raise InvariantViolation(
                        f"diagonal supermultiplicativity fails at "
                        f"a={a}, b={b}, i={i}: {lhs[i]} < {rhs[i]}"
                    )
                if norms[a + b - 1] > np.log(d) + norms[a - 1] + norms[b - 1] + slack:
                    raise InvariantViolation(
                        f"d-submultiplicativity fails at a={a}, b={b}"
                    )

    def __repr__(self) -> str:
        return f"<NormTable N={self.N} dim={self.dim} exact_through={self.exact_horizon()}>"

    def exact_horizon(self) -> int:
        """Largest k with exact(k') true for all k' <= k (0 if none)."""
        h = 0
        for k in range(1, self.N + 1):
            if not self._exact[k - 1]:
                break
            h = k
        return h


def _record_length(F, components, spectral_limit, keep_witness):
    """Maxima of one frontier: entry block, comp norms, trace, spectral."""
    n = len(F)
    if n == 0:
        return None
    with np.errstate(divide="ignore"):
        L = np.log(F.entries) + F.log_scale[:, None, None]
    entry_block = L.max(axis=0)
    comp = np.array(
        [L[:, list(c), :][:, :, list(c)].max() if len(c) else NEG_INF
         for c in components]
    )
    tr = np.trace(F.entries, axis1=1, axis2=2)
    with np.errstate(divide="ignore"):
        log_tr = np.where(tr > 0, np.log(np.where(tr > 0, tr, 1.0)), NEG_INF)
    log_tr = log_tr + F.log_scale
    max_trace = float(log_tr.max())

    if n > spectral_limit:
        sel = np.argsort(-F.log_scale, kind="stable")[:spectral_limit]
        sel.sort()
    else:
        sel = np.arange(n)
    radii = np.abs(np.linalg.eigvals(F.entries[sel])).max(axis=1)
    with np.errstate(divide="ignore"):
        log_rad = np.where(radii > 0, np.log(np.where(radii > 0, radii, 1.0)), NEG_INF)
    log_rad = log_rad + F.log_scale[sel]
    si = int(np.argmax(log_rad))
    spectral = float(log_rad[si])
    spectral_word = tuple(int(x) for x in F.words[sel[si]]) if spectral > NEG_INF else None

    witness_block = None
    if keep_witness:
        flat_idx = L.reshape(n, -1).argmax(axis=0)
        witness_block = np.empty(entry_block.shape, dtype=object)
        for cell, item in enumerate(flat_idx):
            i, j = divmod(cell, entry_block.shape[1])
            if entry_block[i, j] > NEG_INF:
                witness_block[i, j] = tuple(int(x) for x in F.words[item])
            else:
                witness_block[i, j] = None
    return entry_block, comp, max_trace, spectral, spectral_word, witness_block


def norm_table(
    S: MatrixSet,
    N: int,
    cap: int = DEFAULT_CAP,
    keep_witness: bool = False,
    prune: bool = True,
    dump_frontier_at: int | None = None,
) -> NormTable:
    """Tabulate per-length maxima for k = 1..N by iterating extend.

    exact(k) stays true as long as no capacity pruning has happened at
    any length <= k; domination pruning alone never clears it.
    """
    if N < 1:
        raise ValueError(f"horizon must be >= 1, got {N}")
    cond = condense(build_graph(S))
    d = S.dim
    ncomp = len(cond.components)
    log_entries = np.full((N, d, d), NEG_INF)
    log_comp_norms = np.full((N, ncomp), NEG_INF)
    log_max_traces = np.full(N, NEG_INF)
    log_spectrals = np.full(N, NEG_INF)
    exact_flags = np.ones(N, dtype=bool)
    witnesses = [None] * N if keep_witness else None
    spectral_witnesses = [None] * N
    frontier_dump = None

    F = seed_frontier(S, cap=cap, prune=prune)
    for k in range(1, N + 1):
        exact_flags[k - 1] = F.exact
        if dump_frontier_at == k:
            frontier_dump = {
                "length": k,
                "exact": F.exact,
                "words": [[int(x) for x in w] for w in F.words],
                "log_scales": [float(v) for v in F.log_scale],
            }
        rec = _record_length(F, cond.components, SPECTRAL_ITEM_LIMIT, keep_witness)
        if rec is None:
            # frontier died: every later true value is 0 when it was exact,
            # unknown-but-bounded-below otherwise
            exact_flags[k - 1 :] = F.exact
            break
        entry_block, comp, max_trace, spectral, spectral_word, witness_block = rec
        log_entries[k - 1] = entry_block
        log_comp_norms[k - 1] = comp
        log_max_traces[k - 1] = max_trace
        log_spectrals[k - 1] = spectral
        spectral_witnesses[k - 1] = spectral_word
        if keep_witness:
            witnesses[k - 1] = witness_block
        if k < N:
            F = extend(F, S, cap=cap, prune=prune)

    table = NormTable(
        N, d, cond, log_entries, log_comp_norms, log_max_traces,
        log_spectrals, exact_flags, witnesses, spectral_witnesses,
        frontier_dump,
    )
    table.validate()
    return table


def brute_norm_table(S: MatrixSet, N: int, keep_witness: bool = False) -> NormTable:
    """Literal maxima over every word of each length; no reductions.

    Guarded: refuses when m**N exceeds 10**7 words.  Uses the same
    normalize-each-step arithmetic as the frontier path, so identical
    words produce bit-identical log values.
    """
    if N < 1:
        raise ValueError(f"horizon must be >= 1, got {N}")
    m = len(S)
    if m**N > BRUTE_GUARD:
        raise GuardExceeded(m**N, BRUTE_GUARD, "words")
    cond = condense(build_graph(S))
    d = S.dim
    ncomp = len(cond.components)
    log_entries = np.full((N, d, d), NEG_INF)
    log_comp_norms = np.full((N, ncomp), NEG_INF)
    log_max_traces = np.full(N, NEG_INF)
    log_spectrals = np.full(N, NEG_INF)
    exact_flags = np.ones(N, dtype=bool)
    witnesses = [None] * N if keep_witness else None
    spectral_witnesses = [None] * N

    stacked = S.stacked()
    mx0 = stacked.max(axis=(1, 2))
    entries = stacked.copy()
    pos = mx0 > 0
    entries[pos] /= mx0[pos, None, None]
    with np.errstate(divide="ignore"):
        log_scale = np.where(pos, np.log(np.where(pos, mx0, 1.0)), 0.0)
    # zero products stay in the arrays (entries 0, scale 0) so that the
    # flat index of a product encodes its word in base m
    for k in range(1, N + 1):
        n = len(entries)
        live = entries.reshape(n, -1).max(axis=1) > 0
        if live.any():
            with np.errstate(divide="ignore"):
                L = np.log(entries) + log_scale[:, None, None]
            L[~live] = NEG_INF
            log_entries[k - 1] = L.max(axis=0)
            log_comp_norms[k - 1] = [
                L[:, list(c), :][:, :, list(c)].max() for c in cond.components
            ]
            tr = np.trace(entries, axis1=1, axis2=2)
            with np.errstate(divide="ignore"):
                log_tr = np.where(tr > 0, np.log(np.where(tr > 0, tr, 1.0)), NEG_INF)
            log_tr = np.where(live, log_tr + log_scale, NEG_INF)
            log_max_traces[k - 1] = log_tr.max()
            radii = np.abs(np.linalg.eigvals(entries)).max(axis=1)
            with np.errstate(divide="ignore"):
                log_rad = np.where(
                    radii > 0, np.log(np.where(radii > 0, radii, 1.0)), NEG_INF
                )
            log_rad = np.where(live, log_rad + log_scale, NEG_INF)
            si = int(np.argmax(log_rad))
            log_spectrals[k - 1] = log_rad[si]
            if log_rad[si] > NEG_INF:
                spectral_witnesses[k - 1] = _decode_word(si, m, k)
            if keep_witness:
                flat_idx = L.reshape(n, -1).argmax(axis=0)
                block = np.empty((d, d), dtype=object)
                for cell, item in enumerate(flat_idx):
                    i, j = divmod(cell, d)
                    if log_entries[k - 1][i, j] > NEG_INF:
                        block[i, j] = _decode_word(int(item), m, k)
                    else:
                        block[i, j] = None
                witnesses[k - 1] = block
        if k < N:
            prod = np.matmul(entries[:, None, :, :], stacked[None, :, :, :])
            prod = prod.reshape(n * m, d, d)
            log_scale = np.repeat(log_scale, m)
            mx = prod.max(axis=(1, 2))
            pos = mx > 0
            prod[pos] /= mx[pos, None, None]
            log_scale = log_scale + np.where(
                pos, np.log(np.where(pos, mx, 1.0)), 0.0
            )
            log_scale[~pos] = 0.0
            entries = prod

    table = NormTable(
        N, d, cond, log_entries, log_comp_norms, log_max_traces,
        log_spectrals, exact_flags, witnesses, spectral_witnesses, None,
    )
    table.validate()
    return table


def _decode_word(index: int, m: int, k: int) -> tuple[int, ...]:
    """Word of a brute product: base-m digits of its flat index."""
    digits = []
    for _ in range(k):
        digits.append(index % m)
        index //= m
    return tuple(reversed(digits))
