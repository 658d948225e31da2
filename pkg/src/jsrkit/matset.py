"""Finite sets of square nonnegative matrices.

A MatrixSet is the input object for everything else in the package: an
ordered, finite collection of dense d-by-d float64 matrices whose entries
are all finite and >= 0.  Zero entries are treated as exact zeros (they
decide the dependency graph), so validation rejects negatives outright
rather than clamping them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySet,
    MalformedInput,
    NegativeEntry,
    NonFiniteEntry,
    ShapeMismatch,
)


@dataclass(frozen=True)
class EntryStats:
    """Extremes of the positive entries across the whole set.

    largest / smallest range over positive entries only; a set with no
    positive entry at all has no stats (callers get None).
    """

    largest: float
    smallest: float
    dim: int


class MatrixSet:
    """An ordered finite set of nonnegative d x d matrices."""

    __slots__ = ("dim", "matrices", "name")

    def __init__(self, matrices, name: str | None = None):
        mats = [np.asarray(a, dtype=np.float64) for a in matrices]
        if not mats:
            raise EmptySet("a matrix set needs at least one matrix")
        d = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for idx, a in enumerate(mats):
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ShapeMismatch(
                    f"matrix {idx} has shape {a.shape}, expected square"
                )
            if a.shape[0] != d:
                raise ShapeMismatch(
                    f"matrix {idx} is {a.shape[0]}x{a.shape[1]}, "
                    f"matrix 0 is {d}x{d}"
                )
            bad = ~np.isfinite(a)
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise NonFiniteEntry(idx, int(r), int(c), float(a[r, c]))
            neg = a < 0
            if neg.any():
                r, c = np.argwhere(neg)[0]
                raise NegativeEntry(idx, int(r), int(c), float(a[r, c]))
        if d == 0:
            raise ShapeMismatch("matrices must be at least 1x1")
        for a in mats:
            a.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "matrices", tuple(mats))
        object.__setattr__(self, "name", name)

    def __setattr__(self, key, value):
        raise AttributeError("MatrixSet is immutable")

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSet):
            return NotImplemented
        return (
            self.dim == other.dim
            and len(self) == len(other)
            and all(np.array_equal(a, b) for a, b in zip(self, other))
        )

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<MatrixSet{label} dim={self.dim} size={len(self)}>"

    def stacked(self) -> np.ndarray:
        """All matrices as one (m, d, d) array (a copy, safe to mutate)."""
        return np.stack(self.matrices)

    def entry_stats(self) -> EntryStats | None:
        """Largest and smallest positive entry, or None if all entries are 0."""
        stack = self.stacked()
        positive = stack[stack > 0]
        if positive.size == 0:
            return None
        return EntryStats(
            largest=float(positive.max()),
            smallest=float(positive.min()),
            dim=self.dim,
        )

    def scale(self, c: float) -> "MatrixSet":
        """Return the set with every matrix multiplied by c > 0."""
        c = float(c)
        if not np.isfinite(c) or c <= 0:
            raise MalformedInput(f"scale factor must be finite and > 0, got {c!r}")
        return MatrixSet([c * a for a in self.matrices], name=self.name)

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        doc = {"dim": self.dim, "matrices": [a.tolist() for a in self.matrices]}
        if self.name is not None:
            doc["name"] = self.name
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"{self.dim} {len(self)}\n")
        for a in self.matrices:
            for row in a:
                out.write(",".join(repr(float(x)) for x in row))
                out.write("\n")
        return out.getvalue()


def from_json(text: str) -> MatrixSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("top-level JSON value must be an object")
    if "dim" not in doc or "matrices" not in doc:
        raise MalformedInput('JSON object needs "dim" and "matrices" keys')
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise MalformedInput(f'"dim" must be a positive integer, got {dim!r}')
    mats = doc["matrices"]
    if not isinstance(mats, list) or not mats:
        raise MalformedInput('"matrices" must be a non-empty list')
    arrays = []
    for idx, m in enumerate(mats):
        try:
            a = np.asarray(m, dtype=np.float64)
        except (ValueError, TypeError) as exc:
            raise MalformedInput(f"matrix {idx} is not numeric: {exc}") from exc
        if a.shape != (dim, dim):
            raise ShapeMismatch(
                f"matrix {idx} has shape {a.shape}, header says {dim}x{dim}"
            )
        arrays.append(a)
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise MalformedInput('"name" must be a string when present')
    return MatrixSet(arrays, name=name)


def from_csv(text: str) -> MatrixSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedInput("empty CSV input")
    header = lines[0].split()
    if len(header) != 2:
        raise MalformedInput(f'CSV header must be "d m", got {lines[0]!r}')
    try:
        dim, count = int(header[0]), int(header[1])
    except ValueError as exc:
        raise MalformedInput(f"CSV header is not two integers: {lines[0]!r}") from exc
    if dim < 1 or count < 1:
        raise MalformedInput(f"CSV header values must be positive, got {dim} {count}")
    body = lines[1:]
    if len(body) != dim * count:
        raise MalformedInput(
            f"expected {dim * count} data rows for {count} matrices of "
            f"dimension {dim}, got {len(body)}"
        )
    reader = csv.reader(body)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != dim:
            raise MalformedInput(
                f"line {lineno}: expected {dim} values, got {len(row)}"
            )
        try:
            rows.append([float(x) for x in row])
        except ValueError as exc:
            raise MalformedInput(f"line {lineno}: {exc}") from exc
    data = np.asarray(rows, dtype=np.float64).reshape(count, dim, dim)
    return MatrixSet(list(data))


def load(path: str) -> MatrixSet:
    """Load a matrix set from a .json or .csv file (decided by suffix)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return from_json(text)
    if path.endswith(".csv"):
        return from_csv(text)
    raise MalformedInput(f"cannot tell the format of {path!r} (use .json or .csv)")


def random_set(
    dim: int,
    size: int,
    density: float,
    value_range: tuple[float, float],
    seed: int,
) -> MatrixSet:
    """Draw a random matrix set.

    Each entry is positive with probability `density`, and positive values
    are uniform on [lo, hi).  The draw is fully determined by the seed.
    """
    lo, hi = value_range
    if not (0.0 <= density <= 1.0):
        raise MalformedInput(f"density must lie in [0, 1], got {density!r}")
    if not (0 < lo <= hi):
        raise MalformedInput(f"value range must satisfy 0 < lo <= hi, got {value_range!r}")
    if dim < 1 or size < 1:
        raise MalformedInput(f"dim and size must be positive, got {dim}, {size}")
    rng = np.random.default_rng(seed)
    mask = rng.random((size, dim, dim)) < density
    values = rng.uniform(lo, hi, (size, dim, dim))
    data = np.where(mask, values, 0.0)
    return MatrixSet(list(data))
