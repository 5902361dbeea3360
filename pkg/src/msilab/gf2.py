"""Dense GF(2) linear algebra on numpy uint8 matrices.

All matrices are 2-D ``np.uint8`` arrays with entries in {0, 1}; vectors are
1-D. Row/column conventions follow the usual parity-check layout (one check
per row, one bit per column).
"""

from __future__ import annotations

import numpy as np


def asbits(a) -> np.ndarray:
    """Coerce array-like input to a uint8 0/1 array."""
    m = np.asarray(a, dtype=np.uint8) & 1
    return m


def rref(m) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form over GF(2).

    Returns (reduced, pivot_columns, rank). Pivot columns are strictly
    increasing and the row space is preserved.
    """
    a = asbits(m).copy()
    if a.ndim != 2:
        raise ValueError("rref expects a 2-D matrix")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = hits[0] + r
        if p != r:
            a[[r, p]] = a[[p, r]]
        # eliminate above and below
        other = np.nonzero(a[:, c])[0]
        for i in other:
            if i != r:
                a[i, :] ^= a[r, :]
        pivots.append(c)
        r += 1
    return a, pivots, len(pivots)


def rank(m) -> int:
    """Rank of ``m`` over GF(2)."""
    return rref(m)[2]


def kernel(m) -> np.ndarray:
    """Basis (as rows) of the right null space {v : m @ v = 0 mod 2}.

    Returns a (cols - rank, cols) uint8 array; empty (0, cols) when the
    matrix has full column rank.
    """
    a = asbits(m)
    if a.ndim != 2:
        raise ValueError("kernel expects a 2-D matrix")
    red, pivots, rk = rref(a)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = red[row, fc]
    return basis


def solve(m, b) -> np.ndarray | None:
    """Solve m @ x = b over GF(2); None when inconsistent.

    Underdetermined systems get the particular solution with every free
    variable set to 0 (deterministic tie-break).
    """
    a = asbits(m)
    rhs = asbits(b).ravel()
    if rhs.shape[0] != a.shape[0]:
        raise ValueError("right-hand side length must equal the row count")
    aug = np.concatenate([a, rhs[:, None]], axis=1)
    red, pivots, _ = rref(aug)
    cols = a.shape[1]
    if cols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = np.zeros(cols, dtype=np.uint8)
    for row, pc in enumerate(pivots):
        x[pc] = red[row, cols]
    return x


def matmul(a, b) -> np.ndarray:
    """Matrix product over GF(2)."""
    return (asbits(a).astype(np.int64) @ asbits(b).astype(np.int64) % 2).astype(np.uint8)


class RowBasis:
    """Incremental row-space basis for fast independence tests."""

    def __init__(self, cols: int):
        self.cols = cols
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def reduce(self, v) -> np.ndarray:
        v = asbits(v).copy()
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                v ^= row
        return v

    def add(self, v) -> bool:
        """Insert v if independent of the basis; returns True when added."""
        red = self.reduce(v)
        hits = np.nonzero(red)[0]
        if hits.size == 0:
            return False
        self.rows.append(red)
        self.pivots.append(int(hits[0]))
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    @property
    def rank(self) -> int:
        return len(self.rows)


def independent_row_indices(m) -> list[int]:
    """Indices of a maximal independent subset of rows, scanned in order."""
    a = asbits(m)
    basis = RowBasis(a.shape[1])
    return [i for i, row in enumerate(a) if basis.add(row)]


def row_space_contains(m, v) -> bool:
    """True when ``v`` lies in the row space of ``m``."""
    return solve(asbits(m).T, v) is not None


def matrix_to_text(m) -> str:
    """Serialize to the dense text format: "rows cols" then one 0/1 row per line."""
    a = asbits(m)
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    for row in a:
        lines.append("".join("1" if x else "0" for x in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    """Parse the dense text format emitted by :func:`matrix_to_text`."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    rows, cols = (int(t) for t in lines[0].split())
    if len(lines) - 1 != rows:
        raise ValueError(f"expected {rows} rows, found {len(lines) - 1}")
    out = np.zeros((rows, cols), dtype=np.uint8)
    for i, ln in enumerate(lines[1:]):
        ln = ln.strip()
        if len(ln) != cols:
            raise ValueError(f"row {i} has {len(ln)} entries, expected {cols}")
        out[i] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
    if not np.isin(out, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    return out
