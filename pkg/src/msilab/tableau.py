"""Stabilizer tableau simulation (destabilizer/stabilizer form).

Rows 0..n-1 hold destabilizers, rows n..2n-1 stabilizers. Each row is a
Pauli in the same X-then-Z phase-mod-4 convention as :mod:`msilab.pauli`,
so row products reuse the same phase rules. Measurements of arbitrary
Hermitian Pauli products are supported directly.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliTerm


class Tableau:
    """Mutable stabilizer state on n qubits, initialized to |0...0>."""

    def __init__(self, n: int, rng: np.random.Generator | None = None):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.phase = np.zeros(2 * n, dtype=np.uint8)  # mod 4
        for i in range(n):
            self.x[i, i] = 1          # destabilizer X_i
            self.z[n + i, i] = 1      # stabilizer Z_i
        self.rng = rng if rng is not None else np.random.default_rng(0)

    # -- gates ------------------------------------------------------------

    def h(self, q: int) -> None:
        self.phase += 2 * (self.x[:, q] & self.z[:, q])
        self.phase %= 4
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int) -> None:
        self.phase = (self.phase + self.x[:, q]) % 4
        self.z[:, q] ^= self.x[:, q]

    def cx(self, c: int, t: int) -> None:
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def apply_pauli(self, p: PauliTerm) -> None:
        """Multiply the state by a (Hermitian) Pauli: flips anticommuting rows."""
        anti = self._anticommutes(p)
        self.phase = (self.phase + 2 * anti) % 4

    # -- internals ----------------------------------------------------------

    def _anticommutes(self, p: PauliTerm) -> np.ndarray:
        """Per-row anticommutation bits with p."""
        acc = (self.x @ p.z.astype(np.int64) + self.z @ p.x.astype(np.int64)) % 2
        return acc.astype(np.uint8)

    def _rowmul(self, i: int, j: int) -> None:
        """row_i <- row_i * row_j with exact phase."""
        cross = int(np.count_nonzero(self.z[i] & self.x[j]))
        self.phase[i] = (self.phase[i] + self.phase[j] + 2 * cross) % 4
        self.x[i] ^= self.x[j]
        self.z[i] ^= self.z[j]

    def _row_term(self, i: int) -> PauliTerm:
        return PauliTerm(self.x[i].copy(), self.z[i].copy(), int(self.phase[i]))

    # -- measurement --------------------------------------------------------

    def measure_pauli(self, p: PauliTerm, forced: int | None = None) -> tuple[int, bool]:
        """Projectively measure a Hermitian Pauli product.

        Returns (outcome_bit, deterministic): bit 0 means eigenvalue +1 of p
        (sign included), 1 means -1. Nondeterministic outcomes are drawn from
        the tableau's RNG unless ``forced`` (0/1) is given.
        """
        if not p.is_hermitian():
            raise ValueError("cannot measure a non-Hermitian Pauli")
        n = self.n
        anti = self._anticommutes(p)
        stab_hits = np.nonzero(anti[n:])[0]
        if stab_hits.size:
            pivot = int(stab_hits[0]) + n
            rows = [i for i in np.nonzero(anti)[0] if i != pivot]
            for i in rows:
                self._rowmul(int(i), pivot)
            # old stabilizer row becomes the destabilizer of p
            self.x[pivot - n] = self.x[pivot]
            self.z[pivot - n] = self.z[pivot]
            self.phase[pivot - n] = self.phase[pivot]
            bit = int(self.rng.integers(0, 2)) if forced is None else int(forced)
            self.x[pivot] = p.x
            self.z[pivot] = p.z
            self.phase[pivot] = (p.phase + 2 * bit) % 4
            return bit, False
        return self._deterministic_outcome(p, anti), True

    def peek_pauli(self, p: PauliTerm) -> int | None:
        """Expectation of a Hermitian Pauli: +1/-1 when deterministic, else None."""
        if not p.is_hermitian():
            raise ValueError("cannot evaluate a non-Hermitian Pauli")
        anti = self._anticommutes(p)
        if anti[self.n:].any():
            return None
        return 1 if self._deterministic_outcome(p, anti) == 0 else -1

    def _deterministic_outcome(self, p: PauliTerm, anti: np.ndarray) -> int:
        # p commutes with every stabilizer, so +-p is a product of the
        # stabilizer rows flagged by anticommuting destabilizers.
        acc_x = np.zeros(self.n, dtype=np.uint8)
        acc_z = np.zeros(self.n, dtype=np.uint8)
        acc_ph = 0
        for i in np.nonzero(anti[: self.n])[0]:
            j = self.n + int(i)
            acc_ph += int(self.phase[j]) + 2 * int(np.count_nonzero(acc_z & self.x[j]))
            acc_x ^= self.x[j]
            acc_z ^= self.z[j]
        if not (np.array_equal(acc_x, p.x) and np.array_equal(acc_z, p.z)):
            raise AssertionError("tableau accumulation mismatch")
        delta = (acc_ph - p.phase) % 4
        if delta % 2:
            raise AssertionError("non-real relative phase in measurement")
        return 0 if delta == 0 else 1

    # -- resets ---------------------------------------------------------------

    def reset(self, q: int, basis: str) -> None:
        """Reset qubit q to the +1 eigenstate of X, Y or Z."""
        from .pauli import single

        p = single(self.n, q, basis)
        bit, _ = self.measure_pauli(p)
        if bit:
            flip = {"X": "Z", "Y": "X", "Z": "X"}[basis]
            self.apply_pauli(single(self.n, q, flip))

    def stabilizer_terms(self) -> list[PauliTerm]:
        return [self._row_term(self.n + i) for i in range(self.n)]
