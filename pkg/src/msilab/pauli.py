"""Symplectic Pauli algebra with phase tracking.

A Pauli on n qubits is stored as ``i**phase * X^x * Z^z`` where ``x`` and
``z`` are length-n bit vectors and the phase is an integer mod 4 (powers of
i). All X factors are written to the left of all Z factors; a qubit with
x=z=1 therefore carries an XZ factor, so the literal Pauli Y on qubit q is
``PauliTerm`` with x=z=1 there and phase 1 (Y = iXZ).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2 import asbits


@dataclass(frozen=True, eq=False)
class PauliTerm:
    """A phase-tracked n-qubit Pauli operator."""

    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliTerm):
            return NotImplemented
        return (self.phase == other.phase
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    def __post_init__(self):
        object.__setattr__(self, "x", asbits(self.x))
        object.__setattr__(self, "z", asbits(self.z))
        object.__setattr__(self, "phase", int(self.phase) % 4)
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise ValueError("x and z must be equal-length 1-D bit vectors")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> np.ndarray:
        return np.nonzero(self.x | self.z)[0]

    def is_hermitian(self) -> bool:
        return (self.phase - int(np.count_nonzero(self.x & self.z))) % 2 == 0

    def sign(self) -> int:
        """±1 for a Hermitian Pauli: P = sign * (product of literal X/Y/Z)."""
        k = (self.phase - int(np.count_nonzero(self.x & self.z))) % 4
        if k % 2:
            raise ValueError("sign undefined for a non-Hermitian Pauli")
        return 1 if k == 0 else -1

    def inverse(self) -> "PauliTerm":
        ph = (-self.phase - 2 * int(np.count_nonzero(self.x & self.z))) % 4
        return PauliTerm(self.x, self.z, ph)

    def label(self, q: int) -> str:
        """Single-qubit label at q: one of I, X, Y, Z."""
        return ("I", "X", "Z", "Y")[int(self.x[q]) + 2 * int(self.z[q])]

    def __str__(self) -> str:
        pre = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase % 4]
        body = "*".join(f"{self.label(q)}{q}" for q in self.support()) or "I"
        return pre + body


def single(n: int, q: int, kind: str) -> PauliTerm:
    """The literal single-qubit Pauli ``kind`` in {X, Y, Z} on qubit q of n."""
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    ph = 0
    if kind == "X":
        x[q] = 1
    elif kind == "Z":
        z[q] = 1
    elif kind == "Y":
        x[q] = 1
        z[q] = 1
        ph = 1
    else:
        raise ValueError(f"unknown Pauli kind {kind!r}")
    return PauliTerm(x, z, ph)


def from_support(n: int, xs=(), zs=(), phase: int = 0) -> PauliTerm:
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    x[list(xs)] = 1
    z[list(zs)] = 1
    return PauliTerm(x, z, phase)


def symplectic_product(p: PauliTerm, q: PauliTerm) -> int:
    """0 when p and q commute, 1 when they anticommute."""
    if p.n != q.n:
        raise ValueError("Pauli length mismatch")
    return int((np.count_nonzero(p.x & q.z) + np.count_nonzero(p.z & q.x)) % 2)


def pauli_mul(p: PauliTerm, q: PauliTerm) -> PauliTerm:
    """Product p*q with exact mod-4 phase."""
    if p.n != q.n:
        raise ValueError("Pauli length mismatch")
    # moving Z^{z_p} across X^{x_q} contributes (-1)^{|z_p & x_q|}
    ph = p.phase + q.phase + 2 * int(np.count_nonzero(p.z & q.x))
    return PauliTerm(p.x ^ q.x, p.z ^ q.z, ph)


def pauli_y(x_rep: PauliTerm, z_rep: PauliTerm) -> PauliTerm:
    """i * X-representative * Z-representative (the rotated-axis partner)."""
    prod = pauli_mul(x_rep, z_rep)
    return PauliTerm(prod.x, prod.z, prod.phase + 1)


# --- Clifford conjugation -------------------------------------------------
#
# With the X-then-Z storage convention the conjugation rules are:
#   H(q):     swap x_q <-> z_q,        phase += 2*x_q*z_q
#   S(q):     z_q ^= x_q,              phase += x_q
#   CX(c,t):  x_t ^= x_c, z_c ^= z_t,  phase unchanged
# (verified against a dense-matrix oracle in the test suite)


def conj_h(p: PauliTerm, q: int) -> PauliTerm:
    x = p.x.copy()
    z = p.z.copy()
    ph = p.phase + 2 * int(x[q] & z[q])
    x[q], z[q] = z[q], x[q]
    return PauliTerm(x, z, ph)


def conj_s(p: PauliTerm, q: int) -> PauliTerm:
    z = p.z.copy()
    ph = p.phase + int(p.x[q])
    z[q] ^= p.x[q]
    return PauliTerm(p.x, z, ph)


def conj_cx(p: PauliTerm, c: int, t: int) -> PauliTerm:
    x = p.x.copy()
    z = p.z.copy()
    x[t] ^= x[c]
    z[c] ^= z[t]
    return PauliTerm(x, z, p.phase)


def conjugate(p: PauliTerm, gate: str, targets: tuple[int, ...]) -> PauliTerm:
    """Conjugate p by a named Clifford gate: g p g^dagger."""
    if gate == "H":
        return conj_h(p, targets[0])
    if gate == "S":
        return conj_s(p, targets[0])
    if gate == "CX":
        return conj_cx(p, targets[0], targets[1])
    raise ValueError(f"unknown Clifford gate {gate!r}")
