"""Pauli algebra and Clifford conjugation against a dense-matrix oracle."""

import itertools

import numpy as np
import pytest

from msilab import pauli
from msilab.pauli import PauliTerm, conjugate, pauli_mul, single, symplectic_product

I2 = np.eye(2, dtype=complex)
XM = np.array([[0, 1], [1, 0]], dtype=complex)
YM = np.array([[0, -1j], [1j, 0]], dtype=complex)
ZM = np.array([[1, 0], [0, -1]], dtype=complex)

H1 = (XM + ZM) / np.sqrt(2)
S1 = np.diag([1, 1j])
CX2 = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)


def dense(p: PauliTerm) -> np.ndarray:
    """Dense matrix oracle for i**phase X^x Z^z (big-endian qubit 0 first)."""
    out = np.array([[1]], dtype=complex)
    for xq, zq in zip(p.x, p.z):
        factor = np.linalg.matrix_power(XM, int(xq)) @ np.linalg.matrix_power(ZM, int(zq))
        out = np.kron(out, factor)
    return (1j ** p.phase) * out


def all_terms(n, phases=(0,)):
    for bits in itertools.product([0, 1], repeat=2 * n):
        for ph in phases:
            yield PauliTerm(np.array(bits[:n]), np.array(bits[n:]), ph)


def embed(gate: np.ndarray, n: int, targets) -> np.ndarray:
    """Expand a 1- or 2-qubit gate to n qubits (targets in ascending positions)."""
    if len(targets) == 1:
        mats = [gate if q == targets[0] else I2 for q in range(n)]
        out = np.array([[1]], dtype=complex)
        for m in mats:
            out = np.kron(out, m)
        return out
    # 2-qubit gate on arbitrary (c, t): build by permuting basis states
    c, t = targets
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for basis in range(dim):
        bits = [(basis >> (n - 1 - q)) & 1 for q in range(n)]
        local = 2 * bits[c] + bits[t]
        for local_out in range(4):
            amp = gate[local_out, local]
            if amp == 0:
                continue
            bits_out = bits.copy()
            bits_out[c] = local_out >> 1
            bits_out[t] = local_out & 1
            idx = sum(b << (n - 1 - q) for q, b in enumerate(bits_out))
            out[idx, basis] += amp
    return out


def test_mul_trivial_cases():
    p = pauli.from_support(3, xs=[0, 2], zs=[1])
    ident = PauliTerm(np.zeros(3), np.zeros(3))
    assert pauli_mul(p, ident) == p

    x0 = single(1, 0, "X")
    z0 = single(1, 0, "Z")
    y0 = single(1, 0, "Y")
    xz = pauli_mul(x0, z0)
    assert xz.phase == 0  # X*Z itself
    assert pauli_mul(PauliTerm(xz.x, xz.z, xz.phase + 1), y0.inverse()).weight == 0
    # definition Y = i X Z
    assert y0 == PauliTerm(xz.x, xz.z, (xz.phase + 1) % 4)


def test_mul_involution_with_stabilizer():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = 6
        s = PauliTerm(rng.integers(0, 2, n), rng.integers(0, 2, n))
        l = PauliTerm(rng.integers(0, 2, n), rng.integers(0, 2, n))
        twice = pauli_mul(pauli_mul(l, s), s)
        # (L*s)*s = L up to the sign of s^2
        assert np.array_equal(twice.x, l.x) and np.array_equal(twice.z, l.z)
        ssq = pauli_mul(s, s)
        assert twice.phase == (l.phase + ssq.phase) % 4


def test_mul_matches_dense_oracle():
    for p in all_terms(2, phases=(0, 1)):
        for q in all_terms(2, phases=(0, 3)):
            got = pauli_mul(p, q)
            assert np.allclose(dense(got), dense(p) @ dense(q))


def test_symplectic_product_basics():
    assert symplectic_product(single(1, 0, "X"), single(1, 0, "Z")) == 1
    assert symplectic_product(single(1, 0, "X"), single(1, 0, "X")) == 0
    with pytest.raises(ValueError):
        symplectic_product(single(1, 0, "X"), single(2, 0, "X"))


def test_symplectic_bilinear_over_mul():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = 5
        p, q, r = (PauliTerm(rng.integers(0, 2, n), rng.integers(0, 2, n)) for _ in range(3))
        lhs = symplectic_product(pauli_mul(p, q), r)
        rhs = symplectic_product(p, r) ^ symplectic_product(q, r)
        assert lhs == rhs


def test_conjugation_rules_match_dense_oracle():
    cases = [("H", H1, (0,)), ("S", S1, (0,)), ("H", H1, (1,)), ("S", S1, (1,)),
             ("CX", CX2, (0, 1)), ("CX", CX2, (1, 0))]
    for name, mat, targets in cases:
        u = embed(mat, 2, targets)
        for p in all_terms(2, phases=(0, 1)):
            got = conjugate(p, name, targets)
            assert np.allclose(dense(got), u @ dense(p) @ u.conj().T), (name, targets, str(p))


def test_hermitian_sign():
    y = single(3, 1, "Y")
    assert y.sign() == 1
    assert PauliTerm(y.x, y.z, (y.phase + 2) % 4).sign() == -1
    with pytest.raises(ValueError):
        PauliTerm(y.x, y.z, 0).sign()


def test_inverse_phase_zero():
    rng = np.random.default_rng(9)
    for _ in range(50):
        p = PauliTerm(rng.integers(0, 2, 4), rng.integers(0, 2, 4), rng.integers(0, 4))
        prod = pauli_mul(p, p.inverse())
        assert prod.weight == 0 and prod.phase == 0
