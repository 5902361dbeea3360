"""CSS code construction and logical-representative computation.

Covers generic CSS codes from parity-check pairs, bivariate bicycle codes
(two-block cyclic construction) and hypergraph product codes, plus helpers
to compute, weight-reduce and validate paired logical representatives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import gf2
from .pauli import PauliTerm, pauli_mul, symplectic_product


@dataclass
class CssCode:
    """A CSS code with paired logical representatives.

    ``logical_x[i]`` and ``logical_z[i]`` form a conjugate pair: they
    anticommute with each other and commute with everything else.
    """

    n: int
    hx: np.ndarray
    hz: np.ndarray
    logical_x: list[PauliTerm] = field(default_factory=list)
    logical_z: list[PauliTerm] = field(default_factory=list)

    def __post_init__(self):
        self.hx = gf2.asbits(self.hx)
        self.hz = gf2.asbits(self.hz)

    @property
    def k(self) -> int:
        return len(self.logical_x)

    def stabilizer_terms(self) -> list[PauliTerm]:
        """All stabilizer generators as PauliTerms (X rows first)."""
        zeros = np.zeros(self.n, dtype=np.uint8)
        out = [PauliTerm(row, zeros) for row in self.hx]
        out += [PauliTerm(zeros, row) for row in self.hz]
        return out

    def stabilizer_symplectic(self) -> np.ndarray:
        """Stacked (x|z) bit rows for all generators, X rows first."""
        mx = np.concatenate([self.hx, np.zeros_like(self.hx)], axis=1)
        mz = np.concatenate([np.zeros_like(self.hz), self.hz], axis=1)
        return np.concatenate([mx, mz], axis=0)

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "hx": self.hx.tolist(),
            "hz": self.hz.tolist(),
            "logical_x": [{"x_bits": p.x.tolist(), "z_bits": p.z.tolist()} for p in self.logical_x],
            "logical_z": [{"x_bits": p.x.tolist(), "z_bits": p.z.tolist()} for p in self.logical_z],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CssCode":
        doc = json.loads(text)
        lx = [PauliTerm(np.array(p["x_bits"]), np.array(p["z_bits"])) for p in doc["logical_x"]]
        lz = [PauliTerm(np.array(p["x_bits"]), np.array(p["z_bits"])) for p in doc["logical_z"]]
        return cls(doc["n"], np.array(doc["hx"]), np.array(doc["hz"]), lx, lz)


@dataclass
class BbSpec:
    """Two-block cyclic code parameters.

    ``a_monomials``/``b_monomials`` are (p, q) exponent pairs of the two
    commuting cyclic generators (sizes ``ell`` and ``m``); exponents are
    reduced modulo the block sizes.
    """

    ell: int
    m: int
    a_monomials: list[tuple[int, int]]
    b_monomials: list[tuple[int, int]]

    def __post_init__(self):
        self.a_monomials = [(p % self.ell, q % self.m) for p, q in self.a_monomials]
        self.b_monomials = [(p % self.ell, q % self.m) for p, q in self.b_monomials]
        for name, mono in (("a", self.a_monomials), ("b", self.b_monomials)):
            if len(set(mono)) != len(mono):
                raise ValueError(f"duplicate monomials in polynomial {name}")


@dataclass
class HgpSpec:
    """Hypergraph product of two classical parity-check matrices."""

    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        self.h1 = gf2.asbits(self.h1)
        self.h2 = gf2.asbits(self.h2)
        if not self.h1.any() or not self.h2.any():
            raise ValueError("factor matrices must be nonzero")


def _cyclic_block(ell: int, m: int, monomials) -> np.ndarray:
    """Sum of shift-matrix Kronecker products for the given exponent pairs."""
    size = ell * m
    out = np.zeros((size, size), dtype=np.uint8)
    rows = np.arange(size)
    a, b = rows // m, rows % m
    for p, q in monomials:
        cols = ((a + p) % ell) * m + (b + q) % m
        out[rows, cols] ^= 1
    return out


def build_bb(spec: BbSpec) -> CssCode:
    """Build a two-block cyclic (bivariate bicycle) CSS code.

    Left data block holds indices [0, ell*m), right block [ell*m, 2*ell*m).
    The Z checks use the transposed blocks, which realizes the inverse
    monomials of the defining polynomials.
    """
    a = _cyclic_block(spec.ell, spec.m, spec.a_monomials)
    b = _cyclic_block(spec.ell, spec.m, spec.b_monomials)
    hx = np.concatenate([a, b], axis=1)
    hz = np.concatenate([b.T, a.T], axis=1)
    lx, lz = compute_logicals(hx, hz)
    code = CssCode(2 * spec.ell * spec.m, hx, hz, lx, lz)
    return reduce_weight(code)


def build_hgp(spec: HgpSpec) -> CssCode:
    """Build the hypergraph product of two classical codes.

    Vertical block (n1*n2 qubits) first, then the check-by-check block
    (r1*r2 qubits); n = n1*n2 + r1*r2.
    """
    h1, h2 = spec.h1, spec.h2
    r1, n1 = h1.shape
    r2, n2 = h2.shape
    hx = np.concatenate([np.kron(h1, np.eye(n2, dtype=np.uint8)),
                         np.kron(np.eye(r1, dtype=np.uint8), h2.T)], axis=1)
    hz = np.concatenate([np.kron(np.eye(n1, dtype=np.uint8), h2),
                         np.kron(h1.T, np.eye(r2, dtype=np.uint8))], axis=1)
    lx, lz = compute_logicals(hx, hz)
    code = CssCode(n1 * n2 + r1 * r2, hx, hz, lx, lz)
    return reduce_weight(code)


def _independent_mod(rows: np.ndarray, base: np.ndarray, count: int) -> np.ndarray:
    """First ``count`` rows of ``rows`` independent modulo rowspace(base)."""
    picked = []
    stack = base.copy()
    r = gf2.rank(stack)
    for v in rows:
        cand = np.concatenate([stack, v[None, :]], axis=0)
        rc = gf2.rank(cand)
        if rc > r:
            picked.append(v)
            stack, r = cand, rc
            if len(picked) == count:
                break
    if len(picked) != count:
        raise ValueError("could not find enough independent logical representatives")
    return np.array(picked, dtype=np.uint8)


def _coset_reducer(stab_rows):
    """Reduction against the rref of the check rows; zero result = stabilizer."""
    red, pivots, _ = gf2.rref(stab_rows)
    red = red[: len(pivots)]

    def reduce_mod(v):
        v = v.copy()
        for row, pc in zip(red, pivots):
            if v[pc]:
                v ^= row
        return v

    return reduce_mod


def _low_weight_pool(stab_rows, kern, trials, rng) -> np.ndarray:
    """Distinct low-weight nontrivial logical vectors found by guarded descent."""
    reduce_mod = _coset_reducer(stab_rows)
    moves = np.concatenate([kern, stab_rows], axis=0) if stab_rows.size else kern
    found = {}

    def descend(v):
        while True:
            cand = v[None, :] ^ moves
            weights = cand.sum(axis=1)
            order = np.argsort(weights, kind="stable")
            moved = False
            for idx in order:
                if weights[idx] >= v.sum():
                    break
                if reduce_mod(cand[idx]).any():
                    v = cand[idx]
                    moved = True
                    break
            if not moved:
                return v

    starts = list(kern)
    for _ in range(trials):
        coeff = rng.integers(0, 2, size=kern.shape[0], dtype=np.uint8)
        starts.append((coeff @ kern % 2).astype(np.uint8))
    for v in starts:
        if not v.any() or not reduce_mod(v).any():
            continue
        end = descend(v.copy())
        found[end.tobytes()] = end
    pool = sorted(found.values(), key=lambda u: (int(u.sum()), u.tobytes()))
    return np.array(pool, dtype=np.uint8)


def compute_logicals(hx, hz, pool_trials: int = 120, seed: int = 0
                     ) -> tuple[list[PauliTerm], list[PauliTerm]]:
    """Paired logical representatives of the CSS code (hx, hz).

    X representatives live in ker(hz) modulo rowspace(hx), Z representatives
    in ker(hx) modulo rowspace(hz). Low-weight candidates are collected by
    randomized (seeded, deterministic) descent and paired greedily via
    symplectic Gram-Schmidt, so the k x k anticommutation matrix is the
    identity and both sides stay short.
    """
    hx = gf2.asbits(hx)
    hz = gf2.asbits(hz)
    if gf2.matmul(hx, hz.T).any():
        raise ValueError("check matrices are not orthogonal")
    n = hx.shape[1]
    k = n - gf2.rank(hx) - gf2.rank(hz)
    if k == 0:
        return [], []
    base_x = _independent_mod(gf2.kernel(hz), hx, k)
    base_z = _independent_mod(gf2.kernel(hx), hz, k)
    rng = np.random.default_rng(seed)
    pool_x = _low_weight_pool(hx, gf2.kernel(hz), pool_trials, rng)
    pool_z = _low_weight_pool(hz, gf2.kernel(hx), pool_trials, rng)
    # the spanning bases guarantee Gram-Schmidt always finds k pairs
    pool_x = np.concatenate([pool_x, base_x], axis=0) if pool_x.size else base_x
    pool_z = np.concatenate([pool_z, base_z], axis=0) if pool_z.size else base_z
    lx, lz = _symplectic_pairing(pool_x, pool_z, k, hx, hz)
    zeros = np.zeros(n, dtype=np.uint8)
    xs = [PauliTerm(row, zeros) for row in lx]
    zs = [PauliTerm(zeros, row) for row in lz]
    return xs, zs


def _symplectic_pairing(pool_x, pool_z, k, hx, hz):
    """Greedy symplectic Gram-Schmidt: k anticommuting pairs, light first."""
    reduce_x = _coset_reducer(hx)
    reduce_z = _coset_reducer(hz)
    px = [v.copy() for v in pool_x]
    pz = [v.copy() for v in pool_z]
    out_x, out_z = [], []
    for _ in range(k):
        px = _dedupe_nontrivial(px, reduce_x)
        pz = _dedupe_nontrivial(pz, reduce_z)
        ax = np.array(px)
        az = np.array(pz)
        anti = ax.astype(np.int64) @ az.T.astype(np.int64) % 2
        pairs = np.argwhere(anti == 1)
        if pairs.size == 0:
            raise ValueError("candidate pools do not span the logical space")
        costs = ax[pairs[:, 0]].sum(axis=1) + az[pairs[:, 1]].sum(axis=1)
        best = pairs[np.lexsort((pairs[:, 1], pairs[:, 0], costs))[0]]
        u, v = ax[best[0]].copy(), az[best[1]].copy()
        out_x.append(u)
        out_z.append(v)
        # make every remaining candidate commute with the chosen pair
        px = [w ^ u if int(w @ v) % 2 else w for i, w in enumerate(px) if i != best[0]]
        pz = [w ^ v if int(w @ u) % 2 else w for i, w in enumerate(pz) if i != best[1]]
    return np.array(out_x, dtype=np.uint8), np.array(out_z, dtype=np.uint8)


def _dedupe_nontrivial(vectors, reduce_mod):
    seen = {}
    for v in vectors:
        if v.any() and reduce_mod(v).any():
            seen.setdefault(v.tobytes(), v)
    return sorted(seen.values(), key=lambda u: (int(u.sum()), u.tobytes()))


def _gf2_inverse(m: np.ndarray) -> np.ndarray:
    k = m.shape[0]
    aug = np.concatenate([m, np.eye(k, dtype=np.uint8)], axis=1)
    red, pivots, rk = gf2.rref(aug)
    if pivots[:k] != list(range(k)) or rk < k:
        raise ValueError("pairing matrix is singular")
    return red[:, k:]


def _greedy_reduce_vector(v: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Best-improvement descent: XOR rows while the weight strictly drops."""
    v = v.copy()
    if rows.shape[0] == 0:
        return v
    w = int(v.sum())
    while True:
        cand = v[None, :] ^ rows
        weights = cand.sum(axis=1)
        best = int(weights.argmin())
        if weights[best] < w:
            v = cand[best]
            w = int(weights[best])
        else:
            return v


def reduce_weight(code: CssCode, use_other_logicals: bool = False) -> CssCode:
    """Shorten logical representatives by stabilizer multiplication.

    Each representative is greedily multiplied by same-type check rows while
    its weight strictly decreases (deterministic: best gain first, lowest
    row index on ties). Multiplying by same-type representatives of other
    logicals is possible but changes the logical basis, so it is off by
    default.
    """
    def reduce_side(reps: list[PauliTerm], rows: np.ndarray, take) -> list[PauliTerm]:
        vecs = [take(p) for p in reps]
        out = []
        for i, v in enumerate(vecs):
            pool = rows
            if use_other_logicals:
                others = [u for j, u in enumerate(vecs) if j != i]
                if others:
                    pool = np.concatenate([rows, np.array(others)], axis=0)
            out.append(_greedy_reduce_vector(v, pool))
        return out

    zeros = np.zeros(code.n, dtype=np.uint8)
    lx = [PauliTerm(v, zeros) for v in reduce_side(code.logical_x, code.hx, lambda p: p.x)]
    lz = [PauliTerm(zeros, v) for v in reduce_side(code.logical_z, code.hz, lambda p: p.z)]
    return CssCode(code.n, code.hx, code.hz, lx, lz)


def validate(code: CssCode) -> list[str]:
    """Check every CssCode invariant; returns the list of violations (empty = valid)."""
    bad = []
    if gf2.matmul(code.hx, code.hz.T).any():
        bad.append("CSS orthogonality: hx @ hz.T != 0")
    k_expected = code.n - gf2.rank(code.hx) - gf2.rank(code.hz)
    if code.k != k_expected:
        bad.append(f"logical count: have {code.k} pairs, rank counting gives {k_expected}")
    if len(code.logical_z) != len(code.logical_x):
        bad.append("logical count: X and Z lists differ in length")
        return bad
    for i, p in enumerate(code.logical_x):
        if p.z.any():
            bad.append(f"logical_x[{i}] is not X-type only")
    for i, p in enumerate(code.logical_z):
        if p.x.any():
            bad.append(f"logical_z[{i}] is not Z-type only")
    stab = code.stabilizer_terms()
    for i, p in enumerate(code.logical_x + code.logical_z):
        if any(symplectic_product(p, s) for s in stab):
            bad.append(f"logical {i} does not commute with all stabilizer rows")
    for i, px in enumerate(code.logical_x):
        for j, pz in enumerate(code.logical_z):
            want = 1 if i == j else 0
            if symplectic_product(px, pz) != want:
                bad.append(f"conjugacy: <X[{i}], Z[{j}]> = {1 - want}, expected {want}")
    return bad


def _min_coset_weight(kernel_rows: np.ndarray, stab_rows: np.ndarray) -> int | None:
    """Minimum weight over span(kernel_rows) \\ rowspace(stab_rows), by enumeration."""
    red, pivots, _ = gf2.rref(stab_rows)
    red = red[: len(pivots)]

    def reduce_vec(v):
        v = v.copy()
        for row, pc in zip(red, pivots):
            if v[pc]:
                v ^= row
        return v

    dim = kernel_rows.shape[0]
    best = None
    for mask in range(1, 2 ** dim):
        v = np.zeros(kernel_rows.shape[1], dtype=np.uint8)
        for i in range(dim):
            if (mask >> i) & 1:
                v ^= kernel_rows[i]
        if not reduce_vec(v).any():
            continue  # a stabilizer product, not a logical
        w = int(v.sum())
        if best is None or w < best:
            best = w
    return best


def estimate_distance_bruteforce(code: CssCode, max_n: int = 20) -> int | None:
    """Exact distance by exhaustive coset enumeration (small codes only).

    Returns None for k = 0 codes (distance undefined); refuses n > max_n.
    """
    if code.n > max_n:
        raise ValueError(f"n = {code.n} exceeds the brute-force cap {max_n}")
    if code.n - gf2.rank(code.hx) - gf2.rank(code.hz) == 0:
        return None
    dx = _min_coset_weight(gf2.kernel(code.hz), code.hx)
    dz = _min_coset_weight(gf2.kernel(code.hx), code.hz)
    return min(w for w in (dx, dz) if w is not None)


def estimate_distance_sampling(code: CssCode, trials: int = 200, seed: int = 0) -> int:
    """Upper bound on the distance by randomized low-weight logical search.

    Random restarts over the commuting kernel space with greedy single-row
    descent, restricted to vectors outside the same-type check row space
    (so every visited vector stays a genuine logical operator).
    """
    rng = np.random.default_rng(seed)
    best = code.n + 1
    for stab_rows, kern in ((code.hx, gf2.kernel(code.hz)), (code.hz, gf2.kernel(code.hx))):
        if kern.shape[0] == 0:
            continue
        red, pivots, _ = gf2.rref(stab_rows)
        red = red[: len(pivots)]

        def nontrivial(v, red=red, pivots=pivots):
            v = v.copy()
            for row, pc in zip(red, pivots):
                if v[pc]:
                    v ^= row
            return bool(v.any())

        pool = np.concatenate([kern, stab_rows], axis=0)
        starts = [kern[i % kern.shape[0]].copy() if t < kern.shape[0] else None
                  for t, i in zip(range(trials), range(trials))]
        for start in starts:
            v = start
            if v is None:
                coeff = rng.integers(0, 2, size=kern.shape[0], dtype=np.uint8)
                v = (coeff @ kern % 2).astype(np.uint8)
            if not v.any() or not nontrivial(v):
                continue
            while True:
                cand = v[None, :] ^ pool
                weights = cand.sum(axis=1)
                order = np.argsort(weights, kind="stable")
                moved = False
                for idx in order:
                    if weights[idx] >= v.sum():
                        break
                    if nontrivial(cand[idx]):
                        v = cand[idx]
                        moved = True
                        break
                if not moved:
                    break
            best = min(best, int(v.sum()))
    return best


# --- stock instances --------------------------------------------------------


@lru_cache(maxsize=None)
def steane() -> CssCode:
    """The [[7,1,3]] code from the Hamming [7,4] checks."""
    h = np.array(
        [[0, 0, 0, 1, 1, 1, 1],
         [0, 1, 1, 0, 0, 1, 1],
         [1, 0, 1, 0, 1, 0, 1]], dtype=np.uint8)
    lx, lz = compute_logicals(h, h)
    return reduce_weight(CssCode(7, h, h, lx, lz))


def bb_144_spec() -> BbSpec:
    return BbSpec(ell=12, m=6,
                  a_monomials=[(0, 0), (0, 1), (3, -1)],
                  b_monomials=[(0, 0), (1, 0), (-1, -3)])


@lru_cache(maxsize=None)
def bb_144() -> CssCode:
    """The 144-qubit, 12-logical two-block cyclic instance.

    Ships with bundled injection-friendly logical representatives (produced
    deterministically by tools/regenerate_bb_logicals.py and validated on
    load); callers must not mutate the cached code. Falls back to the full
    representative search when the bundle is absent.
    """
    spec = bb_144_spec()
    base = build_bb(spec)
    try:
        text = resources.files("msilab.data").joinpath("bb_144_logicals.json").read_text()
    except FileNotFoundError:
        from .injector import optimize_for_injection

        return optimize_for_injection(base)
    doc = json.loads(text)
    zeros = np.zeros(base.n, dtype=np.uint8)
    code = CssCode(base.n, base.hx, base.hz,
                   [PauliTerm(np.array(v, dtype=np.uint8), zeros) for v in doc["x"]],
                   [PauliTerm(zeros, np.array(v, dtype=np.uint8)) for v in doc["z"]])
    bad = validate(code)
    if bad:
        raise AssertionError(f"bundled representatives failed validation: {bad}")
    return code


@lru_cache(maxsize=None)
def repetition_hgp_13() -> CssCode:
    """[[13,1,3]] hypergraph product of two 3-bit repetition codes."""
    h = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    return build_hgp(HgpSpec(h, h))


@lru_cache(maxsize=None)
def hgp_225() -> CssCode:
    """[[225,9,4]] hypergraph product of a bundled (3,4)-regular factor code."""
    text = resources.files("msilab.data").joinpath("hgp_h_9x12.txt").read_text()
    h = gf2.matrix_from_text(text)
    return build_hgp(HgpSpec(h, h))


def random_regular_check_matrix(rows: int, cols: int, row_weight: int,
                                col_weight: int, seed: int = 0) -> np.ndarray:
    """Random biregular 0/1 matrix via the configuration model (no double edges)."""
    if rows * row_weight != cols * col_weight:
        raise ValueError("degree sequences do not balance")
    rng = np.random.default_rng(seed)
    for _ in range(10_000):
        stubs_r = np.repeat(np.arange(rows), row_weight)
        stubs_c = np.repeat(np.arange(cols), col_weight)
        rng.shuffle(stubs_c)
        edges = set(zip(stubs_r.tolist(), stubs_c.tolist()))
        if len(edges) != rows * row_weight:
            continue  # double edge, resample
        m = np.zeros((rows, cols), dtype=np.uint8)
        for r, c in edges:
            m[r, c] = 1
        return m
    raise RuntimeError("configuration model failed to produce a simple graph")
