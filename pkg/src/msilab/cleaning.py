"""Recursive stabilizer cleaning and encoding-Clifford synthesis.

Reduces every stabilizer generator to weight 1 by repeatedly trading a
weight->1 generator for an anticommuting single-qubit Pauli on one of its
support qubits, multiplying every anticommuting generator/logical by the
consumed generator. The logical representatives end up supported on k
carrier qubits, from which a Clifford encoder is synthesized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .codes import CssCode
from .pauli import PauliTerm, conjugate, pauli_mul, single, symplectic_product
from .tableau import Tableau

_ANTI_CHOICE = {"X": "Y", "Y": "X", "Z": "X"}  # lowest label anticommuting with key


@dataclass
class CleaningStep:
    """One peel: consumed generator, chosen qubit/Pauli, recorded outcome sign."""

    consumed_stabilizer: PauliTerm
    peeled_qubit: int
    peeled_pauli: str
    outcome_sign: int = 1


@dataclass
class CleaningResult:
    """Outcome of a full clean: peel steps, carriers, and updated logicals.

    ``reduced_logicals`` are supported on the carrier qubits only;
    ``raw_logicals`` are the same classes before stripping leftover
    peeled-qubit components, so they still commute with the original checks.
    """

    steps: list[CleaningStep]
    carrier_qubits: list[int]
    peeled_stabilizers: list[PauliTerm]
    reduced_logicals: list[tuple[PauliTerm, PauliTerm]]
    raw_logicals: list[tuple[PauliTerm, PauliTerm]]


@dataclass
class EncodingClifford:
    """H/S/CX gate list whose conjugation maps carrier X/Z to the reduced logicals."""

    n: int
    carrier_qubits: list[int]
    gates: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    def conjugate_term(self, p: PauliTerm) -> PauliTerm:
        for gate, targets in self.gates:
            p = conjugate(p, gate, targets)
        return p

    def apply_to_tableau(self, tab: Tableau) -> None:
        for gate, targets in self.gates:
            if gate == "H":
                tab.h(targets[0])
            elif gate == "S":
                tab.s(targets[0])
            elif gate == "CX":
                tab.cx(*targets)
            else:
                raise ValueError(f"unexpected gate {gate!r}")


def independent_generators(code: CssCode) -> list[PauliTerm]:
    """An independent generating subset of the check rows (X rows first)."""
    terms = code.stabilizer_terms()
    stacked = np.array([np.concatenate([t.x, t.z]) for t in terms], dtype=np.uint8)
    return [terms[i] for i in gf2.independent_row_indices(stacked)]


def clean(code: CssCode, strategy: str = "max_weight") -> CleaningResult:
    """Peel all generators down to weight 1, tracking updated logicals.

    ``strategy`` picks which weight->1 generator to consume next: ``first``
    (lowest index), ``min_weight`` or ``max_weight`` (ties by index). Every
    peeled sign is fixed to +1: the prepared state uses +1 eigenstates
    directly, so no outcome frame is needed.
    """
    if strategy not in ("first", "min_weight", "max_weight"):
        raise ValueError(f"unknown strategy {strategy!r}")
    gens = independent_generators(code)
    n = code.n
    k = code.k
    if len(gens) != n - k:
        raise AssertionError("generator count does not match n - k")
    logs = [p for pair in zip(code.logical_x, code.logical_z) for p in pair]
    peeled_on = {}  # qubit -> index into gens
    for idx, g in enumerate(gens):
        if g.weight == 1:
            peeled_on[int(g.support()[0])] = idx

    steps: list[CleaningStep] = []
    while True:
        heavy = [(i, g) for i, g in enumerate(gens) if g.weight > 1]
        if not heavy:
            break
        if strategy == "first":
            gi, s = heavy[0]
        elif strategy == "min_weight":
            gi, s = min(heavy, key=lambda t: (t[1].weight, t[0]))
        else:
            gi, s = min(heavy, key=lambda t: (-t[1].weight, t[0]))
        fresh = [q for q in s.support() if int(q) not in peeled_on]
        if not fresh:
            raise AssertionError("no fresh qubit in support; generators dependent?")
        j = int(fresh[0])
        pj = single(n, j, _ANTI_CHOICE[s.label(j)])
        assert symplectic_product(pj, s) == 1
        for i, g in enumerate(gens):
            if i != gi and symplectic_product(g, pj) == 1:
                gens[i] = pauli_mul(g, s)
        for i, l in enumerate(logs):
            if symplectic_product(l, pj) == 1:
                logs[i] = pauli_mul(l, s)
        gens[gi] = pj
        peeled_on[j] = gi
        steps.append(CleaningStep(s, j, pj.label(j)))

    carriers = sorted(set(range(n)) - set(peeled_on))
    if len(carriers) != k:
        raise AssertionError("carrier count does not equal k")

    raw = list(logs)
    # strip leftover peeled-Pauli components so logicals live on carriers only;
    # each strip multiplies by a current weight-1 generator (prepared at +1)
    carrier_set = set(carriers)
    for i, l in enumerate(logs):
        for q in l.support():
            q = int(q)
            if q in peeled_on:
                logs[i] = pauli_mul(logs[i], gens[peeled_on[q]])
        assert all(int(q) in carrier_set for q in logs[i].support())

    pairs = [(logs[2 * i], logs[2 * i + 1]) for i in range(k)]
    raw_pairs = [(raw[2 * i], raw[2 * i + 1]) for i in range(k)]
    return CleaningResult(steps, carriers, list(gens), pairs, raw_pairs)


def verify_preservation(code: CssCode, result: CleaningResult) -> list[str]:
    """Diagnostics for a cleaning result; empty list means all checks pass.

    Checks (a) each reduced logical is the original times a product of
    consumed/peeled stabilizers, (b) the peeled set is n-k independent
    weight-1 generators, (c) each peel measurement is 50/50 on a codestate
    at the time it happens.
    """
    bad = []
    n = code.n
    consumed = [np.concatenate([st.consumed_stabilizer.x, st.consumed_stabilizer.z])
                for st in result.steps]
    consumed = np.array(consumed, np.uint8) if consumed else np.zeros((0, 2 * n), np.uint8)
    peeled = np.array([np.concatenate([g.x, g.z]) for g in result.peeled_stabilizers],
                      np.uint8) if result.peeled_stabilizers else np.zeros((0, 2 * n), np.uint8)
    full_span = np.concatenate([consumed, peeled], axis=0)
    originals = [p for pair in zip(code.logical_x, code.logical_z) for p in pair]
    raw = [p for pair in result.raw_logicals for p in pair]
    reduced = [p for pair in result.reduced_logicals for p in pair]
    for i, (before, mid, after) in enumerate(zip(originals, raw, reduced)):
        diff_raw = np.concatenate([before.x ^ mid.x, before.z ^ mid.z])
        if gf2.solve(consumed.T, diff_raw) is None:
            bad.append(f"logical {i} is not the original times consumed stabilizers")
        diff = np.concatenate([before.x ^ after.x, before.z ^ after.z])
        if gf2.solve(full_span.T, diff) is None:
            bad.append(f"reduced logical {i} is outside the consumed+peeled span")

    if len(result.peeled_stabilizers) != n - code.k:
        bad.append("peeled generator count != n - k")
    qubits = []
    for g in result.peeled_stabilizers:
        if g.weight != 1:
            bad.append("peeled generator with weight != 1")
        else:
            qubits.append(int(g.support()[0]))
    if len(set(qubits)) != len(qubits):
        bad.append("duplicate weight-1 generator qubit")
    sym = np.array([np.concatenate([g.x, g.z]) for g in result.peeled_stabilizers])
    if sym.size and gf2.rank(sym) != len(result.peeled_stabilizers):
        bad.append("peeled generators are dependent")

    # (c) 50/50 at measurement time, replayed on a tableau codestate
    tab = Tableau(n, rng=np.random.default_rng(0))
    for g in independent_generators(code):
        tab.measure_pauli(g)
    for st in result.steps:
        pj = single(n, st.peeled_qubit, st.peeled_pauli)
        _, deterministic = tab.measure_pauli(pj)
        if deterministic:
            bad.append(f"peel of qubit {st.peeled_qubit} was deterministic")
    return bad


def synth_encoding_clifford(result: CleaningResult) -> EncodingClifford:
    """Synthesize C on the carrier qubits with C X_{Q_i} C^dag = reduced X_i.

    Gaussian sweep over the carrier-local symplectic matrix: the inverse
    circuit maps the reduced pair basis to bare X_i/Z_i, then the gate list
    is reversed and inverted (S^dag emitted as three S gates). Signs are
    fixed exactly with Pauli corrections expressed in H/S.
    """
    carriers = result.carrier_qubits
    k = len(carriers)
    local = {q: i for i, q in enumerate(carriers)}

    def to_local(p: PauliTerm) -> PauliTerm:
        x = np.zeros(k, dtype=np.uint8)
        z = np.zeros(k, dtype=np.uint8)
        for q in p.support():
            x[local[int(q)]] = p.x[q]
            z[local[int(q)]] = p.z[q]
        return PauliTerm(x, z, p.phase)

    pairs = [(to_local(px), to_local(pz)) for px, pz in result.reduced_logicals]
    inverse: list[tuple[str, tuple[int, ...]]] = []

    def emit(gate, *targets):
        inverse.append((gate, targets))
        for i in range(len(pairs)):
            pairs[i] = (conjugate(pairs[i][0], gate, targets),
                        conjugate(pairs[i][1], gate, targets))

    for i in range(k):
        # the pair commutes with every already-fixed X_s/Z_s (s < i), so it
        # is supported on columns >= i throughout this iteration
        xs = [j for j in range(i, k) if pairs[i][0].x[j]]
        if not xs:
            j = next(j for j in range(i, k) if pairs[i][0].z[j])
            emit("H", j)
            xs = [j]
        if xs[0] != i:
            j = xs[0]
            emit("CX", i, j)
            emit("CX", j, i)
            emit("CX", i, j)
        for j in range(i + 1, k):
            if pairs[i][0].x[j]:
                emit("CX", i, j)
        if pairs[i][0].z[i]:
            emit("S", i)
        for j in range(i + 1, k):
            if pairs[i][0].z[j]:
                emit("H", j)
                emit("CX", i, j)
        # the Z partner anticommutes with X_i, hence z bit at column i
        for j in range(i + 1, k):
            if pairs[i][1].x[j] and pairs[i][1].z[j]:
                emit("S", j)
            if pairs[i][1].x[j]:
                emit("H", j)
        if pairs[i][1].x[i]:
            # HSH fixes X_i and rotates the Y_i component onto the Z axis
            emit("H", i)
            emit("S", i)
            emit("H", i)
        for j in range(i + 1, k):
            if pairs[i][1].z[j]:
                emit("CX", j, i)

    # exact sign fixes with Pauli conjugations (Z = SS, X = H SS H)
    for i in range(k):
        if pairs[i][0].sign() == -1:
            emit("S", i)
            emit("S", i)
        if pairs[i][1].sign() == -1:
            emit("H", i)
            emit("S", i)
            emit("S", i)
            emit("H", i)

    for i in range(k):
        if pairs[i][0] != single(k, i, "X") or pairs[i][1] != single(k, i, "Z"):
            raise AssertionError("sweep failed to canonicalize the logical basis")

    gates: list[tuple[str, tuple[int, ...]]] = []
    for gate, targets in reversed(inverse):
        mapped = tuple(carriers[t] for t in targets)
        if gate == "S":
            gates.extend([("S", mapped)] * 3)  # S^dag = S^3
        else:
            gates.append((gate, mapped))
    n = result.reduced_logicals[0][0].n if result.reduced_logicals else 0
    return EncodingClifford(n, list(carriers), gates)


@dataclass
class GeneralInjectionPlan:
    """Product preparation + encoder + projection recipe for all-k injection."""

    carrier_qubits: list[int]
    angles: dict[int, float]
    clifford: EncodingClifford
    peeled_resets: list[tuple[int, str]]
    reduced_logicals: list[tuple[PauliTerm, PauliTerm]]
    raw_logicals: list[tuple[PauliTerm, PauliTerm]]


def general_injection_plan(code: CssCode, result: CleaningResult,
                           theta: float = np.pi / 2) -> GeneralInjectionPlan:
    """Prepare carriers in rotated-axis eigenstates, apply C, reset peeled
    qubits to their weight-1 eigenstates, then measure all original checks."""
    clifford = synth_encoding_clifford(result)
    resets = []
    for g in result.peeled_stabilizers:
        q = int(g.support()[0])
        label = g.label(q)
        if g.sign() == -1:
            raise AssertionError("peeled generators are prepared at +1 by convention")
        resets.append((q, label))
    angles = {q: theta for q in result.carrier_qubits}
    return GeneralInjectionPlan(list(result.carrier_qubits), angles, clifford,
                                sorted(resets), result.reduced_logicals,
                                result.raw_logicals)
