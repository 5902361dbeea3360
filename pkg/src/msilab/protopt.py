"""Exact protection optimization for the free initialization bases.

Free data qubits (outside the injected supports) get X or Z resets. A check
row whose free-support is prepared uniformly in its own basis becomes a
fixed stabilizer; a target qubit is protected when a fixed row detects its
dominant reset error. Both objectives (protected targets, fixed rows) are
solved exactly with branch and bound, with LP-format export for
cross-checking against off-the-shelf solvers.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .codes import CssCode
from .injector import PreparationPlan
from .pauli import PauliTerm, from_support, symplectic_product

RowKey = tuple[str, int]  # ("X"|"Z", row index)


@dataclass
class ProtectionInstance:
    """Self-contained optimization instance.

    ``rows`` holds the surviving candidate rows with their free-qubit
    support; rows with empty free-support are fixed by the plan alone and
    carry no decision variable. ``detect[j]`` lists the surviving rows of
    the type that detects the dominant reset error on target j.
    """

    free: tuple[int, ...]
    targets: tuple[int, ...]
    target_basis: dict[int, str]
    rows: dict[RowKey, tuple[int, ...]]
    detect: dict[int, tuple[RowKey, ...]]

    def var_rows(self) -> list[RowKey]:
        return [key for key, supp in sorted(self.rows.items()) if supp]

    def auto_fixed(self) -> list[RowKey]:
        return [key for key, supp in sorted(self.rows.items()) if not supp]


def _initial_stabilizers(code: CssCode, plan: PreparationPlan) -> list[PauliTerm]:
    """Pauli stabilizers of the prepared state on the non-free qubits."""
    n = code.n
    out = []
    for u, v in plan.bell_pairs.pairs:
        out.append(from_support(n, xs=[u, v]))
        out.append(from_support(n, zs=[u, v]))
    covered = plan.bell_pairs.covered()
    for q in sorted(plan.targets - covered):
        if plan.basis[q] == "X":
            out.append(from_support(n, xs=[q]))
        else:
            out.append(from_support(n, zs=[q]))
    for q in plan.sites.values():
        # the rotated-axis site state is stabilized by no X/Z Pauli; adding
        # both singles filters every row that touches the site
        out.append(from_support(n, xs=[q]))
        out.append(from_support(n, zs=[q]))
    return out


def build_instance(code: CssCode, plan: PreparationPlan) -> ProtectionInstance:
    """Drop never-fixable rows and assemble supports and detection sets."""
    initial = _initial_stabilizers(code, plan)
    free = tuple(sorted(plan.free))
    free_set = set(free)
    rows: dict[RowKey, tuple[int, ...]] = {}
    n = code.n
    for kind, h in (("X", code.hx), ("Z", code.hz)):
        for r, bits in enumerate(h):
            term = PauliTerm(bits, np.zeros(n, np.uint8)) if kind == "X" \
                else PauliTerm(np.zeros(n, np.uint8), bits)
            if any(symplectic_product(term, s) for s in initial):
                continue
            supp = np.nonzero(bits)[0]
            rows[(kind, r)] = tuple(int(q) for q in supp if int(q) in free_set)
    targets = tuple(sorted(plan.targets))
    basis = {}
    for u, v in plan.bell_pairs.pairs:
        basis[u] = "X"
        basis[v] = "Z"
    for q in targets:
        if q not in basis:
            basis[q] = plan.basis[q]
    detect: dict[int, tuple[RowKey, ...]] = {}
    for j in targets:
        kind = "X" if basis[j] == "X" else "Z"
        h = code.hx if kind == "X" else code.hz
        detect[j] = tuple((kind, int(r)) for r in np.nonzero(h[:, j])[0]
                          if (kind, int(r)) in rows)
    return ProtectionInstance(free, targets, basis, rows, detect)


@dataclass
class IlpModel:
    """Binary program over x (basis), f (row fixed), p (target protected)."""

    objective: str                 # "protection" | "fixed"
    variables: list[str]
    objective_terms: dict[str, int]
    constraints: list[tuple[str, dict[str, int], int]]  # name, coeffs, rhs for <=
    instance: ProtectionInstance


def _xvar(q: int) -> str:
    return f"x_{q}"


def _fvar(key: RowKey) -> str:
    return f"f_{key[0].lower()}_{key[1]}"


def _pvar(j: int) -> str:
    return f"p_{j}"


def build_milp(instance: ProtectionInstance, objective: str = "protection") -> IlpModel:
    """Emit the row-fixing and (optionally) protection constraint families."""
    if objective not in ("protection", "fixed"):
        raise ValueError(f"unknown objective {objective!r}")
    variables = [_xvar(q) for q in instance.free]
    constraints: list[tuple[str, dict[str, int], int]] = []
    cid = itertools.count()
    for key in instance.var_rows():
        fv = _fvar(key)
        variables.append(fv)
        for q in instance.rows[key]:
            if key[0] == "X":
                constraints.append((f"c{next(cid)}", {fv: 1, _xvar(q): -1}, 0))
            else:
                constraints.append((f"c{next(cid)}", {fv: 1, _xvar(q): 1}, 1))
    obj: dict[str, int] = {}
    if objective == "fixed":
        for key in instance.var_rows():
            obj[_fvar(key)] = 1
    else:
        auto = set(instance.auto_fixed())
        for j in instance.targets:
            pv = _pvar(j)
            variables.append(pv)
            obj[pv] = 1
            det = instance.detect[j]
            if any(key in auto for key in det):
                continue  # protected regardless of the free bases
            coeffs = {pv: 1}
            for key in det:
                coeffs[_fvar(key)] = -1
            constraints.append((f"c{next(cid)}", coeffs, 0))
    return IlpModel(objective, variables, obj, constraints, instance)


@dataclass
class Solution:
    assignment: dict[int, int]        # x_j for j in U (1 = X basis)
    fixed_rows: list[RowKey]          # var rows fixed plus auto-fixed rows
    protected: list[int]
    objective_value: int
    optimal: bool
    objective: str


def _evaluate(instance: ProtectionInstance, assignment: dict[int, int]
              ) -> tuple[list[RowKey], list[int]]:
    """Maximal f/p consistent with a full basis assignment."""
    fixed = []
    for key, supp in sorted(instance.rows.items()):
        want = 1 if key[0] == "X" else 0
        if all(assignment[q] == want for q in supp):
            fixed.append(key)
    fixed_set = set(fixed)
    protected = [j for j in instance.targets
                 if any(key in fixed_set for key in instance.detect[j])]
    return fixed, protected


def _components(instance: ProtectionInstance) -> list[tuple[set[int], set[RowKey], set[int]]]:
    """Connected (free qubits, var rows, targets) blocks of the instance."""
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    nodes = [("q", q) for q in instance.free] + \
        [("r", key) for key in instance.var_rows()] + \
        [("t", j) for j in instance.targets]
    for node in nodes:
        parent[node] = node
    for key in instance.var_rows():
        for q in instance.rows[key]:
            union(("r", key), ("q", q))
    for j in instance.targets:
        for key in instance.detect[j]:
            if key in set(instance.var_rows()):
                union(("t", j), ("r", key))
    groups: dict = {}
    for node in nodes:
        groups.setdefault(find(node), []).append(node)
    out = []
    for members in groups.values():
        qs = {m[1] for m in members if m[0] == "q"}
        rs = {m[1] for m in members if m[0] == "r"}
        ts = {m[1] for m in members if m[0] == "t"}
        out.append((qs, rs, ts))
    out.sort(key=lambda c: (min(c[0]) if c[0] else -1))
    return out


class _BudgetExpired(Exception):
    pass


class _Subproblem:
    """Exact solver core: rows wanting monochromatic supports, goals = row sets.

    A goal scores 1 when some row in its set gets fixed (support emptied in
    its own basis). The protection objective uses the detection sets as
    goals; the fixed-count objective uses one singleton goal per row. Solved
    by propagation (fixed rows, lost goals, pure-literal qubits), dynamic
    component decomposition, and memoized branch-and-score.
    """

    def __init__(self, deadline: float | None):
        self.deadline = deadline
        self.memo: dict = {}
        self.checked = 0

    def _tick(self):
        self.checked += 1
        if self.deadline is not None and self.checked % 256 == 0 \
                and time.monotonic() > self.deadline:
            raise _BudgetExpired

    def solve(self, rows: dict[int, tuple[str, frozenset]],
              goals: dict[int, frozenset]) -> tuple[int, dict[int, int]]:
        """Returns (score, assignment for every qubit mentioned by rows)."""
        self._tick()
        rows = dict(rows)
        goals = dict(goals)
        score = 0
        assign: dict[int, int] = {}
        # propagation loop: fixed rows, dead goals, pure-literal qubits
        while True:
            fixed_now = [i for i, (_, supp) in rows.items() if not supp]
            if fixed_now:
                hit = set(fixed_now)
                for g, members in list(goals.items()):
                    if members & hit:
                        score += 1
                        del goals[g]
                for i in fixed_now:
                    del rows[i]
                continue
            alive = set(rows)
            stale = {g for g, members in goals.items()
                     if members - alive or not members}
            if stale:
                for g in stale:
                    kept = goals[g] & alive
                    if kept:
                        goals[g] = kept
                    else:
                        del goals[g]  # unsatisfiable goal
                continue
            useful = {i for members in goals.values() for i in members}
            useless = [i for i in rows if i not in useful]
            if useless:
                for i in useless:
                    del rows[i]
                continue
            qubit_types: dict[int, set] = {}
            for kind, supp in rows.values():
                for q in supp:
                    qubit_types.setdefault(q, set()).add(kind)
            pure = [(q, kinds) for q, kinds in qubit_types.items() if len(kinds) == 1]
            if pure:
                for q, kinds in pure:
                    val = 1 if "X" in kinds else 0
                    assign[q] = val
                    for i, (kind, supp) in list(rows.items()):
                        if q in supp:
                            rows[i] = (kind, supp - {q})
                continue
            break
        if not goals:
            for q in {q for _, supp in rows.values() for q in supp}:
                assign.setdefault(q, 0)
            return score, assign
        # split into connected components over shared qubits/goals
        comps = self._split(rows, goals)
        if len(comps) > 1:
            for sub_rows, sub_goals in comps:
                s, a = self.solve(sub_rows, sub_goals)
                score += s
                assign.update(a)
            return score, assign
        key, unmap = self._canonical(rows, goals)
        if key in self.memo:
            s, canon_assign = self.memo[key]
            assign.update({unmap[cq]: v for cq, v in canon_assign.items()})
            return score + s, assign
        # branch on the highest-degree qubit, X basis first
        degree: dict[int, int] = {}
        for _, supp in rows.values():
            for q in supp:
                degree[q] = degree.get(q, 0) + 1
        q = min(degree, key=lambda x: (-degree[x], x))
        best = (-1, {})
        for val in (1, 0):
            sub_rows = {}
            for i, (kind, supp) in rows.items():
                keep = (val == 1) == (kind == "X")
                if q in supp:
                    if keep:
                        sub_rows[i] = (kind, supp - {q})
                else:
                    sub_rows[i] = (kind, supp)
            s, a = self.solve(sub_rows, goals)
            if s > best[0]:
                a = dict(a)
                a[q] = val
                best = (s, a)
        assign.update(best[1])
        remap = {q_orig: cq for cq, q_orig in unmap.items()}
        self.memo[key] = (best[0], {remap[qq]: v for qq, v in best[1].items()})
        return score + best[0], assign

    @staticmethod
    def _canonical(rows, goals):
        """Relabel qubits/rows/goals deterministically so that structurally
        identical subproblems (e.g. translates) share one memo entry."""
        row_order = sorted(rows, key=lambda i: (rows[i][0], tuple(sorted(rows[i][1])), i))
        qmap: dict[int, int] = {}
        for i in row_order:
            for q in sorted(rows[i][1]):
                if q not in qmap:
                    qmap[q] = len(qmap)
        rows_key = tuple((rows[i][0], tuple(sorted(qmap[q] for q in rows[i][1])))
                         for i in row_order)
        row_pos = {i: pos for pos, i in enumerate(row_order)}
        goals_key = tuple(sorted(tuple(sorted(row_pos[i] for i in members))
                                 for members in goals.values()))
        unmap = {cq: q for q, cq in qmap.items()}
        return (rows_key, goals_key), unmap

    @staticmethod
    def _split(rows, goals):
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for i in rows:
            parent[("r", i)] = ("r", i)
        for g in goals:
            parent[("g", g)] = ("g", g)
        qubit_home: dict[int, tuple] = {}
        for i, (_, supp) in rows.items():
            for q in supp:
                if q in qubit_home:
                    union(("r", i), qubit_home[q])
                else:
                    qubit_home[q] = ("r", i)
        for g, members in goals.items():
            for i in members:
                union(("g", g), ("r", i))
        buckets: dict = {}
        for i in rows:
            buckets.setdefault(find(("r", i)), ([], []))[0].append(i)
        for g in goals:
            buckets.setdefault(find(("g", g)), ([], []))[1].append(g)
        out = []
        for rs, gs in buckets.values():
            out.append(({i: rows[i] for i in rs}, {g: goals[g] for g in gs}))
        out.sort(key=lambda c: min(c[0]) if c[0] else -1)
        return out


def solve_exact(model: IlpModel, time_budget: float | None = None) -> Solution:
    """Provably optimal solution of the binary program.

    The f/p variables are determined maximally by any full x assignment, so
    the search runs over basis choices only: propagation, dynamic component
    decomposition and memoized branching (highest-degree qubit first, X
    tried before Z). On budget expiry the best assignment found by a greedy
    completion is returned flagged non-optimal.
    """
    instance = model.instance
    deadline = None if time_budget is None else time.monotonic() + time_budget
    protection = model.objective == "protection"
    auto = set(instance.auto_fixed())
    var_rows = instance.var_rows()
    row_ids = {key: i for i, key in enumerate(var_rows)}
    rows = {i: (key[0], frozenset(instance.rows[key])) for key, i in row_ids.items()}
    goals: dict[int, frozenset] = {}
    if protection:
        for g, j in enumerate(instance.targets):
            if any(k in auto for k in instance.detect[j]):
                continue  # protected by the plan alone
            members = frozenset(row_ids[k] for k in instance.detect[j] if k in row_ids)
            goals[g] = members
    else:
        for key, i in row_ids.items():
            goals[1000000 + i] = frozenset([i])
    solver = _Subproblem(deadline)
    optimal = True
    try:
        _, assign = solver.solve(rows, goals)
    except _BudgetExpired:
        optimal = False
        assign = _greedy_fallback(instance, protection)
    assignment = {q: assign.get(q, 0) for q in instance.free}
    fixed, protected = _evaluate(instance, assignment)
    value = len(protected) if protection else len([k for k in fixed if instance.rows[k]])
    return Solution(assignment, fixed, protected, value, optimal, model.objective)


def _greedy_fallback(instance: ProtectionInstance, protection: bool) -> dict[int, int]:
    """Deterministic incumbent when the exact search hits its budget: the
    best of all-X, all-Z and a smallest-rows-first packing."""
    candidates = [{q: 1 for q in instance.free}, {q: 0 for q in instance.free}]
    packed: dict[int, int] = {}
    for key in sorted(instance.var_rows(), key=lambda k: (len(instance.rows[k]), k)):
        want = 1 if key[0] == "X" else 0
        supp = instance.rows[key]
        if all(packed.get(q, want) == want for q in supp):
            for q in supp:
                packed[q] = want
    for q in instance.free:
        packed.setdefault(q, 0)
    candidates.append(packed)

    def score(assign):
        fixed, protected = _evaluate(instance, assign)
        if protection:
            return len(protected)
        return len([k for k in fixed if instance.rows[k]])

    return max(candidates, key=score)


def export_lp(model: IlpModel) -> str:
    """LP-format text (maximize, <= rows, all-binary section)."""
    lines = ["Maximize"]
    terms = " + ".join(name for name, c in sorted(model.objective_terms.items()) if c == 1)
    lines.append(f" obj: {terms}" if terms else " obj:")
    lines.append("Subject To")
    for name, coeffs, rhs in model.constraints:
        parts = []
        for var, c in sorted(coeffs.items()):
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {var}" if abs(c) == 1 else f"{sign} {abs(c)} {var}")
        body = " ".join(parts).lstrip("+ ")
        lines.append(f" {name}: {body} <= {rhs}")
    lines.append("Binary")
    for var in model.variables:
        lines.append(f" {var}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def parse_lp(text: str) -> tuple[dict[str, int], list[tuple[str, dict[str, int], int]], list[str]]:
    """Parse the LP subset emitted by export_lp (objective, constraints, binaries)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    mode = None
    objective: dict[str, int] = {}
    constraints = []
    binaries: list[str] = []
    for ln in lines:
        low = ln.lower()
        if low in ("maximize", "subject to", "binary", "end"):
            mode = low
            continue
        if mode == "maximize":
            body = ln.split(":", 1)[1].strip()
            for tok in body.split("+"):
                tok = tok.strip()
                if tok:
                    objective[tok] = 1
        elif mode == "subject to":
            name, rest = ln.split(":", 1)
            body, rhs = rest.rsplit("<=", 1)
            coeffs: dict[str, int] = {}
            tokens = body.replace("-", " - ").replace("+", " + ").split()
            sign = 1
            i = 0
            while i < len(tokens):
                tok = tokens[i]
                if tok == "+":
                    sign = 1
                elif tok == "-":
                    sign = -1
                elif tok.isdigit():
                    coeffs[tokens[i + 1]] = sign * int(tok)
                    i += 1
                else:
                    coeffs[tok] = sign
                i += 1
            constraints.append((name.strip(), coeffs, int(rhs)))
        elif mode == "binary":
            binaries.append(ln)
    return objective, constraints, binaries


@dataclass
class InitialConfiguration:
    """Complete initialization: bases for all qubits plus the fixed-row set."""

    injected: tuple[int, ...]
    sites: dict[int, int]
    angles: dict[int, float]
    bell_pairs: list[tuple[int, int]]
    basis: dict[int, str]             # every qubit -> X | Z | Y-site
    fixed_x: tuple[int, ...]          # fixed rows of hx (indices)
    fixed_z: tuple[int, ...]
    protected: tuple[int, ...]


def apply_solution(code: CssCode, plan: PreparationPlan, solution: Solution
                   ) -> InitialConfiguration:
    """Fill the free bases and recompute the fixed-row set from scratch.

    A row is fixed iff it commutes with every initial stabilizer of the
    fully assigned product state; the recomputation must contain every row
    the solver marked fixed, otherwise the solver and the state disagree.
    """
    basis = dict(plan.basis)
    for q, val in solution.assignment.items():
        basis[q] = "X" if val else "Z"
    n = code.n
    initial = []
    for u, v in plan.bell_pairs.pairs:
        initial.append(from_support(n, xs=[u, v]))
        initial.append(from_support(n, zs=[u, v]))
    bell_qubits = plan.bell_pairs.covered()
    for q in range(n):
        if q in bell_qubits:
            continue
        b = basis[q]
        if b == "X":
            initial.append(from_support(n, xs=[q]))
        elif b == "Z":
            initial.append(from_support(n, zs=[q]))
        else:  # rotated site: no X/Z Pauli stabilizes it
            initial.append(from_support(n, xs=[q]))
            initial.append(from_support(n, zs=[q]))
    fixed_x, fixed_z = [], []
    for kind, h, out in (("X", code.hx, fixed_x), ("Z", code.hz, fixed_z)):
        for r, bits in enumerate(h):
            term = PauliTerm(bits, np.zeros(n, np.uint8)) if kind == "X" \
                else PauliTerm(np.zeros(n, np.uint8), bits)
            if not any(symplectic_product(term, s) for s in initial):
                out.append(r)
    recomputed = {("X", r) for r in fixed_x} | {("Z", r) for r in fixed_z}
    for key in solution.fixed_rows:
        if key not in recomputed:
            raise AssertionError(f"solver marked {key} fixed but recomputation disagrees")
    return InitialConfiguration(plan.injected, dict(plan.sites), dict(plan.angles),
                                list(plan.bell_pairs.pairs), basis,
                                tuple(fixed_x), tuple(fixed_z),
                                tuple(sorted(solution.protected)))
