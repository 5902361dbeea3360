"""Protection optimization: instance building, exact solving vs enumeration,
LP export round-trip, and recomputation consistency."""

import itertools

import numpy as np
import pytest

from msilab.codes import bb_144, steane
from msilab.injector import build_preparation_plan, enumerate_injectable
from msilab.protopt import (
    IlpModel,
    ProtectionInstance,
    apply_solution,
    build_instance,
    build_milp,
    export_lp,
    parse_lp,
    solve_exact,
)


def _steane_plan():
    code = steane()
    cfg, pairing = enumerate_injectable(code)[0]
    return code, build_preparation_plan(code, cfg, pairing)


def test_build_instance_removes_site_rows():
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    site = next(iter(plan.sites.values()))
    for kind, h in (("X", code.hx), ("Z", code.hz)):
        for r, bits in enumerate(h):
            if bits[site]:
                assert (kind, r) not in instance.rows


def test_build_instance_all_free_keeps_all_rows():
    # a plan with no injected logicals keeps every row as a candidate
    from msilab.injector import Pairing, PreparationPlan

    code = steane()
    plan = PreparationPlan((), {}, {}, Pairing([]),
                           {q: "free" for q in range(7)},
                           frozenset(), frozenset(range(7)))
    instance = build_instance(code, plan)
    assert len(instance.rows) == code.hx.shape[0] + code.hz.shape[0]
    assert instance.targets == ()


def test_build_instance_steane_hand_check():
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    # by hand: rows touching the site are gone; a surviving X row cannot
    # touch a Z-assigned qubit and must meet Bell pairs evenly
    site = set(plan.sites.values())
    bell = set(plan.bell_pairs.covered())
    pairs = plan.bell_pairs.pairs
    for (kind, r), supp_u in instance.rows.items():
        h = code.hx if kind == "X" else code.hz
        supp = set(map(int, np.nonzero(h[r])[0]))
        assert not (supp & site)
        for u, v in pairs:
            assert len(supp & {u, v}) % 2 == 0
        for q in supp - bell - set(plan.free):
            assert plan.basis[q] == kind
        assert set(supp_u) == supp & set(plan.free)


def test_milp_structure():
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    model = build_milp(instance, "protection")
    # constraint count: one per (var row, U-support qubit) + protection rows
    expected_fix = sum(len(s) for s in instance.rows.values())
    prot_rows = len(model.constraints) - expected_fix
    assert prot_rows <= len(instance.targets)
    fixed_model = build_milp(instance, "fixed")
    assert all(not name.startswith("p_") for name in fixed_model.variables)
    assert len(fixed_model.constraints) == expected_fix


def test_milp_empty_detection_forces_zero():
    instance = ProtectionInstance(
        free=(0,), targets=(1,), target_basis={1: "X"},
        rows={("X", 0): (0,)}, detect={1: ()})
    model = build_milp(instance, "protection")
    # p_1 <= 0 is the only protection row
    prot = [c for _, c, rhs in model.constraints if "p_1" in c]
    assert prot == [{"p_1": 1}]


def _random_instance(rng, max_free=8, max_rows=8, max_targets=5):
    n_free = int(rng.integers(1, max_free + 1))
    free = tuple(range(n_free))
    rows = {}
    for r in range(int(rng.integers(1, max_rows + 1))):
        kind = "X" if rng.random() < 0.5 else "Z"
        size = int(rng.integers(0, n_free + 1))
        supp = tuple(sorted(rng.choice(n_free, size=size, replace=False).tolist()))
        rows[(kind, r)] = supp
    targets = tuple(100 + t for t in range(int(rng.integers(0, max_targets + 1))))
    detect = {}
    basis = {}
    keys = sorted(rows)
    for j in targets:
        basis[j] = "X" if rng.random() < 0.5 else "Z"
        wanted = [k for k in keys if k[0] == ("X" if basis[j] == "X" else "Z")]
        take = int(rng.integers(0, len(wanted) + 1)) if wanted else 0
        picked = [wanted[i] for i in rng.choice(len(wanted), size=take, replace=False)] if take else []
        detect[j] = tuple(sorted(picked))
    return ProtectionInstance(free, targets, basis, rows, detect)


def _brute_force(instance, objective):
    best = -1
    auto = set(instance.auto_fixed())
    for bits in itertools.product([0, 1], repeat=len(instance.free)):
        assign = dict(zip(instance.free, bits))
        fixed = set()
        for key, supp in instance.rows.items():
            want = 1 if key[0] == "X" else 0
            if all(assign[q] == want for q in supp):
                fixed.add(key)
        if objective == "fixed":
            value = len([k for k in fixed if instance.rows[k]])
        else:
            value = sum(1 for j in instance.targets
                        if any(k in fixed or k in auto for k in instance.detect[j]))
        best = max(best, value)
    return best


@pytest.mark.parametrize("objective", ["protection", "fixed"])
def test_solver_matches_bruteforce(objective):
    rng = np.random.default_rng(17)
    for _ in range(120):
        instance = _random_instance(rng)
        model = build_milp(instance, objective)
        sol = solve_exact(model)
        assert sol.optimal
        assert sol.objective_value == _brute_force(instance, objective)
        # feasibility replay: every constraint literally satisfied
        values = {f"x_{q}": v for q, v in sol.assignment.items()}
        for key in instance.var_rows():
            values[f"f_{key[0].lower()}_{key[1]}"] = 1 if key in sol.fixed_rows else 0
        for j in instance.targets:
            values[f"p_{j}"] = 1 if j in sol.protected else 0
        for name, coeffs, rhs in model.constraints:
            assert sum(c * values[v] for v, c in coeffs.items()) <= rhs, name


def test_monotonicity_adding_free_qubit():
    rng = np.random.default_rng(23)
    for _ in range(40):
        instance = _random_instance(rng, max_free=6)
        # freeze the last free qubit to Z: subset-U instance
        q = instance.free[-1]
        smaller = ProtectionInstance(
            instance.free[:-1], instance.targets, instance.target_basis,
            {k: tuple(x for x in s if x != q)
             for k, s in instance.rows.items() if not (k[0] == "X" and q in s)},
            {j: tuple(k for k in d if not (k[0] == "X" and q in instance.rows[k]))
             for j, d in instance.detect.items()})
        big = solve_exact(build_milp(instance, "protection")).objective_value
        small = solve_exact(build_milp(smaller, "protection")).objective_value
        assert big >= small


def test_empty_free_set_immediate():
    instance = ProtectionInstance((), (5,), {5: "X"}, {("X", 0): ()}, {5: (("X", 0),)})
    sol = solve_exact(build_milp(instance, "protection"))
    assert sol.optimal and sol.objective_value == 1 and sol.protected == [5]


def test_lp_export_roundtrip():
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    for objective in ("protection", "fixed"):
        model = build_milp(instance, objective)
        text = export_lp(model)
        obj, constraints, binaries = parse_lp(text)
        assert obj == {k: 1 for k in model.objective_terms}
        assert binaries == model.variables
        assert len(constraints) == len(model.constraints)
        for (n1, c1, r1), (n2, c2, r2) in zip(constraints, model.constraints):
            assert n1 == n2 and c1 == c2 and r1 == r2


def test_lp_export_empty_model():
    instance = ProtectionInstance((), (), {}, {}, {})
    text = export_lp(build_milp(instance, "protection"))
    assert text.startswith("Maximize")
    assert "End" in text


def test_apply_solution_consistency_steane():
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    sol = solve_exact(build_milp(instance, "protection"))
    init = apply_solution(code, plan, sol)
    assert set(init.basis) == set(range(code.n))
    assert all(b in ("X", "Z", "Y-site") for b in init.basis.values())
    # every solver-fixed row appears in the recomputed sets
    for kind, r in sol.fixed_rows:
        rows = init.fixed_x if kind == "X" else init.fixed_z
        assert r in rows


def test_apply_solution_random_consistency():
    rng = np.random.default_rng(3)
    code = bb_144()
    out = enumerate_injectable(code, max_set_size=2, site_budget=2, tuple_budget=32)
    rng.shuffle(out)
    for cfg, pairing in out[:6]:
        plan = build_preparation_plan(code, cfg, pairing)
        instance = build_instance(code, plan)
        for objective in ("protection", "fixed"):
            sol = solve_exact(build_milp(instance, objective), time_budget=30)
            init = apply_solution(code, plan, sol)
            assert init.fixed_x or init.fixed_z


def test_protection_beats_fixed_objective_downstream():
    # the protection objective never protects fewer targets than max-fixed
    code, plan = _steane_plan()
    instance = build_instance(code, plan)
    sol_p = solve_exact(build_milp(instance, "protection"))
    sol_f = solve_exact(build_milp(instance, "fixed"))
    fixed_set = set(sol_f.fixed_rows)
    protected_under_fixed = sum(1 for j in instance.targets
                                if any(k in fixed_set for k in instance.detect[j]))
    assert sol_p.objective_value >= protected_under_fixed
