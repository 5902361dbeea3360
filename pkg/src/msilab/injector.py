"""Noise-aware injection configurations: overlap decomposition, injection-site
independence, compatible Bell pairings, injectable-set enumeration, and
preparation plans.

Logical X/Z support overlaps are resolved with Bell pairs. A pairing is
compatible when every pair sits fully inside or fully outside each overlap
set; feasibility is decided by signature-class parity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .codes import CssCode
from .pauli import PauliTerm


@dataclass
class InjectionConfig:
    """Which logicals to inject, at which in-overlap site, at which angle."""

    injected: tuple[int, ...]
    sites: dict[int, int]
    angles: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self.injected = tuple(sorted(self.injected))
        for i in self.injected:
            self.angles.setdefault(i, np.pi / 2)


@dataclass
class OverlapData:
    """Per-logical support decomposition and all pairwise overlap sets."""

    injected: tuple[int, ...]
    sites: dict[int, int]
    shared: dict[int, frozenset]                      # supp(X) & supp(Z) per logical
    x_rest: dict[int, frozenset]                      # X support outside shared
    z_rest: dict[int, frozenset]                      # Z support outside shared
    cross: dict[tuple[int, int], frozenset]           # pairwise overlap sets
    union: frozenset                                  # all qubits needing Bell pairs


@dataclass
class Pairing:
    """Disjoint qubit pairs covering the overlap union; first element of each
    pair is the X-basis (control) endpoint."""

    pairs: list[tuple[int, int]]

    def covered(self) -> frozenset:
        return frozenset(q for p in self.pairs for q in p)


@dataclass
class PreparationPlan:
    """Theorem-style preparation: bases for every qubit plus Bell pairs."""

    injected: tuple[int, ...]
    sites: dict[int, int]
    angles: dict[int, float]
    bell_pairs: Pairing
    basis: dict[int, str]          # qubit -> X | Z | Y-site | free
    targets: frozenset             # union of injected supports minus sites
    free: frozenset                # everything else (sites excluded)


def _supports(code: CssCode, i: int) -> tuple[frozenset, frozenset]:
    sx = frozenset(int(q) for q in code.logical_x[i].support())
    sz = frozenset(int(q) for q in code.logical_z[i].support())
    return sx, sz


def overlaps(code: CssCode, config: InjectionConfig) -> OverlapData:
    """Compute the support decomposition for an injection configuration."""
    shared, x_rest, z_rest = {}, {}, {}
    for i in config.injected:
        sx, sz = _supports(code, i)
        shared[i] = sx & sz
        x_rest[i] = sx - shared[i]
        z_rest[i] = sz - shared[i]
        if len(shared[i]) % 2 != 1:
            raise AssertionError(f"shared support of logical {i} has even size")
        if config.sites[i] not in shared[i]:
            raise ValueError(f"site {config.sites[i]} is outside the shared support of logical {i}")
    cross = {}
    for i in config.injected:
        for j in config.injected:
            if i == j:
                cross[(i, i)] = shared[i] - {config.sites[i]}
            else:
                cross[(i, j)] = x_rest[i] & z_rest[j]
    union = frozenset(q for s in cross.values() for q in s)
    return OverlapData(config.injected, dict(config.sites), shared, x_rest, z_rest, cross, union)


def check_site_independence(code: CssCode, config: InjectionConfig
                            ) -> tuple[bool, list[tuple[int, int]]]:
    """True when no site lies on another injected logical's support."""
    bad = []
    for i in config.injected:
        for j in config.injected:
            if i == j:
                continue
            sx, sz = _supports(code, j)
            if config.sites[i] in (sx | sz):
                bad.append((i, j))
    return (not bad), bad


def _signature(od: OverlapData, q: int, extended: bool) -> tuple:
    keys = sorted(od.cross)
    sig = tuple(1 if q in od.cross[key] else 0 for key in keys)
    if not extended:
        return sig
    extra = tuple(1 if q in od.x_rest[i] else 0 for i in od.injected) + \
        tuple(1 if q in od.z_rest[i] else 0 for i in od.injected)
    return sig + extra


def find_pairing(od: OverlapData, extended: bool = False) -> Pairing | None:
    """Compatible pairing of the overlap union, or None when infeasible.

    Qubits are grouped by their overlap-membership signature; a pairing
    exists iff every class has even size, and members are paired by
    ascending index. ``extended`` additionally separates classes by
    X/Z-remainder membership, which also keeps every pair fully inside or
    outside each remainder set (see enumerate_injectable).
    """
    classes: dict[tuple, list[int]] = {}
    for q in sorted(od.union):
        classes.setdefault(_signature(od, q, extended), []).append(q)
    pairs = []
    for sig in sorted(classes):
        members = classes[sig]
        if len(members) % 2:
            return None
        pairs.extend((members[t], members[t + 1]) for t in range(0, len(members), 2))
    return Pairing(sorted(pairs))


def _mis_enumerate(vertices: list[int], edges: set[frozenset]) -> list[tuple[int, ...]]:
    """All maximal independent sets, via Bron-Kerbosch on the complement graph."""
    nbr = {v: set() for v in vertices}
    for v in vertices:
        for u in vertices:
            if u != v and frozenset((u, v)) not in edges:
                nbr[v].add(u)
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda v: (len(nbr[v] & p), -v))
        for v in sorted(p - nbr[pivot]):
            expand(r | {v}, p & nbr[v], x & nbr[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(vertices), set())
    return sorted(out)


def enumerate_injectable(code: CssCode, max_set_size: int | None = None,
                         site_budget: int | None = None,
                         tuple_budget: int = 4096
                         ) -> list[tuple[InjectionConfig, Pairing]]:
    """Enumerate injectable sets with their sites and compatible pairings.

    Iterates site tuples from the product of per-logical shared supports
    (each list capped at ``site_budget``, lowest indices first, and the full
    product capped at ``tuple_budget`` by shrinking the largest lists). For
    each tuple, builds the pairwise site-independence conflict graph,
    enumerates maximal independent sets, and tests subsets by descending
    size, keeping the first feasible subset per size. Feasibility uses the
    extended signature so every emitted plan also satisfies the eigenstate
    preparation identities on the X/Z remainders.

    Results are deduplicated by (injected, restricted sites) and sorted by
    descending set size, then lexicographically. Every subset of every
    maximal independent set is tested (with memoized feasibility): an
    early-stop after the first feasible subset per size would discard the
    configurations that downstream protection ranking needs.
    """
    k = code.k
    if k == 0:
        return []
    if max_set_size is None:
        max_set_size = k
    site_lists = []
    for i in range(k):
        sx, sz = _supports(code, i)
        shared = sorted(sx & sz)
        cap = site_budget if site_budget is not None else (len(shared) if len(shared) <= 7 else 7)
        site_lists.append(shared[:max(1, cap)])
    while int(np.prod([len(s) for s in site_lists])) > tuple_budget:
        longest = max(range(k), key=lambda i: (len(site_lists[i]), i))
        if len(site_lists[longest]) == 1:
            break
        site_lists[longest] = site_lists[longest][:-1]

    supports = {}
    for i in range(k):
        sx, sz = _supports(code, i)
        supports[i] = sx | sz

    feasible: dict[tuple, tuple[InjectionConfig, Pairing]] = {}
    infeasible: set[tuple] = set()
    for tup in itertools.product(*site_lists):
        edges = set()
        for i in range(k):
            for j in range(i + 1, k):
                if tup[i] in supports[j] or tup[j] in supports[i]:
                    edges.add(frozenset((i, j)))
        for mis in _mis_enumerate(list(range(k)), edges):
            top = min(len(mis), max_set_size)
            for size in range(top, 0, -1):
                for subset in itertools.combinations(mis, size):
                    key = (subset, tuple(tup[i] for i in subset))
                    if key in feasible or key in infeasible:
                        continue
                    config = InjectionConfig(subset, {i: tup[i] for i in subset})
                    pairing = find_pairing(overlaps(code, config), extended=True)
                    if pairing is None:
                        infeasible.add(key)
                    else:
                        feasible[key] = (config, pairing)
    order = sorted(feasible, key=lambda key: (-len(key[0]), key[0], key[1]))
    return [feasible[key] for key in order]


def _plateau_pool(vec: np.ndarray, rows: np.ndarray, rng, steps: int,
                  slack: int, cap: int) -> list[np.ndarray]:
    """Low-weight members of one logical class, by plateau random walk."""
    v = vec.copy()
    best = int(v.sum())
    seen: dict[bytes, np.ndarray] = {}

    def note(u):
        nonlocal best
        w = int(u.sum())
        if w < best:
            best = w
        if w <= best + slack:
            seen[u.tobytes()] = u.copy()

    note(v)
    for _ in range(steps):
        cand = v[None, :] ^ rows
        w = cand.sum(axis=1)
        cur = int(v.sum())
        down = np.nonzero(w < cur)[0]
        flat = np.nonzero(w <= cur + 2)[0]
        if down.size and rng.random() < 0.5:
            idx = down[rng.integers(down.size)]
        elif flat.size:
            idx = flat[rng.integers(flat.size)]
        else:
            idx = rng.integers(rows.shape[0])
        v = cand[idx]
        note(v)
        if len(seen) >= 3 * cap:
            break
    out = [u for u in seen.values() if int(u.sum()) <= best + slack]
    out.sort(key=lambda u: (int(u.sum()), u.tobytes()))
    return out[:cap]


def _subset_feasibility(subset, xs, zs, max_site_tuples=8):
    """(odd signature classes, best sites) for a candidate injected subset."""
    sup = {i: set(np.nonzero(xs[i] | zs[i])[0].tolist()) for i in subset}
    shared = {i: sorted((np.nonzero(xs[i] & zs[i])[0]).tolist()) for i in subset}
    a_rest = {i: set(np.nonzero(xs[i] & ~(xs[i] & zs[i]))[0].tolist()) for i in subset}
    b_rest = {i: set(np.nonzero(zs[i] & ~(xs[i] & zs[i]))[0].tolist()) for i in subset}
    site_lists = []
    for i in subset:
        ok = [q for q in shared[i] if all(q not in sup[j] for j in subset if j != i)]
        if not ok:
            return 99, None
        site_lists.append(ok[:2])
    best: tuple[int, dict | None] = (99, None)
    for count, sites in enumerate(itertools.product(*site_lists)):
        if count >= max_site_tuples:
            break
        cross = {}
        for pos, i in enumerate(subset):
            for j in subset:
                cross[(i, j)] = (set(shared[i]) - {sites[pos]}) if i == j \
                    else a_rest[i] & b_rest[j]
        union = set().union(*cross.values())
        classes: dict[tuple, int] = {}
        for q in union:
            sig = tuple(1 if q in cross[key] else 0 for key in sorted(cross)) + \
                tuple(1 if q in a_rest[i] else 0 for i in subset) + \
                tuple(1 if q in b_rest[i] else 0 for i in subset)
            classes[sig] = classes.get(sig, 0) + 1
        odd = sum(1 for c in classes.values() if c % 2)
        if odd < best[0]:
            best = (odd, dict(zip(subset, sites)))
        if odd == 0:
            break
    return best


def _plan_quality(subset, xs, zs, x_supports, z_supports) -> tuple[int, int, int]:
    """Lexicographic quality of a subset under chosen representatives:
    (odd signature classes, targets with no surviving detector, cross mass).

    A target is counted unprotectable when every check row that could detect
    its dominant reset error dies under the preparation (touches a site, a
    wrong-basis qubit, or one side of a Bell pair), which upper-bounds what
    any basis optimization can later protect.
    """
    odd, sites = _subset_feasibility(subset, xs, zs)
    if odd != 0:
        return (odd, 999, 999)
    shared = {i: set(np.nonzero(xs[i] & zs[i])[0].tolist()) for i in subset}
    a_rest = {i: set(np.nonzero(xs[i] & ~(xs[i] & zs[i]))[0].tolist()) for i in subset}
    b_rest = {i: set(np.nonzero(zs[i] & ~(xs[i] & zs[i]))[0].tolist()) for i in subset}
    cross = {}
    for i in subset:
        for j in subset:
            cross[(i, j)] = (shared[i] - {sites[i]}) if i == j else a_rest[i] & b_rest[j]
    union = set().union(*cross.values())
    classes: dict[tuple, list[int]] = {}
    for q in sorted(union):
        sig = tuple(1 if q in cross[key] else 0 for key in sorted(cross)) + \
            tuple(1 if q in a_rest[i] else 0 for i in subset) + \
            tuple(1 if q in b_rest[i] else 0 for i in subset)
        classes.setdefault(sig, []).append(q)
    pairs = []
    for sig in sorted(classes):
        mem = classes[sig]
        pairs += [(mem[t], mem[t + 1]) for t in range(0, len(mem), 2)]
    site_set = set(sites.values())
    basis_x = {u for u, _ in pairs}
    basis_z = {v for _, v in pairs}
    for i in subset:
        basis_x |= a_rest[i] - union
        basis_z |= b_rest[i] - union

    def survives(supp, opposite):
        if supp & site_set or supp & opposite:
            return False
        return all(len(supp & {u, v}) % 2 == 0 for u, v in pairs)

    surv_x = [s for s in x_supports if survives(s, basis_z)]
    surv_z = [s for s in z_supports if survives(s, basis_x)]
    targets = set().union(*(shared[i] | a_rest[i] | b_rest[i] for i in subset)) - site_set
    unprotectable = 0
    for q in targets:
        rows = surv_x if q in basis_x else surv_z
        if not any(q in s for s in rows):
            unprotectable += 1
    cross_mass = sum(len(c) for key, c in cross.items() if key[0] != key[1])
    return (0, unprotectable, cross_mass)


def optimize_for_injection(code: CssCode, seed: int = 0, nest_sizes=(4, 5, 6),
                           subset_candidates: int = 60, pool_steps: int = 12000,
                           pool_slack: int = 2, pool_cap: int = 400,
                           descent_rounds: int = 6) -> CssCode:
    """Re-pick class-equivalent representatives to improve injectability.

    Low-weight alternatives for each logical class are collected by a seeded
    plateau walk over stabilizer multiplications (class-preserving, so the
    conjugate pairing stays the identity). Subsets of the first nest size
    are then optimized by coordinate descent on the representative choices,
    minimizing (odd signature classes, unprotectable targets, cross overlap
    mass); the winner is locked and greedily extended to the larger nest
    sizes. Deterministic for a fixed seed.
    """
    k = code.k
    if k == 0:
        return code
    rng = np.random.default_rng(seed)
    pools_x = [_plateau_pool(code.logical_x[i].x.copy(), code.hx, rng,
                             pool_steps, pool_slack, pool_cap) for i in range(k)]
    pools_z = [_plateau_pool(code.logical_z[i].z.copy(), code.hz, rng,
                             pool_steps, pool_slack, pool_cap) for i in range(k)]
    x_supports = [set(np.nonzero(r)[0].tolist()) for r in code.hx]
    z_supports = [set(np.nonzero(r)[0].tolist()) for r in code.hz]
    cur_x = {i: pools_x[i][0].copy() for i in range(k)}
    cur_z = {i: pools_z[i][0].copy() for i in range(k)}

    def quality(subset, xs, zs):
        return _plan_quality(subset, xs, zs, x_supports, z_supports)

    def descend(subset, frozen):
        xs = {i: cur_x[i].copy() for i in subset}
        zs = {i: cur_z[i].copy() for i in subset}
        score = quality(subset, xs, zs)
        for _ in range(descent_rounds):
            improved = False
            for i in subset:
                if i in frozen:
                    continue
                for pools, cur in ((pools_x, xs), (pools_z, zs)):
                    keep = cur[i].copy()
                    for cand in pools[i]:
                        cur[i] = cand
                        s2 = quality(subset, xs, zs)
                        if s2 < score:
                            score = s2
                            keep = cand.copy()
                            improved = True
                    cur[i] = keep
            if not improved:
                break
        return score, xs, zs

    frozen: set[int] = set()
    for size in nest_sizes:
        if size > k:
            break
        extras = [j for j in range(k) if j not in frozen]
        cands = []
        for extra in itertools.combinations(extras, size - len(frozen)):
            subset = tuple(sorted(frozen | set(extra)))
            cands.append((quality(subset, {i: cur_x[i] for i in subset},
                                  {i: cur_z[i] for i in subset}), subset))
        cands.sort()
        locked = None
        best = None
        for _, subset in cands[:subset_candidates]:
            score, xs, zs = descend(subset, frozen)
            if best is None or score < best[0]:
                best = (score, subset, xs, zs)
            if score[0] == 0 and score[1] == 0:
                break
        if best is not None and best[0][0] == 0:
            locked = best
        if locked is None:
            break
        _, subset, xs, zs = locked
        for i in subset:
            cur_x[i] = xs[i]
            cur_z[i] = zs[i]
        frozen = set(subset)
    zeros = np.zeros(code.n, dtype=np.uint8)
    return CssCode(code.n, code.hx, code.hz,
                   [PauliTerm(cur_x[i], zeros) for i in range(k)],
                   [PauliTerm(zeros, cur_z[i]) for i in range(k)])


def build_preparation_plan(code: CssCode, config: InjectionConfig,
                           pairing: Pairing) -> PreparationPlan:
    """Basis assignment realizing the sufficient preparation conditions.

    X-remainder qubits outside the pairing get |+>, Z-remainder qubits |0>,
    Bell pairs get (X-basis control, Z-basis target), sites get the rotated
    eigenstate. Everything else is left free for protection optimization.
    """
    ok, bad = check_site_independence(code, config)
    if not ok:
        raise ValueError(f"site independence violated for pairs {bad}")
    od = overlaps(code, config)
    covered = pairing.covered()
    if covered != od.union:
        raise ValueError("pairing does not cover the overlap union exactly")
    basis: dict[int, str] = {}

    def assign(q, b):
        if basis.get(q, b) != b:
            raise AssertionError(f"conflicting preparation bases at qubit {q}")
        basis[q] = b

    for u, v in pairing.pairs:
        assign(u, "X")
        assign(v, "Z")
    for i in config.injected:
        for q in od.x_rest[i] - covered:
            assign(q, "X")
        for q in od.z_rest[i] - covered:
            assign(q, "Z")
    for i in config.injected:
        assign(config.sites[i], "Y-site")

    targets = frozenset(q for i in config.injected for q in
                        (od.shared[i] | od.x_rest[i] | od.z_rest[i]))
    targets = targets - set(config.sites.values())
    free = frozenset(range(code.n)) - targets - set(config.sites.values())
    for q in free:
        basis[q] = "free"
    if set(basis) != set(range(code.n)):
        raise AssertionError("incomplete basis map")
    return PreparationPlan(config.injected, dict(config.sites), dict(config.angles),
                           pairing, basis, targets, free)
