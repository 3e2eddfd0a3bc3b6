"""Quasi-isometry invariants computed from tilings: growth with its
polynomial/exponential dichotomy, ends, a combinatorial hyperbolicity
certificate (mesh), and level diameters bounding divergence.
"""

from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# recurrences and the growth dichotomy


def minimal_recurrence(seq, max_order=None):
    """Smallest-order linear recurrence with rational coefficients satisfied
    by the whole integer sequence, or None if none fits the data.

    Returns (coeffs c_1..c_r) with s(n) = c_1 s(n-1) + ... + c_r s(n-r).
    """
    seq = [Fraction(x) for x in seq]
    n = len(seq)
    if max_order is None:
        max_order = n // 2
    for r in range(1, max_order + 1):
        rows = n - r
        if rows < r:
            break
        # solve the first r windows, then verify on the rest
        mat = [[seq[i + j] for j in range(r)] + [seq[i + r]] for i in range(rows)]
        coeffs = _solve_exact(mat, r)
        if coeffs is None:
            continue
        ok = all(sum(c * seq[i + j] for j, c in enumerate(coeffs)) == seq[i + r]
                 for i in range(rows))
        if ok:
            return coeffs[::-1]  # newest lag first: s(n) = c_1 s(n-1) + ...
    return None


def _solve_exact(rows, r):
    """Gaussian elimination over the rationals; None if inconsistent."""
    m = [row[:] for row in rows]
    piv = []
    col = 0
    ri = 0
    while col < r and ri < len(m):
        sel = next((k for k in range(ri, len(m)) if m[k][col] != 0), None)
        if sel is None:
            col += 1
            continue
        m[ri], m[sel] = m[sel], m[ri]
        inv = Fraction(1, 1) / m[ri][col]
        m[ri] = [x * inv for x in m[ri]]
        for k in range(len(m)):
            if k != ri and m[k][col] != 0:
                f = m[k][col]
                m[k] = [a - f * b for a, b in zip(m[k], m[ri])]
        piv.append(col)
        ri += 1
        col += 1
    for k in range(ri, len(m)):
        if m[k][r] != 0:
            return None
    sol = [Fraction(0)] * r
    for i, c in enumerate(piv):
        sol[c] = m[i][r]
    return sol


def polynomial_degree(seq):
    """Degree k if the k-th finite differences are constant (with at least
    two witnesses); None otherwise."""
    cur = list(seq)
    k = 0
    while len(cur) >= 2:
        if len(set(cur)) == 1:
            return k
        cur = [b - a for a, b in zip(cur, cur[1:])]
        k += 1
    return None


def spectral_radius_exceeds_one(children: dict) -> bool:
    """Exact test for a nonnegative integer type-transition system: growth is
    exponential iff some strongly connected component is not a plain cycle
    (a vertex with two outgoing in-component edge-ends, or any multiplicity
    two)."""
    nodes = sorted(children)
    index = {t: i for i, t in enumerate(nodes)}
    adj = [[] for _ in nodes]
    for t, ch in children.items():
        for c, m in ch.items():
            if c in index:
                adj[index[t]].append((index[c], m))

    # Tarjan SCC
    sccs = _sccs(len(nodes), adj)
    for comp in sccs:
        comp_set = set(comp)
        internal = [(u, v, m) for u in comp for v, m in adj[u] if v in comp_set]
        if not internal:
            continue
        if len(internal) < len(comp):
            continue
        outdeg = Counter(u for u, _, _ in internal)
        if any(m > 1 for _, _, m in internal) or any(outdeg[u] > 1 for u in comp):
            return True
        # every vertex exactly one unit edge: a disjoint union of cycles
    return False


def _sccs(n, adj):
    index = [None] * n
    low = [0] * n
    onstack = [False] * n
    stack = []
    out = []
    counter = [0]

    def strongconnect(v0):
        work = [(v0, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                onstack[v] = True
            recurse = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i][0]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                elif onstack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])

    for v in range(n):
        if index[v] is None:
            strongconnect(v)
    return out


def transition_ratio(children: dict):
    """Numeric dominant eigenvalue of the type-transition matrix."""
    nodes = sorted(children)
    index = {t: i for i, t in enumerate(nodes)}
    mat = np.zeros((len(nodes), len(nodes)))
    for t, ch in children.items():
        for c, m in ch.items():
            if c in index:
                mat[index[c], index[t]] = m
    eig = np.linalg.eigvals(mat)
    rho = float(max(abs(eig)))
    if abs(rho - round(rho)) < 1e-9:
        return int(round(rho))
    return round(rho, 6)


@dataclass
class GrowthReport:
    counts: list                 # non-ideal tile counts per level
    counts_by_type: list         # per level: {type: count}
    recurrence: list | None      # rational coefficients as strings
    transition: dict | None      # coalesced type -> {type: multiplicity}
    kind: str                    # "polynomial" | "exponential"
    degree: int | None = None
    ratio: object = None

    def classification(self):
        if self.kind == "polynomial":
            return ("polynomial", self.degree)
        return ("exponential", self.ratio)


def classify_counts(seq):
    """The dichotomy on a raw count sequence: polynomial when some finite
    difference order is constant, exponential otherwise.  Never a third
    class."""
    deg = polynomial_degree(seq)
    if deg is not None:
        return ("polynomial", deg)
    rec = minimal_recurrence(seq)
    ratio = None
    if rec is not None:
        # dominant root of the characteristic polynomial
        coeffs = [1.0] + [-float(c) for c in rec]
        roots = np.roots(coeffs)
        rho = float(max(abs(roots)))
        ratio = int(round(rho)) if abs(rho - round(rho)) < 1e-9 else round(rho, 6)
    else:
        ratio = round(seq[-1] / seq[-2], 6) if len(seq) >= 2 and seq[-2] else None
    return ("exponential", ratio)


def growth(history, rule=None) -> GrowthReport:
    """Growth data from a history graph (or a plain list of tilings).

    With fewer than 4 levels the scalar fit is underdetermined; the exact
    transition-matrix dichotomy still applies when a stable rule is given.
    """
    tilings = history.tilings if hasattr(history, "tilings") else list(history)
    if len(tilings) < 4 and not (rule is not None and rule.stable):
        raise ValueError("fit underdetermined: more levels requested")
    counts = [len(t.nonideal()) for t in tilings]
    by_type = []
    transition = None
    if rule is not None:
        for t in tilings:
            c = Counter()
            for tile in t.nonideal():
                name = rule.type_of.get(tile.id)
                c[rule.coalesced_of.get(name, name)] += 1
            by_type.append(dict(sorted(c.items())))
        if rule.stable:
            transition = {k: dict(sorted(v.items()))
                          for k, v in sorted(rule.coalesced_children.items())}
    rec = minimal_recurrence(counts) if len(counts) >= 4 else None
    kind, value = classify_counts(counts) if len(counts) >= 4 else (None, None)
    if rule is not None and rule.stable and transition is not None:
        # exact integer test on the transition system wins over the fit
        expo = spectral_radius_exceeds_one(rule.coalesced_children)
        kind = "exponential" if expo else "polynomial"
        value = transition_ratio(rule.coalesced_children) if expo \
            else polynomial_degree(counts)
    if kind == "polynomial":
        return GrowthReport(counts, by_type, _rec_strs(rec), transition,
                            "polynomial", degree=value)
    return GrowthReport(counts, by_type, _rec_strs(rec), transition,
                        "exponential", ratio=value)


def _rec_strs(rec):
    return None if rec is None else [str(c) for c in rec]


# ---------------------------------------------------------------------------
# ends


@dataclass
class EndsReport:
    counts: list
    verdict: object    # 0 | 1 | 2 | "unbounded" | "undetermined"
    window: int
    mappings_bijective: bool


def _components(tiling):
    """Connected components of the non-ideal dual graph at one level."""
    ids = [t.id for t in tiling.nonideal()]
    idset = set(ids)
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tid in ids:
        for other, _ in tiling.neighbors(tid):
            if other in idset:
                ra, rb = find(tid), find(other)
                if ra != rb:
                    parent[ra] = rb
    comps = defaultdict(list)
    for tid in ids:
        comps[find(tid)].append(tid)
    ordered = sorted(comps.values(), key=min)
    comp_of = {}
    for i, members in enumerate(ordered):
        for tid in members:
            comp_of[tid] = i
    return len(ordered), comp_of


def ends(tilings, window: int = 3) -> EndsReport:
    if len(tilings) < 3:
        raise ValueError("need at least 3 levels")
    data = [_components(t) for t in tilings]
    counts = [c for c, _ in data]
    # parent mapping between consecutive levels of the window
    bijective = True
    for lvl in range(len(tilings) - window + 1, len(tilings)):
        if lvl <= 0:
            continue
        _, comp_of = data[lvl]
        _, comp_parent = data[lvl - 1]
        mapping = defaultdict(set)
        for tile in tilings[lvl].nonideal():
            if tile.parent_id in comp_parent:
                mapping[comp_of[tile.id]].add(comp_parent[tile.parent_id])
        images = [v for v in mapping.values()]
        flat = set()
        for v in images:
            if len(v) != 1:
                bijective = False
            flat |= v
        if len(flat) != counts[lvl - 1] or len(mapping) != counts[lvl]:
            bijective = False
    tail = counts[-window:]
    if len(tail) == window and len(set(tail)) == 1 and bijective:
        verdict = tail[-1]
    elif len(tail) == window and all(a < b for a, b in zip(tail, tail[1:])):
        verdict = "unbounded"
    else:
        verdict = "undetermined"
    return EndsReport(counts, verdict, window, bijective)


# ---------------------------------------------------------------------------
# mesh certificate


@dataclass
class MeshReport:
    certified: bool
    orbit: list          # cycle of persistence-digraph nodes, if denied
    witness: object


def mesh_certificate(rule) -> MeshReport:
    """Combinatorial certificate that the mesh shrinks: no tile type may
    pass to a single child covering the whole tile, and no interface class
    may continue forever as a single unsubdivided instance.  Any cycle among
    these persistence moves denies the certificate."""
    if not rule.stable:
        raise ValueError("mesh certificate needs a stable rule")
    edges = defaultdict(set)
    witness = {}
    for t in rule.types:
        if sum(t.children.values()) == 1:
            child = next(iter(t.children))
            edges[("tile", t.name)].add(("tile", child))
            witness[("tile", t.name)] = t.example
    for key, rec in rule.interface_classes.items():
        node = ("iface",) + key
        for cont in rec["continuations"]:
            edges[node].add(("iface",) + cont)
            witness[node] = rec["witness"]

    # cycle detection
    color = {}
    stack = []

    def dfs(u):
        color[u] = 1
        stack.append(u)
        for v in sorted(edges.get(u, ())):
            if color.get(v) == 1:
                i = stack.index(v)
                return stack[i:] + [v]
            if v not in color:
                got = dfs(v)
                if got:
                    return got
        color[u] = 2
        stack.pop()
        return None

    for u in sorted(edges):
        if u not in color:
            cyc = dfs(u)
            if cyc:
                return MeshReport(False, [list(x) for x in cyc],
                                  witness.get(cyc[0]))
    return MeshReport(True, [], None)


# ---------------------------------------------------------------------------
# divergence via level diameters


@dataclass
class DivergenceReport:
    diameters: list      # int or "inf" per level
    witnesses: list      # per level: (tile1, tile2, path) or None
    mode: str            # "exact" or "lower-bound"
    fit: dict | None
    verdict: str         # "linear" | "superlinear" | "disconnected" | "short"


def _bfs(adj, src):
    dist = {src: 0}
    prev = {src: None}
    q = deque([src])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                prev[v] = u
                q.append(v)
    return dist, prev


def _level_diameter(tiling, exact=True):
    ids = [t.id for t in tiling.nonideal()]
    idset = set(ids)
    adj = {i: sorted(o for o, _ in tiling.neighbors(i) if o in idset) for i in ids}
    if not ids:
        return 0, None
    dist0, _ = _bfs(adj, ids[0])
    if len(dist0) != len(ids):
        return "inf", None
    if exact:
        best = (-1, None, None)
        for src in ids:
            dist, prev = _bfs(adj, src)
            far = max(dist.items(), key=lambda kv: (kv[1], kv[0]))
            if far[1] > best[0]:
                best = (far[1], src, (far[0], prev))
        diam, src, (dst, prev) = best
    else:
        # double sweep: a certified lower bound
        far1 = max(dist0.items(), key=lambda kv: (kv[1], kv[0]))[0]
        dist, prev = _bfs(adj, far1)
        dst = max(dist.items(), key=lambda kv: (kv[1], kv[0]))[0]
        diam, src = dist[dst], far1
    path = []
    cur = dst
    while cur is not None:
        path.append(cur)
        cur = prev[cur]
    return diam, (src, dst, list(reversed(path)))


def _linear_fit(xs, ys):
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    den = n * sxx - sx * sx
    if den == 0:
        return None
    a = (n * sxy - sx * sy) / den
    b = (sy - a * sx) / n
    sse = sum((y - (a * x + b)) ** 2 for x, y in zip(xs, ys))
    return {"slope": a, "intercept": b, "sse": sse}


def _exp_fit(xs, ys):
    import math
    if any(y <= 0 for y in ys):
        return None
    lys = [math.log(y) for y in ys]
    lf = _linear_fit(xs, lys)
    if lf is None:
        return None
    c = math.exp(lf["intercept"])
    lam = math.exp(lf["slope"])
    sse = sum((y - c * lam ** x) ** 2 for x, y in zip(xs, ys))
    return {"base": lam, "scale": c, "sse": sse}


def divergence_diameter(tilings, mode: str = "exact",
                        exact_limit: int = 5000) -> DivergenceReport:
    if len(tilings) < 3:
        raise ValueError("need at least 3 levels")
    diameters = []
    witnesses = []
    used_mode = "exact"
    for t in tilings:
        exact = mode == "exact" and len(t.nonideal()) <= exact_limit
        if not exact:
            used_mode = "lower-bound"
        diam, wit = _level_diameter(t, exact=exact)
        diameters.append(diam)
        witnesses.append(wit)
    finite = [(i, d) for i, d in enumerate(diameters) if d != "inf"]
    fit = None
    if any(d == "inf" for d in diameters):
        verdict = "disconnected"
    elif len(finite) >= 3:
        xs = [i for i, _ in finite]
        ys = [d for _, d in finite]
        lin = _linear_fit(xs, ys)
        exp = _exp_fit(xs, ys)
        fit = {"linear": lin, "exponential": exp}
        if exp is None or lin is None:
            verdict = "linear" if lin is not None else "short"
        elif lin["sse"] <= 0.1 * exp["sse"] or (lin["sse"] == 0 and exp["sse"] == 0):
            verdict = "linear"
        else:
            verdict = "superlinear"
    else:
        verdict = "short"
    return DivergenceReport(diameters, witnesses, used_mode, fit, verdict)
