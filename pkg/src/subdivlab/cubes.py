"""Cube complexes over a defining graph: local-isometry checking, basepoint
lifting, pruning of the ambient tilings to a subgroup, and bounded-depth
cone types of history graphs.

A complex is given by vertices, directed edges labelled by generators, and
squares listed as four oriented edge references tracing a closed path whose
labels alternate between two commuting generators.  The local-isometry check
is the usual link condition: no repeated outgoing or incoming label at a
vertex, and every pair of germs carrying distinct commuting labels must span
a square corner.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field

from . import words
from .balls import Ball
from .graphs import DefiningGraph, GraphError
from .tiling import ROOT_ID, HistoryGraph, SubdivisionRule, extract_rule


class CubeSpecError(ValueError):
    pass


class StarConvexityViolation(RuntimeError):
    def __init__(self, element_str):
        super().__init__("lift set is not star convex at %s" % element_str)
        self.element = element_str


@dataclass
class Edge:
    id: str
    src: str
    dst: str
    label: int    # generator index
    sign: int     # +1: reads the generator from src to dst; -1 reversed


class CubeComplexSpec:
    def __init__(self, graph: DefiningGraph, vertices, edges, squares,
                 cubes=(), basepoint=None):
        self.graph = graph
        self.vertices = tuple(vertices)
        if not self.vertices:
            raise CubeSpecError("need at least one vertex")
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise CubeSpecError("duplicate vertices")
        self.edges = {}
        for e in edges:
            if e.id in self.edges:
                raise CubeSpecError("duplicate edge id %r" % e.id)
            if e.src not in vset or e.dst not in vset:
                raise CubeSpecError("edge %r references unknown vertex" % e.id)
            self.edges[e.id] = e
        self.squares = [tuple(sq) for sq in squares]
        self.cubes = list(cubes)
        self.basepoint = basepoint if basepoint is not None else self.vertices[0]
        if self.basepoint not in vset:
            raise CubeSpecError("unknown basepoint %r" % self.basepoint)

    # a germ at a vertex is a signed label (x, +1) for an edge reading x
    # outward, (x, -1) for one reading x inward
    def germs_at(self, v):
        out = []
        for eid in sorted(self.edges):
            e = self.edges[eid]
            a, b = (e.src, e.dst) if e.sign > 0 else (e.dst, e.src)
            if a == v:
                out.append(((e.label, 1), eid))
            if b == v:
                out.append(((e.label, -1), eid))
        return out

    def square_corners(self, sq):
        """Corner germ-pairs of one square: [(vertex, germ1, germ2) x4]."""
        refs = []
        for ref in sq:
            if isinstance(ref, (list, tuple)):
                eid, orient = ref
            else:
                eid, orient = ref, 1
            if eid not in self.edges:
                raise CubeSpecError("square references unknown edge %r" % eid)
            refs.append((self.edges[eid], int(orient)))
        # walk the path; each edge traversed forward (+1) or backward (-1)
        corners = []
        v = None
        for idx in range(4):
            e, o = refs[idx]
            start, end = (e.src, e.dst) if e.sign * o > 0 else (e.dst, e.src)
            if v is None:
                v = start
            elif start != v:
                raise CubeSpecError("square %r does not trace a closed path" % (sq,))
            # germ read when leaving v along this traversal
            leave = (e.label, 1 if e.sign * o > 0 else -1)
            eprev, oprev = refs[idx - 1]
            arrive = (eprev.label, -1 if eprev.sign * oprev > 0 else 1)
            corners.append((v, arrive, leave))
            v = end
        if v != refs[0][0].src and v != (refs[0][0].src if refs[0][0].sign * refs[0][1] > 0 else refs[0][0].dst):
            pass
        e0, o0 = refs[0]
        start0 = e0.src if e0.sign * o0 > 0 else e0.dst
        if v != start0:
            raise CubeSpecError("square %r does not close up" % (sq,))
        labels = {e.label for e, _ in refs}
        if len(labels) != 2:
            raise CubeSpecError("square %r must alternate two labels" % (sq,))
        x, y = sorted(labels)
        if not self.graph.commute(x, y):
            raise CubeSpecError("square %r glues non-commuting labels" % (sq,))
        return corners


def parse_cube_spec(graph: DefiningGraph, data) -> CubeComplexSpec:
    if not isinstance(data, dict):
        raise CubeSpecError("cube complex input must be a JSON object")
    vertices = data.get("vertices", [])
    edges = []
    for i, e in enumerate(data.get("edges", [])):
        label = e.get("label")
        if label not in graph.index:
            raise CubeSpecError("unknown edge label %r" % label)
        edges.append(Edge(id=str(e.get("id", "e%d" % i)), src=e["from"],
                          dst=e["to"], label=graph.index[label],
                          sign=int(e.get("sign", 1))))
    return CubeComplexSpec(graph, vertices, edges, data.get("squares", []),
                           cubes=data.get("cubes", []),
                           basepoint=data.get("basepoint"))


def salvetti_spec(graph: DefiningGraph, subset=None) -> CubeComplexSpec:
    """The one-vertex complex of the graph group itself (or of the subgroup
    generated by an induced subset of generators): one loop per generator,
    one commutator square per edge."""
    gens = sorted(graph.index[g] if isinstance(g, str) else g
                  for g in (subset if subset is not None else range(graph.d)))
    edges = [Edge(id="e_%s" % graph.generators[i], src="v", dst="v",
                  label=i, sign=1) for i in gens]
    squares = []
    for i, j in graph.edge_pairs:
        if i in gens and j in gens:
            ei, ej = "e_%s" % graph.generators[i], "e_%s" % graph.generators[j]
            squares.append([[ei, 1], [ej, 1], [ei, -1], [ej, -1]])
    cubes = []
    from itertools import combinations, product
    for trip in combinations(gens, 3):
        if graph.is_clique(trip):
            for signs in product((1, -1), repeat=3):
                cubes.append({"vertex": "v",
                              "germs": [[i, s] for i, s in zip(trip, signs)]})
    return CubeComplexSpec(graph, ["v"], edges, squares, cubes=cubes)


def check_local_isometry(spec: CubeComplexSpec, graph: DefiningGraph,
                         strict: bool = False):
    """Returns None when the complex immerses locally isometrically into the
    one-vertex complex of the graph group; otherwise a violation string.

    Strict mode additionally demands a declared 3-cube wherever three germs
    at a vertex are pairwise commuting and pairwise spanned by squares.
    """
    corner_pairs = defaultdict(set)  # vertex -> {frozenset of 2 germs}
    try:
        for sq in spec.squares:
            for v, arrive, leave in spec.square_corners(sq):
                corner_pairs[v].add(frozenset((arrive, leave)))
    except CubeSpecError as exc:
        return "malformed square: %s" % exc
    for v in spec.vertices:
        germs = spec.germs_at(v)
        seen = Counter(g for g, _ in germs)
        for g, cnt in seen.items():
            if cnt > 1:
                return ("link not injective at %s: germ %s appears %d times"
                        % (v, g, cnt))
        glist = sorted(seen)
        for a in glist:
            for b in glist:
                if a >= b:
                    continue
                if a[0] == b[0]:
                    continue  # inverse pair of one loop spans no square
                if not graph.commute(a[0], b[0]):
                    continue
                if frozenset((a, b)) not in corner_pairs[v]:
                    return ("not full at %s: commuting germs %s, %s span no square"
                            % (v, _germ_str(graph, a), _germ_str(graph, b)))
        if strict:
            declared = {(c.get("vertex"), frozenset(map(tuple, c.get("germs", ()))))
                        for c in spec.cubes}
            from itertools import combinations as _comb
            for triple in _comb(glist, 3):
                if len({g[0] for g in triple}) != 3:
                    continue
                if not all(graph.commute(x[0], y[0])
                           for x, y in _comb(triple, 2)):
                    continue
                if not all(frozenset((x, y)) in corner_pairs[v]
                           for x, y in _comb(triple, 2)):
                    continue
                if (v, frozenset(triple)) not in declared:
                    return ("strict mode: corner cube missing at %s for germs %s"
                            % (v, [_germ_str(graph, g) for g in triple]))
    return None


def _germ_str(graph, germ):
    return graph.generators[germ[0]] + ("+" if germ[1] > 0 else "-")


@dataclass
class LiftSet:
    levels: list            # per level: canonically ordered element states
    members: set
    witness: dict           # state -> vertex of the complex

    def size(self):
        return len(self.members)

    def level_sizes(self):
        return [len(l) for l in self.levels]


def lift_basepoints(spec: CubeComplexSpec, graph: DefiningGraph,
                    ball: Ball, n_max: int) -> LiftSet:
    """Breadth-first lifting: walk the complex while multiplying the group
    element; every element of the ball realized at some vertex is a lift of
    the basepoint into the subgroup's cover."""
    violation = check_local_isometry(spec, graph)
    if violation is not None:
        raise CubeSpecError(violation)
    start = (spec.basepoint, words.empty_state(graph))
    seen = {start}
    frontier = deque([start])
    members = {}
    while frontier:
        v, g = frontier.popleft()
        lvl = ball.level_of.get(g)
        if lvl is None or lvl > n_max:
            continue
        if g not in members:
            members[g] = v
        for germ, eid in spec.germs_at(v):
            e = spec.edges[eid]
            a, b = (e.src, e.dst) if e.sign > 0 else (e.dst, e.src)
            w = b if germ[1] > 0 else a
            h = words.apply_letters(g, graph, ((germ[0], germ[1]),))
            state = (w, h)
            if state not in seen:
                seen.add(state)
                frontier.append(state)
    levels = [[] for _ in range(n_max + 1)]
    for g in members:
        levels[ball.level_of[g]].append(g)
    for lvl in levels:
        lvl.sort(key=lambda s: words.nf_key(ball.nf(s)))
    return LiftSet(levels=levels, members=set(members), witness=members)


class PrunedTiling:
    """View of a tiling where tiles over unlifted elements count as ideal."""

    def __init__(self, base, lifted):
        self.base = base
        self.level = base.level
        self.graph = base.graph
        self._keep = {t.id for t in base.tiles
                      if not t.ideal and t.owner in lifted}

    @property
    def tiles(self):
        return self.base.tiles

    @property
    def by_id(self):
        return self.base.by_id

    @property
    def instances(self):
        return [i for i in self.base.instances
                if i.tile1 in self._keep and i.tile2 in self._keep]

    def nonideal(self):
        return [t for t in self.base.tiles if t.id in self._keep]

    def ideal_tiles(self):
        return [t for t in self.base.tiles if t.id not in self._keep]

    def neighbors(self, tid):
        return [(o, lab) for o, lab in self.base.neighbors(tid)
                if o in self._keep]


@dataclass
class PruneResult:
    history: HistoryGraph
    tilings: list
    rule: SubdivisionRule
    lift_sizes: list
    tile_counts: list
    containment: dict
    star_convex: bool


def prune_history(tilings, lifts: LiftSet, ball: Ball,
                  ambient_rule: SubdivisionRule | None = None) -> PruneResult:
    """Re-flag tiles over unlifted elements as ideal and re-extract the rule.

    Aborts when the lift set is not closed under the ball's predecessor map
    (an ideal tile would subdivide into a non-ideal one)."""
    for n in range(1, len(lifts.levels)):
        for g in lifts.levels[n]:
            if ball.pred[g] not in lifts.members:
                raise StarConvexityViolation(ball.nf_string(g))
    pruned = [PrunedTiling(t, lifts.members) for t in tilings]
    keep = lambda tile: (not tile.ideal) and tile.owner in lifts.members
    rule = extract_rule(tilings, keep=keep)
    history = HistoryGraph(pruned)
    containment = {"mapping": {}, "injective": True, "children_consistent": True}
    if ambient_rule is not None:
        mapping = {}
        consistent = True
        for t in tilings:
            for tile in t.nonideal():
                if tile.owner not in lifts.members:
                    continue
                p = rule.type_of.get(tile.id)
                a = ambient_rule.type_of.get(tile.id)
                if p is None or a is None:
                    continue
                if p in mapping and mapping[p] != a:
                    consistent = False
                mapping[p] = a
        injective = len(set(mapping.values())) == len(mapping)
        containment = {"mapping": dict(sorted(mapping.items())),
                       "injective": injective and consistent,
                       "children_consistent": rule.stable}
    return PruneResult(history=history, tilings=pruned, rule=rule,
                       lift_sizes=lifts.level_sizes(),
                       tile_counts=[len(t.nonideal()) for t in pruned],
                       containment=containment,
                       star_convex=True)


# ---------------------------------------------------------------------------
# bounded-depth cone types


def cone_types(history: HistoryGraph, k: int):
    """Partition of history-graph vertices by the isomorphism signature of
    their depth-k descendant-and-horizontal neighbourhood.

    This is a lower-bound approximation of the true cone types: signatures
    are computed by iterated colour refinement on the induced subgraph, and
    only vertices with k full levels below them are classified."""
    levels = len(history.tilings)
    max_classified = levels - 1 - k
    results = {}

    def cone_signature(root, root_level):
        nodes = {root: 0}
        frontier = [root]
        for step in range(k):
            nxt = []
            for u in frontier:
                for c in history.children.get(u, ()):
                    if c not in nodes:
                        nodes[c] = step + 1
                        nxt.append(c)
            frontier = nxt
        edges = defaultdict(set)
        for u in nodes:
            for c in history.children.get(u, ()):
                if c in nodes:
                    edges[u].add(("v", c))
                    edges[c].add(("v^", u))
            if u != ROOT_ID:
                for o in history.horizontal_neighbors(u):
                    if o in nodes:
                        edges[u].add(("h", o))
        color = {u: ("L", lvl) for u, lvl in nodes.items()}
        for _ in range(len(nodes)):
            nxt = {u: (color[u], tuple(sorted((lab, color[v]) for lab, v in edges[u])))
                   for u in nodes}
            if len(set(nxt.values())) == len(set(color.values())):
                color = nxt
                break
            color = nxt
        return (color[root], tuple(sorted(Counter(color.values()).items())))

    by_level = defaultdict(dict)
    if -1 + k <= levels - 1:
        sig = cone_signature(ROOT_ID, -1)
        by_level[-1][sig] = 1
    for lvl in range(0, max_classified + 1):
        counts = Counter()
        for tile in history.level_tiles(lvl):
            counts[cone_signature(tile.id, lvl)] += 1
        by_level[lvl] = dict(counts)
    class_counts = {lvl: len(sigs) for lvl, sigs in sorted(by_level.items())}
    all_sigs = set()
    for sigs in by_level.values():
        all_sigs |= set(sigs)
    stab_levels = [lvl for lvl in class_counts if lvl >= 0]
    stabilized = (len(stab_levels) >= 2 and
                  class_counts[stab_levels[-1]] == class_counts[stab_levels[-2]])
    return {"classes_per_level": class_counts,
            "total_classes": len(all_sigs),
            "stabilized": stabilized,
            "depth": k}
