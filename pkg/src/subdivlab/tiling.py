"""Tiles, tilings, the history graph, empirical rule extraction and the
inflation-based subdivision descriptor.

The level-n tiling is the flat structure of the sphere one step further out:
every element g of level n+1 contributes one tile per connected component of
its visible region, and every truncation face of a domain already inside the
ball persists as an ideal tile.  Two non-ideal tiles are adjacent when their
regions share an exposed cell lying in exactly two domains of the ball; the
edge is labelled by how the tiles' covered cells relate (same codimension,
or nested with codimension difference one).

Rule extraction refines the initial partition (covered clique, region shape)
by child-type multisets and by the adjacency structure *among* the children,
until the partition is stable across the observed levels.  Within-level
neighbour degrees are deliberately not used: they vary with the position of
a tile in the sphere, while the subdivision behaviour does not.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from . import words
from .balls import Ball, Region, visible_region
from .graphs import (Cell, DefiningGraph, cell_str, diagonal_elements,
                     ideal_facets, join_cells, support)


@dataclass
class Tile:
    id: str
    level: int
    owner: tuple
    owner_nf: str
    comp: int
    cells: tuple = ()
    attached_ideal: tuple = ()
    ideal: bool = False
    ideal_facet: Cell | None = None
    covered_move: Cell | None = None
    covered_clique: tuple | None = None
    parent_id: str | None = None

    def shape(self):
        return (tuple(sorted(len(c) for c in self.cells)), len(self.attached_ideal))


@dataclass
class AdjacencyInstance:
    tile1: str
    tile2: str
    label: str            # "flat" (same codim) or "containment"
    shared_cell: tuple     # canonical (owner nf string, signs) of the shared cell


class Tiling:
    def __init__(self, level, graph):
        self.level = level
        self.graph = graph
        self.tiles = []
        self.by_id = {}
        self.adjacency = defaultdict(set)   # id -> {(other_id, label)}
        self.instances = []
        self.comp_of_cell = {}              # (owner, cell) -> comp index
        self.containing_tile = {}           # (owner, ideal facet) -> tile id

    def add(self, tile):
        self.tiles.append(tile)
        self.by_id[tile.id] = tile

    def nonideal(self):
        return [t for t in self.tiles if not t.ideal]

    def ideal_tiles(self):
        return [t for t in self.tiles if t.ideal]

    def add_edge(self, a, b, label, shared):
        if a == b:
            return
        self.adjacency[a].add((b, label))
        self.adjacency[b].add((a, label))
        self.instances.append(AdjacencyInstance(*sorted((a, b)), label=label,
                                                shared_cell=shared))

    def neighbors(self, tid):
        return sorted(self.adjacency.get(tid, ()))


def _nonideal_id(level, owner_nf, comp):
    return "t%d|%s|%d" % (level, owner_nf, comp)


def _ideal_id(graph, owner_nf, facet):
    return "i|%s|%s" % (owner_nf, cell_str(graph, facet))


def build_tiling(ball: Ball, n: int, prev: Tiling | None = None) -> Tiling:
    """Tiling at level n (the flat structure of the sphere of radius n+1)."""
    if ball.N < n + 2:
        raise ValueError("ball too shallow: need level %d, have %d" % (n + 2, ball.N))
    graph = ball.graph
    tiling = Tiling(n, graph)

    owners = ball.levels[n + 1]
    regions_of = {}
    for g in owners:
        regions = visible_region(ball, n + 1, g)
        regions_of[g] = regions
        g_nf = ball.nf_string(g)
        pred = ball.pred[g]
        move = ball.pred_move[g]
        parent_id = None
        if prev is not None:
            comp = prev.comp_of_cell.get((pred, move))
            assert comp is not None, "covered cell missing from parent tiling"
            parent_id = _nonideal_id(n - 1, ball.nf_string(pred), comp)
        for r in regions:
            tid = _nonideal_id(n, g_nf, r.index)
            tile = Tile(id=tid, level=n, owner=g, owner_nf=g_nf, comp=r.index,
                        cells=r.cells, attached_ideal=r.attached_ideal,
                        covered_move=move, covered_clique=support(move),
                        parent_id=parent_id)
            tiling.add(tile)
            for c in r.cells:
                tiling.comp_of_cell[(g, c)] = r.index
            for f in r.attached_ideal:
                tiling.containing_tile[(g, f)] = tid

    # ideal tiles: truncation faces of every domain in the ball, except the
    # ones still glued into their owner's fresh region
    facets = ideal_facets(graph)
    if facets:
        for lvl in range(n + 2):
            for g in ball.levels[lvl]:
                g_nf = ball.nf_string(g)
                for f in facets:
                    if lvl == n + 1 and (g, f) in tiling.containing_tile:
                        continue
                    tid = _ideal_id(graph, g_nf, f)
                    parent_id = None
                    if prev is not None:
                        parent_id = prev.containing_tile.get((g, f))
                        if parent_id is None and lvl == n + 1:
                            # born unattached: sits inside the subdivision of
                            # the owner's parent tile
                            comp = prev.comp_of_cell.get(
                                (ball.pred[g], ball.pred_move[g]))
                            if comp is not None:
                                parent_id = _nonideal_id(
                                    n - 1, ball.nf_string(ball.pred[g]), comp)
                    tile = Tile(id=tid, level=n, owner=g, owner_nf=g_nf,
                                comp=0, ideal=True, ideal_facet=f,
                                parent_id=parent_id)
                    tiling.add(tile)
                    tiling.containing_tile[(g, f)] = tid

    _compute_adjacency(ball, n, tiling)
    return tiling


def _compute_adjacency(ball: Ball, n: int, tiling: Tiling):
    """Edges from exposed cells lying in exactly two domains of B(n+1)."""
    graph = ball.graph
    for g in ball.levels[n + 1]:
        g_key = words.nf_key(ball.nf(g))
        for cell in ball.moves:
            if len(cell) < 2:
                continue
            count, inside = ball.cell_membership(g, cell, n + 1)
            if count != 2:
                continue
            s0 = next(c for c in inside if c)
            h = ball.apply(g, s0)
            assert ball.level_of.get(h) == n + 1
            if words.nf_key(ball.nf(h)) < g_key:
                continue  # processed from the other side
            flipped = frozenset(s0)
            cell_h = tuple(sorted((i, -s if (i, s) in flipped else s)
                                  for i, s in cell))
            sides = []
            for owner, ocell, s0o in ((g, cell, s0),
                                      (h, cell_h, words.inverse_cell(s0))):
                for drop in s0o:
                    u = tuple(p for p in ocell if p[0] != drop[0])
                    if not u:
                        continue
                    comp = tiling.comp_of_cell.get((owner, u))
                    if comp is not None:
                        sides.append(_nonideal_id(n, ball.nf_string(owner), comp))
            label = _edge_label(ball, g, h)
            rep_owner, rep_signs = ball.canonical_rep(g, cell)
            shared = (ball.nf_string(rep_owner), rep_signs)
            for a, b in combinations(sorted(set(sides)), 2):
                tiling.add_edge(a, b, label, shared)


def _edge_label(ball: Ball, g, h) -> str:
    kg = len(ball.pred_move[g])
    kh = len(ball.pred_move[h])
    if kg == kh:
        return "flat"
    if abs(kg - kh) == 1:
        return "containment"
    return "other"


def build_tilings(ball: Ball, count: int):
    """Tilings for levels 0..count-1 with parent links chained."""
    out = []
    prev = None
    for n in range(count):
        t = build_tiling(ball, n, prev)
        out.append(t)
        prev = t
    return out


# ---------------------------------------------------------------------------
# history graph


ROOT_ID = "origin"


class HistoryGraph:
    """Dual graphs of all levels plus vertical subdivision edges.

    Vertices are the non-ideal tiles; an origin vertex for the base complex
    is kept separately (it is the parent of every level-0 tile and carries
    the identity element) and is excluded from tile-count identities.
    """

    def __init__(self, tilings):
        self.tilings = list(tilings)
        self.children = defaultdict(list)
        self.vertices = []
        for t in self.tilings:
            for tile in t.nonideal():
                self.vertices.append(tile.id)
                parent = tile.parent_id if tile.level > 0 else ROOT_ID
                self.children[parent].append(tile.id)
        self.tile_index = {}
        for t in self.tilings:
            self.tile_index.update(t.by_id)

    def vertex_count(self):
        return len(self.vertices)

    def level_tiles(self, n):
        return self.tilings[n].nonideal()

    def horizontal_neighbors(self, tid):
        tile = self.tile_index[tid]
        return [o for o, _ in self.tilings[tile.level].neighbors(tid)
                if not self.tile_index[o].ideal]


def build_history(tilings) -> HistoryGraph:
    return HistoryGraph(tilings)


# ---------------------------------------------------------------------------
# rule extraction


@dataclass
class RuleType:
    name: str
    clique: tuple
    shape: tuple
    children: Counter
    internal: Counter
    count: int
    example: str
    coalesced: str = ""


@dataclass
class SubdivisionRule:
    graph: DefiningGraph
    types: list
    type_of: dict              # tile id -> refined type name
    coalesced_of: dict         # refined type name -> coalesced name
    coalesced_children: dict   # coalesced name -> Counter
    stable: bool
    unstable_detail: list
    ideal_type_count: int
    interface_classes: dict    # see mesh certificate
    single_child_types: list
    split_report: dict         # initial class -> number of refined types

    def counts_by_type(self, tiles):
        c = Counter()
        for t in tiles:
            c[self.type_of[t.id]] += 1
        return c

    def replay(self, counts0: Counter, steps: int):
        """Iterate the child multisets; returns per-level total counts."""
        children = {t.name: t.children for t in self.types}
        cur = Counter(counts0)
        totals = [sum(cur.values())]
        for _ in range(steps):
            nxt = Counter()
            for name, k in cur.items():
                for ch, m in children[name].items():
                    nxt[ch] += k * m
            cur = nxt
            totals.append(sum(cur.values()))
        return totals

    def coalesced_names(self):
        return sorted(set(self.coalesced_of.values()))


class RefinementUnstable(RuntimeError):
    pass


def _raw_key(tile):
    return ("raw", tile.covered_clique, tile.shape())


def extract_rule(tilings, keep=None, require_stable=False) -> SubdivisionRule:
    """Partition-refinement extraction of the subdivision rule.

    `keep` filters the tiles considered non-ideal (used by pruning); it
    defaults to the tiles' own ideal flags.
    """
    if len(tilings) < 3:
        raise ValueError("need at least 3 consecutive levels")
    graph = tilings[0].graph
    if keep is None:
        keep = lambda tile: not tile.ideal

    tiles = {}
    for t in tilings:
        for tile in t.tiles:
            if not tile.ideal and keep(tile):
                tiles[tile.id] = tile
    deepest = len(tilings) - 1

    kids = defaultdict(list)
    for tile in tiles.values():
        if tile.level > 0 and tile.parent_id in tiles:
            kids[tile.parent_id].append(tile.id)

    internal_pairs = defaultdict(list)  # parent id -> [(child1, child2, label)]
    for t in tilings[1:]:
        for inst in t.instances:
            a, b = inst.tile1, inst.tile2
            if a in tiles and b in tiles:
                pa, pb = tiles[a].parent_id, tiles[b].parent_id
                if pa is not None and pa == pb and pa in tiles:
                    internal_pairs[pa].append((a, b, inst.label))

    # depth-limited signatures
    sig = [{tid: _raw_key(tile) for tid, tile in tiles.items()}]

    def refine_once(prev_sig):
        nxt = {}
        for tid, tile in tiles.items():
            if tile.level < deepest:
                ch = tuple(sorted(prev_sig[c] for c in kids[tid]))
                internal = tuple(sorted(
                    (tuple(sorted((prev_sig[a], prev_sig[b]))), lab)
                    for a, b, lab in internal_pairs[tid]))
                nxt[tid] = (prev_sig[tid], ch, internal)
            else:
                nxt[tid] = prev_sig[tid]
        return nxt

    def partition_on(signature, universe):
        blocks = defaultdict(frozenset)
        groups = defaultdict(list)
        for tid in universe:
            groups[signature[tid]].append(tid)
        return frozenset(frozenset(v) for v in groups.values())

    stable = False
    j_stable = None
    for j in range(deepest):
        sig.append(refine_once(sig[-1]))
        universe = [tid for tid, tile in tiles.items()
                    if tile.level <= deepest - (j + 1)]
        if partition_on(sig[j + 1], universe) == partition_on(sig[j], universe):
            stable = True
            j_stable = j
            break
    if j_stable is None:
        j_stable = len(sig) - 1

    # final types from the stable signature on tiles with enough depth below
    final_sig = sig[j_stable]
    core = [tid for tid, tile in tiles.items() if tile.level <= deepest - j_stable]
    classes = defaultdict(list)
    for tid in core:
        classes[final_sig[tid]].append(tid)

    unstable_detail = []
    type_of = {}
    ordered = sorted(classes.items(),
                     key=lambda kv: min((tiles[t].level, t) for t in kv[1]))
    names = {}
    for idx, (s, members) in enumerate(ordered):
        name = "T%d" % idx
        names[s] = name
        for tid in members:
            type_of[tid] = name

    # deep tiles: resolve through the deepest signature they support
    for tid, tile in sorted(tiles.items()):
        if tid in type_of:
            continue
        depth = deepest - tile.level
        cands = {type_of[u] for u in core if sig[depth][u] == sig[depth][tid]}
        if len(cands) == 1:
            type_of[tid] = cands.pop()
        else:
            unstable_detail.append(
                "tile %s unresolved among %s" % (tid, sorted(cands)))
            type_of[tid] = "T?%s" % (sorted(cands),)

    # per-type data, consistency of child multisets
    data = {}
    for tid, tile in tiles.items():
        name = type_of[tid]
        rec = data.setdefault(name, {"clique": tile.covered_clique,
                                     "shape": tile.shape(), "count": 0,
                                     "children": None, "internal": None,
                                     "example": tid})
        rec["count"] += 1
        if tile.level < deepest:
            ch = Counter(type_of[c] for c in kids[tid])
            internal = Counter((tuple(sorted((type_of[a], type_of[b]))), lab)
                               for a, b, lab in internal_pairs[tid])
            if rec["children"] is None:
                rec["children"] = ch
                rec["internal"] = internal
            elif rec["children"] != ch or rec["internal"] != internal:
                unstable_detail.append(
                    "type %s has inconsistent subdivisions (%s vs %s)"
                    % (name, dict(rec["children"]), dict(ch)))
    stable = stable and not unstable_detail
    if require_stable and not stable:
        raise RefinementUnstable("; ".join(unstable_detail) or "no stable depth")

    types = [RuleType(name=name, clique=rec["clique"], shape=rec["shape"],
                      children=rec["children"] or Counter(),
                      internal=rec["internal"] or Counter(),
                      count=rec["count"], example=rec["example"])
             for name, rec in sorted(data.items())]

    # coalesce across sign symmetry / graph automorphisms: start from
    # (clique size, shape) and refine by children until consistent
    co = {t.name: ("c", len(t.clique), t.shape) for t in types}
    children_by_name = {t.name: t.children for t in types}
    while True:
        nxt = {}
        for t in types:
            ch = tuple(sorted((co[c], m) for c, m in children_by_name[t.name].items()))
            nxt[t.name] = (co[t.name], ch)
        if len(set(nxt.values())) == len(set(co.values())):
            break
        co = nxt
    co_sorted = sorted(set(co.values()), key=lambda v: str(v))
    letter = {v: chr(ord("A") + i) for i, v in enumerate(co_sorted)}
    coalesced_of = {t.name: letter[co[t.name]] for t in types}
    for t in types:
        t.coalesced = coalesced_of[t.name]

    coalesced_children = {}
    coalesce_ok = True
    for t in types:
        cc = Counter()
        for c, m in t.children.items():
            cc[coalesced_of[c]] += m
        prev = coalesced_children.setdefault(t.coalesced, cc)
        if prev != cc and t.children:
            coalesce_ok = False
    if not coalesce_ok:
        unstable_detail.append("coalesced classes have inconsistent children")

    split_report = {}
    for t in types:
        key = "clique=%s shape=%s" % (
            "".join(graph.generators[i] for i in t.clique), t.shape)
        split_report[key] = split_report.get(key, 0) + 1

    interface_classes = _interface_classes(tilings, tiles, type_of)

    single_child = sorted(t.name for t in types
                          if sum(t.children.values()) == 1)

    return SubdivisionRule(
        graph=graph, types=types, type_of=type_of,
        coalesced_of=coalesced_of, coalesced_children=coalesced_children,
        stable=stable, unstable_detail=unstable_detail,
        ideal_type_count=len(ideal_facets(graph)),
        interface_classes=interface_classes,
        single_child_types=single_child,
        split_report=split_report)


def _interface_classes(tilings, tiles, type_of):
    """Interface persistence data for the mesh certificate.

    The interface between two tiles continues, at the next level, as the
    adjacency instances between their respective children.  Every observed
    continuation is recorded: this over-approximates true ridge persistence
    (an interface may split into several arcs), so acyclicity of the
    resulting digraph still soundly certifies that every crossing is
    eventually subdivided away.
    """
    def iclass(inst):
        return (tuple(sorted((type_of[inst.tile1], type_of[inst.tile2]))),
                inst.label)

    classes = {}
    for lvl in range(len(tilings) - 1):
        cur = [i for i in tilings[lvl].instances
               if i.tile1 in tiles and i.tile2 in tiles]
        nxt_by_parents = defaultdict(list)
        for i in tilings[lvl + 1].instances:
            if i.tile1 in tiles and i.tile2 in tiles:
                pa = tiles[i.tile1].parent_id
                pb = tiles[i.tile2].parent_id
                if pa != pb and pa is not None and pb is not None:
                    nxt_by_parents[tuple(sorted((pa, pb)))].append(i)
        for inst in cur:
            key = iclass(inst)
            rec = classes.setdefault(key, {"count": 0, "continuations": Counter(),
                                           "witness": (inst.tile1, inst.tile2)})
            rec["count"] += 1
            cont = nxt_by_parents.get(tuple(sorted((inst.tile1, inst.tile2))), [])
            for c in cont:
                rec["continuations"][iclass(c)] += 1
    return classes


# ---------------------------------------------------------------------------
# inflation and the per-type subdivision descriptor


@dataclass
class InflationComplex:
    facets_nonideal: list
    facets_ideal: list
    ridges: list

    def facet_count(self):
        return len(self.facets_nonideal)


def inflation(graph: DefiningGraph) -> InflationComplex:
    """One facet per non-ideal boundary cell, ideal faces unexpanded; ridges
    join facets of cells nested with codimension difference one."""
    cells = diagonal_elements(graph)
    cellset = set(cells)
    ridges = []
    for w in cells:
        if len(w) < 2:
            continue
        for drop in w:
            v = tuple(p for p in w if p != drop)
            if v in cellset:
                ridges.append((w, v))
    return InflationComplex(facets_nonideal=list(cells),
                            facets_ideal=ideal_facets(graph),
                            ridges=sorted(ridges))


@dataclass
class Descriptor:
    sigma: Cell
    children: list    # cells of the subdivision (the surviving complement)
    collapsed: list   # would-be candidates removed by same-round collapse

    def child_clique_counter(self):
        return Counter(support(w) for w in self.children)


def inflation_descriptor(graph: DefiningGraph, sigma: Cell) -> Descriptor:
    """Subdivision of the tile type of a non-ideal cell, read off the
    fundamental domain alone: a cell w survives into the subdivision iff
    each of its pinned generators is pinned oppositely in sigma or fails to
    commute with all of sigma's support; cells behind the gluing whose extra
    generators commute with sigma collapse during the round instead."""
    from .graphs import cell_is_ideal
    if cell_is_ideal(graph, sigma):
        raise ValueError("ideal cell has no subdivision")
    sup = support(sigma)
    sig = dict(sigma)

    def survives(w):
        for i, s in w:
            if i in sig:
                if s != -sig[i]:
                    return False
            else:
                if all(graph.commute(i, j) for j in sup):
                    return False
        return True

    children = [w for w in diagonal_elements(graph) if survives(w)]
    childset = set(children)
    collapsed = []
    anti = tuple((i, -s) for i, s in sigma)
    for w in diagonal_elements(graph):
        dw = dict(w)
        if all(dw.get(i) == s for i, s in anti) and w not in childset:
            collapsed.append(w)
    return Descriptor(sigma=sigma, children=children, collapsed=collapsed)


def descriptor_crosscheck(rule: SubdivisionRule, tilings):
    """Compare each stable type's empirical child multiset, counted by the
    covered clique, with the descriptor's prediction.  Returns a list of
    mismatch records; an empty list means full agreement."""
    graph = rule.graph
    tiles = {}
    for t in tilings:
        for tile in t.nonideal():
            tiles[tile.id] = tile
    mismatches = []
    for rt in rule.types:
        tile = tiles.get(rt.example)
        if tile is None or tile.covered_move is None:
            continue
        desc = inflation_descriptor(graph, tile.covered_move)
        expected = Counter(desc.child_clique_counter())
        # empirical children of one representative tile at a level that has
        # children in the observed window
        rep = None
        for t in tilings[:-1]:
            for cand in t.nonideal():
                if rule.type_of.get(cand.id) == rt.name:
                    rep = cand
                    break
            if rep:
                break
        if rep is None:
            continue
        child_tiles = [tiles[c.id] for c in tilings[rep.level + 1].nonideal()
                       if c.parent_id == rep.id]
        got = Counter(c.covered_clique for c in child_tiles)
        if got != expected:
            mismatches.append({
                "type": rt.name,
                "expected": {"".join(graph.generators[i] for i in k): v
                             for k, v in sorted(expected.items())},
                "observed": {"".join(graph.generators[i] for i in k): v
                             for k, v in sorted(got.items())},
            })
    return mismatches
