import pytest

from subdivlab.cubes import (CubeComplexSpec, CubeSpecError, Edge, LiftSet,
                             StarConvexityViolation, check_local_isometry,
                             cone_types, lift_basepoints, parse_cube_spec,
                             prune_history, salvetti_spec)
from subdivlab.invariants import ends, growth
from subdivlab.tiling import build_history, build_tilings, extract_rule
from subdivlab.words import empty_state
from conftest import get_ball, get_rule, get_tilings, path3, square


def loop_a_spec(graph):
    return CubeComplexSpec(graph, ["v"], [Edge("e_a", "v", "v", 0, 1)], [])


def test_local_isometry_ok_cases():
    g = square()
    assert check_local_isometry(salvetti_spec(g), g) is None
    assert check_local_isometry(loop_a_spec(g), g) is None


def test_local_isometry_fullness_violation():
    g = square()
    spec = CubeComplexSpec(g, ["v"], [Edge("e_a", "v", "v", 0, 1),
                                      Edge("e_b", "v", "v", 1, 1)], [])
    out = check_local_isometry(spec, g)
    assert out is not None and "not full" in out


def test_local_isometry_link_injectivity():
    g = square()
    spec = CubeComplexSpec(g, ["v", "w"],
                           [Edge("e1", "v", "w", 0, 1),
                            Edge("e2", "v", "w", 0, 1)], [])
    out = check_local_isometry(spec, g)
    assert out is not None and "not injective" in out


def test_malformed_square():
    g = square()
    spec = CubeComplexSpec(g, ["v"], [Edge("e_a", "v", "v", 0, 1)],
                           [[["e_a", 1], ["e_a", 1], ["e_a", -1], ["e_a", -1]]])
    out = check_local_isometry(spec, g)
    assert out is not None and "malformed" in out


def test_parse_cube_spec_errors():
    g = square()
    with pytest.raises(CubeSpecError):
        parse_cube_spec(g, {"vertices": ["v"],
                            "edges": [{"from": "v", "to": "v", "label": "q"}]})
    with pytest.raises(CubeSpecError):
        parse_cube_spec(g, {"vertices": [],
                            "edges": []})


def test_lift_loop_a():
    g = square()
    ball = get_ball("square")
    lifts = lift_basepoints(loop_a_spec(g), g, ball, 6)
    assert lifts.level_sizes() == [1, 2, 2, 2, 2, 2, 2]


def test_lift_full_salvetti_is_everything():
    g = square()
    ball = get_ball("square")
    lifts = lift_basepoints(salvetti_spec(g), g, ball, 4)
    assert lifts.level_sizes() == ball.sphere_sizes()[:5]


def test_lift_induced_subgraph_matches_sub_ball():
    p = path3()
    ball = get_ball("path3")
    lifts = lift_basepoints(salvetti_spec(p, ["a", "z"]), p, ball, 4)
    # the a-z subgroup is a rank-2 lattice: spheres 8n under diagonal moves
    assert lifts.level_sizes() == [1, 8, 16, 24, 32]


def test_prune_loop_a():
    g = square()
    ball = get_ball("square")
    ts = get_tilings("square")
    rule = get_rule("square")
    lifts = lift_basepoints(loop_a_spec(g), g, ball, ball.N)
    pr = prune_history(ts, lifts, ball, rule)
    assert pr.tile_counts == [2, 2, 2, 2]
    assert pr.tile_counts == [len(lifts.levels[n + 1]) for n in range(4)]
    assert pr.containment["injective"]
    pg = growth(pr.tilings, pr.rule)
    assert pg.classification() == ("polynomial", 0)
    pe = ends(pr.tilings)
    assert pe.verdict == 2


def test_prune_full_salvetti_is_identity():
    g = square()
    ball = get_ball("square")
    ts = get_tilings("square")
    rule = get_rule("square")
    lifts = lift_basepoints(salvetti_spec(g), g, ball, ball.N)
    pr = prune_history(ts, lifts, ball, rule)
    assert pr.tile_counts == [len(t.nonideal()) for t in ts]
    assert pr.rule.stable
    assert {t.name for t in pr.rule.types} == {t.name for t in rule.types}
    mapping = pr.containment["mapping"]
    assert all(k == v for k, v in mapping.items())


def test_prune_induced_matches_standalone():
    p = path3()
    ball = get_ball("path3")
    ts = get_tilings("path3")
    rule = get_rule("path3")
    lifts = lift_basepoints(salvetti_spec(p, ["a", "z"]), p, ball, ball.N)
    pr = prune_history(ts, lifts, ball, rule)
    standalone = [len(t.nonideal()) for t in get_tilings("square")]
    assert pr.tile_counts == standalone
    pg = growth(pr.tilings, pr.rule)
    sg = growth(get_tilings("square"), get_rule("square"))
    assert pg.counts == sg.counts
    assert pg.classification() == sg.classification()
    assert ends(pr.tilings).verdict == ends(get_tilings("square")).verdict == 1


def test_prune_star_convexity_violation():
    g = square()
    ball = get_ball("square")
    ts = get_tilings("square")
    lifts = lift_basepoints(loop_a_spec(g), g, ball, ball.N)
    # drop the level-1 elements: level-2 members lose their predecessors
    broken = LiftSet(levels=[lifts.levels[0], []] + lifts.levels[2:],
                     members=lifts.members - set(lifts.levels[1]),
                     witness=lifts.witness)
    with pytest.raises(StarConvexityViolation):
        prune_history(ts, broken, ball)


def test_cone_types_free3():
    h = build_history(get_tilings("free3", 3))
    out = cone_types(h, 1)
    assert out["total_classes"] == 2
    assert out["stabilized"]


def test_cone_types_triangle_stabilizes_at_three():
    h = build_history(get_tilings("triangle"))
    out = cone_types(h, 1)
    per_level = {lvl: n for lvl, n in out["classes_per_level"].items() if lvl >= 0}
    assert set(per_level.values()) == {3}
    assert out["stabilized"]


def test_cone_types_pruned_loop_a():
    g = square()
    ball = get_ball("square")
    ts = get_tilings("square")
    lifts = lift_basepoints(loop_a_spec(g), g, ball, ball.N)
    pr = prune_history(ts, lifts, ball)
    out = cone_types(pr.history, 1)
    assert out["total_classes"] == 2


def test_strict_mode_cube_fullness():
    from subdivlab.graphs import DefiningGraph
    tri = DefiningGraph(["a", "b", "c"], [["a", "b"], ["a", "c"], ["b", "c"]])
    full = salvetti_spec(tri)
    assert check_local_isometry(full, tri, strict=True) is None
    stripped = CubeComplexSpec(tri, full.vertices, list(full.edges.values()),
                               full.squares, cubes=[])
    out = check_local_isometry(stripped, tri, strict=True)
    assert out is not None and "cube missing" in out
    # non-strict mode does not require the 3-cubes
    assert check_local_isometry(stripped, tri) is None
