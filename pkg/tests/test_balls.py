import pytest

from subdivlab import words
from subdivlab.balls import (Ball, CapExceeded, build_ball, classify_cell,
                             convex_cells, ideal_cell_membership, load_levels,
                             save_levels, visible_region)
from subdivlab.graphs import DefiningGraph
from subdivlab.oracles import (f2xz_sphere_sizes, free_sphere_sizes,
                               lattice_sphere_sizes, lattice_sphere_sizes_bfs,
                               oracle_sphere_sizes)
from subdivlab.words import parse_word, state_of_word
from conftest import get_ball, path3, single, triangle


def el(graph, ball, text):
    return state_of_word(graph, parse_word(graph, text))


def test_lattice_oracle_closed_form_matches_bfs():
    for d in (1, 2, 3):
        assert lattice_sphere_sizes(d, 3) == lattice_sphere_sizes_bfs(d, 3)


def test_level_sizes_match_oracles():
    assert get_ball("triangle").sphere_sizes()[:5] == lattice_sphere_sizes(3, 4)
    assert get_ball("free3").sphere_sizes()[:5] == free_sphere_sizes(3, 4)
    assert get_ball("path3").sphere_sizes()[:5] == f2xz_sphere_sizes(4)
    assert get_ball("single").sphere_sizes()[:5] == lattice_sphere_sizes(1, 4)
    assert get_ball("square").sphere_sizes()[:5] == lattice_sphere_sizes(2, 4)


def test_smaller_families_against_oracles():
    for d in (1, 2):
        names = [chr(ord("a") + i) for i in range(d)]
        free = DefiningGraph(names, [])
        assert build_ball(free, 4).sphere_sizes() == free_sphere_sizes(d, 4)


def test_path3_frozen_values():
    # frozen from the coordinate-pair oracle
    assert f2xz_sphere_sizes(4) == [1, 14, 70, 286, 1078]
    assert get_ball("path3").sphere_sizes()[:5] == [1, 14, 70, 286, 1078]


def test_predecessor_levels_and_cover():
    ball = get_ball("path3")
    for n in range(1, 5):
        for g in ball.levels[n][:50]:
            assert ball.level_of[ball.pred[g]] == n - 1
            t = ball.pred_move[g]
            assert ball.apply(ball.pred[g], t) == g
    assert ball.multi_cover == 0


def test_word_predecessor_mismatches_detected():
    ball = get_ball("path3")
    # elements like a z^2 b have a normal-form predecessor at the same level
    assert ball.word_pred_mismatches > 0
    g = path3()
    nf = words.normalize(g, parse_word(g, "a z^2 b"))
    state = words.state_of_nf(g, nf)
    assert ball.level_of[state] == 2
    hhat = words.predecessor(g, nf)
    assert ball.level_of[words.state_of_nf(g, hhat)] == 2  # not one lower
    assert get_ball("triangle").word_pred_mismatches == 0
    assert get_ball("free3").word_pred_mismatches == 0


def test_classify_cell_examples():
    g = path3()
    ball = get_ball("path3")
    a = el(g, ball, "a")
    assert classify_cell(ball, 1, a, ((0, 1), (1, 1))) == "flat"
    tri = triangle()
    tball = get_ball("triangle")
    e = words.empty_state(tri)
    for cell in [((0, 1), (1, 1)), ((0, -1), (2, 1)), ((1, 1), (2, -1))]:
        assert classify_cell(tball, 0, e, cell) == "convex"
    assert classify_cell(tball, 1, e, ((0, 1), (1, 1))) == "covered"
    # ideal cells report ideal
    assert classify_cell(ball, 1, a, ((0, 1), (2, 1))) == "ideal"
    assert ideal_cell_membership(ball, 1, a, ((0, 1), (2, 1))) >= 1


def test_classify_concave():
    # three of four domains: visible from the remaining one's side
    tball = get_ball("triangle")
    tri = triangle()
    e = words.empty_state(tri)
    # against B(1) \ {ab}: emulate by checking a fresh two-level ball's
    # staged notion: the identity cube's ridge at level 1 is covered, so use
    # an off-center owner instead
    g = el(tri, tball, "a b")
    # (a-) x (b-) cell of ab touches e, a, b, ab: all in B(1) -> covered
    assert classify_cell(tball, 1, g, ((0, -1), (1, -1))) == "covered"
    # (a+)(b+) of a touches a, a^2, ab, a^2 b: two inside -> flat
    assert classify_cell(tball, 1, el(tri, tball, "a"), ((0, 1), (1, 1))) == "flat"
    # at level 0 only e is inside: that same cell of e is convex
    assert classify_cell(tball, 0, e, ((0, 1), (1, 1))) == "convex"
    # three inside: cell (a+,b+) of e against B(1) minus nothing has all 4;
    # instead take (a+,b+) of e at the moment ab is still outside: B(1) of a
    # sparser graph
    p = path3()
    pball = get_ball("path3")
    # ridge (a+,z+) of e: domains e, a, z, az all in B(1) -> covered
    assert classify_cell(pball, 1, words.empty_state(p), ((0, 1), (1, 1))) == "covered"


def test_convex_cells_counts():
    tball = get_ball("triangle")
    assert len(convex_cells(tball, 0)) == 26
    assert len(convex_cells(tball, 1)) == 98
    by_codim = {}
    for bc in convex_cells(tball, 1):
        by_codim[len(bc.cell)] = by_codim.get(len(bc.cell), 0) + 1
    assert by_codim == {1: 54, 2: 36, 3: 8}  # 6(2n+1)^2, 12(2n+1), 8 at n=1
    fball = get_ball("free3")
    cells = convex_cells(fball, 0)
    assert len(cells) == 6 and all(len(c.cell) == 1 for c in cells)


def test_visible_region_examples():
    p = path3()
    ball = get_ball("path3")
    regs = visible_region(ball, 1, el(p, ball, "z"))
    assert len(regs) == 1 and regs[0].cells == (((1, 1),),)
    regs = visible_region(ball, 1, el(p, ball, "a z"))
    assert len(regs) == 1
    cells = set(regs[0].cells)
    a, z, b = 0, 1, 2
    expected = [((a, 1),), ((b, 1),), ((b, -1),), ((z, 1),),
                ((a, 1), (z, 1)), ((z, 1), (b, 1)), ((z, 1), (b, -1))]
    assert cells == {tuple(sorted(c)) for c in expected}
    tri = triangle()
    tball = get_ball("triangle")
    regs = visible_region(tball, 1, el(tri, tball, "a b c"))
    assert len(regs) == 1
    profile = regs[0].codim_profile()
    assert profile == (1, 1, 1, 2, 2, 2, 3)


def test_visible_region_components_are_linked_by_truncation_faces():
    p = path3()
    ball = get_ball("path3")
    regs = visible_region(ball, 1, el(p, ball, "a"))
    # facets a+, b+, b- only meet through the owner's truncation faces
    assert len(regs) == 1
    assert regs[0].codim_profile() == (1, 1, 1)
    assert len(regs[0].attached_ideal) == 4


def test_covering_map_is_onto_next_level():
    ball = get_ball("path3")
    for n in range(0, 3):
        covered = {ball.apply(bc.owner, bc.cell) for bc in convex_cells(ball, n)}
        assert covered == set(ball.levels[n + 1])


def test_canonical_rep_consistency():
    ball = get_ball("triangle")
    tri = triangle()
    g = el(tri, ball, "a")
    cell = ((0, 1), (1, 1))
    rep_owner, rep_signs = ball.canonical_rep(g, cell)
    # the canonical representative denotes the same geometric cell: same
    # domain set
    def domains(owner, c):
        return frozenset(ball.apply(owner, combo)
                         for combo in __import__("itertools").chain.from_iterable(
            __import__("itertools").combinations(c, r) for r in range(len(c) + 1)))
    assert domains(g, cell) == domains(rep_owner, rep_signs)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        build_ball(triangle(), 3, cap=20)


def test_level_cache_roundtrip_and_extension(tmp_path):
    g = path3()
    cache = str(tmp_path / "cache")
    b1 = build_ball(g, 3, cache_dir=cache)
    b2 = build_ball(g, 3, cache_dir=cache)   # warm load
    assert b1.sphere_sizes() == b2.sphere_sizes()
    assert [list(l) for l in b1.levels] == [list(l) for l in b2.levels]
    assert b1.pred == b2.pred
    b3 = build_ball(g, 4, cache_dir=cache)   # extend past the cache
    assert b3.sphere_sizes()[:4] == b1.sphere_sizes()
    assert b3.sphere_sizes() == [1, 14, 70, 286, 1078]
