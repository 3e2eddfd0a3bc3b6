from fractions import Fraction

import pytest

from subdivlab.invariants import (classify_counts, divergence_diameter, ends,
                                  growth, mesh_certificate, minimal_recurrence,
                                  polynomial_degree,
                                  spectral_radius_exceeds_one)
from conftest import get_ball, get_rule, get_tilings


def test_minimal_recurrence():
    assert minimal_recurrence([1, 5, 25, 125, 625]) == [Fraction(5)]
    # second differences constant: order-3 recurrence 3,-3,1
    seq = [24 * n * n + 2 for n in range(1, 8)]
    rec = minimal_recurrence(seq)
    assert rec == [Fraction(3), Fraction(-3), Fraction(1)]
    fib = [1, 1, 2, 3, 5, 8, 13, 21]
    assert minimal_recurrence(fib) == [Fraction(1), Fraction(1)]


def test_polynomial_degree():
    assert polynomial_degree([2, 2, 2, 2]) == 0
    assert polynomial_degree([26, 98, 218, 386]) == 2
    assert polynomial_degree([6, 30, 150]) is None


def test_classify_counts_dichotomy():
    assert classify_counts([26, 98, 218, 386, 602]) == ("polynomial", 2)
    assert classify_counts([6, 30, 150, 750]) == ("exponential", 5)
    assert classify_counts([2, 2, 2, 2]) == ("polynomial", 0)
    # F2 x Z sphere counts: exponential with rate 3 (a short window only
    # bounds it from above by successive ratios)
    kind, ratio = classify_counts([14, 70, 286, 1078, 3886])
    assert kind == "exponential" and ratio is not None and float(ratio) > 1


def test_spectral_radius_test():
    assert not spectral_radius_exceeds_one({"A": {"A": 1}})
    assert spectral_radius_exceeds_one({"A": {"A": 5}})
    assert not spectral_radius_exceeds_one(
        {"A": {"A": 1}, "B": {"A": 2, "B": 1}, "C": {"A": 3, "B": 3, "C": 1}})
    assert spectral_radius_exceeds_one({"A": {"B": 1}, "B": {"A": 1, "B": 1}})


def test_growth_reports():
    g = growth(get_tilings("triangle"), get_rule("triangle"))
    assert g.classification() == ("polynomial", 2)
    assert g.counts == [26, 98, 218, 386]
    g = growth(get_tilings("free3"), get_rule("free3"))
    assert g.classification() == ("exponential", 5)
    assert g.counts == [6, 30, 150, 750]
    g = growth(get_tilings("single"), get_rule("single"))
    assert g.classification() == ("polynomial", 0)
    assert g.counts == [2, 2, 2, 2]
    g = growth(get_tilings("path3"), get_rule("path3"))
    assert g.kind == "exponential"
    g = growth(get_tilings("edge_plus_vertex"), get_rule("edge_plus_vertex"))
    assert g.kind == "exponential"


def test_growth_counts_match_spheres():
    for name in ("triangle", "path3", "free3", "edge_plus_vertex"):
        ball = get_ball(name)
        g = growth(get_tilings(name), get_rule(name))
        assert g.counts == ball.sphere_sizes()[1:len(g.counts) + 1]


def test_growth_underdetermined():
    with pytest.raises(ValueError):
        growth(get_tilings("triangle", 3))


def test_ends_verdicts():
    assert ends(get_tilings("triangle")).verdict == 1
    assert ends(get_tilings("path3")).verdict == 1
    assert ends(get_tilings("single")).verdict == 2
    f = ends(get_tilings("free3"))
    assert f.verdict == "unbounded" and f.counts == [6, 30, 150, 750]
    assert ends(get_tilings("edge_plus_vertex")).verdict == "unbounded"
    assert ends(get_tilings("square")).verdict == 1


def test_mesh_certificates():
    assert mesh_certificate(get_rule("free3")).certified
    m = mesh_certificate(get_rule("triangle"))
    assert not m.certified and m.orbit
    m = mesh_certificate(get_rule("single"))
    assert not m.certified
    assert not mesh_certificate(get_rule("path3")).certified
    assert not mesh_certificate(get_rule("edge_plus_vertex")).certified


def test_divergence_triangle_linear():
    d = divergence_diameter(get_tilings("triangle"))
    assert d.verdict == "linear"
    assert d.diameters == [6, 12, 18, 24]
    assert d.mode == "exact"
    lin, exp = d.fit["linear"], d.fit["exponential"]
    assert lin["sse"] <= 0.1 * exp["sse"]


def test_divergence_path3_linear():
    d = divergence_diameter(get_tilings("path3"))
    assert d.verdict == "linear"
    assert all(x != "inf" for x in d.diameters)


def test_divergence_free3_disconnected():
    d = divergence_diameter(get_tilings("free3"))
    assert d.verdict == "disconnected"
    assert all(x == "inf" for x in d.diameters)


def test_divergence_witness_paths_are_valid():
    ts = get_tilings("triangle")
    d = divergence_diameter(ts)
    for lvl, wit in enumerate(d.witnesses):
        assert wit is not None
        src, dst, path = wit
        assert path[0] == src and path[-1] == dst
        assert len(path) - 1 == d.diameters[lvl]
        t = ts[lvl]
        for a, b in zip(path, path[1:]):
            assert any(o == b for o, _ in t.neighbors(a))


def test_divergence_double_sweep_is_lower_bound():
    ts = get_tilings("triangle")
    exact = divergence_diameter(ts)
    sweep = divergence_diameter(ts, mode="double-sweep", exact_limit=0)
    assert sweep.mode == "lower-bound"
    for a, b in zip(sweep.diameters, exact.diameters):
        assert a <= b
