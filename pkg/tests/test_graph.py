from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eslab.errors import BadOrder, ExceedsCap, NotAnAntichain, SizeLimitExceeded
from eslab.gen import GenParams, SplitMix64, fixture, gen_random
from eslab.graph import (
    OrthoGraph,
    chordal_elimination,
    chromatic_exact,
    clique_number,
    color_chordal,
    degree,
    dsatur_greedy,
    exact_limit,
    greedy_color,
    is_perfect_elimination_order,
    max_clique,
    ortho_graph,
    straight_cycles,
)

import oracles


def random_graph(rng, n, p):
    vs = [f"v{i}" for i in range(n)]
    edges = [(a, b) for a, b in combinations(vs, 2) if rng.random() < p]
    return OrthoGraph.from_edges(vs, edges), vs, edges


def test_ortho_graph_examples(S):
    assert ortho_graph(fixture("CHAIN3")).num_edges() == 0
    anti = ortho_graph(fixture("ANTI3"))
    assert anti.num_edges() == 3
    g = ortho_graph(S)
    assert len(g) == 9
    for a, b in [("3", "5"), ("6", "7"), ("8", "9"), ("4", "6"), ("4", "7"),
                 ("4", "8"), ("4", "9"), ("1", "2"), ("3", "4"), ("4", "5")]:
        assert g.has_edge(a, b)
    assert set(g.edges()) == oracles.rel_of(S).ortho_edges()


def test_degree_examples(S):
    assert degree(fixture("CHAIN3")) == 1
    assert degree(fixture("EMPTY")) == 0
    assert degree(fixture("ANTI3")) == 3
    assert degree(S) == 3
    assert set(max_clique(ortho_graph(S))) in [{"4", "6", "7"}, {"4", "8", "9"}, {"3", "4", "5"}]


def test_chromatic_examples(S):
    k3 = OrthoGraph.from_edges("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    k, col = chromatic_exact(k3, 8)
    assert k == 3 and col.is_proper(k3)
    k, col = chromatic_exact(ortho_graph(S), 8)
    assert k == 4 and col.is_proper(ortho_graph(S))
    edgeless = OrthoGraph.from_edges("abcde", [])
    k, col = chromatic_exact(edgeless, 8)
    assert k == 1 and set(col.assignment.values()) == {0}
    assert chromatic_exact(OrthoGraph.from_edges([], []), 1)[0] == 0


def test_exceeds_cap_carries_best(S):
    with pytest.raises(ExceedsCap) as info:
        chromatic_exact(ortho_graph(S), 3)
    best = info.value.best
    assert best.num_colors == 4 and best.is_proper(ortho_graph(S))


def test_size_limit(monkeypatch):
    g = OrthoGraph.from_edges([f"v{i}" for i in range(5)], [])
    with pytest.raises(SizeLimitExceeded):
        chromatic_exact(g, 3, limit=4)
    monkeypatch.setenv("ESLAB_EXACT_LIMIT", "4")
    assert exact_limit() == 4
    with pytest.raises(SizeLimitExceeded):
        chromatic_exact(g, 3)
    monkeypatch.delenv("ESLAB_EXACT_LIMIT")
    assert exact_limit() == 64
    with pytest.raises(ValueError):
        chromatic_exact(g, 0)


def test_chromatic_matches_enumeration():
    rng = SplitMix64(2024)
    for _ in range(150):
        n = rng.below(9)
        g, vs, edges = random_graph(rng, n, rng.random())
        k, col = chromatic_exact(g, 16)
        assert k == oracles.chromatic_number(vs, edges)
        assert col.is_proper(g) and len(set(col.assignment.values())) == k
        assert clique_number(g) == oracles.clique_number(vs, edges)


def test_greedy_color():
    k3 = OrthoGraph.from_edges("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert greedy_color(k3, "cab").num_colors == 3
    assert greedy_color(OrthoGraph.from_edges("ab", []), "ab").num_colors == 1
    with pytest.raises(BadOrder):
        greedy_color(k3, "ab")
    with pytest.raises(BadOrder):
        greedy_color(k3, "aab")


def test_dsatur_is_proper():
    rng = SplitMix64(5)
    for _ in range(50):
        g, _, _ = random_graph(rng, 12, 0.4)
        assert dsatur_greedy(g).is_proper(g)


def test_straight_cycle_examples(S):
    anti = fixture("ANTI3")
    assert straight_cycles(anti, 3, 3) == [("a", "b", "c")]
    assert straight_cycles(fixture("CHAIN3"), 3, 3) == []
    assert straight_cycles(S, 4, 9) == []
    with pytest.raises(ValueError):
        straight_cycles(S, 2, 5)


def test_straight_cycles_match_brute_force():
    rng = SplitMix64(77)
    for trial in range(40):
        es = gen_random(GenParams(rng.below(8) + 1, rng.next_u64(), degree_cap=1 + rng.below(6)))
        rel = oracles.rel_of(es)
        cycles = oracles.simple_cycles(es.events, rel.ortho_edges(), 3, len(es))
        straight = {c for c in cycles if rel.is_antichain(c)}
        assert set(straight_cycles(es, 3, max(3, len(es)))) == straight


def test_chordal_examples(S):
    k3 = OrthoGraph.from_edges("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    ok, peo = chordal_elimination(k3)
    assert ok and is_perfect_elimination_order(k3, peo)
    level = ortho_graph(S).induced(["6", "7", "8", "9"])
    assert set(level.edges()) == {("6", "7"), ("8", "9")}
    ok, peo = chordal_elimination(level, S)
    assert ok
    assert color_chordal(level, peo).num_colors <= 3
    c4 = OrthoGraph.from_edges("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
    ok, cycle = chordal_elimination(c4)
    assert not ok and cycle == ("a", "b", "c", "d")
    with pytest.raises(NotAnAntichain):
        chordal_elimination(ortho_graph(S).induced(["1", "3"]), S)


def test_chordality_matches_brute_force():
    rng = SplitMix64(11)
    for _ in range(120):
        g, vs, edges = random_graph(rng, rng.below(8), 0.5)
        ok, witness = chordal_elimination(g)
        assert ok == oracles.is_chordal(vs, edges)
        if ok:
            assert is_perfect_elimination_order(g, witness)
            assert color_chordal(g, witness).num_colors == clique_number(g)
        else:
            assert len(witness) >= 4
            r = len(witness)
            for a, b in combinations(range(r), 2):
                assert g.has_edge(witness[a], witness[b]) == ((b - a) % r in (1, r - 1))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(0, 16))
def test_clique_number_at_most_chromatic(seed, n):
    es = gen_random(GenParams(n, seed, degree_cap=5))
    g = ortho_graph(es)
    assert clique_number(g) <= chromatic_exact(g, 32)[0] <= dsatur_greedy(g).num_colors
