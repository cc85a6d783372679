import ctypes

import pytest

from eslab.errors import UnknownFixture
from eslab.gen import (
    FIXTURE_NAMES,
    KINDS,
    GenParams,
    SplitMix64,
    fixture,
    gen_forest,
    gen_random,
    gen_simple,
    generate,
)
from eslab.graph import degree
from eslab.io import serialize_es
from eslab.labelling import is_forest, is_simple, label_forest, label_simple, verify_labelling


def reference_splitmix(seed, count):
    """Same algorithm on ctypes unsigned 64-bit cells, for wraparound independence."""
    state = ctypes.c_uint64(seed)
    out = []
    for _ in range(count):
        state.value += 0x9E3779B97F4A7C15
        z = ctypes.c_uint64(state.value)
        z.value = (z.value ^ (z.value >> 30)) * 0xBF58476D1CE4E5B9
        z.value = (z.value ^ (z.value >> 27)) * 0x94D049BB133111EB
        out.append(z.value ^ (z.value >> 31))
    return out


def test_splitmix_reference_values():
    rng = SplitMix64(0)
    first = [rng.next_u64() for _ in range(3)]
    assert first[0] == 0xE220A8397B1DCDAF
    assert first == reference_splitmix(0, 3)


@pytest.mark.parametrize("seed", [1, 42, 2**63 + 5, 2**64 - 1])
def test_splitmix_matches_reference(seed):
    rng = SplitMix64(seed)
    assert [rng.next_u64() for _ in range(50)] == reference_splitmix(seed, 50)


def test_splitmix_helpers():
    rng = SplitMix64(7)
    draws = [rng.below(6) for _ in range(600)]
    assert set(draws) == set(range(6))
    assert all(0.0 <= rng.random() < 1.0 for _ in range(200))
    with pytest.raises(ValueError):
        rng.below(0)
    a, b = SplitMix64(5), SplitMix64(5)
    assert a.split().next_u64() == b.split().next_u64()


@pytest.mark.parametrize("kind", KINDS)
def test_generation_is_deterministic(kind):
    for seed in (0, 1, 12345):
        p = GenParams(40, seed, kind)
        assert serialize_es(generate(p)) == serialize_es(generate(p))
    assert serialize_es(generate(GenParams(40, 1, kind))) != serialize_es(generate(GenParams(40, 2, kind)))


def test_sizes_and_ids():
    assert len(gen_random(GenParams(0, 3))) == 0
    assert gen_random(GenParams(0, 3)) == fixture("EMPTY")
    one = gen_forest(GenParams(1, 3))
    single = fixture("SINGLE")
    assert len(one) == 1 and one.covers == single.covers and one.conflict == single.conflict
    es = gen_random(GenParams(12, 1))
    assert es.events == tuple(f"e{k:02d}" for k in range(12))


@pytest.mark.parametrize("cap", [1, 2, 3, 5])
def test_degree_cap_holds(cap):
    for seed in range(30):
        assert degree(gen_random(GenParams(25, seed, degree_cap=cap))) <= cap


def test_forest_postcondition():
    for seed in range(40):
        es = gen_forest(GenParams(1 + seed * 3, seed))
        assert is_forest(es) and degree(es) <= 3


def test_simple_postcondition():
    for seed in range(40):
        es = gen_simple(GenParams(1 + seed, seed, degree_cap=7))
        assert is_simple(es)
        heights = es.heights()
        assert all(heights[c] == heights[p] + 1 for p, c in es.covers)


def test_conflict_density_extremes():
    assert all(not gen_random(GenParams(20, s, conflict_density=0.0)).conflict for s in range(10))
    assert any(gen_random(GenParams(20, s, conflict_density=1.0)).conflict for s in range(10))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"num_events": -1},
        {"num_events": 3, "degree_cap": 0},
        {"num_events": 3, "conflict_density": 1.5},
        {"num_events": 3, "seed": -1},
        {"num_events": 3, "seed": 2**64},
        {"num_events": 3, "kind": "tree"},
        {"num_events": 3, "retries": -1},
    ],
)
def test_params_are_validated(kwargs):
    with pytest.raises(ValueError):
        GenParams(**kwargs)


def test_fixtures():
    assert FIXTURE_NAMES == ("EMPTY", "SINGLE", "CHAIN3", "ANTI3", "CONF2", "FORK", "TWIN2", "S")
    s = fixture("S")
    assert len(s) == 9 and degree(s) == 3
    assert fixture("TWIN2").in_conflict("x", "y")
    with pytest.raises(UnknownFixture):
        fixture("nope")


def test_generated_instances_label():
    es = gen_simple(GenParams(20, 3))
    lab = label_simple(es)
    assert lab.alphabet_size <= 12 and verify_labelling(es, lab) == []
    es = gen_forest(GenParams(50, 7))
    assert verify_labelling(es, label_forest(es)) == []
