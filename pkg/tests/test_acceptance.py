"""End-to-end acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with its measured runtime
and the pinned limit, then asserts.  Seeds and sizes are fixed so reruns
see the same instances.
"""

import time
from itertools import combinations

import pytest

from eslab.core import build
from eslab.domain import (
    branching_degree,
    check_chopped_lattice,
    check_perspective_labelling,
    configurations,
)
from eslab.errors import DomainTooLarge, TheoremViolation
from eslab.gen import FIXTURE_NAMES, GenParams, SplitMix64, fixture, gen_forest, gen_random, gen_simple
from eslab.graph import (
    OrthoGraph,
    chordal_elimination,
    chromatic_exact,
    color_chordal,
    degree,
    ortho_graph,
    straight_cycles,
)
from eslab.labelling import (
    StratifyingFunction,
    label_dilworth,
    label_exact,
    label_forest,
    label_simple,
    label_stratified,
    optimal_stratifier,
    verify_labelling,
)
from eslab.theory import check_lemma, maximal_antichains

import oracles


class Criterion:
    """Times the body, prints the verdict line, then asserts."""

    def __init__(self, capsys, number, limit):
        self.capsys = capsys
        self.number = number
        self.limit = limit
        self.failures = []
        self.notes = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def check(self, ok, message):
        if not ok and len(self.failures) < 5:
            self.failures.append(message)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if elapsed >= self.limit:
            self.failures.append(f"runtime {elapsed:.2f}s over {self.limit}s")
        verdict = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.notes + self.failures)
        with self.capsys.disabled():
            print(f"\n{verdict} criterion {self.number}: {detail} [{elapsed:.2f}s < {self.limit}s]")
        assert not self.failures, self.failures
        return False


def random_batch(count, max_events, seed_base=0, **kw):
    return [
        gen_random(GenParams(1 + s % max_events, seed_base + s, **kw)) for s in range(count)
    ]


def test_criterion_1_s_needs_four_letters(capsys):
    with Criterion(capsys, 1, limit=1.0) as c:
        S = fixture("S")
        lab = label_exact(S)
        c.check(lab.alphabet_size == 4, f"alphabet_size {lab.alphabet_size}")
        c.check(verify_labelling(S, lab) == [], "labelling not valid")
        c.notes.append(f"S exact alphabet_size={lab.alphabet_size}")


def test_criterion_2_forests(capsys):
    with Criterion(capsys, 2, limit=60.0) as c:
        exact_checked = 0
        for seed in range(500):
            es = gen_forest(GenParams(1 + seed % 200, seed))
            c.check(degree(es) <= 3, f"seed {seed}: degree {degree(es)}")
            try:
                lab = label_forest(es)
            except TheoremViolation as exc:
                c.check(False, f"seed {seed}: {exc}")
                continue
            c.check(lab.alphabet_size <= 3 and verify_labelling(es, lab) == [], f"seed {seed}: bad labelling")
            if len(es) <= 20:
                exact_checked += 1
                k = label_exact(es).alphabet_size
                c.check(k <= 3, f"seed {seed}: chromatic {k}")
        c.notes.append(f"500 forests labelled with <= 3 letters, exact confirms on {exact_checked}")


def test_criterion_3_simple_structures(capsys):
    with Criterion(capsys, 3, limit=60.0) as c:
        instances = [fixture("S")] + [gen_simple(GenParams(1 + s % 60, s)) for s in range(100)]
        most = 0
        for k, es in enumerate(instances):
            try:
                lab = label_simple(es)
            except TheoremViolation as exc:
                c.check(False, f"instance {k}: {exc}")
                continue
            most = max(most, lab.alphabet_size)
            c.check(lab.alphabet_size <= 12 and verify_labelling(es, lab) == [], f"instance {k}: bad labelling")
        c.notes.append(f"S + 100 simple instances, max alphabet {most}")


def test_criterion_4_stratified_bound(capsys):
    with Criterion(capsys, 4, limit=60.0) as c:
        for seed, es in enumerate(random_batch(200, 60)):
            lab = label_stratified(es)
            bound = 3 * (es.height() + 1)
            c.check(verify_labelling(es, lab) == [], f"seed {seed}: invalid")
            c.check(lab.alphabet_size <= bound, f"seed {seed}: {lab.alphabet_size} > {bound}")
        S = fixture("S")
        by_height = label_stratified(S, StratifyingFunction.height(S))
        best = label_stratified(S, optimal_stratifier(S))
        c.check(verify_labelling(S, best) == [], "S optimal stratified labelling invalid")
        c.check(best.alphabet_size <= 6, f"S needs {best.alphabet_size} letters")
        c.notes.append(
            f"200 random within 3(height+1); S: {by_height.alphabet_size} letters with h=height, "
            f"{best.alphabet_size} with the optimal stratifying function"
        )


def test_criterion_5_dilworth(capsys):
    with Criterion(capsys, 5, limit=60.0) as c:
        instances = [fixture(n) for n in FIXTURE_NAMES] + random_batch(200, 60)
        conflict_free = 0
        for k, es in enumerate(instances):
            lab = label_dilworth(es)
            c.check(lab.alphabet_size == es.width(), f"instance {k}: {lab.alphabet_size} != width")
            c.check(verify_labelling(es, lab) == [], f"instance {k}: invalid")
            if not es.conflict:
                conflict_free += 1
                c.check(label_exact(es).alphabet_size == es.width(), f"instance {k}: exact != width")
        for k, es in enumerate(instances[:8] + random_batch(40, 9)):
            c.check(es.width() == oracles.rel_of(es).width(), f"instance {k}: width disagrees with oracle")
        c.notes.append(f"{len(instances)} instances, {conflict_free} conflict-free with exact = width")


def _enabled_sets(rel):
    configs = set(rel.configurations())
    return [frozenset(x for x in rel.events if x not in i and i | {x} in configs) for i in configs]


def test_criterion_6_degree_equivalence(capsys):
    with Criterion(capsys, 6, limit=60.0) as c:
        for seed, es in enumerate(random_batch(200, 12, seed_base=6000)):
            d = configurations(es)
            c.check(degree(es) == branching_degree(d), f"seed {seed}: clique != branching degree")
            if len(es) > 10:
                continue
            rel = oracles.rel_of(es)
            edges = {frozenset(e) for e in rel.ortho_edges()}
            enabled = _enabled_sets(rel)
            for s in enabled:
                c.check(all(frozenset(p) in edges for p in combinations(s, 2)), f"seed {seed}: enabled set not a clique")
            for r in range(1, len(es) + 1):
                for k in combinations(es.events, r):
                    if all(frozenset(p) in edges for p in combinations(k, 2)):
                        c.check(any(set(k) <= s for s in enabled), f"seed {seed}: clique {k} never enabled")
        c.notes.append("200 instances <= 12 events; correspondence enumerated on <= 10")


def _straight_batch():
    return random_batch(200, 40, seed_base=7000)


def test_criterion_7_straight_cycles(capsys):
    with Criterion(capsys, 7, limit=60.0) as c:
        faces = 0
        for seed, es in enumerate(_straight_batch()):
            c.check(straight_cycles(es, 4, max(4, len(es))) == [], f"seed {seed}: straight cycle")
            if len(es) > 20:
                continue
            rel = oracles.rel_of(es)
            edges = {frozenset(e) for e in rel.ortho_edges()}
            for x1, x2 in combinations(es.events, 2):
                if frozenset((x1, x2)) not in edges:
                    continue
                apexes = [x for x in es.events if {frozenset((x, x1)), frozenset((x, x2))} <= edges]
                for x0, x3 in combinations(apexes, 2):
                    faces += 1
                    c.check(rel.comparable(x0, x3), f"seed {seed}: {x0}, {x3} incomparable")
            c.check(check_lemma("shared_face", es).status == "ok", f"seed {seed}: shared_face lemma")
        c.notes.append(f"no straight cycle on 200 instances; {faces} shared faces checked")


def test_criterion_8_antichains(capsys):
    with Criterion(capsys, 8, limit=60.0) as c:
        count = 0
        for seed, es in enumerate(_straight_batch()):
            g = ortho_graph(es)
            for anti in maximal_antichains(es):
                count += 1
                sub = g.induced(anti)
                ok, peo = chordal_elimination(sub, es)
                c.check(ok, f"seed {seed}: antichain {anti} not chordal")
                if ok:
                    c.check(color_chordal(sub, peo).num_colors <= 3, f"seed {seed}: > 3 colors")
        c.notes.append(f"{count} maximal antichains chordal and 3-colored")


def test_criterion_9_exact_oracle(capsys):
    with Criterion(capsys, 9, limit=60.0) as c:
        rng = SplitMix64(9)
        for trial in range(1000):
            n = rng.below(9)
            p = rng.random()
            vs = [f"v{i}" for i in range(n)]
            edges = [(a, b) for a, b in combinations(vs, 2) if rng.random() < p]
            g = OrthoGraph.from_edges(vs, edges)
            k, col = chromatic_exact(g, 8)
            c.check(k == oracles.chromatic_number(vs, edges), f"graph {trial}: {k}")
            c.check(col.is_proper(g), f"graph {trial}: improper")
        for seed, es in enumerate(random_batch(100, 40, seed_base=9000, degree_cap=2)):
            c.check(label_exact(es).alphabet_size <= 2, f"degree-2 seed {seed}: more than 2 letters")
        c.notes.append("1000 graphs agree with enumeration; 100 degree-2 structures need <= 2 letters")


TREE_LEMMAS = ("twinsthree", "twins", "Oinclusion", "LandO", "Lempty", "atmostthree")


def test_criterion_10_twin_lemmas(capsys):
    with Criterion(capsys, 10, limit=60.0) as c:
        checked = dict.fromkeys(TREE_LEMMAS, 0)
        for seed in range(300):
            es = gen_forest(GenParams(1 + seed % 100, 10000 + seed))
            for name in TREE_LEMMAS:
                r = check_lemma(name, es)
                c.check(r.status != "fail", f"seed {seed}: {name}: {r.detail}")
                checked[name] += r.status == "ok"
        c.check(all(checked.values()), f"some lemma never applied: {checked}")
        c.notes.append("300 trees, " + ", ".join(f"{k} {v}" for k, v in checked.items()))


def test_criterion_11_domain_checks(capsys):
    with Criterion(capsys, 11, limit=60.0) as c:
        rng = SplitMix64(11)
        instances = [fixture(n) for n in FIXTURE_NAMES] + random_batch(100, 14, seed_base=11000)
        used = 0
        for k, es in enumerate(instances):
            try:
                d = configurations(es, max_configs=5000)
            except DomainTooLarge:
                continue
            used += 1
            c.check(check_chopped_lattice(d) == [], f"instance {k}: chopped lattice")
            for lab in (label_exact(es).assignment, {x: rng.below(3) for x in es.events}):
                same = (check_perspective_labelling(d, es, lab) == []) == (verify_labelling(es, lab) == [])
                c.check(same, f"instance {k}: domain check disagrees with verifier")
        c.check(used == len(instances), f"only {used} of {len(instances)} domains within 5000")
        c.notes.append(f"{used} domains checked")
