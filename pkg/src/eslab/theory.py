"""Executable checks of the structural lemmas, run on one structure or on a seeded batch.

Each check returns a :class:`LemmaResult`.  A lemma whose hypotheses do not
apply to the input (wrong shape, too large to enumerate) is ``skipped``
rather than ``ok``, so a report never claims more than was checked.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass
from itertools import combinations

from eslab.core import EventStructure, bits, build, popcount
from eslab.domain import (
    branching_degree,
    check_chopped_lattice,
    check_perspective_labelling,
    configurations,
    enabled_sets,
)
from eslab.errors import DomainTooLarge, ExceedsCap, SizeLimitExceeded
from eslab.graph import (
    chordal_elimination,
    chromatic_exact,
    clique_number,
    color_chordal,
    degree,
    ortho_graph,
    straight_cycles,
)
from eslab.labelling.basic import label_greedy, verify_labelling
from eslab.labelling.forest import choose_tree_order, is_forest, o_c_l

OK, FAIL, SKIPPED = "ok", "fail", "skipped"

# enumeration limits; beyond them a lemma is skipped
MAX_DOMAIN_CONFIGS = 5000
MAX_DEGREE_EQUIV_EVENTS = 14
MAX_CLIQUE_COVERS_EVENTS = 10
MAX_SHARED_FACE_EVENTS = 20
MAX_STRAIGHT_CYCLE_EVENTS = 40
MAX_ANTICHAINS = 20000
MAX_EXACT_EVENTS = 40


@dataclass(frozen=True)
class LemmaResult:
    name: str
    status: str
    detail: str = ""


class _Skip(Exception):
    pass


def _pairs(n: int) -> Iterator[tuple[int, int]]:
    return combinations(range(n), 2)


# -- order and conflict -----------------------------------------------------------


def _trichotomy(es: EventStructure) -> str | None:
    for i, j in _pairs(len(es)):
        below = es.below_mask(j) >> i & 1
        above = es.below_mask(i) >> j & 1
        conflict = es.conflict_mask(i) >> j & 1
        concurrent = not (below or above or conflict)
        if below + above + conflict + concurrent != 1:
            return f"{es.events[i]}, {es.events[j]}"
    return None


def _heredity_idempotent(es: EventStructure) -> str | None:
    again = build(es.events, es.covers, es.conflict)
    return None if again == es else "closing the closed conflict changed it"


def _coherence_law(es: EventStructure) -> str | None:
    n = len(es)
    for x in range(n):
        for y in bits(es.incomparable_mask(x) & ~es.conflict_mask(x)):
            for z in bits(es.below_mask(x)):
                conc = es.incomparable_mask(z) & ~es.conflict_mask(z)
                if not (conc >> y & 1 or es.below_mask(y) >> z & 1):
                    return f"x={es.events[x]} y={es.events[y]} z={es.events[z]}"
    return None


def _orthogonality_inheritance(es: EventStructure) -> str | None:
    for x in range(len(es)):
        for y in bits(es.ortho_mask(x)):
            for z in bits(es.below_mask(x)):
                if not (es.ortho_mask(z) >> y & 1 or es.below_mask(y) >> z & 1):
                    return f"x={es.events[x]} y={es.events[y]} z={es.events[z]}"
    return None


def _conflict_decomposition(es: EventStructure) -> str | None:
    n = len(es)
    minimal = [es.conflict_mask(i) & es.ortho_mask(i) for i in range(n)]
    for x in range(n):
        down_x = es.below_mask(x) | (1 << x)
        for y in bits(es.conflict_mask(x)):
            down_y = es.below_mask(y) | (1 << y)
            if not any(minimal[a] & down_y for a in bits(down_x)):
                return f"{es.events[x]} # {es.events[y]} has no minimal conflict below"
    return None


def _twins_orthogonal(es: EventStructure) -> str | None:
    for i, j in _pairs(len(es)):
        if es.lower_cover_mask(i) == es.lower_cover_mask(j) and not es.ortho_mask(i) >> j & 1:
            return f"{es.events[i]}, {es.events[j]}"
    return None


def _lift_bottom_graph(es: EventStructure) -> str | None:
    lifted = es.lift_bottom()
    (bot,) = set(lifted.events) - set(es.events)
    if lifted.neighbours(bot):
        return f"{bot} is not isolated"
    for x in es.events:
        if set(lifted.neighbours(x)) != set(es.neighbours(x)):
            return f"neighbours of {x} changed"
    return None


def _star_degree(es: EventStructure) -> str | None:
    d = degree(es)
    if d < 1:
        raise _Skip("degree 0")
    for x in es.events:
        if degree(es.star(x)) >= d:
            return f"star({x}) has degree {degree(es.star(x))} >= {d}"
    return None


# -- graph --------------------------------------------------------------------------


def _clique_le_chromatic(es: EventStructure) -> str | None:
    if len(es) > MAX_EXACT_EVENTS:
        raise _Skip("too many events for the exact solver")
    g = ortho_graph(es)
    try:
        k, _ = chromatic_exact(g, max(1, len(es)))
    except (SizeLimitExceeded, ExceedsCap) as exc:
        raise _Skip(str(exc)) from exc
    w = clique_number(g)
    return None if w <= k else f"clique number {w} > chromatic number {k}"


def _need_degree_three(es: EventStructure) -> None:
    if degree(es) > 3:
        raise _Skip("degree exceeds 3")


def _no_straight_cycle(es: EventStructure) -> str | None:
    _need_degree_three(es)
    if len(es) > MAX_STRAIGHT_CYCLE_EVENTS:
        raise _Skip("too many events")
    if len(es) < 4:
        return None
    cycles = straight_cycles(es, 4, len(es))
    return None if not cycles else f"straight cycle {cycles[0]}"


def _shared_face(es: EventStructure) -> str | None:
    """Two triangles sharing an edge have comparable apexes."""
    _need_degree_three(es)
    if len(es) > MAX_SHARED_FACE_EVENTS:
        raise _Skip("too many events")
    for a, b in _pairs(len(es)):
        if not es.ortho_mask(a) >> b & 1:
            continue
        apexes = list(bits(es.ortho_mask(a) & es.ortho_mask(b)))
        for x0, x3 in combinations(apexes, 2):
            if es.incomparable_mask(x0) >> x3 & 1:
                return f"triangles on {es.events[a]},{es.events[b]} with {es.events[x0]}, {es.events[x3]}"
    return None


def maximal_antichains(es: EventStructure, limit: int = MAX_ANTICHAINS) -> list[tuple[str, ...]]:
    """Maximal cliques of the incomparability graph (Bron-Kerbosch with pivoting)."""
    n = len(es)
    inc = [es.incomparable_mask(i) & ~(1 << i) for i in range(n)]
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            if len(out) > limit:
                raise _Skip(f"more than {limit} maximal antichains")
            return
        pivot = max(bits(p | x), key=lambda u: popcount(inc[u] & p))
        for v in bits(p & ~inc[pivot]):
            expand(r | (1 << v), p & inc[v], x & inc[v])
            p &= ~(1 << v)
            x |= 1 << v

    if n:
        expand(0, (1 << n) - 1, 0)
    return sorted(es.names(m) for m in out)


def _antichain_chordal(es: EventStructure) -> str | None:
    _need_degree_three(es)
    g = ortho_graph(es)
    for anti in maximal_antichains(es):
        sub = g.induced(anti)
        chordal, order = chordal_elimination(sub, es)
        if not chordal:
            return f"antichain {anti} has chordless cycle {order}"
        if color_chordal(sub, order).num_colors > 3:
            return f"antichain {anti} needs more than 3 colors"
    return None


# -- domain ---------------------------------------------------------------------------


def _domain(es: EventStructure, max_events: int):
    if len(es) > max_events:
        raise _Skip("too many events")
    try:
        return configurations(es, MAX_DOMAIN_CONFIGS)
    except DomainTooLarge as exc:
        raise _Skip(str(exc)) from exc


def _degree_equivalence(es: EventStructure) -> str | None:
    d = _domain(es, MAX_DEGREE_EQUIV_EVENTS)
    a, b = degree(es), branching_degree(d)
    return None if a == b else f"clique number {a} != branching degree {b}"


def _clique_covers(es: EventStructure) -> str | None:
    """Cliques of G(E) are exactly the sets of events enabled together at some configuration."""
    d = _domain(es, MAX_CLIQUE_COVERS_EVENTS)
    n = len(es)
    enabled = {es.mask(s) for s in enabled_sets(d)}
    for m in enabled:
        for i in bits(m):
            if (m & ~(1 << i)) & ~es.ortho_mask(i):
                return f"enabled set {es.names(m)} is not a clique"
    # every clique must sit inside some enabled set

    def cliques(r: int, p: int) -> Iterator[int]:
        yield r
        for v in bits(p):
            yield from cliques(r | (1 << v), p & es.ortho_mask(v) & ~((1 << (v + 1)) - 1))

    for k in cliques(0, (1 << n) - 1):
        if k and not any(k & ~m == 0 for m in enabled):
            return f"clique {es.names(k)} is never enabled at once"
    return None


def _chopped_lattice(es: EventStructure) -> str | None:
    report = check_chopped_lattice(_domain(es, 64))
    return None if not report else f"{len(report)} counterexamples, first {report[0]}"


def _perspective_equivalence(es: EventStructure) -> str | None:
    d = _domain(es, 64)
    good = label_greedy(es).assignment
    candidates = [good, {x: 0 for x in es.events}]
    if len(es) >= 2:
        # merge two letters of the valid labelling
        shifted = dict(good)
        top = max(shifted.values())
        shifted = {x: (0 if v == top else v) for x, v in shifted.items()}
        candidates.append(shifted)
    for lab in candidates:
        dom_ok = not check_perspective_labelling(d, es, lab)
        ver_ok = not verify_labelling(es, lab)
        if dom_ok != ver_ok:
            return f"domain check {dom_ok} but verifier {ver_ok} for {lab}"
    return None


# -- twins and trees ------------------------------------------------------------------


def _twin_groups(es: EventStructure) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i in range(len(es)):
        groups.setdefault(es.lower_cover_mask(i), []).append(i)
    return [g for g in groups.values() if len(g) >= 2]


def _is_chain(es: EventStructure, m: int) -> bool:
    return all(not es.incomparable_mask(i) & m & ~(1 << i) for i in bits(m))


def _twinsthree(es: EventStructure) -> str | None:
    _need_degree_three(es)
    for group in _twin_groups(es):
        for x, y, z in combinations(group, 3):
            trio = (1 << x) | (1 << y) | (1 << z)
            for a in (x, y, z):
                if es.o_set_mask(a, trio):
                    return f"O set of {es.events[a]} over twins {es.names(trio)} is not empty"
    return None


def _twins(es: EventStructure) -> str | None:
    _need_degree_three(es)
    for group in _twin_groups(es):
        for x, y in combinations(group, 2):
            pair = (1 << x) | (1 << y)
            ox, oy = es.o_set_mask(x, pair), es.o_set_mask(y, pair)
            if ox & ~oy and oy & ~ox:
                return f"O sets of twins {es.events[x]}, {es.events[y]} are incomparable"
            if not _is_chain(es, ox & oy):
                return f"O sets of twins {es.events[x]}, {es.events[y]} meet in a non-chain"
    return None


def _oinclusion(es: EventStructure) -> str | None:
    _need_degree_three(es)
    pairs = [p for g in _twin_groups(es) for p in combinations(g, 2)]
    for x, y in pairs + [(b, a) for a, b in pairs]:
        xy = (1 << x) | (1 << y)
        both = es.o_set_mask(x, xy) & es.o_set_mask(y, xy)
        for a, b in pairs:
            if len({x, y, a, b}) < 4:
                continue
            for z, w in ((a, b), (b, a)):
                if not both >> z & 1 or es.below_mask(x) >> w & 1:
                    continue
                wz = (1 << w) | (1 << z)
                oz, ow = es.o_set_mask(z, wz), es.o_set_mask(w, wz)
                if not (ow & ~oz == 0 and oz != ow):
                    return (
                        f"pairs ({es.events[x]},{es.events[y]}), ({es.events[z]},{es.events[w]}): "
                        "O set of z does not strictly contain that of w"
                    )
    return None


def _tree_setup(es: EventStructure):
    _need_degree_three(es)
    if not is_forest(es) or not len(es):
        raise _Skip("not a non-empty forest")
    lifted = es.lift_bottom()
    tm = lifted.mask(es.events)
    order = choose_tree_order(lifted, es.events).sequence
    sets = {}
    before = 0
    for name in order:
        x = lifted.index[name]
        sets[x] = o_c_l(lifted, tm, before, x)
        before |= 1 << x
    return lifted, tm, sets


def _atmostthree(es: EventStructure) -> str | None:
    lifted, _, sets = _tree_setup(es)
    for x, (_, c, _) in sets.items():
        for y in bits(c):
            if lifted.lower_cover_mask(x) != lifted.lower_cover_mask(y):
                return f"{lifted.events[y]} in C({lifted.events[x]}) but not its twin"
        if popcount(c) > 2:
            return f"C({lifted.events[x]}) has {popcount(c)} elements"
    return None


def _landO(es: EventStructure) -> str | None:
    lifted, tm, sets = _tree_setup(es)
    for x, (_, _, l) in sets.items():
        for y in bits(tm):
            if y == x or lifted.lower_cover_mask(y) != lifted.lower_cover_mask(x):
                continue
            oxy = lifted.o_set_mask(x, (1 << x) | (1 << y))
            if l & ~oxy:
                return f"L({lifted.events[x]}) is not inside O over {lifted.events[y]}"
            for z in bits(l):
                lower = oxy & (lifted.below_mask(z))
                if lower & ~l:
                    return f"L({lifted.events[x]}) is not a lower set of its O set"
    return None


def _lempty(es: EventStructure) -> str | None:
    lifted, _, sets = _tree_setup(es)
    for group in _twin_groups(lifted):
        for trio in combinations(group, 3):
            for x, y, z in ((trio[0], trio[1], trio[2]), (trio[1], trio[0], trio[2]),
                            (trio[2], trio[0], trio[1]), (trio[0], trio[2], trio[1]),
                            (trio[1], trio[2], trio[0]), (trio[2], trio[1], trio[0])):
                if x not in sets:
                    continue
                o, c, l = sets[x]
                name = lifted.events[x]
                if l:
                    return f"L({name}) is not empty"
                xy = (1 << x) | (1 << y)
                both = lifted.o_set_mask(x, xy) & lifted.o_set_mask(y, xy)
                if not both >> z & 1 or both & lifted.below_mask(z):
                    return f"{lifted.events[z]} is not the least element of the joint O set of {name}"
                if o != c or c & ~((1 << y) | (1 << z)):
                    return f"O({name}) is not C({name}) inside its twins"
    return None


LEMMAS: tuple[tuple[str, Callable[[EventStructure], str | None]], ...] = (
    ("trichotomy", _trichotomy),
    ("heredity_idempotent", _heredity_idempotent),
    ("coherence_law", _coherence_law),
    ("orthogonality_inheritance", _orthogonality_inheritance),
    ("conflict_decomposition", _conflict_decomposition),
    ("twins_orthogonal", _twins_orthogonal),
    ("lift_bottom_graph", _lift_bottom_graph),
    ("star_degree", _star_degree),
    ("clique_le_chromatic", _clique_le_chromatic),
    ("degree_equivalence", _degree_equivalence),
    ("clique_covers", _clique_covers),
    ("chopped_lattice", _chopped_lattice),
    ("perspective_equivalence", _perspective_equivalence),
    ("no_straight_cycle", _no_straight_cycle),
    ("shared_face", _shared_face),
    ("antichain_chordal", _antichain_chordal),
    ("twinsthree", _twinsthree),
    ("twins", _twins),
    ("Oinclusion", _oinclusion),
    ("atmostthree", _atmostthree),
    ("LandO", _landO),
    ("Lempty", _lempty),
)
LEMMA_NAMES = tuple(name for name, _ in LEMMAS)


def check_lemma(name: str, es: EventStructure) -> LemmaResult:
    fn = dict(LEMMAS)[name]
    try:
        detail = fn(es)
    except _Skip as skip:
        return LemmaResult(name, SKIPPED, str(skip))
    return LemmaResult(name, OK if detail is None else FAIL, detail or "")


def verify_theory(es: EventStructure) -> list[LemmaResult]:
    return [check_lemma(name, es) for name in LEMMA_NAMES]


def merge_results(runs: list[list[LemmaResult]]) -> list[LemmaResult]:
    """Per lemma: ``fail`` if any run failed, ``ok`` if at least one run checked it."""
    out = []
    for k, name in enumerate(LEMMA_NAMES):
        results = [run[k] for run in runs]
        fails = [r for r in results if r.status == FAIL]
        checked = sum(r.status == OK for r in results)
        if fails:
            out.append(LemmaResult(name, FAIL, f"{len(fails)} failures; first: {fails[0].detail}"))
        elif checked:
            out.append(LemmaResult(name, OK, f"checked on {checked} of {len(results)}"))
        else:
            out.append(LemmaResult(name, SKIPPED, "no applicable instance"))
    return out


def random_instances(count: int, events: int, seed: int) -> Iterator[EventStructure]:
    """Instance ``k`` has ``1 + k % events`` events and cycles through the generator kinds."""
    from eslab.gen import KINDS, GenParams, SplitMix64, generate

    rng = SplitMix64(seed)
    for k in range(count):
        n = 1 + k % max(events, 1) if events else 0
        yield generate(GenParams(n, rng.next_u64(), KINDS[k % len(KINDS)]))


def verify_theory_random(count: int, events: int, seed: int) -> list[LemmaResult]:
    return merge_results([verify_theory(es) for es in random_instances(count, events, seed)])
