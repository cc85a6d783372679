"""Three-letter labelling of trees inside a degree-3 event structure.

A tree ``T`` is a convex set of events each having exactly one lower cover
``pi(x)``, whose minimal elements share that cover.  The labelling walks a
linear order compatible with the height inside ``T`` and with proper pairs of
twins, and assigns letters ``0, 1, 2`` by four cases.  Every step that relies
on a degree-3 fact is checked, and a failure raises
:class:`TheoremViolation` naming the event at fault.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from eslab.core import EventStructure, bits, popcount
from eslab.errors import (
    DegreeExceedsThree,
    IncomparableTwinOSets,
    NotAForest,
    NotATree,
    TheoremViolation,
)
from eslab.graph import degree
from eslab.labelling.basic import Labelling, _checked

ALPHABET = 3


@dataclass(frozen=True)
class LinearOrder:
    sequence: tuple[str, ...]

    def position(self) -> dict[str, int]:
        return {x: k for k, x in enumerate(self.sequence)}


def tree_mask(es: EventStructure, T: Iterable[str]) -> int:
    """Bitmask of ``T`` after checking the three tree conditions."""
    tm = es.mask(T)
    parent = None
    for i in bits(tm):
        if popcount(es.lower_cover_mask(i)) != 1:
            raise NotATree(f"{es.events[i]!r} does not have exactly one lower cover", witness=es.events[i])
    for z in bits(tm):
        for y in bits(es.below_mask(z) & ~tm):
            if es.below_mask(y) & tm:
                raise NotATree(f"{es.events[y]!r} lies between tree events", witness=es.events[y])
    for i in bits(tm):
        if not es.below_mask(i) & tm:
            p = es.lower_cover_mask(i)
            if parent is None:
                parent = p
            elif p != parent:
                raise NotATree(
                    f"minimal tree event {es.events[i]!r} has a different lower cover",
                    witness=es.events[i],
                )
    return tm


def parent_of(es: EventStructure, i: int) -> int:
    return next(bits(es.lower_cover_mask(i)))


def proper_twin_pairs(es: EventStructure, tm: int) -> list[tuple[int, int]]:
    """Pairs ``x, y`` of ``T`` that are the only tree events with their parent."""
    children: dict[int, list[int]] = {}
    for i in bits(tm):
        children.setdefault(parent_of(es, i), []).append(i)
    return sorted(tuple(c) for c in children.values() if len(c) == 2)


def pair_o_sets(es: EventStructure, x: int, y: int) -> tuple[int, int]:
    pair = (1 << x) | (1 << y)
    return es.o_set_mask(x, pair), es.o_set_mask(y, pair)


def choose_tree_order(es_lifted: EventStructure, T: Iterable[str]) -> LinearOrder:
    """Linear order on ``T`` satisfying HEIGHT and TWINS.

    Events are sorted by height in ``T`` then id; for a proper pair of twins
    whose O-sets are strictly nested, the one with the larger O-set is moved
    to the earlier of the two positions.
    """
    es = es_lifted
    tm = tree_mask(es, T)
    h = {i: popcount(es.below_mask(i) & tm) for i in bits(tm)}
    seq = sorted(bits(tm), key=lambda i: (h[i], es.events[i]))
    pos = {i: k for k, i in enumerate(seq)}
    for x, y in proper_twin_pairs(es, tm):
        ox, oy = pair_o_sets(es, x, y)
        if ox == oy:
            continue
        if ox & oy == oy:
            first, second = x, y
        elif ox & oy == ox:
            first, second = y, x
        else:
            raise IncomparableTwinOSets(
                f"O-sets of twins {es.events[x]!r}, {es.events[y]!r} are incomparable",
                witness=(es.events[x], es.events[y]),
            )
        if pos[first] > pos[second]:
            a, b = pos[first], pos[second]
            seq[a], seq[b] = seq[b], seq[a]
            pos[first], pos[second] = b, a
    return LinearOrder(tuple(es.events[i] for i in seq))


@dataclass(frozen=True)
class TreeStep:
    """What the labelling did at one event (kept for inspection and tests)."""

    event: str
    case: int
    earlier: tuple[str, ...]  # O(x)
    common: tuple[str, ...]  # C(x)
    lateral: tuple[str, ...]  # L(x)
    letter: int


def o_c_l(
    es: EventStructure, tm: int, before: int, x: int
) -> tuple[int, int, int]:
    """``O(x)``, ``C(x)``, ``L(x)`` as bitmasks; ``before`` = tree events preceding ``x``."""
    o = es.ortho_mask(x) & tm & before
    covers = es.lower_cover_mask(x)
    c = 0
    for y in bits(o):
        if covers & ~(es.below_mask(y) | (1 << y)) == 0:
            c |= 1 << y
    return o, c, o & ~c


def label_tree(
    es: EventStructure, T: Iterable[str], order: LinearOrder | None = None
) -> tuple[dict[str, int], list[TreeStep]]:
    """Label the tree ``T`` with letters 0..2 and return the per-event trace."""
    tm = tree_mask(es, T)
    order = order or choose_tree_order(es, es.names(tm))
    h = {i: popcount(es.below_mask(i) & tm) for i in bits(tm)}
    letter: dict[int, int] = {}
    steps: list[TreeStep] = []
    before = 0
    for name in order.sequence:
        x = es.index[name]
        o, c, l = o_c_l(es, tm, before, x)
        if popcount(c) > 2:
            raise TheoremViolation(f"C({name}) has more than two elements", witness=name)
        if not c and h[x] == 0:
            case, lam = 1, 0
        elif not c:
            p = parent_of(es, x)
            if p not in letter:
                raise TheoremViolation(f"parent of {name!r} is not labelled yet", witness=name)
            case, lam = 2, letter[p]
        elif not l:
            used = {letter[y] for y in bits(c)}
            if len(used) < popcount(c):
                raise TheoremViolation(f"the two events of C({name}) share a letter", witness=name)
            case, lam = 3, min(a for a in range(ALPHABET) if a not in used)
        else:
            if popcount(c) != 1:
                raise TheoremViolation(f"C({name}) is not a singleton while L is not empty", witness=name)
            y = next(bits(c))
            minimal = [z for z in bits(l) if not es.below_mask(z) & l]
            if len(minimal) != 1:
                raise TheoremViolation(f"L({name}) has no unique minimal element", witness=name)
            z0 = minimal[0]
            if l & ~(es.above_mask(z0) | (1 << z0)):
                raise TheoremViolation(f"L({name}) has no least element", witness=name)
            if letter[y] == letter[z0]:
                raise TheoremViolation(
                    f"{es.events[y]!r} and {es.events[z0]!r} share a letter at {name!r}",
                    witness=name,
                )
            case, lam = 4, 3 - letter[y] - letter[z0]
        letter[x] = lam
        steps.append(TreeStep(name, case, es.names(o), es.names(c), es.names(l), lam))
        before |= 1 << x

    for x in bits(tm):
        for y in bits(es.ortho_mask(x) & tm):
            if letter[x] == letter[y]:
                raise TheoremViolation(
                    f"orthogonal tree events {es.events[x]!r}, {es.events[y]!r} share a letter",
                    witness=(es.events[x], es.events[y]),
                )
    return {es.events[i]: a for i, a in letter.items()}, steps


def is_forest(es: EventStructure) -> bool:
    return all(popcount(es.lower_cover_mask(i)) <= 1 for i in range(len(es)))


def check_forest(es: EventStructure) -> None:
    for i in range(len(es)):
        if popcount(es.lower_cover_mask(i)) > 1:
            x = es.events[i]
            raise NotAForest(f"event {x!r} has {popcount(es.lower_cover_mask(i))} lower covers", witness=x)
    d = degree(es)
    if d > 3:
        raise DegreeExceedsThree(f"degree {d} exceeds 3", witness=d)


def label_forest(es: EventStructure) -> Labelling:
    """Three-letter labelling of a degree-3 forest.

    A fresh bottom makes the original events one tree; the bottom is an
    isolated vertex, so orthogonality among the original events is unchanged.
    """
    check_forest(es)
    lifted = es.lift_bottom()
    assignment, _ = label_tree(lifted, es.events)
    return _checked(es, Labelling(assignment, ALPHABET, "forest"))


def tree_trace(es: EventStructure) -> list[TreeStep]:
    """Per-event cases taken by :func:`label_forest` on a forest."""
    check_forest(es)
    lifted = es.lift_bottom()
    return label_tree(lifted, es.events)[1]


def heights_in(es: EventStructure, T: Sequence[str]) -> dict[str, int]:
    tm = es.mask(T)
    return {x: popcount(es.below_mask(es.index[x]) & tm) for x in T}
