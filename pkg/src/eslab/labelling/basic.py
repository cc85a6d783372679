"""Labellings, the verifier, and the strategies that need no tree machinery."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Optional

from eslab.core import EventStructure, bits, popcount
from eslab.errors import (
    BadQuotientColoring,
    ClassNotThreeLabellable,
    ExceedsCap,
    LevelNeedsMoreThanThreeColors,
    NotStratifying,
    SizeLimitExceeded,
    UnknownEvent,
    UnlabelledEvent,
)
from eslab.graph import (
    Coloring,
    OrthoGraph,
    _max_clique_mask,
    chordal_elimination,
    chromatic_exact,
    color_chordal,
    degree,
    dsatur_greedy,
    ortho_graph,
)


@dataclass(frozen=True)
class Labelling:
    """Letters are indices ``0 .. alphabet_size - 1``; ``strategy`` says who made it."""

    assignment: Mapping[str, int]
    alphabet_size: int
    strategy: str

    def __getitem__(self, x: str) -> int:
        return self.assignment[x]

    def letters_used(self) -> int:
        return len(set(self.assignment.values()))


def verify_labelling(
    es: EventStructure, lab: Labelling | Mapping[str, int]
) -> list[tuple[str, str]]:
    """Orthogonal pairs ``(x, y)``, ``x < y`` by id, that share a letter."""
    assignment = lab.assignment if isinstance(lab, Labelling) else lab
    for x in assignment:
        if x not in es:
            raise UnknownEvent(f"label for unknown event {x!r}", witness=x)
    for x in es.events:
        if x not in assignment:
            raise UnlabelledEvent(f"event {x!r} has no label", witness=x)
    bad = []
    for i, x in enumerate(es.events):
        for j in bits(es.ortho_mask(i) >> (i + 1) << (i + 1)):
            y = es.events[j]
            if assignment[x] == assignment[y]:
                bad.append((x, y))
    return bad


def _checked(es: EventStructure, lab: Labelling) -> Labelling:
    bad = verify_labelling(es, lab)
    if bad:
        # an internal bug, not a user error
        raise AssertionError(f"{lab.strategy} produced clashing pairs {bad[:5]}")
    return lab


def label_exact(
    es: EventStructure, cap: int = 16, limit: Optional[int] = None
) -> Labelling:
    """Optimal labelling; the alphabet size is the labelling number."""
    k, coloring = chromatic_exact(ortho_graph(es), cap, limit)
    return _checked(es, Labelling(dict(coloring.assignment), k, "exact"))


def label_greedy(es: EventStructure) -> Labelling:
    coloring = dsatur_greedy(ortho_graph(es))
    return _checked(es, Labelling(dict(coloring.assignment), coloring.num_colors, "greedy"))


def label_dilworth(es: EventStructure) -> Labelling:
    """One letter per chain of a minimum chain cover.

    Orthogonal events are incomparable, so they never share a chain.
    """
    chains = es.chain_cover()
    assignment = {x: k for k, chain in enumerate(chains) for x in chain}
    return _checked(es, Labelling(assignment, len(chains), "dilworth"))


# -- stratified ------------------------------------------------------------------


@dataclass(frozen=True)
class StratifyingFunction:
    """A level map whose levels are antichains."""

    h: Mapping[str, int]

    @classmethod
    def height(cls, es: EventStructure) -> "StratifyingFunction":
        return cls(es.heights())

    @classmethod
    def strict_predecessors(cls, es: EventStructure) -> "StratifyingFunction":
        """Number of events strictly below each event."""
        return cls({x: len(es.below(x)) for x in es.events})

    def levels(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for x in sorted(self.h):
            out.setdefault(self.h[x], []).append(x)
        return out

    def validate(self, es: EventStructure) -> None:
        missing = [x for x in es.events if x not in self.h]
        if missing:
            raise NotStratifying(f"no level for {missing[0]!r}", witness=missing[0])
        for k, xs in self.levels().items():
            if not es.is_antichain(xs):
                raise NotStratifying(f"level {k} is not an antichain", witness=tuple(xs))


def skewness(es: EventStructure, h: StratifyingFunction) -> int:
    """Largest level gap across an orthogonal pair (0 if there is none)."""
    s = 0
    for i, x in enumerate(es.events):
        for j in bits(es.ortho_mask(i)):
            s = max(s, abs(h.h[x] - h.h[es.events[j]]))
    return s


def optimal_stratifier(es: EventStructure, limit: int = 12) -> StratifyingFunction:
    """Exact search for a stratifying function minimising ``width * (skew + 1)``.

    ``width`` is the largest chromatic number of a level.  Level values can
    be renumbered consecutively without widening any gap, so values range
    over ``0 .. n - 1``.  Exponential; refuses more than ``limit`` events.
    """
    n = len(es)
    if n > limit:
        raise SizeLimitExceeded(f"{n} events exceed the stratifier search limit {limit}", witness=n)
    if n == 0:
        return StratifyingFunction({})
    g = ortho_graph(es)
    comparable = [es.full_mask & ~es.incomparable_mask(i) & ~(1 << i) for i in range(n)]
    # visit events along orthogonal/comparability adjacency so gaps prune early
    order: list[int] = []
    seen = 0
    for root in range(n):
        if seen >> root & 1:
            continue
        queue = [root]
        seen |= 1 << root
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in bits((g.adj[v] | comparable[v]) & ~seen):
                seen |= 1 << w
                queue.append(w)

    def feasible(skew: int, width: int) -> Optional[list[int]]:
        level = [-1] * n
        members: dict[int, int] = {}

        def place(k: int) -> bool:
            if k == n:
                return True
            v = order[k]
            for val in range(n):
                bad = False
                for w in bits(comparable[v]):
                    if level[w] == val:
                        bad = True
                        break
                if bad:
                    continue
                for w in bits(g.adj[v]):
                    if level[w] >= 0 and abs(level[w] - val) > skew:
                        bad = True
                        break
                if bad:
                    continue
                m = members.get(val, 0) | (1 << v)
                if popcount(_max_clique_in(g.adj, m)) > width:
                    continue
                if width < 3 and not _colorable(g, m, width):
                    continue
                level[v] = val
                members[val] = m
                if place(k + 1):
                    return True
                level[v] = -1
                members[val] = m & ~(1 << v)
            return False

        return level if place(0) else None

    candidates = sorted(
        ((w * (s + 1), s, w) for s in range(n) for w in range(1, 4)),
    )
    for _, s, w in candidates:
        level = feasible(s, w)
        if level is not None:
            return StratifyingFunction({es.events[i]: level[i] for i in range(n)})
    return StratifyingFunction.height(es)


def _max_clique_in(adj: Sequence[int], m: int) -> int:
    return _max_clique_mask(adj, m)


def _colorable(g: OrthoGraph, m: int, k: int) -> bool:
    sub = g.induced([g.vertices[i] for i in bits(m)])
    try:
        chromatic_exact(sub, k)
    except ExceedsCap:
        return False
    return True


def label_stratified(
    es: EventStructure, h: Optional[StratifyingFunction] = None
) -> Labelling:
    """Color each level, then pair the level color with the level modulo skew + 1.

    Levels induce chordal subgraphs when the degree is at most 3, so greedy
    coloring along a perfect elimination ordering needs at most 3 colors.
    For higher degrees a non-chordal level falls back to DSATUR.
    """
    h = h or StratifyingFunction.height(es)
    h.validate(es)
    period = skewness(es, h) + 1
    g = ortho_graph(es)
    small_degree = degree(es) <= 3

    level_color: dict[str, int] = {}
    width = 0
    for k, xs in h.levels().items():
        sub = g.induced(xs)
        chordal, order = chordal_elimination(sub, es)
        if chordal:
            coloring = color_chordal(sub, order)
        elif small_degree:
            raise LevelNeedsMoreThanThreeColors(
                f"level {k} is not chordal", witness=order
            )
        else:
            coloring = dsatur_greedy(sub)
        if small_degree and coloring.num_colors > 3:
            raise LevelNeedsMoreThanThreeColors(
                f"level {k} used {coloring.num_colors} colors", witness=tuple(xs)
            )
        level_color.update(coloring.assignment)
        width = max(width, coloring.num_colors)

    assignment = {x: level_color[x] * period + h.h[x] % period for x in es.events}
    return _checked(es, Labelling(assignment, width * period, "stratified"))


# -- quotient composition ------------------------------------------------------------


ClassLabeller = Callable[[EventStructure, frozenset], Mapping[str, int]]


def quotient_graph(es: EventStructure, partition: Mapping[str, str]) -> OrthoGraph:
    """Classes are adjacent when some members are orthogonal."""
    edges = set()
    for i, x in enumerate(es.events):
        for j in bits(es.ortho_mask(i)):
            a, b = partition[x], partition[es.events[j]]
            if a != b:
                edges.add((min(a, b), max(a, b)))
    return OrthoGraph.from_edges(set(partition.values()), edges)


def exact_class_labeller(es: EventStructure, members: frozenset) -> dict[str, int]:
    sub = ortho_graph(es).induced(members)
    try:
        _, coloring = chromatic_exact(sub, 3)
    except ExceedsCap as exc:
        raise ClassNotThreeLabellable(
            "class needs more than 3 letters", witness=tuple(sorted(members))
        ) from exc
    return dict(coloring.assignment)


def label_quotient(
    es: EventStructure,
    partition: Mapping[str, str],
    class_labeller: ClassLabeller,
    quotient_colors: Coloring,
    strategy: str = "quotient",
) -> Labelling:
    """Letter ``3 * class color + letter inside the class``."""
    for x in es.events:
        if x not in partition:
            raise UnlabelledEvent(f"event {x!r} is in no class", witness=x)
    classes: dict[str, set[str]] = {}
    for x in es.events:
        classes.setdefault(partition[x], set()).add(x)

    qg = quotient_graph(es, partition)
    for c in qg.vertices:
        if c not in quotient_colors.assignment:
            raise BadQuotientColoring(f"class {c!r} has no color", witness=c)
        if not 0 <= quotient_colors.assignment[c] < quotient_colors.num_colors:
            raise BadQuotientColoring(f"class {c!r} color out of range", witness=c)
    for a, b in qg.edges():
        if quotient_colors.assignment[a] == quotient_colors.assignment[b]:
            raise BadQuotientColoring(f"adjacent classes {a!r}, {b!r} share a color", witness=(a, b))

    g = ortho_graph(es)
    inner: dict[str, int] = {}
    for c in sorted(classes):
        members = frozenset(classes[c])
        lab = class_labeller(es, members)
        sub = g.induced(members)
        if any(not 0 <= lab.get(x, -1) < 3 for x in members) or any(
            lab[a] == lab[b] for a, b in sub.edges()
        ):
            raise ClassNotThreeLabellable(
                f"class {c!r} is not labelled with 3 letters", witness=tuple(sorted(members))
            )
        inner.update({x: lab[x] for x in members})

    assignment = {x: 3 * quotient_colors.assignment[partition[x]] + inner[x] for x in es.events}
    return _checked(es, Labelling(assignment, 3 * quotient_colors.num_colors, strategy))


def compact(lab: Labelling) -> Labelling:
    """Renumber the letters actually used as ``0 .. k - 1`` (first use in id order)."""
    remap: dict[int, int] = {}
    for x in sorted(lab.assignment):
        remap.setdefault(lab.assignment[x], len(remap))
    return Labelling({x: remap[v] for x, v in lab.assignment.items()}, len(remap), lab.strategy)
