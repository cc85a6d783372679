"""Twelve-letter labelling of simple degree-3 event structures.

After adding a bottom, events split by their number of lower covers into
``E0 = {bottom}``, ``E1`` and ``E2``.  ``E1`` falls into trees (events with
the same nearest non-``E1`` ancestor ``rho``), each labelled with three
letters; ``E2`` is colored greedily with three colors.  The quotient graph on
the classes is colored with four colors and the two are combined.  Each
counting claim the bound rests on is asserted as the algorithm runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from eslab.core import EventStructure, bits, popcount
from eslab.errors import NotSimple, TheoremViolation
from eslab.graph import Coloring, OrthoGraph, degree, greedy_color, ortho_graph
from eslab.labelling.basic import Labelling, compact, label_quotient, quotient_graph
from eslab.labelling.forest import choose_tree_order, label_tree

E0_CLASS = "E0"
E2_CLASS = "E2"


def triangles(es: EventStructure) -> list[tuple[str, str, str]]:
    out = []
    for i in range(len(es)):
        for j in bits(es.ortho_mask(i) >> (i + 1) << (i + 1)):
            for k in bits(es.ortho_mask(i) & es.ortho_mask(j) >> (j + 1) << (j + 1)):
                out.append((es.events[i], es.events[j], es.events[k]))
    return out


def simplicity_failure(es: EventStructure) -> tuple[str, object] | None:
    """The first failing condition of simplicity with a witness, or ``None``."""
    d = degree(es)
    if d > 3:
        return "degree", d
    heights = es.heights()
    for p, c in sorted(es.covers):
        if heights[p] != heights[c] - 1:
            return "graded", (p, c)
    for tri in triangles(es):
        if not any(es.minimal_conflict(a, b) for a, b in combinations(tri, 2)):
            return "triangle", tri
    return None


def is_simple(es: EventStructure) -> bool:
    return simplicity_failure(es) is None


@dataclass(frozen=True)
class SimpleDecomposition:
    """The partition of the lifted structure used by :func:`label_simple`."""

    lifted: EventStructure
    bottom: str
    order: tuple[str, ...]
    e1: tuple[str, ...]
    e2: tuple[str, ...]
    rho: dict[str, str]
    partition: dict[str, str]


def tree_class(rho: str) -> str:
    return f"T:{rho}"


def decompose(es: EventStructure) -> SimpleDecomposition:
    lifted = es.lift_bottom()
    (bottom,) = set(lifted.events) - set(es.events)
    n = len(lifted)
    by_covers: dict[int, list[str]] = {}
    for i in range(n):
        by_covers.setdefault(popcount(lifted.lower_cover_mask(i)), []).append(lifted.events[i])
    if by_covers.get(3) or any(k > 3 for k in by_covers):
        x = next(x for k, xs in sorted(by_covers.items()) if k >= 3 for x in xs)
        raise TheoremViolation(f"{x!r} has three or more lower covers", witness=x)
    e1 = tuple(by_covers.get(1, []))
    e2 = tuple(by_covers.get(2, []))

    heights = lifted.heights()
    order = tuple(sorted(lifted.events, key=lambda x: (heights[x], x)))

    e1set = set(e1)
    rho: dict[str, str] = {}
    for x in e1:
        z = x
        while z in e1set:
            (z,) = lifted.lower_covers(z)
        rho[x] = z
        # z must dominate every non-E1 event below x
        for w in lifted.below(x):
            if w not in e1set and not lifted.leq(w, z):
                raise TheoremViolation(f"rho({x!r}) is not a maximum", witness=x)

    partition = {bottom: E0_CLASS}
    partition.update({x: E2_CLASS for x in e2})
    partition.update({x: tree_class(rho[x]) for x in e1})
    return SimpleDecomposition(lifted, bottom, order, e1, e2, rho, partition)


def color_e2(dec: SimpleDecomposition) -> dict[str, int]:
    """Greedy three-coloring of E2 along the height order, with its claim checked.

    For ``x`` in E2 every earlier orthogonal event has all its lower covers
    among those of ``x``, and there are at most two of them.
    """
    es = dec.lifted
    pos = {x: k for k, x in enumerate(dec.order)}
    for x in dec.e2:
        i = es.index[x]
        earlier = [y for y in es.names(es.ortho_mask(i)) if pos[y] < pos[x]]
        for y in earlier:
            if es.lower_cover_mask(es.index[y]) & ~es.lower_cover_mask(i):
                raise TheoremViolation(f"{y!r} in O({x}) has a foreign lower cover", witness=x)
        if len(earlier) > 2:
            raise TheoremViolation(f"O({x}) has {len(earlier)} elements", witness=x)
    sub = ortho_graph(es).induced(dec.e2)
    coloring = greedy_color(sub, [x for x in dec.order if x in set(dec.e2)])
    if coloring.num_colors > 3:
        raise TheoremViolation("E2 needed more than three colors", witness=dec.e2)
    return dict(coloring.assignment)


def _f_value(es: EventStructure, rho_y: str, y_member: str, rho_x: str) -> str:
    """Least ``z`` with ``rho_y <= z <= y_member`` and ``z`` not below ``rho_x``."""
    chain = [z for z in es.events if es.leq(rho_y, z) and es.leq(z, y_member) and not es.leq(z, rho_x)]
    least = [z for z in chain if all(es.leq(z, w) for w in chain)]
    if len(least) != 1:
        raise TheoremViolation(f"no least element between {rho_y!r} and {y_member!r}", witness=y_member)
    return least[0]


def color_trees(dec: SimpleDecomposition, qg: OrthoGraph) -> dict[str, int]:
    """Three-color the tree classes of the quotient graph, checking the injection bound.

    Trees are ordered by the position of their ``rho``.  Each earlier
    adjacent tree ``[y]`` is sent to an event ``f([y])`` orthogonal to
    ``rho(x)`` whose lower covers are lower covers of ``rho(x)``; ``f`` must
    be injective with at most two values.
    """
    es = dec.lifted
    pos = {x: k for k, x in enumerate(dec.order)}
    members: dict[str, list[str]] = {}
    rho_of: dict[str, str] = {}
    for x in dec.e1:
        c = dec.partition[x]
        members.setdefault(c, []).append(x)
        rho_of[c] = dec.rho[x]
    trees = sorted(members, key=lambda c: pos[rho_of[c]])
    colors: dict[str, int] = {}
    for cx in trees:
        rx = rho_of[cx]
        earlier = [
            cy for cy in qg.neighbours(cx) if cy in rho_of and pos[rho_of[cy]] < pos[rx]
        ]
        images = {}
        for cy in earlier:
            pair = next(
                ((yp, xp) for yp in members[cy] for xp in members[cx] if es.orthogonal(yp, xp)),
                None,
            )
            if pair is None:
                raise TheoremViolation(f"classes {cy}, {cx} adjacent without witness", witness=cx)
            yp, _ = pair
            fz = _f_value(es, rho_of[cy], yp, rx)
            if not es.orthogonal(fz, rx):
                raise TheoremViolation(f"f({cy}) = {fz!r} is not orthogonal to {rx!r}", witness=cx)
            if es.lower_cover_mask(es.index[fz]) & ~es.lower_cover_mask(es.index[rx]):
                raise TheoremViolation(f"f({cy}) = {fz!r} is not in C({rx})", witness=cx)
            images[cy] = fz
        if len(set(images.values())) != len(images):
            raise TheoremViolation(f"f is not injective on O({cx})", witness=cx)
        if len(images) > 2:
            raise TheoremViolation(f"O({cx}) has {len(images)} trees", witness=cx)
        used = {colors[cy] for cy in earlier}
        colors[cx] = min(c for c in range(3) if c not in used)
    return colors


def label_simple(es: EventStructure) -> Labelling:
    """Labelling with at most 12 letters (letters actually used are renumbered)."""
    failure = simplicity_failure(es)
    if failure is not None:
        raise NotSimple(*failure)
    dec = decompose(es)
    lifted = dec.lifted
    qg = quotient_graph(lifted, dec.partition)
    if qg.neighbours(E0_CLASS):
        raise TheoremViolation("the bottom class is not isolated", witness=E0_CLASS)

    e2_colors = color_e2(dec)
    tree_colors = color_trees(dec, qg)
    qcolors = dict(tree_colors)
    qcolors[E0_CLASS] = 0
    if dec.e2:
        qcolors[E2_CLASS] = 3
    num = 4 if dec.e2 else max(qcolors.values()) + 1
    quotient = Coloring(qcolors, num)

    def class_labeller(_: EventStructure, members: frozenset) -> dict[str, int]:
        if members == {dec.bottom}:
            return {dec.bottom: 0}
        if dec.e2 and members == set(dec.e2):
            return e2_colors
        return label_tree(lifted, sorted(members), choose_tree_order(lifted, sorted(members)))[0]

    full = label_quotient(lifted, dec.partition, class_labeller, quotient, "simple")
    if full.alphabet_size > 12:
        raise TheoremViolation(f"{full.alphabet_size} letters exceed 12", witness=full.alphabet_size)
    restricted = Labelling({x: full.assignment[x] for x in es.events}, full.alphabet_size, "simple")
    return compact(restricted)
