"""The configuration domain D(E): conflict-free lower sets ordered by inclusion."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

from eslab.core import EventStructure, bits
from eslab.errors import DomainTooLarge, UnlabelledEvent

DEFAULT_MAX_CONFIGS = 100_000


@dataclass(frozen=True)
class DomainPoset:
    """Configurations in BFS order (by size, then lexicographic), with Hasse edges.

    ``masks[k]`` is configuration ``k`` as a bitmask over ``events``;
    ``hasse`` holds ``(lower, upper)`` index pairs and ``added[e]`` the event
    that edge ``e`` adds.
    """

    events: tuple[str, ...]
    masks: tuple[int, ...]
    hasse: tuple[tuple[int, int], ...]
    added: tuple[str, ...]
    position: dict[int, int] = field(repr=False, compare=False)

    @property
    def configs(self) -> list[frozenset[str]]:
        return [self.config(k) for k in range(len(self.masks))]

    def config(self, k: int) -> frozenset[str]:
        return frozenset(self.events[i] for i in bits(self.masks[k]))

    def sorted_config(self, k: int) -> tuple[str, ...]:
        return tuple(self.events[i] for i in bits(self.masks[k]))

    def __len__(self) -> int:
        return len(self.masks)

    def upper_covers(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.masks]
        for lo, hi in self.hasse:
            out[lo].append(hi)
        return out


def configurations(
    es: EventStructure, max_configs: int = DEFAULT_MAX_CONFIGS
) -> DomainPoset:
    """Enumerate every configuration of ``es`` level by level.

    An event ``x`` extends a configuration ``I`` exactly when its lower
    covers lie in ``I`` and it conflicts with nothing in ``I``; each such
    extension is a Hasse edge of the domain.
    """
    if max_configs < 1:
        raise ValueError("max_configs must be at least 1")
    n = len(es)
    lcov = [es.lower_cover_mask(i) for i in range(n)]
    conf = [es.conflict_mask(i) for i in range(n)]

    def key(m: int) -> tuple[int, ...]:
        return tuple(bits(m))

    masks: list[int] = [0]
    position = {0: 0}
    hasse: list[tuple[int, int]] = []
    added: list[str] = []
    level = [0]
    while level:
        pending: list[tuple[int, int, int]] = []  # (lower mask, event, upper mask)
        fresh: set[int] = set()
        for m in level:
            for x in range(n):
                if m >> x & 1 or lcov[x] & ~m or conf[x] & m:
                    continue
                up = m | (1 << x)
                pending.append((m, x, up))
                if up not in position and up not in fresh:
                    fresh.add(up)
                    if len(masks) + len(fresh) > max_configs:
                        raise DomainTooLarge(
                            f"domain has more than {max_configs} configurations",
                            count=len(masks) + len(fresh),
                        )
        nxt = sorted(fresh, key=key)
        for m in nxt:
            position[m] = len(masks)
            masks.append(m)
        for lo, x, up in pending:
            hasse.append((position[lo], position[up]))
            added.append(es.events[x])
        level = nxt
    order = sorted(range(len(hasse)), key=lambda e: hasse[e])
    return DomainPoset(
        es.events,
        tuple(masks),
        tuple(hasse[e] for e in order),
        tuple(added[e] for e in order),
        position,
    )


def branching_degree(d: DomainPoset) -> int:
    """Maximum number of upper covers of a configuration."""
    counts: dict[int, int] = defaultdict(int)
    for lo, _ in d.hasse:
        counts[lo] += 1
    return max(counts.values(), default=0)


def enabled_sets(d: DomainPoset) -> list[frozenset[str]]:
    """For each configuration, the events labelling its outgoing Hasse edges."""
    out: list[set[str]] = [set() for _ in d.masks]
    for (lo, _), x in zip(d.hasse, d.added):
        out[lo].add(x)
    return [frozenset(s) for s in out]


# -- perspective edges ---------------------------------------------------------


def is_perspective(d: DomainPoset, e1: int, e2: int) -> bool:
    """``I0 < I1`` and ``J0 < J1`` with ``I0 = I1 & J0`` and ``J1 = I1 | J0``."""
    i0, i1 = (d.masks[k] for k in d.hasse[e1])
    j0, j1 = (d.masks[k] for k in d.hasse[e2])
    return i0 == i1 & j0 and j1 == i1 | j0


def perspective_pairs(d: DomainPoset) -> Iterator[tuple[int, int]]:
    """All ordered pairs of perspective Hasse edges, by brute force."""
    for e1 in range(len(d.hasse)):
        for e2 in range(len(d.hasse)):
            if e1 != e2 and is_perspective(d, e1, e2):
                yield e1, e2


def check_perspective_labelling(
    d: DomainPoset, es: EventStructure, lab: Mapping[str, int] | object
) -> list[tuple[str, ...]]:
    """Violations of the edge-labelling conditions induced by ``lab``.

    Each report entry is ``("branch", config, x, y)`` for two edges out of
    one configuration sharing a letter, or ``("perspective", x)`` when
    perspective edges adding ``x`` carry different letters.

    If ``I0 = I1 & J0`` and ``J1 = I1 | J0`` then ``I0 <= J0`` and both edges
    add the same event, so every perspective pair lies inside one group of
    edges adding a common event; the second condition is checked per group.
    """
    assignment = getattr(lab, "assignment", lab)
    for x in es.events:
        if x not in assignment:
            raise UnlabelledEvent(f"event {x!r} has no label", witness=x)
    report: list[tuple[str, ...]] = []

    outgoing: dict[int, list[str]] = defaultdict(list)
    for (lo, _), x in zip(d.hasse, d.added):
        outgoing[lo].append(x)
    for lo in sorted(outgoing):
        xs = sorted(outgoing[lo])
        for a in range(len(xs)):
            for b in range(a + 1, len(xs)):
                if assignment[xs[a]] == assignment[xs[b]]:
                    cfg = "{" + ",".join(d.sorted_config(lo)) + "}"
                    report.append(("branch", cfg, xs[a], xs[b]))

    groups: dict[str, list[int]] = defaultdict(list)
    for e, x in enumerate(d.added):
        groups[x].append(e)
    for x, edges in groups.items():
        letters = {assignment[d.added[e]] for e in edges}
        if len(letters) > 1:
            report.append(("perspective", x))
    return report


# -- chopped lattice -------------------------------------------------------------


def check_chopped_lattice(d: DomainPoset) -> list[tuple[str, ...]]:
    """Counterexamples to intersection closure and distributivity (expected none).

    Distributivity is checked for every ``X, Y`` whose union is a
    configuration ``U`` and every configuration ``Z``.  Only ``Z & U``
    matters, and ``{Z & U}`` ranges exactly over the configurations below
    ``U`` once intersection closure holds, so ``Z`` is taken from those.
    """
    report: list[tuple[str, ...]] = []
    masks = d.masks
    present = d.position

    def show(m: int) -> str:
        return "{" + ",".join(d.events[i] for i in bits(m)) + "}"

    m = len(masks)
    for a in range(m):
        for b in range(a + 1, m):
            meet = masks[a] & masks[b]
            if meet not in present:
                report.append(("meet", show(masks[a]), show(masks[b])))
    if report:
        return report

    below_of: dict[int, list[int]] = {}
    for a in range(m):
        x = masks[a]
        for b in range(a, m):
            y = masks[b]
            u = x | y
            if u not in present:
                continue
            if u not in below_of:
                below_of[u] = [z for z in masks if z & ~u == 0]
            for z in below_of[u]:
                lhs = z & u
                zx, zy = z & x, z & y
                rhs = zx | zy
                if lhs != rhs or zx not in present or zy not in present or rhs not in present:
                    report.append(("distributive", show(x), show(y), show(z)))
    return report
