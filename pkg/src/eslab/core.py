"""Coherent event structures: construction, validation and derived relations.

An event structure is stored as a finite poset (given by its Hasse diagram)
together with a hereditary conflict relation.  Internally every relation is a
tuple of Python ``int`` bitmasks indexed by the lexicographic position of the
event id, which keeps the quadratic relation algebra cheap for a few hundred
events.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Iterator
from typing import Optional

from eslab.errors import (
    ConflictBetweenComparable,
    CycleInCovers,
    DuplicateEvent,
    InvalidEventId,
    RedundantCoverEdge,
    UnknownEvent,
    XNotInY,
)

# plain tokens, plus the reserved bottom ids produced by lift_bottom
EVENT_ID = re.compile(r"[A-Za-z0-9_.-]+|⊥[0-9]*")
BOTTOM = "⊥"


def bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class RelationKind(enum.Enum):
    EQUAL = "Equal"
    BELOW = "Below"
    ABOVE = "Above"
    CONCURRENT = "Concurrent"
    CONFLICT = "Conflict"


class EventStructure:
    """Immutable coherent event structure.

    Use :func:`build` to construct one.  Set-valued results are always
    returned as tuples sorted by event id.
    """

    __slots__ = (
        "events",
        "index",
        "covers",
        "conflict",
        "_lcov",
        "_ucov",
        "_below",
        "_above",
        "_conf",
        "_ortho",
        "_topo",
        "_height",
    )

    def __init__(
        self,
        events: tuple[str, ...],
        lcov: list[int],
        conf: list[int],
        topo: list[int],
    ) -> None:
        n = len(events)
        self.events = events
        self.index = {e: i for i, e in enumerate(events)}
        self._lcov = tuple(lcov)
        self._topo = tuple(topo)

        ucov = [0] * n
        for i in range(n):
            for p in bits(lcov[i]):
                ucov[p] |= 1 << i
        self._ucov = tuple(ucov)

        below = [0] * n
        height = [0] * n
        for i in topo:
            m = 0
            h = 0
            for p in bits(lcov[i]):
                m |= below[p] | (1 << p)
                h = max(h, height[p] + 1)
            below[i] = m
            height[i] = h
        above = [0] * n
        for i in range(n):
            for j in bits(below[i]):
                above[j] |= 1 << i
        self._below = tuple(below)
        self._above = tuple(above)
        self._height = tuple(height)
        self._conf = tuple(conf)

        full = (1 << n) - 1
        ortho = [0] * n
        for i in range(n):
            comparable = below[i] | above[i] | (1 << i)
            m = full & ~comparable & ~conf[i]
            for j in bits(conf[i]):
                if not (conf[j] & below[i]) and not (conf[i] & below[j]):
                    m |= 1 << j
            ortho[i] = m
        self._ortho = tuple(ortho)

        self.covers = frozenset(
            (events[p], events[i]) for i in range(n) for p in bits(lcov[i])
        )
        self.conflict = frozenset(
            (events[i], events[j]) for i in range(n) for j in bits(conf[i]) if i < j
        )

    # -- identity -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.events)

    def __contains__(self, x: object) -> bool:
        return x in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventStructure):
            return NotImplemented
        return (
            self.events == other.events
            and self.covers == other.covers
            and self.conflict == other.conflict
        )

    def __hash__(self) -> int:
        return hash((self.events, self.covers, self.conflict))

    def __repr__(self) -> str:
        return (
            f"EventStructure({len(self.events)} events, {len(self.covers)} covers, "
            f"{len(self.conflict)} conflict pairs)"
        )

    # -- index helpers --------------------------------------------------------

    def _i(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownEvent(f"unknown event {x!r}", witness=x) from None

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.events[i] for i in bits(mask))

    def mask(self, xs: Iterable[str]) -> int:
        m = 0
        for x in xs:
            m |= 1 << self._i(x)
        return m

    @property
    def full_mask(self) -> int:
        return (1 << len(self.events)) - 1

    # raw bitmask views, used by the algorithm modules
    def below_mask(self, i: int) -> int:
        return self._below[i]

    def above_mask(self, i: int) -> int:
        return self._above[i]

    def conflict_mask(self, i: int) -> int:
        return self._conf[i]

    def ortho_mask(self, i: int) -> int:
        return self._ortho[i]

    def lower_cover_mask(self, i: int) -> int:
        return self._lcov[i]

    def upper_cover_mask(self, i: int) -> int:
        return self._ucov[i]

    def incomparable_mask(self, i: int) -> int:
        return self.full_mask & ~(self._below[i] | self._above[i] | (1 << i))

    @property
    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    # -- relations ------------------------------------------------------------

    def leq(self, x: str, y: str) -> bool:
        i, j = self._i(x), self._i(y)
        return i == j or bool(self._below[j] >> i & 1)

    def less(self, x: str, y: str) -> bool:
        i, j = self._i(x), self._i(y)
        return bool(self._below[j] >> i & 1)

    def comparable(self, x: str, y: str) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def in_conflict(self, x: str, y: str) -> bool:
        return bool(self._conf[self._i(x)] >> self._i(y) & 1)

    def relation(self, x: str, y: str) -> RelationKind:
        i, j = self._i(x), self._i(y)
        if i == j:
            return RelationKind.EQUAL
        if self._below[j] >> i & 1:
            return RelationKind.BELOW
        if self._below[i] >> j & 1:
            return RelationKind.ABOVE
        if self._conf[i] >> j & 1:
            return RelationKind.CONFLICT
        return RelationKind.CONCURRENT

    def concurrent(self, x: str, y: str) -> bool:
        return self.relation(x, y) is RelationKind.CONCURRENT

    def minimal_conflict(self, x: str, y: str) -> bool:
        i, j = self._i(x), self._i(y)
        return bool(
            self._conf[i] >> j & 1
            and not self._conf[j] & self._below[i]
            and not self._conf[i] & self._below[j]
        )

    def orthogonal(self, x: str, y: str) -> bool:
        return bool(self._ortho[self._i(x)] >> self._i(y) & 1)

    def neighbours(self, x: str) -> tuple[str, ...]:
        """Events orthogonal to ``x``."""
        return self.names(self._ortho[self._i(x)])

    def minimal_conflicts(self) -> list[tuple[str, str]]:
        ev = self.events
        return [
            (ev[i], ev[j])
            for i in range(len(ev))
            for j in bits(self._conf[i] & self._ortho[i] >> (i + 1) << (i + 1))
        ]

    # -- order structure --------------------------------------------------------

    def lower_covers(self, x: str) -> tuple[str, ...]:
        return self.names(self._lcov[self._i(x)])

    def upper_covers(self, x: str) -> tuple[str, ...]:
        return self.names(self._ucov[self._i(x)])

    def below(self, x: str) -> tuple[str, ...]:
        """Strict lower set of ``x``."""
        return self.names(self._below[self._i(x)])

    def above(self, x: str) -> tuple[str, ...]:
        return self.names(self._above[self._i(x)])

    def minimal_events(self) -> tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.events) if not self._lcov[i])

    def height_of_event(self, x: str) -> int:
        """Length of the longest chain strictly below ``x``."""
        return self._height[self._i(x)]

    def height(self) -> int:
        return max(self._height, default=0)

    def heights(self) -> dict[str, int]:
        return dict(zip(self.events, self._height))

    def chain_cover(self) -> list[tuple[str, ...]]:
        """A minimum partition of the events into chains.

        Maximum matching (augmenting paths) on the bipartite graph
        ``x -> y`` for ``x < y``; each matched edge glues two chain links.
        Chains are listed by their least element in id order.
        """
        n = len(self.events)
        match_right: list[Optional[int]] = [None] * n  # y -> x with x < y matched
        match_left: list[Optional[int]] = [None] * n

        def augment(x: int, seen: list[bool]) -> bool:
            for y in bits(self._above[x]):
                if seen[y]:
                    continue
                seen[y] = True
                if match_right[y] is None or augment(match_right[y], seen):
                    match_right[y] = x
                    match_left[x] = y
                    return True
            return False

        for x in range(n):
            augment(x, [False] * n)

        chains = []
        for x in range(n):
            if match_right[x] is not None:
                continue
            chain = [x]
            while match_left[chain[-1]] is not None:
                chain.append(match_left[chain[-1]])
            chains.append(tuple(self.events[i] for i in chain))
        return chains

    def width(self) -> int:
        """Size of a maximum antichain (equals the minimum chain cover)."""
        return len(self.chain_cover())

    def is_antichain(self, xs: Iterable[str]) -> bool:
        m = self.mask(xs)
        return all(not (self._below[i] & m) for i in bits(m))

    # -- twins and O-sets -------------------------------------------------------

    def twins(self, x: str, y: str) -> bool:
        i, j = self._i(x), self._i(y)
        return i != j and self._lcov[i] == self._lcov[j]

    def o_set_mask(self, x: int, ys: int) -> int:
        """Bitmask form of :meth:`o_set`; ``ys`` must contain ``x``."""
        m = self._ortho[x]
        for y in bits(ys):
            m &= ~(self._above[y] | (1 << y))
        return m

    def o_set(self, x: str, ys: Iterable[str]) -> tuple[str, ...]:
        """Events orthogonal to ``x`` and above none of ``ys``."""
        ys = list(ys)
        ym = self.mask(ys)
        i = self._i(x)
        if not ym >> i & 1:
            raise XNotInY(f"{x!r} is not in {sorted(ys)!r}", witness=x)
        return self.names(self.o_set_mask(i, ym))

    # -- derived structures -------------------------------------------------------

    def restrict(self, xs: Iterable[str]) -> "EventStructure":
        """Induced substructure on ``xs`` (order and conflict restricted)."""
        m = self.mask(xs)
        keep = list(bits(m))
        covers = []
        for b in keep:
            for a in bits(self._below[b] & m):
                if not (self._below[b] & self._above[a] & m):
                    covers.append((self.events[a], self.events[b]))
        conflict = [(x, y) for (x, y) in self.conflict if m >> self.index[x] & 1 and m >> self.index[y] & 1]
        return build([self.events[i] for i in keep], covers, conflict)

    def star(self, x: str) -> "EventStructure":
        """The substructure induced by the events orthogonal to ``x``."""
        return self.restrict(self.names(self._ortho[self._i(x)]))

    def lift_bottom(self) -> "EventStructure":
        """Add a fresh least event below every minimal event."""
        bot = BOTTOM
        k = 0
        while bot in self.index:
            bot = f"{BOTTOM}{k}"
            k += 1
        covers = list(self.covers) + [(bot, m) for m in self.minimal_events()]
        return build(list(self.events) + [bot], covers, self.minimal_conflicts())


def build(
    events: Iterable[str],
    covers: Iterable[tuple[str, str]],
    conflict_generators: Iterable[tuple[str, str]] = (),
) -> EventStructure:
    """Validate the input and return the closed event structure.

    ``covers`` must be the Hasse diagram of the causal order (no edge implied
    by the others); the conflict relation is the upward closure of the
    generators.
    """
    evs = list(events)
    seen: set[str] = set()
    for e in evs:
        if not isinstance(e, str) or not EVENT_ID.fullmatch(e):
            raise InvalidEventId(f"invalid event id {e!r}", witness=e)
        if e in seen:
            raise DuplicateEvent(f"duplicate event {e!r}", witness=e)
        seen.add(e)
    names = tuple(sorted(evs))
    index = {e: i for i, e in enumerate(names)}
    n = len(names)

    def idx(x: str) -> int:
        try:
            return index[x]
        except KeyError:
            raise UnknownEvent(f"unknown event {x!r}", witness=x) from None

    lcov = [0] * n
    for p, c in covers:
        i, j = idx(p), idx(c)
        if i == j:
            raise CycleInCovers(f"self-loop on {p!r}", witness=(p, c))
        if lcov[j] >> i & 1:
            raise RedundantCoverEdge(f"duplicate cover {p!r} -> {c!r}", witness=(p, c))
        lcov[j] |= 1 << i

    # Kahn's algorithm; a leftover means a cycle
    indeg = [bin(m).count("1") for m in lcov]
    ucov = [0] * n
    for j in range(n):
        for i in bits(lcov[j]):
            ucov[i] |= 1 << j
    ready = [i for i in range(n) if indeg[i] == 0]
    topo = []
    while ready:
        i = ready.pop(0)
        topo.append(i)
        for j in bits(ucov[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    if len(topo) < n:
        stuck = sorted(names[i] for i in range(n) if indeg[i] > 0)
        raise CycleInCovers(f"covers contain a cycle through {stuck}", witness=stuck)

    below = [0] * n
    for j in topo:
        for i in bits(lcov[j]):
            below[j] |= below[i] | (1 << i)
    for j in range(n):
        for i in bits(lcov[j]):
            others = lcov[j] & ~(1 << i)
            for k in bits(others):
                if below[k] >> i & 1:
                    raise RedundantCoverEdge(
                        f"cover {names[i]!r} -> {names[j]!r} is implied via {names[k]!r}",
                        witness=(names[i], names[j]),
                    )
    above = [0] * n
    for j in range(n):
        for i in bits(below[j]):
            above[i] |= 1 << j

    conf = [0] * n
    gens = [(idx(a), idx(b), a, b) for a, b in conflict_generators]
    # low pairs first, so pairs their closure already covers are skipped
    depth = [popcount(m) for m in below]
    gens.sort(key=lambda g: (depth[g[0]] + depth[g[1]], g[0], g[1]))
    for i, j, a, b in gens:
        if i == j or below[j] >> i & 1 or below[i] >> j & 1:
            raise ConflictBetweenComparable(
                f"conflict between comparable events {a!r}, {b!r}", witness=(a, b)
            )
        if conf[i] >> j & 1:
            # already implied by an earlier generator below this pair
            continue
        up_i = above[i] | (1 << i)
        up_j = above[j] | (1 << j)
        for k in bits(up_i):
            conf[k] |= up_j
        for k in bits(up_j):
            conf[k] |= up_i
    for i in range(n):
        clash = conf[i] & (below[i] | above[i] | (1 << i))
        if clash:
            j = next(bits(clash))
            raise ConflictBetweenComparable(
                f"closed conflict meets the order at {names[i]!r}, {names[j]!r}",
                witness=(names[i], names[j]),
            )
    return EventStructure(names, lcov, conf, topo)
