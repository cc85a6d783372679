"""The orthogonality graph and the coloring machinery built on it.

Graphs are small (tens of vertices for the exact routines), so everything
works on ``int`` bitmask adjacency rows indexed by vertex position.  All
searches break ties by vertex position, which is the lexicographic id order
for graphs coming from an event structure, so results are reproducible.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

from eslab.core import EventStructure, bits, popcount
from eslab.errors import BadOrder, ExceedsCap, NotAnAntichain, SizeLimitExceeded

DEFAULT_EXACT_LIMIT = 64


def exact_limit() -> int:
    """Vertex limit for exact routines (``ESLAB_EXACT_LIMIT`` overrides 64)."""
    raw = os.environ.get("ESLAB_EXACT_LIMIT")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return DEFAULT_EXACT_LIMIT


@dataclass(frozen=True)
class OrthoGraph:
    vertices: tuple[str, ...]
    adj: tuple[int, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {v: i for i, v in enumerate(self.vertices)})

    @classmethod
    def from_edges(
        cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]
    ) -> "OrthoGraph":
        vs = tuple(sorted(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        adj = [0] * len(vs)
        for a, b in edges:
            i, j = pos[a], pos[b]
            if i == j:
                raise ValueError(f"self-loop on {a!r}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(vs, tuple(adj))

    def __len__(self) -> int:
        return len(self.vertices)

    def has_edge(self, a: str, b: str) -> bool:
        return bool(self.adj[self.index[a]] >> self.index[b] & 1)

    def neighbours(self, v: str) -> tuple[str, ...]:
        return tuple(self.vertices[j] for j in bits(self.adj[self.index[v]]))

    def edges(self) -> list[tuple[str, str]]:
        return [
            (self.vertices[i], self.vertices[j])
            for i in range(len(self.vertices))
            for j in bits(self.adj[i])
            if i < j
        ]

    def num_edges(self) -> int:
        return sum(popcount(a) for a in self.adj) // 2

    def induced(self, vs: Iterable[str]) -> "OrthoGraph":
        keep = sorted({self.index[v] for v in vs})
        remap = {old: new for new, old in enumerate(keep)}
        adj = []
        for old in keep:
            row = 0
            for j in bits(self.adj[old]):
                if j in remap:
                    row |= 1 << remap[j]
            adj.append(row)
        return OrthoGraph(tuple(self.vertices[i] for i in keep), tuple(adj))


@dataclass(frozen=True)
class Coloring:
    assignment: Mapping[str, int]
    num_colors: int

    def is_proper(self, g: OrthoGraph) -> bool:
        return all(self.assignment[a] != self.assignment[b] for a, b in g.edges())


def ortho_graph(es: EventStructure) -> OrthoGraph:
    return OrthoGraph(es.events, tuple(es.ortho_mask(i) for i in range(len(es))))


# -- cliques -----------------------------------------------------------------


def _greedy_color_bound(adj: Sequence[int], cand: int) -> tuple[list[int], list[int]]:
    """Sequential greedy coloring of ``cand``; returns vertices and color bounds."""
    order: list[int] = []
    bound: list[int] = []
    uncolored = cand
    color = 0
    while uncolored:
        color += 1
        avail = uncolored
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v) & ~adj[v]
            uncolored &= ~(1 << v)
            order.append(v)
            bound.append(color)
    return order, bound


def _max_clique_mask(adj: Sequence[int], cand: int) -> int:
    best = 0
    best_size = 0

    def expand(r: int, size: int, p: int) -> None:
        nonlocal best, best_size
        order, bound = _greedy_color_bound(adj, p)
        for k in range(len(order) - 1, -1, -1):
            if size + bound[k] <= best_size:
                return
            v = order[k]
            np_ = p & adj[v]
            if np_:
                expand(r | (1 << v), size + 1, np_)
            elif size + 1 > best_size:
                best, best_size = r | (1 << v), size + 1
            p &= ~(1 << v)

    if cand:
        expand(0, 0, cand)
    return best


def max_clique(g: OrthoGraph) -> tuple[str, ...]:
    """A maximum clique, found by branch and bound with a coloring bound."""
    m = _max_clique_mask(g.adj, (1 << len(g.vertices)) - 1)
    return tuple(g.vertices[i] for i in bits(m))


def clique_number(g: OrthoGraph) -> int:
    return popcount(_max_clique_mask(g.adj, (1 << len(g.vertices)) - 1))


def degree(es: EventStructure) -> int:
    """Clique number of the orthogonality graph."""
    return clique_number(ortho_graph(es))


# -- coloring ----------------------------------------------------------------


def greedy_color(g: OrthoGraph, order: Sequence[str]) -> Coloring:
    """Give each vertex, in ``order``, the least color unused by colored neighbours."""
    if len(order) != len(g.vertices) or set(order) != set(g.vertices):
        raise BadOrder("order is not a permutation of the vertices", witness=list(order))
    color = [-1] * len(g.vertices)
    for v in order:
        i = g.index[v]
        used = {color[j] for j in bits(g.adj[i])}
        c = 0
        while c in used:
            c += 1
        color[i] = c
    return Coloring(dict(zip(g.vertices, color)), max(color, default=-1) + 1)


def _dsatur_pick(adj: Sequence[int], color: list[int], nbr_colors: list[int]) -> int:
    best = -1
    best_key: Optional[tuple[int, int]] = None
    uncolored = 0
    for i, c in enumerate(color):
        if c < 0:
            uncolored |= 1 << i
    for i in bits(uncolored):
        key = (popcount(nbr_colors[i]), popcount(adj[i] & uncolored))
        if best_key is None or key > best_key:
            best, best_key = i, key
    return best


def dsatur_greedy(g: OrthoGraph) -> Coloring:
    """One DSATUR pass: no backtracking, an upper bound on the chromatic number."""
    n = len(g.vertices)
    color = [-1] * n
    nbr = [0] * n
    for _ in range(n):
        v = _dsatur_pick(g.adj, color, nbr)
        c = 0
        while nbr[v] >> c & 1:
            c += 1
        color[v] = c
        for j in bits(g.adj[v]):
            nbr[j] |= 1 << c
    return Coloring(dict(zip(g.vertices, color)), max(color, default=-1) + 1)


def chromatic_exact(
    g: OrthoGraph, cap: int, limit: Optional[int] = None
) -> tuple[int, Coloring]:
    """Minimum coloring by DSATUR branch and bound.

    The search starts from a maximum clique (pre-colored, which both bounds
    and breaks color symmetry) and a greedy DSATUR upper bound.  Raises
    :class:`ExceedsCap` carrying the best coloring found when more than
    ``cap`` colors are needed.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    limit = exact_limit() if limit is None else limit
    n = len(g.vertices)
    if n > limit:
        raise SizeLimitExceeded(f"{n} vertices exceed the exact limit {limit}", witness=n)
    if n == 0:
        return 0, Coloring({}, 0)

    adj = g.adj
    greedy = dsatur_greedy(g)
    best = [greedy.assignment[v] for v in g.vertices]
    best_k = greedy.num_colors
    clique = list(bits(_max_clique_mask(adj, (1 << n) - 1)))
    lower = len(clique)

    if best_k > lower:
        color = [-1] * n
        nbr = [0] * n
        for c, v in enumerate(clique):
            color[v] = c
            for j in bits(adj[v]):
                nbr[j] |= 1 << c

        def search(colored: int, used: int) -> bool:
            nonlocal best, best_k
            if used >= best_k:
                return False
            if colored == n:
                best, best_k = color[:], used
                return best_k == lower
            v = _dsatur_pick(adj, color, nbr)
            options = [c for c in range(used) if not nbr[v] >> c & 1]
            if used + 1 < best_k:
                options.append(used)
            for c in options:
                color[v] = c
                touched = [j for j in bits(adj[v]) if not nbr[j] >> c & 1]
                for j in touched:
                    nbr[j] |= 1 << c
                done = search(colored + 1, max(used, c + 1))
                for j in touched:
                    nbr[j] &= ~(1 << c)
                color[v] = -1
                if done:
                    return True
                if used >= best_k:
                    break
            return False

        search(len(clique), lower)

    coloring = Coloring(dict(zip(g.vertices, best)), best_k)
    if best_k > cap:
        raise ExceedsCap(f"chromatic number {best_k} exceeds cap {cap}", best=coloring)
    return best_k, coloring


# -- straight cycles -----------------------------------------------------------


def straight_cycles(
    es: EventStructure, min_len: int, max_len: int
) -> list[tuple[str, ...]]:
    """All cycles of the orthogonality graph on pairwise incomparable events.

    Each cycle is reported once: least vertex first, then the direction in
    which the second vertex is smaller than the last.
    """
    if min_len < 3 or max_len < min_len:
        raise ValueError("need 3 <= min_len <= max_len")
    n = len(es)
    found: list[tuple[str, ...]] = []
    adj = [es.ortho_mask(i) for i in range(n)]
    incomp = [es.incomparable_mask(i) for i in range(n)]

    for s in range(n):
        higher = ((1 << n) - 1) & ~((1 << (s + 1)) - 1)
        path = [s]

        def extend(last: int, ok: int) -> None:
            length = len(path)
            for v in bits(adj[last] & ok):
                if length >= 2 and path[1] < v and length + 1 >= min_len and adj[v] >> s & 1:
                    found.append(tuple(es.events[i] for i in path + [v]))
                if length + 1 < max_len:
                    path.append(v)
                    extend(v, ok & incomp[v])
                    path.pop()

        extend(s, higher & incomp[s])
    return sorted(found, key=lambda c: (len(c), c))


# -- chordality ----------------------------------------------------------------


def lex_bfs(g: OrthoGraph) -> list[str]:
    """Lexicographic breadth-first search; ties go to the lowest position."""
    n = len(g.vertices)
    labels: list[list[int]] = [[] for _ in range(n)]
    visited = [False] * n
    order = []
    for step in range(n):
        best = -1
        for i in range(n):
            if not visited[i] and (best < 0 or labels[i] > labels[best]):
                best = i
        visited[best] = True
        order.append(best)
        for j in bits(g.adj[best]):
            if not visited[j]:
                labels[j].append(n - step)
    return [g.vertices[i] for i in order]


def is_perfect_elimination_order(g: OrthoGraph, order: Sequence[str]) -> bool:
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        i = g.index[v]
        later = [j for j in bits(g.adj[i]) if pos[g.vertices[j]] > pos[v]]
        if not later:
            continue
        first = min(later, key=lambda j: pos[g.vertices[j]])
        rest = 0
        for j in later:
            if j != first:
                rest |= 1 << j
        if rest & ~g.adj[first]:
            return False
    return True


def find_chordless_cycle(g: OrthoGraph) -> Optional[tuple[str, ...]]:
    """A chordless cycle of length at least 4, or ``None`` if the graph is chordal.

    For every vertex ``v`` and pair ``a, b`` of non-adjacent neighbours, look
    for a shortest ``a``-``b`` path avoiding ``v`` and its other neighbours.
    """
    n = len(g.vertices)
    for v in range(n):
        nb = list(bits(g.adj[v]))
        for x in range(len(nb)):
            for y in range(x + 1, len(nb)):
                a, b = nb[x], nb[y]
                if g.adj[a] >> b & 1:
                    continue
                allowed = ((1 << n) - 1) & ~(g.adj[v] | (1 << v)) | (1 << a) | (1 << b)
                prev = {a: -1}
                frontier = [a]
                while frontier and b not in prev:
                    nxt = []
                    for u in frontier:
                        for w in bits(g.adj[u] & allowed):
                            if w not in prev:
                                prev[w] = u
                                nxt.append(w)
                    frontier = nxt
                if b in prev:
                    path = [b]
                    while path[-1] != a:
                        path.append(prev[path[-1]])
                    cycle = [v] + path[::-1]
                    return _canonical_cycle([g.vertices[i] for i in cycle])
    return None


def _canonical_cycle(cycle: list[str]) -> tuple[str, ...]:
    k = cycle.index(min(cycle))
    rot = cycle[k:] + cycle[:k]
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[:0:-1]
    return tuple(rot)


def chordal_elimination(
    g: OrthoGraph, es: Optional[EventStructure] = None
) -> tuple[bool, tuple[str, ...]]:
    """Test chordality via Lex-BFS.

    Returns ``(True, peo)`` where ``peo`` is a perfect elimination ordering
    (every vertex is simplicial among the vertices after it), or
    ``(False, cycle)`` with a chordless cycle of length at least 4.  When
    ``es`` is given the vertices must form an antichain of it.
    """
    if es is not None and not es.is_antichain(g.vertices):
        raise NotAnAntichain("vertices are not pairwise incomparable", witness=g.vertices)
    peo = tuple(reversed(lex_bfs(g)))
    if is_perfect_elimination_order(g, peo):
        return True, peo
    cycle = find_chordless_cycle(g)
    assert cycle is not None
    return False, cycle


def color_chordal(g: OrthoGraph, peo: Sequence[str]) -> Coloring:
    """Greedy coloring in reverse elimination order (optimal for chordal graphs)."""
    return greedy_color(g, list(reversed(peo)))
