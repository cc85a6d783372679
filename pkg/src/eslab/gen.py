"""Seeded generators and the named fixture corpus.

Generation is incremental: events are added one at a time and each new event
is maximal when it arrives.  A new maximal event changes neither the order
nor the conflicts among older events, so only its own orthogonality edges are
new and every check (degree cap, forest shape, simplicity) is local to it.
A candidate that breaks a check is resampled a bounded number of times;
after that the event falls back to covering a single maximal event with no
conflict of its own.  That fallback never raises the degree and never
breaks simplicity, since any clique through the new event maps onto a
clique through its parent.
"""

from __future__ import annotations

from dataclasses import dataclass

from eslab.core import EventStructure, bits, build, popcount
from eslab.errors import GenerationFailed, UnknownFixture
from eslab.graph import _max_clique_mask, degree

MASK64 = (1 << 64) - 1
KINDS = ("random", "forest", "simple")


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014).

    ``state += 0x9E3779B97F4A7C15``; the output mixes ``z = state`` with
    ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31`` (all modulo 2**64).
    """

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``, by rejection of the biased tail."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


@dataclass(frozen=True)
class GenParams:
    num_events: int
    seed: int = 0
    kind: str = "random"
    degree_cap: int = 3
    conflict_density: float = 0.3
    retries: int = 20

    def __post_init__(self) -> None:
        if self.num_events < 0:
            raise ValueError("num_events must be non-negative")
        if self.degree_cap < 1:
            raise ValueError("degree_cap must be at least 1")
        if not 0.0 <= self.conflict_density <= 1.0:
            raise ValueError("conflict_density must lie in [0, 1]")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


class _Builder:
    """Relation masks of a growing structure whose newest event is maximal."""

    def __init__(self) -> None:
        self.lcov: list[int] = []
        self.below: list[int] = []
        self.conf: list[int] = []
        self.adj: list[int] = []
        self.height: list[int] = []
        self.maximal = 0
        self.gens: list[tuple[int, int]] = []

    def __len__(self) -> int:
        return len(self.lcov)

    def candidate(self, parents: int, partners: int) -> tuple[int, int, int]:
        """Below, conflict and orthogonality masks the next event would get."""
        n = len(self)
        below = 0
        for p in bits(parents):
            below |= self.below[p] | (1 << p)
        conf = 0
        for p in bits(below):
            conf |= self.conf[p]
        for u in bits(partners):
            conf |= self._up(u)
        ortho = 0
        for j in bits(((1 << n) - 1) & ~below):
            if not conf >> j & 1:
                ortho |= 1 << j
            elif not conf & self.below[j] and not self.conf[j] & below:
                ortho |= 1 << j
        return below, conf, ortho

    def _up(self, u: int) -> int:
        m = 1 << u
        for j in range(u + 1, len(self)):
            if self.below[j] >> u & 1:
                m |= 1 << j
        return m

    def add(self, parents: int, partners: int, masks: tuple[int, int, int]) -> None:
        below, conf, ortho = masks
        x = len(self)
        self.lcov.append(parents)
        self.below.append(below)
        self.conf.append(conf)
        self.adj.append(ortho)
        for j in bits(conf):
            self.conf[j] |= 1 << x
        for j in bits(ortho):
            self.adj[j] |= 1 << x
        self.height.append(max((self.height[p] + 1 for p in bits(parents)), default=0))
        self.maximal = (self.maximal & ~parents) | (1 << x)
        self.gens.extend((u, x) for u in bits(partners))

    def clique_through(self, ortho: int) -> int:
        """Size of a largest clique containing the new event."""
        return 1 + popcount(_max_clique_mask(self.adj, ortho))

    def bad_triangle(self, ortho: int, conf: int) -> tuple[int, int] | None:
        """A triangle through the new event with all three pairs concurrent."""
        conc = ortho & ~conf
        for a in bits(conc):
            common = self.adj[a] & conc & ~self.conf[a]
            if common >> (a + 1):
                return a, next(bits(common >> (a + 1) << (a + 1)))
        return None

    def structure(self, names: list[str]) -> EventStructure:
        covers = [(names[p], names[i]) for i, m in enumerate(self.lcov) for p in bits(m)]
        return build(names, covers, [(names[a], names[b]) for a, b in self.gens])


def _names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"e{k:0{width}d}" for k in range(n)]


def _random_antichain(rng: SplitMix64, b: _Builder, pool: int, size: int) -> int:
    chosen = 0
    cand = list(bits(pool))
    while cand and popcount(chosen) < size:
        v = cand.pop(rng.below(len(cand)))
        if not (b.below[v] & chosen) and not any(b.below[c] >> v & 1 for c in bits(chosen)):
            chosen |= 1 << v
    return chosen


def _sample_parents(rng: SplitMix64, b: _Builder, kind: str) -> int:
    n = len(b)
    if n == 0:
        return 0
    r = rng.random()
    if kind == "forest":
        k = 0 if r < 0.15 else 1
    else:
        k = 0 if r < 0.1 else 1 if r < 0.6 else 2
    if k == 0:
        return 0
    # favour the current frontier so the order grows upward
    pool = b.maximal if rng.random() < 0.7 else (1 << n) - 1
    if kind == "simple":
        first = _random_antichain(rng, b, pool, 1)
        h = b.height[next(bits(first))]
        pool &= sum(1 << i for i in range(n) if b.height[i] == h)
        return first | _random_antichain(rng, b, pool & ~first, k - 1)
    return _random_antichain(rng, b, pool, k)


def _sample_partners(rng: SplitMix64, b: _Builder, parents: int, density: float) -> int:
    """Up to two conflict partners, each drawn with probability ``density``."""
    below = 0
    for p in bits(parents):
        below |= b.below[p] | (1 << p)
    pool = list(bits(((1 << len(b)) - 1) & ~below))
    partners = 0
    for _ in range(2):
        if pool and rng.random() < density:
            partners |= 1 << pool.pop(rng.below(len(pool)))
    return partners


def _generate(p: GenParams) -> EventStructure:
    rng = SplitMix64(p.seed)
    kind = p.kind
    cap = min(p.degree_cap, 3) if kind == "simple" else p.degree_cap
    b = _Builder()
    for _ in range(p.num_events):
        step = rng.split()
        accepted = False
        for _attempt in range(p.retries):
            parents = _sample_parents(step, b, kind)
            partners = _sample_partners(step, b, parents, p.conflict_density)
            masks = b.candidate(parents, partners)
            if masks[1] & masks[0]:
                # conflicting causes: the new event could never occur
                continue
            if kind == "simple":
                # repair all-concurrent triangles by one extra conflict each
                for _ in range(3):
                    tri = b.bad_triangle(masks[2], masks[1])
                    if tri is None:
                        break
                    partners |= 1 << tri[0]
                    masks = b.candidate(parents, partners)
                if b.bad_triangle(masks[2], masks[1]) is not None:
                    continue
            if b.clique_through(masks[2]) > cap:
                continue
            b.add(parents, partners, masks)
            accepted = True
            break
        if not accepted:
            parents = 0
            if len(b):
                tops = list(bits(b.maximal))
                parents = 1 << tops[step.below(len(tops))]
            b.add(parents, 0, b.candidate(parents, 0))
    es = b.structure(_names(p.num_events))
    _postcondition(es, kind, cap)
    return es


def _postcondition(es: EventStructure, kind: str, cap: int) -> None:
    from eslab.labelling.forest import is_forest
    from eslab.labelling.simple import simplicity_failure

    d = degree(es)
    if d > cap:
        raise GenerationFailed(f"generated degree {d} exceeds cap {cap}", witness=d)
    if kind == "forest" and not is_forest(es):
        raise GenerationFailed("generated structure is not a forest")
    if kind == "simple":
        failure = simplicity_failure(es)
        if failure is not None:
            raise GenerationFailed(f"generated structure is not simple: {failure[0]}", witness=failure[1])


def gen_random(p: GenParams) -> EventStructure:
    return _generate(_with_kind(p, "random"))


def gen_forest(p: GenParams) -> EventStructure:
    """Every event has at most one lower cover."""
    return _generate(_with_kind(p, "forest"))


def gen_simple(p: GenParams) -> EventStructure:
    """Graded, degree at most 3, and no triangle of pairwise concurrent events."""
    return _generate(_with_kind(p, "simple"))


def generate(p: GenParams) -> EventStructure:
    return _generate(p)


def _with_kind(p: GenParams, kind: str) -> GenParams:
    if p.kind == kind:
        return p
    return GenParams(p.num_events, p.seed, kind, p.degree_cap, p.conflict_density, p.retries)


# -- fixtures ----------------------------------------------------------------------

_FIXTURES: dict[str, tuple[list[str], list[tuple[str, str]], list[tuple[str, str]]]] = {
    "EMPTY": ([], [], []),
    "SINGLE": (["a"], [], []),
    "CHAIN3": (["a", "b", "c"], [("a", "b"), ("b", "c")], []),
    "ANTI3": (["a", "b", "c"], [], []),
    "CONF2": (["a", "b"], [], [("a", "b")]),
    "FORK": (["r", "x", "y"], [("r", "x"), ("r", "y")], []),
    "TWIN2": (["r", "x", "y"], [("r", "x"), ("r", "y")], [("x", "y")]),
    "S": (
        [str(k) for k in range(1, 10)],
        [
            ("1", "3"), ("1", "4"), ("2", "4"), ("2", "5"),
            ("3", "6"), ("3", "7"), ("5", "8"), ("5", "9"),
        ],
        [("6", "7"), ("8", "9"), ("3", "5")],
    ),
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture(name: str) -> EventStructure:
    try:
        events, covers, conflict = _FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}", witness=name) from None
    return build(events, covers, conflict)
