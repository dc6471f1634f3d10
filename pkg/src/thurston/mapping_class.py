"""Mapping classes of punctured spheres as outer automorphisms of pi_1.

A mapping class is stored as a representative automorphism of the free
group on ``x_1..x_{n-1}``; two mapping classes are equal when their
automorphisms differ by an inner automorphism (Dehn-Nielsen-Baer).

Composition follows functions: ``a * b`` applies ``b`` first.  Twists are
right-handed: the full twist about ``c_{i,j}`` sends ``x_k`` to
``W x_k W^-1`` for ``i <= k <= j`` with ``W = x_i ... x_j``.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import freegroup as fg
from . import sphere as sp
from .errors import UnsupportedCurve


@dataclass(frozen=True)
class MappingClass:
    surface: sp.PuncturedSphere
    auto: fg.FreeAutomorphism
    word: tuple = ()
    puncture_perm: tuple = ()

    def __post_init__(self):
        if not self.puncture_perm:
            object.__setattr__(self, "puncture_perm", induced_permutation(self.surface, self.auto))

    def __mul__(self, other: "MappingClass") -> "MappingClass":
        auto = fg.compose(self.auto, other.auto)
        perm = tuple(self.puncture_perm[other.puncture_perm[i] - 1] for i in range(self.surface.n))
        return MappingClass(self.surface, auto, fg.mul(self.word, other.word), perm)

    def inverse(self) -> "MappingClass":
        perm = [0] * self.surface.n
        for i, j in enumerate(self.puncture_perm, start=1):
            perm[j - 1] = i
        return MappingClass(self.surface, fg.invert(self.auto), fg.inverse(self.word), tuple(perm))

    def __pow__(self, k: int) -> "MappingClass":
        out = identity(self.surface)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    @property
    def is_pure(self) -> bool:
        return self.puncture_perm == tuple(range(1, self.surface.n + 1))

    def __call__(self, w: Sequence[int]) -> fg.Word:
        return self.auto(w)


def induced_permutation(s: sp.PuncturedSphere, auto: fg.FreeAutomorphism) -> tuple:
    """Puncture permutation read off the images of peripheral loops.

    Raises ``ValueError`` when some peripheral loop is not sent to a
    conjugate of a peripheral generator (orientation included).
    """
    table = {fg.oriented_class(s.generator(i)): i for i in range(1, s.n + 1)}
    perm = []
    for i in range(1, s.n + 1):
        j = table.get(fg.oriented_class(auto(s.generator(i))))
        if j is None:
            raise ValueError(f"automorphism does not preserve the peripheral structure at puncture {i}")
        perm.append(j)
    if sorted(perm) != list(range(1, s.n + 1)):
        raise ValueError("induced puncture map is not a bijection")
    return tuple(perm)


def identity(s: sp.PuncturedSphere) -> MappingClass:
    return MappingClass(s, fg.FreeAutomorphism.identity(s.rank), (), tuple(range(1, s.n + 1)))


def from_automorphism(s: sp.PuncturedSphere, auto: fg.FreeAutomorphism, word=()) -> MappingClass:
    return MappingClass(s, auto, tuple(word))


def _interval_twist(s: sp.PuncturedSphere, i: int, j: int, power: int = 1) -> fg.FreeAutomorphism:
    w = s.interval_word(i, j)
    wp = fg.power(w, power)
    wm = fg.inverse(wp)
    imgs, inv = [], []
    for k in range(1, s.n):
        if i <= k <= j:
            imgs.append(fg.mul(wp, (k,), wm))
            inv.append(fg.mul(wm, (k,), wp))
        else:
            imgs.append((k,))
            inv.append((k,))
    return fg.FreeAutomorphism(tuple(imgs), tuple(inv), s.rank)


def dehn_twist(s: sp.PuncturedSphere, c: sp.CurveClass, power: int = 1) -> MappingClass:
    """Full right-handed twist about a standard curve ``c_{i,j}``."""
    ij = sp.standard_interval(c)
    if ij is None:
        raise UnsupportedCurve("dehn_twist needs a standard curve; use conjugate_twist for images")
    return MappingClass(s, _interval_twist(s, *ij, power), (), tuple(range(1, s.n + 1)))


def half_twist(s: sp.PuncturedSphere, i: int) -> MappingClass:
    """Half-twist swapping punctures ``i`` and ``i+1`` (``1 <= i <= n-1``).

    ``x_i -> x_i x_{i+1} x_i^-1``, ``x_{i+1} -> x_i``; its square is the
    full twist about the curve around punctures ``i, i+1``.
    """
    if not 1 <= i <= s.n - 1:
        raise UnsupportedCurve(f"no half-twist about punctures {i},{i + 1} on {s.n} punctures")
    perm = list(range(1, s.n + 1))
    perm[i - 1], perm[i] = i + 1, i
    if i == s.n - 1:
        imgs = [(k,) for k in range(1, s.n)]
        imgs[i - 1] = fg.mul((i,), s.generator(s.n), (-i,))
        return MappingClass(s, fg.FreeAutomorphism.from_images(imgs, s.rank), (), tuple(perm))
    imgs = [(k,) for k in range(1, s.n)]
    inv = [(k,) for k in range(1, s.n)]
    imgs[i - 1] = (i, i + 1, -i)
    imgs[i] = (i,)
    inv[i - 1] = (i + 1,)
    inv[i] = (-(i + 1), i, i + 1)
    return MappingClass(s, fg.FreeAutomorphism(tuple(imgs), tuple(inv), s.rank), (), tuple(perm))


def permutation_braid(s: sp.PuncturedSphere, perm: Sequence[int]) -> MappingClass:
    """A product of half-twists inducing the puncture permutation ``perm``.

    ``perm[i-1]`` is the image of puncture ``i``.  Bubble-sorting the list
    ``perm`` by adjacent swaps ``k, k+1`` writes it as a product of
    transpositions, each realized by the half-twist ``H_k``.
    """
    cur = list(perm)
    if sorted(cur) != list(range(1, s.n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{s.n}")
    swaps = []
    changed = True
    while changed:
        changed = False
        for k in range(1, s.n):
            if cur[k - 1] > cur[k]:
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
                swaps.append(k)
                changed = True
    out = identity(s)
    for k in reversed(swaps):
        out = out * half_twist(s, k)
    return out


def conjugate_twist(t: MappingClass, by: MappingClass) -> MappingClass:
    """``by o t o by^-1``: the twist about the image of ``t``'s core curve."""
    return by * t * by.inverse()


def act_on_curve(m: MappingClass, c: sp.CurveClass) -> sp.CurveClass:
    w = m.auto(c.word)
    return sp.CurveClass(m.surface, fg.conj_class(w, m.surface.rank), w,
                         sp._enclosure(m.surface, w), c.declared_simple, "image")


def standardize(s: sp.PuncturedSphere, curves: Sequence[sp.CurveClass],
                max_states: int = 20000) -> MappingClass | None:
    """A mapping class sending every curve to a standard curve, or ``None``.

    Searches the orbit of the tuple of classes under the half-twists
    ``H_1..H_{n-1}``.  A short breadth-first pass finds short answers; if
    it runs dry, a best-first pass ordered by total word length takes over,
    which copes with long curve words.  ``None`` means the state budget ran out.
    """
    standard = {sp.standard_curve(s, i, j).cls.word for i, j in sp.standard_pairs(s.n)}
    moves = []
    for i in range(1, s.n):
        h = half_twist(s, i)
        moves += [h, h.inverse()]
    start = tuple(c.cls.word for c in curves)

    def step(cur, k):
        return tuple(fg.conj_class(moves[k].auto(w), s.rank).word for w in cur)

    def unwind(parent, cur):
        path = []
        while parent[cur] is not None:
            cur, k = parent[cur]
            path.append(k)
        m = identity(s)
        for k in reversed(path):
            m = moves[k] * m
        return m

    done = lambda cur: all(w in standard for w in cur)
    parent = {start: None}
    queue = deque([start])
    bfs_cap = min(max_states, 2000)
    while queue and len(parent) <= bfs_cap:
        cur = queue.popleft()
        if done(cur):
            return unwind(parent, cur)
        for k in range(len(moves)):
            nxt = step(cur, k)
            if nxt not in parent:
                parent[nxt] = (cur, k)
                queue.append(nxt)
    if not queue:
        return None
    heap = [(sum(map(len, c)), i, c) for i, c in enumerate(queue)]
    heapq.heapify(heap)
    counter = len(heap)
    while heap:
        _, _, cur = heapq.heappop(heap)
        if done(cur):
            return unwind(parent, cur)
        for k in range(len(moves)):
            nxt = step(cur, k)
            if nxt not in parent:
                parent[nxt] = (cur, k)
                if len(parent) > max_states:
                    return None
                heapq.heappush(heap, (sum(map(len, nxt)), counter, nxt))
                counter += 1
    return None


def oriented_image_class(m: MappingClass, w: Sequence[int]) -> fg.Word:
    return fg.oriented_class(m.auto(w))


def fingerprint(m: MappingClass) -> tuple:
    """Puncture permutation plus the classes of the filling-system images.

    Equal mapping classes have equal fingerprints; the converse is only a
    heuristic, so collisions are settled with ``mc_equal``.
    """
    s = m.surface
    if s.n < 4:
        return (m.puncture_perm,)
    probes = probe_words(s)
    return (m.puncture_perm,) + tuple(fg.conj_class(m.auto(w)).word for w in probes)


_PROBES: dict = {}


def probe_words(s: sp.PuncturedSphere) -> list:
    if s.n not in _PROBES:
        _PROBES[s.n] = [tuple(range(i, j + 1)) for i, j in sp.standard_pairs(s.n)]
    return _PROBES[s.n]


def mc_equal(a: MappingClass, b: MappingClass, budget: int | None = None) -> fg.Word | None:
    """Return a conjugator witnessing ``a == b`` as mapping classes, or ``None``.

    Raises ``Undecided`` if the outer-equality search runs out of budget.
    """
    if a.surface.n != b.surface.n:
        raise ValueError("mapping classes live on different surfaces")
    if a.puncture_perm != b.puncture_perm:
        return None
    if fingerprint(a) != fingerprint(b):
        return None
    return fg.outer_equal(a.auto, b.auto, budget)


def commutes(a: MappingClass, b: MappingClass, budget: int | None = None) -> fg.Word | None:
    return mc_equal(a * b, b * a, budget)


# ---------------------------------------------------------------------------
# Generating sets and word length
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSet:
    """Dehn twists about the standard curves; optionally half-twists.

    With ``half_twists`` the generators attached to two-puncture curves
    ``c_{i,i+1}`` are half-twists instead of full twists (the set then
    generates non-pure classes as well).
    """

    surface: sp.PuncturedSphere
    names: tuple
    curves: tuple
    elements: tuple = field(repr=False)
    half_twists: bool = False

    def __len__(self):
        return len(self.elements)

    def letter(self, a: int) -> MappingClass:
        g = self.elements[abs(a) - 1]
        return g if a > 0 else g.inverse()

    def evaluate(self, word: Sequence[int]) -> MappingClass:
        m = identity(self.surface)
        for a in word:
            m = m * self.letter(a)
        return MappingClass(self.surface, m.auto, tuple(word), m.puncture_perm)

    def name_of(self, a: int) -> str:
        nm = self.names[abs(a) - 1]
        return nm if a > 0 else nm + "^-1"

    def format_word(self, word: Sequence[int]) -> str:
        return " ".join(self.name_of(a) for a in word) or "id"

    def parse_word(self, text: str) -> tuple:
        out = []
        for tok in text.split():
            base, _, exp = tok.partition("^")
            k = int(exp) if exp else 1
            if base not in self.names:
                raise ValueError(f"unknown generator {base!r}; known: {', '.join(self.names)}")
            idx = self.names.index(base) + 1
            out.extend([idx if k > 0 else -idx] * abs(k))
        return tuple(out)

    def letters(self) -> list:
        """Signed letters in shortlex order: 1, -1, 2, -2, ..."""
        out = []
        for k in range(1, len(self.elements) + 1):
            out += [k, -k]
        return out


def standard_generators(s: sp.PuncturedSphere, half_twists: bool = False) -> GeneratorSet:
    names, curves, elements = [], [], []
    for idx, (i, j) in enumerate(sp.standard_pairs(s.n), start=1):
        c = sp.standard_curve(s, i, j)
        if half_twists and j == i + 1:
            g = half_twist(s, i)
            names.append(f"H{i}{j}" if s.n < 11 else f"H{i}_{j}")
        else:
            g = dehn_twist(s, c)
            names.append(f"T{i}{j}" if s.n < 11 else f"T{i}_{j}")
        curves.append(c)
        elements.append(MappingClass(s, g.auto, (idx,), g.puncture_perm))
    return GeneratorSet(s, tuple(names), tuple(curves), tuple(elements), half_twists)


class Ball:
    """Distinct mapping classes of word length ``<= radius``, in shortlex order.

    ``elements`` lists ``MappingClass`` objects whose ``word`` is the
    shortlex-least spelling; ``undecided`` counts equality tests that ran
    out of budget (such elements are kept, so the ball may over-count).
    """

    def __init__(self, gens: GeneratorSet, radius: int, budget: int | None = None,
                 max_elements: int | None = None):
        self.gens = gens
        self.radius = radius
        self.elements: list = []
        self.layers: list = []
        self.undecided = 0
        self._buckets: dict = {}
        self.truncated = False
        start = identity(gens.surface)
        self._insert(start, budget)
        self.layers.append([start])
        frontier = [start]
        for _ in range(radius):
            nxt = []
            for m in frontier:
                for a in gens.letters():
                    if m.word and m.word[-1] == -a:
                        continue
                    cand = m * gens.letter(a)
                    cand = MappingClass(gens.surface, cand.auto, m.word + (a,), cand.puncture_perm)
                    if self._insert(cand, budget):
                        nxt.append(cand)
                        if max_elements is not None and len(self.elements) >= max_elements:
                            self.truncated = True
                            self.layers.append(nxt)
                            return
            self.layers.append(nxt)
            frontier = nxt

    def _insert(self, m: MappingClass, budget) -> bool:
        key = fingerprint(m)
        bucket = self._buckets.setdefault(key, [])
        for other in bucket:
            try:
                if mc_equal(m, other, budget) is not None:
                    return False
            except fg.Undecided:
                self.undecided += 1
        bucket.append(m)
        self.elements.append(m)
        return True

    def find(self, m: MappingClass, budget=None) -> MappingClass | None:
        for other in self._buckets.get(fingerprint(m), []):
            if mc_equal(m, other, budget) is not None:
                return other
        return None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def restrict(self, radius: int) -> "Ball":
        out = Ball.__new__(Ball)
        out.gens, out.radius, out.undecided, out.truncated = self.gens, radius, self.undecided, False
        out.layers = self.layers[:radius + 1]
        out.elements = [m for layer in out.layers for m in layer]
        out._buckets = {}
        for m in out.elements:
            out._buckets.setdefault(fingerprint(m), []).append(m)
        return out


_BALLS: dict = {}


def ball(gens: GeneratorSet, radius: int) -> Ball:
    """Cached ``Ball``; a cached larger ball answers smaller radii by filtering."""
    key = (gens.surface.n, gens.names)
    cached = _BALLS.get(key)
    if cached is not None and cached.radius >= radius and not cached.truncated:
        if cached.radius == radius:
            return cached
        return cached.restrict(radius)
    b = Ball(gens, radius)
    if not b.undecided:
        _BALLS[key] = b
    return b


@dataclass(frozen=True)
class WordLength:
    value: int
    exact: bool

    def __int__(self):
        return self.value


def word_length(m: MappingClass, gens: GeneratorSet, budget: int = 3) -> WordLength:
    """Exact word length if it is at most ``budget``; else the stored word's length as an upper bound."""
    hit = ball(gens, budget).find(m)
    if hit is not None:
        return WordLength(len(hit.word), True)
    if not m.word:
        raise ValueError("word length exceeds the budget and no spelling is stored")
    return WordLength(len(m.word), False)


# ---------------------------------------------------------------------------
# Decorated dual graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecoratedGraph:
    """Dual graph of a reducing system.

    ``decorations[v] = (orbit_id, delta, first_return_id)``; ``edges`` is a
    sequence of vertex pairs (repeats allowed).
    """

    decorations: tuple
    edges: tuple = ()

    def orbit_sizes(self) -> dict:
        sizes: dict = {}
        for orb, *_ in self.decorations:
            sizes[orb] = sizes.get(orb, 0) + 1
        return sizes


def decorated_graph_autos(g: DecoratedGraph) -> list:
    """All decoration-respecting graph automorphisms, as vertex permutations."""
    n = len(g.decorations)
    sizes = g.orbit_sizes()
    multiplicity: dict = {}
    for u, v in g.edges:
        key = (min(u, v), max(u, v))
        multiplicity[key] = multiplicity.get(key, 0) + 1

    def mult(u, v):
        return multiplicity.get((min(u, v), max(u, v)), 0)

    out = []
    image = [None] * n
    used = [False] * n

    def compatible(v, w, orbit_map):
        ov, dv, rv = g.decorations[v]
        ow, dw, rw = g.decorations[w]
        if dv != dw or rv != rw or sizes[ov] != sizes[ow]:
            return False
        if ov in orbit_map and orbit_map[ov] != ow:
            return False
        if ow in orbit_map.values() and orbit_map.get(ov) != ow:
            return False
        for u in range(v + 1):
            if u == v:
                if mult(v, v) != mult(w, w):
                    return False
            elif mult(u, v) != mult(image[u], w):
                return False
        return True

    def extend(v, orbit_map):
        if v == n:
            out.append(tuple(image))
            return
        for w in range(n):
            if used[w] or not compatible(v, w, orbit_map):
                continue
            image[v] = w
            used[w] = True
            ov = g.decorations[v][0]
            added = ov not in orbit_map
            if added:
                orbit_map[ov] = g.decorations[w][0]
            extend(v + 1, orbit_map)
            if added:
                del orbit_map[ov]
            used[w] = False
            image[v] = None

    extend(0, {})
    return out
