"""Exact word calculus in a free group of finite rank.

Letters are nonzero integers: ``k`` is the generator ``x_k`` and ``-k`` its
inverse.  Words are tuples of letters.  Every function returning a word
returns it freely reduced.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import IndexOverflow, InvalidLetter, RankMismatch, ThurstonError

Word = tuple  # tuple[int, ...]

IDENTITY: Word = ()


class Undecided(ThurstonError):
    """A bounded search ran out of budget before reaching a decision."""

    def __init__(self, budget, message="search budget exhausted"):
        super().__init__(f"{message} (budget={budget})")
        self.budget = budget


def check_letters(raw: Iterable[int], rank: int) -> None:
    for a in raw:
        if a == 0 or abs(a) > rank:
            raise InvalidLetter(f"letter {a} outside rank {rank}")


def reduce(raw: Iterable[int], rank: int | None = None) -> Word:
    """Freely reduce ``raw``; validates letters when ``rank`` is given."""
    raw = tuple(raw)
    if rank is not None:
        check_letters(raw, rank)
    elif 0 in raw:
        raise InvalidLetter("letter 0 is not a generator")
    out: list[int] = []
    for a in raw:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def mul(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for a in w:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
    return tuple(out)


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        return power(inverse(w), -k)
    out: Word = ()
    base = reduce(w)
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def conjugate(g: Sequence[int], w: Sequence[int]) -> Word:
    """Return ``g w g^-1``."""
    return mul(g, w, inverse(g))


def abelianize(w: Sequence[int], rank: int) -> tuple:
    v = [0] * rank
    for a in w:
        v[abs(a) - 1] += 1 if a > 0 else -1
    return tuple(v)


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Split a reduced word as ``w = a c a^-1`` with ``c`` cyclically reduced.

    Returns ``(a, c)``.
    """
    w = reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[:i], w[i:j + 1]


def least_rotation(s: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(s)
    if n == 0:
        return 0
    ss = list(s) + list(s)
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = ss[j]
        i = f[j - k - 1]
        while i != -1 and sj != ss[k + i + 1]:
            if sj < ss[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != ss[k + i + 1]:
            if sj < ss[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def min_rotation(s: Sequence[int]) -> Word:
    k = least_rotation(s)
    return tuple(s[k:]) + tuple(s[:k])


def oriented_class(w: Sequence[int]) -> Word:
    """Canonical representative of the conjugacy class of ``w`` (no inversion)."""
    return min_rotation(cyclic_reduce(w)[1])


@dataclass(frozen=True, order=True)
class ConjClass:
    """Conjugacy class of a free-group element up to inversion.

    ``word`` is cyclically reduced and is the least rotation among the
    rotations of the element and of its inverse; ``inverted`` records whether
    the inverse supplied the minimum.  Equality ignores ``inverted``.
    """

    word: Word
    rank: int = field(compare=False, default=0)
    inverted: bool = field(compare=False, default=False)

    @property
    def is_trivial(self) -> bool:
        return not self.word

    def __len__(self) -> int:
        return len(self.word)


def conj_class(w: Sequence[int], rank: int = 0) -> ConjClass:
    if rank:
        check_letters(w, rank)
    core = cyclic_reduce(w)[1]
    fwd = min_rotation(core)
    bwd = min_rotation(inverse(core))
    if bwd < fwd:
        return ConjClass(bwd, rank, True)
    return ConjClass(fwd, rank, False)


def _encode(w: Sequence[int]) -> str:
    return "".join(chr(0x4000 + a) for a in w)


def conjugator(u: Sequence[int], v: Sequence[int]) -> Word | None:
    """Return ``g`` with ``g v g^-1 == u`` or ``None`` if not conjugate."""
    a, uc = cyclic_reduce(u)
    b, vc = cyclic_reduce(v)
    if len(uc) != len(vc):
        return None
    if not uc:
        return () if not vc else None
    k = _encode(vc + vc).find(_encode(uc))
    if k < 0:
        return None
    # uc is the rotation vc[k:] + vc[:k] = p^-1 vc p with p = vc[:k]
    p = vc[:k]
    return mul(a, inverse(p), inverse(b))


def are_conjugate(u: Sequence[int], v: Sequence[int]) -> bool:
    return oriented_class(u) == oriented_class(v)


def primitive_root(w: Sequence[int]) -> Word:
    """Generator of the (cyclic) centralizer of a nontrivial element."""
    a, c = cyclic_reduce(w)
    n = len(c)
    for p in range(1, n + 1):
        if n % p == 0 and c[:p] * (n // p) == c:
            return mul(a, c[:p], inverse(a))
    return ()


def substitute(images: Sequence[Word], w: Sequence[int]) -> Word:
    """Apply the homomorphism ``x_k -> images[k-1]`` to ``w``."""
    out: list[int] = []
    for a in w:
        img = images[a - 1] if a > 0 else inverse(images[-a - 1])
        for b in img:
            if out and out[-1] == -b:
                out.pop()
            else:
                out.append(b)
    return tuple(out)


# ---------------------------------------------------------------------------
# Stallings folding with expression tracking
# ---------------------------------------------------------------------------


class FoldedGraph:
    """Stallings core graph of ``<gens>`` that remembers how to write elements.

    Every edge carries a tag, a word over the symbols ``1..len(gens)``.  The
    invariant maintained through folding is that the tags along any closed
    path at the base vertex, evaluated on ``gens``, equal the path label.
    ``express(w)`` therefore returns a word in the generators evaluating to
    ``w`` whenever ``w`` lies in the subgroup.
    """

    def __init__(self, gens: Sequence[Sequence[int]], rank: int):
        self.rank = rank
        self.gens = [reduce(g, rank) for g in gens]
        self.base = 0
        self._next = 1
        # eid -> [start, generator>0, end, tag]
        self.edges: dict[int, list] = {}
        self.adj: dict[int, set] = {0: set()}
        eid = 0
        for idx, g in enumerate(self.gens, start=1):
            if not g:
                continue
            prev = self.base
            for pos, a in enumerate(g):
                last = pos == len(g) - 1
                nxt = self.base if last else self._new_vertex()
                tag = (idx,) if last else ()
                if a > 0:
                    self.edges[eid] = [prev, a, nxt, tag]
                else:
                    self.edges[eid] = [nxt, -a, prev, inverse(tag)]
                self.adj[prev].add(eid)
                self.adj[nxt].add(eid)
                eid += 1
                prev = nxt
        self._fold()

    def _new_vertex(self) -> int:
        v = self._next
        self._next += 1
        self.adj[v] = set()
        return v

    def _half_edges(self, v):
        """Yield (signed label, other end, tag as read from v, eid)."""
        for eid in self.adj[v]:
            s, a, t, tag = self.edges[eid]
            if s == v:
                yield a, t, tag, eid
            if t == v:
                yield -a, s, inverse(tag), eid

    def _fold(self) -> None:
        work = deque(self.adj)
        while work:
            v = work.popleft()
            if v not in self.adj:
                continue
            seen: dict[int, tuple] = {}
            folded = False
            for label, other, tag, eid in self._half_edges(v):
                if label in seen:
                    if seen[label][2] == eid:
                        continue
                    self._fold_pair(v, label, seen[label], (other, tag, eid), work)
                    folded = True
                    break
                seen[label] = (other, tag, eid)
            if folded:
                work.appendleft(v)

    def _fold_pair(self, u, label, first, second, work) -> None:
        v1, t1, e1 = first
        v2, t2, e2 = second
        if v1 == v2:
            self._drop_edge(e2)
            return
        if v2 == self.base:
            v1, t1, e1, v2, t2, e2 = v2, t2, e2, v1, t1, e1
        c = mul(inverse(t1), t2)
        cinv = inverse(c)
        for eid in list(self.adj[v2]):
            s, a, t, tag = self.edges[eid]
            if s == v2:
                tag = mul(c, tag)
                s = v1
            if t == v2:
                tag = mul(tag, cinv)
                t = v1
            self.edges[eid] = [s, a, t, tag]
            self.adj[v1].add(eid)
        del self.adj[v2]
        self._drop_edge(e2)
        work.append(v1)

    def _drop_edge(self, eid) -> None:
        s, _, t, _ = self.edges.pop(eid)
        self.adj[s].discard(eid)
        if t in self.adj:
            self.adj[t].discard(eid)

    def step(self, v, letter):
        """Follow ``letter`` from ``v``; return (vertex, tag) or None."""
        for label, other, tag, _ in self._half_edges(v):
            if label == letter:
                return other, tag
        return None

    def express(self, w: Sequence[int]) -> Word | None:
        v = self.base
        acc: list = []
        for a in reduce(w, self.rank):
            nxt = self.step(v, a)
            if nxt is None:
                return None
            v, tag = nxt
            acc.append(tag)
        if v != self.base:
            return None
        return mul(*acc)

    def contains(self, w: Sequence[int]) -> bool:
        return self.express(w) is not None

    @property
    def vertices(self) -> list:
        return sorted(self.adj)

    def is_covering(self) -> bool:
        for v in self.adj:
            labels = {lab for lab, *_ in self._half_edges(v)}
            if len(labels) != 2 * self.rank:
                return False
        return True


def evaluate_expression(expr: Sequence[int], gens: Sequence[Word]) -> Word:
    return substitute(list(gens), expr)


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeAutomorphism:
    """Automorphism ``x_k -> images[k-1]`` together with its inverse."""

    images: tuple
    inverse_images: tuple
    rank: int

    @classmethod
    def identity(cls, rank: int) -> "FreeAutomorphism":
        gens = tuple((k,) for k in range(1, rank + 1))
        return cls(gens, gens, rank)

    @classmethod
    def from_images(cls, images: Sequence[Sequence[int]], rank: int) -> "FreeAutomorphism":
        """Build from images alone; the inverse is found by folding.

        Raises ``ValueError`` when the images do not generate the group
        (free groups are Hopfian, so surjective means bijective).
        """
        imgs = tuple(reduce(w, rank) for w in images)
        if len(imgs) != rank:
            raise RankMismatch(f"expected {rank} images, got {len(imgs)}")
        graph = FoldedGraph(imgs, rank)
        inv = []
        for k in range(1, rank + 1):
            expr = graph.express((k,))
            if expr is None:
                raise ValueError("images do not generate the free group")
            inv.append(expr)
        aut = cls(imgs, tuple(inv), rank)
        aut.verify()
        return aut

    def __call__(self, w: Sequence[int]) -> Word:
        return substitute(self.images, w)

    def apply_inverse(self, w: Sequence[int]) -> Word:
        return substitute(self.inverse_images, w)

    def verify(self) -> None:
        for k in range(1, self.rank + 1):
            if substitute(self.images, self.inverse_images[k - 1]) != (k,):
                raise ValueError("stored inverse does not invert the automorphism")
            if substitute(self.inverse_images, self.images[k - 1]) != (k,):
                raise ValueError("stored inverse does not invert the automorphism")

    def is_identity(self) -> bool:
        return all(img == (k,) for k, img in enumerate(self.images, start=1))

    @property
    def size(self) -> int:
        return sum(len(w) for w in self.images)


def compose(a: FreeAutomorphism, b: FreeAutomorphism) -> FreeAutomorphism:
    """Return ``a o b`` (apply ``b`` first)."""
    if a.rank != b.rank:
        raise RankMismatch(f"ranks {a.rank} and {b.rank} differ")
    images = tuple(substitute(a.images, w) for w in b.images)
    inv = tuple(substitute(b.inverse_images, w) for w in a.inverse_images)
    return FreeAutomorphism(images, inv, a.rank)


def invert(a: FreeAutomorphism) -> FreeAutomorphism:
    return FreeAutomorphism(a.inverse_images, a.images, a.rank)


def inner(g: Sequence[int], rank: int) -> FreeAutomorphism:
    """The inner automorphism ``x -> g x g^-1``."""
    g = reduce(g, rank)
    gi = inverse(g)
    imgs = tuple(mul(g, (k,), gi) for k in range(1, rank + 1))
    inv = tuple(mul(gi, (k,), g) for k in range(1, rank + 1))
    return FreeAutomorphism(imgs, inv, rank)


def _shift_bound(u: Word, t: Word, root: Word) -> int:
    # If r^k u r^-k == t then |k| is at most this (axis-displacement estimate
    # in the Cayley tree; generous by a factor of two).
    rc = cyclic_reduce(root)
    rlen = max(1, len(rc[1]))
    return (len(t) + 2 * len(u) + 4 * len(rc[0])) // rlen + 2


def outer_equal(a: FreeAutomorphism, b: FreeAutomorphism, budget: int | None = None) -> Word | None:
    """Decide whether ``a`` and ``b`` differ by an inner automorphism.

    Returns ``g`` with ``a(x) = g b(x) g^-1`` for every generator, or ``None``.
    The candidates form ``g0 * root^k``; ``k`` is searched up to
    ``budget`` (default ``2*(|a|+|b|)``) and ``Undecided`` is raised if the
    exact shift bound exceeds the budget without a witness.
    """
    if a.rank != b.rank:
        raise RankMismatch(f"ranks {a.rank} and {b.rank} differ")
    rank = a.rank
    if budget is None:
        budget = 2 * (a.size + b.size)
    g0 = conjugator(a.images[0], b.images[0])
    if g0 is None:
        return None
    for k in range(1, rank):
        if not are_conjugate(a.images[k], b.images[k]):
            return None
    root = primitive_root(b.images[0])
    # Pick a generator whose image does not commute with the root to bound k.
    bound = None
    for j in range(1, rank):
        u = b.images[j]
        if mul(root, u) != mul(u, root):
            t = mul(inverse(g0), a.images[j], g0)
            bound = _shift_bound(u, t, root)
            break
    if bound is None:
        bound = 0
    limit = min(bound, budget)

    def works(g):
        return all(mul(g, b.images[j], inverse(g)) == a.images[j] for j in range(rank))

    for k in _signed_range(limit):
        g = mul(g0, power(root, k))
        if works(g):
            return g
    if limit < bound:
        raise Undecided(budget, "conjugator search")
    return None


def _signed_range(limit: int):
    yield 0
    for k in range(1, limit + 1):
        yield k
        yield -k


# ---------------------------------------------------------------------------
# Coset graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetGraph:
    """Schreier graph of a finite-index subgroup.

    ``transitions[k-1][v]`` is the vertex reached from ``v`` along ``x_k``.
    Vertices are ``0..degree-1`` and the basepoint is ``0``.
    """

    degree: int
    transitions: tuple
    basepoint: int = 0

    @property
    def rank(self) -> int:
        return len(self.transitions)

    def act(self, v: int, w: Sequence[int]) -> int:
        for a in w:
            if a > 0:
                v = self.transitions[a - 1][v]
            else:
                v = _inverse_perm(self.transitions[-a - 1])[v]
        return v

    def canonical(self, basepoint: int | None = None) -> "CosetGraph":
        """Relabel vertices in BFS order from ``basepoint``."""
        start = self.basepoint if basepoint is None else basepoint
        order = {start: 0}
        queue = deque([start])
        invs = [_inverse_perm(t) for t in self.transitions]
        while queue:
            v = queue.popleft()
            for k in range(self.rank):
                for w in (self.transitions[k][v], invs[k][v]):
                    if w not in order:
                        order[w] = len(order)
                        queue.append(w)
        if len(order) != self.degree:
            raise ValueError("coset graph is not connected")
        trans = []
        for t in self.transitions:
            new = [0] * self.degree
            for v, img in enumerate(t):
                new[order[v]] = order[img]
            trans.append(tuple(new))
        return CosetGraph(self.degree, tuple(trans), 0)


def _inverse_perm(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def coset_graph(subgroup_gens: Sequence[Sequence[int]], rank: int, degree_bound: int) -> CosetGraph:
    graph = FoldedGraph(subgroup_gens, rank)
    verts = graph.vertices
    if len(verts) > degree_bound or not graph.is_covering():
        raise IndexOverflow(f"subgroup index exceeds {degree_bound}")
    index = {v: i for i, v in enumerate(verts)}
    trans = []
    for k in range(1, rank + 1):
        row = [0] * len(verts)
        for v in verts:
            row[index[v]] = index[graph.step(v, k)[0]]
        trans.append(tuple(row))
    return CosetGraph(len(verts), tuple(trans), index[graph.base]).canonical()


def stabilizer_graph(perms: Sequence[Sequence[int]], sheet: int = 0) -> CosetGraph:
    """Coset graph of the stabilizer of ``sheet`` under a permutation action."""
    return CosetGraph(len(perms[0]), tuple(tuple(p) for p in perms), sheet).canonical()


def contains(g: CosetGraph, w: Sequence[int]) -> bool:
    return g.act(g.basepoint, w) == g.basepoint
