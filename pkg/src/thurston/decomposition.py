"""Decomposition of a Thurston map along a stable multicurve of standard curves.

The multicurve must consist of standard curves ``c_{i,j}``; pairwise
disjoint standard curves have nested or disjoint intervals, so they form
a tree.  Every curve bounds an inner region, and one outer region holds
puncture ``n``.  A region's *items* are its direct punctures and its
maximal child curves, left to right.  Its patched sphere has one puncture
per item followed by one more: the cap of the bounding curve, or puncture
``n`` for the outer region.  Item ``a`` is the loop ``x_p ... x_q`` around
the item's interval, so the patched sphere's fundamental group is the
subgroup generated by the item words.

Each component of the preimage of a region is an orbit of that subgroup
on sheets.  The components whose image subgroup is conjugate to the
subgroup of some region are the thick pieces; every region is the source
of exactly one of them, which gives the component map on regions and a
patched covering per region.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import branched_cover as bc
from . import freegroup as fg
from . import mapping_class as mc
from . import sphere as sp
from .errors import NotDecomposable, NotStable, UnsupportedCurve


@dataclass(frozen=True)
class Region:
    index: int
    curve: int | None  # bounding curve (index into the multicurve); None for the outer region
    interval: tuple  # (lo, hi) punctures covered, the outer region covers (1, n)
    items: tuple  # ("p", k) or ("c", curve index), left to right
    cap: tuple  # ("c", curve index) or ("p", n)
    item_words: tuple
    children: tuple  # (p, q) intervals of maximal child curves
    rank: int  # rank of the ambient free group
    sphere: sp.PuncturedSphere = field(compare=False)

    @property
    def signature(self) -> tuple:
        return self.items + (self.cap,)

    @property
    def is_pants(self) -> bool:
        return self.sphere.n == 3

    def item_span(self, a: int) -> tuple:
        """Interval of punctures covered by item ``a`` (1-based)."""
        w = self.item_words[a - 1]
        return (w[0], w[-1])

    def to_z(self, w) -> fg.Word:
        """Rewrite a word in the basis where each child word ``x_p..x_q`` replaces ``x_q``."""
        imgs = [(k,) for k in range(1, self.rank + 1)]
        for p, q in self.children:
            imgs[q - 1] = fg.mul(fg.inverse(tuple(range(p, q))), (q,))
        return fg.substitute(imgs, fg.reduce(w, self.rank))

    def item_letters(self) -> dict:
        """z-letter -> patched generator index."""
        out = {}
        for a, w in enumerate(self.item_words, start=1):
            out[w[-1]] = a
        return out

    def from_z(self, z_word) -> fg.Word | None:
        """Patched-sphere word for a z-word made of item letters only."""
        letters = self.item_letters()
        out = []
        for b in z_word:
            a = letters.get(abs(b))
            if a is None:
                return None
            out.append(a if b > 0 else -a)
        return tuple(out)

    def embed(self, y_word) -> fg.Word:
        """Base word of a patched-sphere word (the cap letter expands through the relation)."""
        out = []
        m = self.sphere.n
        for b in y_word:
            a = abs(b)
            if a < m:
                w = self.item_words[a - 1]
            else:
                w = fg.inverse(fg.mul(*self.item_words))
            out.append(w if b > 0 else fg.inverse(w))
        return fg.mul(*out)


def _make_region(index, curve, interval, items, cap, words, children, rank) -> Region:
    labels = tuple(_label(x) for x in tuple(items) + (cap,))
    return Region(index, curve, interval, tuple(items), cap, tuple(words), tuple(children), rank,
                  sp.PuncturedSphere(len(items) + 1, labels))


def _label(x) -> str:
    kind, k = x
    return f"p{k}" if kind == "p" else f"g{k + 1}"


def laminar_intervals(gamma: sp.Multicurve) -> list:
    out = []
    for g in gamma:
        ij = sp.standard_interval(g)
        if ij is None:
            raise UnsupportedCurve(f"curve {g} is not a standard curve")
        out.append(ij)
    for a in range(len(out)):
        for b in range(a + 1, len(out)):
            (i1, j1), (i2, j2) = out[a], out[b]
            nested = (i1 <= i2 and j2 <= j1) or (i2 <= i1 and j1 <= j2)
            if not nested and not (j1 < i2 or j2 < i1):
                raise ValueError(f"curves {a + 1} and {b + 1} intersect")
    return out


def regions_of(s: sp.PuncturedSphere, gamma: sp.Multicurve) -> list:
    """Regions in the order: outer region, then inner regions by curve index."""
    ivs = laminar_intervals(gamma)
    rank = s.rank

    def children_of(lo, hi, exclude):
        inside = [k for k, (i, j) in enumerate(ivs) if lo <= i and j <= hi and k != exclude]
        return [k for k in inside
                if not any(ivs[o][0] <= ivs[k][0] and ivs[k][1] <= ivs[o][1] and o != k for o in inside)]

    def build_region(index, curve, lo, hi, cap):
        kids = sorted(children_of(lo, hi, curve), key=lambda k: ivs[k][0])
        items, words, p = [], [], lo
        spans = {ivs[k][0]: k for k in kids}
        while p <= hi:
            if p in spans:
                k = spans[p]
                items.append(("c", k))
                words.append(tuple(range(ivs[k][0], ivs[k][1] + 1)))
                p = ivs[k][1] + 1
            else:
                items.append(("p", p))
                words.append((p,))
                p += 1
        return _make_region(index, curve, (lo, hi) if curve is not None else (1, s.n), items, cap,
                            words, [ivs[k] for k in kids], rank)

    out = [build_region(0, None, 1, s.n - 1, ("p", s.n))]
    for k, (i, j) in enumerate(ivs):
        out.append(build_region(k + 1, k, i, j, ("c", k)))
    return out


def _conjugator_into(gens_z, letters: set, rank: int):
    """``c`` with ``<gens_z> = c <letters> c^-1``, read off a lollipop-shaped folded graph."""
    graph = fg.FoldedGraph(gens_z, rank)
    loops: dict = {}
    other = []
    for eid, (s, a, t, _) in graph.edges.items():
        if s == t:
            loops.setdefault(s, []).append(a)
        else:
            other.append((s, a, t))
    if len(loops) != 1:
        return None
    (core, labels), = loops.items()
    if sorted(labels) != sorted(letters):
        return None
    # remaining edges must form a simple path from the base vertex to the core
    path, v, used = [], graph.base, set()
    while v != core:
        nxt = [(i, e) for i, e in enumerate(other) if i not in used and v in (e[0], e[2])]
        if len(nxt) != 1:
            return None
        i, (s, a, t) = nxt[0]
        used.add(i)
        if s == v:
            path.append(a)
            v = t
        else:
            path.append(-a)
            v = s
    if len(used) != len(other):
        return None
    return tuple(path)


def _subgroup_rank(gens, rank: int) -> int:
    graph = fg.FoldedGraph(gens, rank)
    return len(graph.edges) - len(graph.vertices) + 1


@dataclass
class Piece:
    """A thick preimage component: cover region ``source`` mapping onto base region ``target``."""

    source: int
    target: int
    sheets: tuple  # 1-based sheets of the orbit, in the piece's local order
    presentation: bc.CoverPresentation
    conjugator: fg.Word

    @property
    def degree(self) -> int:
        return self.presentation.degree


@dataclass
class MinorPiece:
    target: int
    sheets: tuple
    rank: int


@dataclass
class ReturnCycle:
    regions: tuple  # X_0, X_1 = target(X_0), ...
    first_return: bc.CoverPresentation
    homeomorphism: mc.MappingClass | None

    @property
    def period(self) -> int:
        return len(self.regions)

    @property
    def kind(self) -> str:
        return "Homeomorphism" if self.homeomorphism is not None else "ThurstonMap"


@dataclass
class DecompositionData:
    presentation: bc.CoverPresentation
    gamma: sp.Multicurve
    regions: list
    pieces: dict  # source region index -> Piece
    minor: list
    cycles: list
    curve_edges: list  # (image curve, preimage curve, degree)

    def target(self, r: int) -> int:
        return self.pieces[r].target

    @property
    def periodic(self) -> set:
        return {r for cyc in self.cycles for r in cyc.regions}

    def patched_total(self) -> int:
        return sum(r.sphere.n for r in self.regions)

    def cycle_of(self, r: int) -> ReturnCycle | None:
        for cyc in self.cycles:
            if r in cyc.regions:
                return cyc
        return None

    def lines(self) -> list:
        out = [f"multicurve: {len(self.gamma)} curves, {len(self.regions)} regions"]
        for reg in self.regions:
            p = self.pieces[reg.index]
            sig = " ".join(reg.sphere.labels)
            out.append(f"region {reg.index}: [{sig}] -> region {p.target}, degree {p.degree}")
        for cyc in self.cycles:
            out.append(f"cycle {' -> '.join(map(str, cyc.regions))}: period {cyc.period}, "
                       f"{cyc.kind}, degree {cyc.first_return.degree}")
        return out


def decompose(c: bc.CoverPresentation, gamma: sp.Multicurve) -> DecompositionData:
    from .obstruction import is_stable

    if not c.is_self_map:
        raise ValueError("decompose needs a self-map")
    rep = is_stable(c, gamma)
    if not rep:
        raise NotStable(f"{len(rep.offending)} essential preimages lie outside the multicurve")
    hit = set()
    for g in gamma:
        for comp in bc.pullback_curve(c, g):
            if comp.kind == sp.ESSENTIAL:
                hit.add(gamma.index(comp.cls))
    lonely = [k + 1 for k in range(len(gamma)) if k not in hit]
    if lonely:
        raise NotDecomposable(f"curves {lonely} are not homotopic to any preimage curve; "
                              "the multicurve is not completely invariant")
    s = c.base
    regions = regions_of(s, gamma)
    rank = s.rank
    pieces: dict = {}
    minor: list = []
    for base_reg in regions:
        perms = [c.perm_of(w) for w in base_reg.item_words]
        for orb in bc.orbits(perms, c.degree):
            root = orb[0]
            paths, order = {root: ()}, [root]
            queue = deque([root])
            while queue:
                x = queue.popleft()
                for w in base_reg.item_words:
                    for ww in (w, fg.inverse(w)):
                        t = c.act(x, ww)
                        if t not in paths:
                            paths[t] = fg.mul(paths[x], ww)
                            order.append(t)
                            queue.append(t)
            restr = []
            for a, w in enumerate(base_reg.item_words):
                row = []
                for x in order:
                    t = c.act(x, w)
                    loop = fg.mul(paths[x], w, fg.inverse(paths[t]))
                    r, end = c.restrict(loop, root)
                    if end != root:
                        raise NotDecomposable("Schreier loop does not close up")
                    row.append(r)
                restr.append(row)
            gens = [r for row in restr for r in row if r]
            match = None
            for cov in regions:
                z = [cov.to_z(r) for r in gens]
                conj = _conjugator_into(z, set(cov.item_letters()), rank)
                if conj is not None:
                    match = (cov, conj)
                    break
            if match is None:
                rk = _subgroup_rank(gens, rank)
                if rk > 1:
                    raise NotDecomposable(f"a preimage component of region {base_reg.index} is not "
                                          f"homotopic to a region (image rank {rk})")
                minor.append(MinorPiece(base_reg.index, tuple(x + 1 for x in orb), rk))
                continue
            cov, conj = match
            if cov.index in pieces:
                raise NotDecomposable(f"region {cov.index} is covered by two thick components")
            local = {x: i for i, x in enumerate(order)}
            mono = [tuple(local[c.act(x, w)] for x in order) for w in base_reg.item_words]
            words = []
            for row in restr:
                out = []
                for r in row:
                    k = fg.mul(fg.inverse(conj), cov.to_z(r), conj)
                    y = cov.from_z(k)
                    if y is None:
                        raise NotDecomposable("restriction leaves the region subgroup")
                    out.append(y)
                words.append(out)
            pres = bc.build(base_reg.sphere, mono, words, cover=cov.sphere,
                            comment=f"region {cov.index} -> region {base_reg.index}")
            pieces[cov.index] = Piece(cov.index, base_reg.index, tuple(x + 1 for x in order), pres, conj)
    missing = [r.index for r in regions if r.index not in pieces]
    if missing:
        raise NotDecomposable(f"regions {missing} are not homotopic to any preimage component")
    cycles = _return_cycles(regions, pieces)
    edges = []
    for d, g in enumerate(gamma):
        for comp in bc.pullback_curve(c, g):
            if comp.kind == sp.ESSENTIAL:
                edges.append((d, gamma.index(comp.cls), comp.degree))
    return DecompositionData(c, gamma, regions, pieces, minor, cycles, edges)


def _return_cycles(regions, pieces) -> list:
    target = {r: p.target for r, p in pieces.items()}
    seen, cycles = set(), []
    for r in sorted(target):
        path, x = [], r
        while x not in path and x not in seen:
            path.append(x)
            x = target[x]
        if x in path:
            cyc = path[path.index(x):]
            start = min(cyc)
            k = cyc.index(start)
            cyc = cyc[k:] + cyc[:k]
            acc = pieces[cyc[0]].presentation
            for x2 in cyc[1:]:
                acc = bc.compose(acc, pieces[x2].presentation)
            homeo = bc.homeomorphism_class(acc) if acc.degree == 1 else None
            cycles.append(ReturnCycle(tuple(cyc), acc, homeo))
        seen.update(path)
    return cycles


def first_return(dec: DecompositionData, r: int) -> bc.CoverPresentation:
    """First-return presentation at any periodic region ``r``."""
    cyc = dec.cycle_of(r)
    if cyc is None:
        raise ValueError(f"region {r} is not periodic")
    k = cyc.regions.index(r)
    order = cyc.regions[k:] + cyc.regions[:k]
    acc = dec.pieces[order[0]].presentation
    for x in order[1:]:
        acc = bc.compose(acc, dec.pieces[x].presentation)
    return acc


def standard_form(c: bc.CoverPresentation, gamma: sp.Multicurve, max_states: int = 20000):
    """``(m, c', gamma')`` with ``c' = m c m^-1`` and ``gamma' = m(gamma)`` made of standard curves."""
    s = c.base
    if all(sp.standard_interval(g) is not None for g in gamma):
        m = mc.identity(s)
    else:
        m = mc.standardize(s, list(gamma), max_states)
        if m is None:
            raise UnsupportedCurve("no mapping class within budget moves the multicurve to standard curves")
    curves = []
    for g in gamma:
        i, j = sp.standard_interval(mc.act_on_curve(m, g))
        curves.append(sp.standard_curve(s, i, j))
    c2 = c if m.auto.is_identity() else bc.conjugate(c, m)
    return m, c2, sp.Multicurve(tuple(curves), gamma.provenance)


def restrict_to_region(m: mc.MappingClass, reg: Region) -> mc.MappingClass | None:
    """The mapping class induced on a patched region by ``m`` fixing that region, else ``None``."""
    rank = m.surface.rank
    imgs = [m.auto(w) for w in reg.item_words]
    z = [reg.to_z(w) for w in imgs]
    conj = _conjugator_into(z, set(reg.item_letters()), rank)
    if conj is None:
        return None
    ys = []
    for w in z:
        y = reg.from_z(fg.mul(fg.inverse(conj), w, conj))
        if y is None:
            return None
        ys.append(y)
    try:
        auto = fg.FreeAutomorphism.from_images(ys, reg.sphere.rank)
    except ValueError:
        return None
    return mc.MappingClass(reg.sphere, auto)
