"""Thurston maps as combinatorial branched covers (wreath recursions).

A presentation lists, for every puncture ``q`` of the base sphere, the
sheet permutation ``rho(x_q)`` and the restriction words ``x_q|_s``.
Sheets are ``0..d-1`` internally (``1..d`` in files); permutations act on
the right, so ``rho(uv)`` applies ``rho(u)`` first.  The restriction of a
loop at sheet ``s`` is its lift starting at sheet ``s``, closed up with
fixed connecting paths and read in the fundamental group of the cover
sphere, where unmarked preimages of punctures are forgotten.

For a Thurston map the cover sphere is the base sphere.  Component maps
produced by the decomposition have a different cover sphere, which is why
``cover`` is a separate (optional) field.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from . import freegroup as fg
from . import mapping_class as mc
from . import sphere as sp
from .errors import ContractViolation, NotLiftable, PresentationError


# ---------------------------------------------------------------------------
# Permutations (tuples, 0-based, right action)
# ---------------------------------------------------------------------------


def perm_then(p: Sequence[int], q: Sequence[int]) -> tuple:
    """Apply ``p`` then ``q``."""
    return tuple(q[i] for i in p)


def perm_inverse(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_identity(d: int) -> tuple:
    return tuple(range(d))


def perm_cycles(p: Sequence[int]) -> list:
    """Cycles as lists, each starting at its least element, ordered by that element."""
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        cyc, t = [], s
        while t not in seen:
            seen.add(t)
            cyc.append(t)
            t = p[t]
        out.append(cyc)
    return out


def is_permutation(p: Sequence[int], d: int) -> bool:
    return len(p) == d and sorted(p) == list(range(d))


def orbits(perms: Sequence[Sequence[int]], d: int) -> list:
    seen, out = set(), []
    for s in range(d):
        if s in seen:
            continue
        orb, queue = [s], [s]
        seen.add(s)
        while queue:
            t = queue.pop()
            for p in perms:
                for u in (p[t], perm_inverse(p)[t]):
                    if u not in seen:
                        seen.add(u)
                        orb.append(u)
                        queue.append(u)
        out.append(sorted(orb))
    return out


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverPresentation:
    degree: int
    base: sp.PuncturedSphere
    monodromy: tuple  # one permutation per base puncture
    restrictions: tuple  # per base puncture, one cover word per sheet
    point_map: tuple  # cover puncture i -> base puncture point_map[i-1]
    local_degrees: tuple  # local degree at cover puncture i
    cover: sp.PuncturedSphere | None = None
    comment: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def top(self) -> sp.PuncturedSphere:
        return self.cover if self.cover is not None else self.base

    @property
    def is_self_map(self) -> bool:
        return self.cover is None or self.cover == self.base

    def letter_perm(self, a: int) -> tuple:
        return self.monodromy[a - 1] if a > 0 else perm_inverse(self.monodromy[-a - 1])

    def perm_of(self, w: Sequence[int]) -> tuple:
        p = perm_identity(self.degree)
        for a in w:
            p = perm_then(p, self.letter_perm(a))
        return p

    def act(self, s: int, w: Sequence[int]) -> int:
        for a in w:
            s = self._step(a, s)[1]
        return s

    def _step(self, a: int, s: int) -> tuple:
        """(restriction word, end sheet) of a single base letter at sheet ``s``."""
        table = _letter_table(self)
        return table[a][s]

    def restrict(self, w: Sequence[int], s: int) -> tuple:
        """Restriction of the base word ``w`` at sheet ``s`` and the end sheet."""
        table = _letter_table(self)
        out: list = []
        for a in w:
            piece, s = table[a][s]
            for b in piece:
                if out and out[-1] == -b:
                    out.pop()
                else:
                    out.append(b)
        return tuple(out), s

    def peripheral_word(self, q: int) -> fg.Word:
        return self.base.generator(q)


@lru_cache(maxsize=256)
def _letter_table(c: CoverPresentation) -> dict:
    table = {}
    d = c.degree
    for k in range(1, c.n):
        p = c.monodromy[k - 1]
        pi = perm_inverse(p)
        table[k] = [(c.restrictions[k - 1][s], p[s]) for s in range(d)]
        table[-k] = [(fg.inverse(c.restrictions[k - 1][pi[s]]), pi[s]) for s in range(d)]
    return table


def build(base: sp.PuncturedSphere, monodromy: Sequence[Sequence[int]],
          restrictions: Sequence[Sequence[Sequence[int]]], cover: sp.PuncturedSphere | None = None,
          comment: str = "") -> CoverPresentation:
    """Presentation from data for ``x_1..x_{n-1}``; completes ``x_n`` and the dynamics.

    Sheets are 0-based.  The point map and local degrees are read off the
    cycle products, then everything is validated.
    """
    d = len(monodromy[0])
    top = cover if cover is not None else base
    mono = [tuple(p) for p in monodromy[: base.n - 1]]
    res = [tuple(fg.reduce(w, top.rank) for w in row) for row in restrictions[: base.n - 1]]
    partial = CoverPresentation(d, base, tuple(mono) + (perm_identity(d),),
                                tuple(res) + (tuple(() for _ in range(d)),),
                                (), (), cover, comment)
    xn = base.generator(base.n)
    mono.append(partial.perm_of(xn))
    res.append(tuple(partial.restrict(xn, s)[0] for s in range(d)))
    draft = CoverPresentation(d, base, tuple(mono), tuple(res), (), (), cover, comment)
    pm, ld = infer_dynamics(draft)
    out = CoverPresentation(d, base, tuple(mono), tuple(res), pm, ld, cover, comment)
    validate(out)
    return out


def infer_dynamics(c: CoverPresentation) -> tuple:
    """Point map and local degrees read from cycle products.

    Each cycle of ``rho(x_q)`` is a preimage of puncture ``q``; the product
    of restrictions along it is trivial (unmarked preimage) or conjugate to
    ``x_p`` for a unique cover puncture ``p``.
    """
    top = c.top
    table = {fg.oriented_class(top.generator(i)): i for i in range(1, top.n + 1)}
    inv_table = {fg.oriented_class(fg.inverse(top.generator(i))): i for i in range(1, top.n + 1)}
    point_map = [None] * top.n
    local = [None] * top.n
    for q in range(1, c.n + 1):
        p = c.monodromy[q - 1]
        for cyc in perm_cycles(p):
            word = fg.mul(*(c.restrictions[q - 1][s] for s in cyc))
            cls = fg.oriented_class(word)
            if not cls:
                continue
            j = table.get(cls)
            if j is None:
                if cls in inv_table:
                    raise PresentationError("OrientationViolation",
                                            f"a preimage of puncture {q} winds negatively")
                raise PresentationError("PeripheralLiftViolation",
                                        f"cycle {[s + 1 for s in cyc]} over puncture {q} lifts to "
                                        f"a non-peripheral loop")
            if point_map[j - 1] is not None:
                raise PresentationError("PeripheralLiftViolation",
                                        f"cover puncture {j} appears twice in the fibers")
            point_map[j - 1] = q
            local[j - 1] = len(cyc)
    missing = [j + 1 for j, v in enumerate(point_map) if v is None]
    if missing:
        raise PresentationError("PeripheralLiftViolation", f"cover punctures {missing} are not preimages")
    return tuple(point_map), tuple(local)


@dataclass
class ValidationReport:
    ok: bool
    violations: list
    critical_values: tuple = ()
    marked_critical: tuple = ()
    unmarked_critical: tuple = ()
    postcritical: tuple = ()
    branching: int = 0

    def lines(self) -> list:
        out = [f"valid: {'yes' if self.ok else 'no'}"]
        for name, msg in self.violations:
            out.append(f"violation {name}: {msg}")
        if self.ok:
            out.append("critical values: " + " ".join(map(str, self.critical_values)))
            out.append("postcritical set: " + " ".join(map(str, self.postcritical)))
            out.append(f"branching total: {self.branching}")
        return out


def validate(c: CoverPresentation, raise_on_error: bool = True) -> ValidationReport:
    """Check every invariant of a presentation; raise on the first violation by default."""
    violations: list = []

    def fail(name, msg):
        violations.append((name, msg))
        if raise_on_error:
            raise PresentationError(name, msg)

    d, n, top = c.degree, c.n, c.top
    if d < 1:
        fail("ShapeMismatch", "degree must be positive")
    if len(c.monodromy) != n or len(c.restrictions) != n:
        fail("ShapeMismatch", f"expected data for {n} punctures")
        return ValidationReport(False, violations)
    for q, p in enumerate(c.monodromy, start=1):
        if not is_permutation(p, d):
            fail("NotAPermutation", f"monodromy of puncture {q} is not a permutation of {d} sheets")
            return ValidationReport(False, violations)
    for q, row in enumerate(c.restrictions, start=1):
        if len(row) != d:
            fail("ShapeMismatch", f"puncture {q} needs {d} restriction words")
            return ValidationReport(False, violations)
        for w in row:
            try:
                fg.check_letters(w, top.rank)
            except Exception as e:
                fail("InvalidLetter", f"restriction over puncture {q}: {e}")
                return ValidationReport(False, violations)
    prod = perm_identity(d)
    for p in c.monodromy:
        prod = perm_then(prod, p)
    if prod != perm_identity(d):
        fail("MonodromyProductViolation", "rho(x_1)...rho(x_n) is not the identity")
    if len(orbits(c.monodromy, d)) != 1:
        fail("DisconnectedCover", "monodromy group is not transitive")
    branching = sum(d - len(perm_cycles(p)) for p in c.monodromy)
    if branching != 2 * d - 2:
        fail("RiemannHurwitzViolation", f"total branching {branching} != 2d-2 = {2 * d - 2}")
    # restrictions of x_n must agree with x_n = (x_1...x_{n-1})^-1
    for s in range(d):
        w, t = c.restrict(tuple(range(1, n)), s)
        w = fg.mul(w, c.restrictions[n - 1][t])
        if w:
            fail("RestrictionRelationViolation",
                 f"restriction of x_1...x_n at sheet {s + 1} is {w}, not trivial")
            break
    if violations and not raise_on_error:
        return ValidationReport(False, violations, branching=branching)
    try:
        pm, ld = infer_dynamics(c)
    except PresentationError as e:
        fail(e.invariant, str(e))
        return ValidationReport(False, violations, branching=branching)
    if tuple(pm) != tuple(c.point_map):
        fail("PointMapMismatch", f"declared {tuple(c.point_map)}, restrictions give {pm}")
    if tuple(ld) != tuple(c.local_degrees):
        fail("LocalDegreeMismatch", f"declared {tuple(c.local_degrees)}, restrictions give {ld}")
    if not _surjective(c):
        fail("RestrictionsNotSurjective", "restrictions at sheet 1 do not generate the cover group")
    crit_values = tuple(q for q in range(1, n + 1) if c.monodromy[q - 1] != perm_identity(d))
    marked_crit = tuple(j for j in range(1, top.n + 1) if ld[j - 1] > 1)
    marked_cycles = {}
    for j in range(1, top.n + 1):
        marked_cycles.setdefault(pm[j - 1], []).append(ld[j - 1])
    unmarked = []
    for q in range(1, n + 1):
        lengths = sorted(len(cyc) for cyc in perm_cycles(c.monodromy[q - 1]))
        for k in marked_cycles.get(q, []):
            lengths.remove(k)
        unmarked += [(q, k) for k in lengths if k > 1]
    post = ()
    if c.is_self_map:
        post_set, frontier = set(), set(crit_values)
        while frontier:
            post_set |= frontier
            frontier = {pm[q - 1] for q in frontier} - post_set
        post = tuple(sorted(post_set))
    return ValidationReport(not violations, violations, crit_values, marked_crit, tuple(unmarked),
                            post, branching)


def _surjective(c: CoverPresentation) -> bool:
    data = stabilizer_data(c)
    graph = data.graph
    return len(graph.vertices) == 1 and graph.is_covering()


# ---------------------------------------------------------------------------
# Sheet stabilizer and the virtual endomorphism
# ---------------------------------------------------------------------------


@dataclass
class StabilizerData:
    paths: tuple  # base word taking sheet 0 to sheet s
    schreier: tuple  # words generating the stabilizer of sheet 0
    images: tuple  # their restrictions at sheet 0
    graph: fg.FoldedGraph


@lru_cache(maxsize=256)
def stabilizer_data(c: CoverPresentation, sheet: int = 0) -> StabilizerData:
    d, rank = c.degree, c.base.rank
    paths = {sheet: ()}
    queue = deque([sheet])
    while queue:
        s = queue.popleft()
        for a in _letters(rank):
            t = c.act(s, (a,))
            if t not in paths:
                paths[t] = paths[s] + (a,)
                queue.append(t)
    schreier = []
    for s in range(d):
        for k in range(1, rank + 1):
            t = c.act(s, (k,))
            w = fg.mul(paths[s], (k,), fg.inverse(paths[t]))
            if w:
                schreier.append(w)
    images = tuple(c.restrict(w, sheet)[0] for w in schreier)
    graph = fg.FoldedGraph(images, c.top.rank)
    return StabilizerData(tuple(paths[s] for s in range(d)), tuple(schreier), images, graph)


def _letters(rank: int) -> list:
    out = []
    for k in range(1, rank + 1):
        out += [k, -k]
    return out


def psi_preimage(c: CoverPresentation, y: Sequence[int], sheet: int = 0) -> fg.Word:
    """A base word fixing ``sheet`` whose restriction there is ``y``."""
    data = stabilizer_data(c, sheet)
    expr = data.graph.express(y)
    if expr is None:
        raise ContractViolation("restriction map is not onto; presentation was not validated")
    return fg.substitute(list(data.schreier), expr)


# ---------------------------------------------------------------------------
# Orbifold type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbifoldType:
    kind: str  # "Hyperbolic" | "Parabolic2222" | "ParabolicOther"
    signature: tuple  # orbifold weight per puncture, 0 encodes infinity
    euler: object  # Fraction


def orbifold_type(c: CoverPresentation) -> OrbifoldType:
    """Orbifold weights ``nu(q) = lcm over preimages p of deg_p * nu(p)``.

    Unmarked preimages have weight 1; a weight becomes infinite on the
    forward orbit of a periodic critical point.
    """
    from fractions import Fraction

    n = c.n
    pm, ld = c.point_map, c.local_degrees
    infinite = set()
    for start in range(1, n + 1):
        seen, p = [], start
        while p not in seen:
            seen.append(p)
            p = pm[p - 1]
        cycle = seen[seen.index(p):]
        if any(ld[q - 1] > 1 for q in cycle):
            infinite |= set(cycle)
    frontier = set(infinite)
    while frontier:
        frontier = {pm[q - 1] for q in frontier} - infinite
        infinite |= frontier
    unmarked_lcm = {q: 1 for q in range(1, n + 1)}
    marked_cycles: dict = {}
    for j in range(1, n + 1):
        marked_cycles.setdefault(pm[j - 1], []).append(ld[j - 1])
    for q in range(1, n + 1):
        lengths = [len(cyc) for cyc in perm_cycles(c.monodromy[q - 1])]
        for k in marked_cycles.get(q, []):
            lengths.remove(k)
        for k in lengths:
            unmarked_lcm[q] = math.lcm(unmarked_lcm[q], k)
    nu = {q: 1 for q in range(1, n + 1)}
    for _ in range(4 * n + 4):
        new = {}
        for q in range(1, n + 1):
            if q in infinite:
                continue
            v = unmarked_lcm[q]
            for j in range(1, n + 1):
                if pm[j - 1] == q:
                    v = math.lcm(v, ld[j - 1] * nu[j])
            new[q] = v
        changed = any(new[q] != nu[q] for q in new)
        nu.update(new)
        if not changed:
            break
    else:
        raise ContractViolation("orbifold weights failed to stabilize")
    sig = tuple(0 if q in infinite else nu[q] for q in range(1, n + 1))
    euler = Fraction(2) - sum((Fraction(1) if v == 0 else 1 - Fraction(1, v)) for v in sig)
    if euler < 0:
        kind = "Hyperbolic"
    elif sorted(v for v in sig if v != 1) == [2, 2, 2, 2]:
        kind = "Parabolic2222"
    else:
        kind = "ParabolicOther"
    return OrbifoldType(kind, sig, euler)


# ---------------------------------------------------------------------------
# Pullback
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PullbackComponent:
    word: fg.Word
    cls: fg.ConjClass
    degree: int
    kind: sp.Kind
    sheets: tuple


def pullback_curve(c: CoverPresentation, gamma) -> list:
    """Preimage components of a curve (or loop word): one per cycle of ``rho(w)``."""
    w = gamma.word if isinstance(gamma, sp.CurveClass) else fg.reduce(gamma, c.base.rank)
    out = []
    p = c.perm_of(w)
    for cyc in perm_cycles(p):
        parts, s = [], cyc[0]
        for _ in cyc:
            r, s = c.restrict(w, s)
            parts.append(r)
        word = fg.mul(*parts)
        cls = fg.conj_class(word, c.top.rank)
        out.append(PullbackComponent(word, cls, len(cyc), sp.is_trivial_or_peripheral(c.top, cls),
                                     tuple(x + 1 for x in cyc)))
    return out


# ---------------------------------------------------------------------------
# Transformations producing equivalent or related presentations
# ---------------------------------------------------------------------------


def relabel_sheets(c: CoverPresentation, perm: Sequence[int]) -> CoverPresentation:
    """Rename sheet ``s`` to ``perm[s]``."""
    d = c.degree
    inv = perm_inverse(perm)
    mono = tuple(tuple(perm[p[inv[t]]] for t in range(d)) for p in c.monodromy)
    res = tuple(tuple(row[inv[t]] for t in range(d)) for row in c.restrictions)
    return CoverPresentation(d, c.base, mono, res, c.point_map, c.local_degrees, c.cover, c.comment)


def _from_words(c: CoverPresentation, base_words, transform_restriction) -> CoverPresentation:
    d = c.degree
    mono, res = [], []
    for q in range(1, c.n + 1):
        w = base_words(c.base.generator(q))
        mono.append(c.perm_of(w))
        res.append(tuple(transform_restriction(c.restrict(w, s)[0]) for s in range(d)))
    draft = CoverPresentation(d, c.base, tuple(mono), tuple(res), (), (), c.cover, c.comment)
    pm, ld = infer_dynamics(draft)
    out = CoverPresentation(d, c.base, tuple(mono), tuple(res), pm, ld, c.cover, c.comment)
    validate(out)
    return out


def post_compose(h: mc.MappingClass, c: CoverPresentation) -> CoverPresentation:
    """Presentation of ``h o f``."""
    return _from_words(c, h.auto.apply_inverse, lambda r: r)


def pre_compose(c: CoverPresentation, h: mc.MappingClass) -> CoverPresentation:
    """Presentation of ``f o h``."""
    return _from_words(c, lambda w: w, h.auto.apply_inverse)


def conjugate(c: CoverPresentation, h: mc.MappingClass) -> CoverPresentation:
    """Presentation of ``h o f o h^-1``."""
    return _from_words(c, h.auto.apply_inverse, h.auto)


# ---------------------------------------------------------------------------
# Lifting mapping classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lift:
    sheet_map: tuple  # sheet s of f goes to sheet sheet_map[s] of g
    element: mc.MappingClass


@dataclass
class LiftResult:
    liftable: bool
    lifts: list
    reason: str = ""

    def __bool__(self):
        return self.liftable


def sheet_correspondences(f: CoverPresentation, g: CoverPresentation, h: mc.MappingClass) -> list:
    """All ``pi`` with ``pi(s . rho_f(x)) = pi(s) . rho_g(h(x))`` for every generator."""
    d, rank = f.degree, f.base.rank
    targets = [g.perm_of(h.auto((k,))) for k in range(1, rank + 1)]
    out = []
    for start in range(d):
        pi = {0: start}
        queue = deque([0])
        ok = True
        while queue and ok:
            s = queue.popleft()
            for k in range(rank):
                for fwd in (True, False):
                    if fwd:
                        s2, t2 = f.monodromy[k][s], targets[k][pi[s]]
                    else:
                        s2, t2 = perm_inverse(f.monodromy[k])[s], perm_inverse(targets[k])[pi[s]]
                    if s2 in pi:
                        if pi[s2] != t2:
                            ok = False
                            break
                    else:
                        pi[s2] = t2
                        queue.append(s2)
                if not ok:
                    break
        if ok and len(set(pi.values())) == d:
            out.append(tuple(pi[s] for s in range(d)))
    return out


def lifts_through(f: CoverPresentation, g: CoverPresentation, h: mc.MappingClass | None = None) -> LiftResult:
    """All lifts ``h~`` with ``h o f = g o h~``, one per admissible sheet correspondence.

    The lift sends ``y = x|^f_0`` to ``h(x)|^g_{pi(0)}``; it is well defined
    exactly when loops around unmarked preimages go to trivial loops.
    """
    if f.degree != g.degree or f.n != g.n or f.top.n != g.top.n:
        raise NotLiftable("presentations have different degree or puncture count")
    if h is None:
        h = mc.identity(f.base)
    pis = sheet_correspondences(f, g, h)
    if not pis:
        return LiftResult(False, [], "no sheet correspondence: subgroups are not conjugate")
    rank = f.top.rank
    preimages = [psi_preimage(f, (k,)) for k in range(1, rank + 1)]
    data = stabilizer_data(f)
    lifts = []
    reasons = []
    for pi in pis:
        start = pi[0]
        bad = None
        for q in range(1, f.n + 1):
            xq = f.base.generator(q)
            for cyc in perm_cycles(f.monodromy[q - 1]):
                path = data.paths[cyc[0]]
                e = fg.mul(path, fg.power(xq, len(cyc)), fg.inverse(path))
                here = f.restrict(e, 0)[0]
                there, end = g.restrict(h.auto(e), start)
                if end != start:
                    raise ContractViolation("sheet correspondence does not respect stabilizers")
                if bool(here) != bool(there):
                    bad = f"preimage of puncture {q} changes markedness"
                    break
            if bad:
                break
        if bad:
            reasons.append(bad)
            continue
        images = []
        for w in preimages:
            img, end = g.restrict(h.auto(w), start)
            if end != start:
                raise ContractViolation("lifted loop does not close up")
            images.append(img)
        try:
            auto = fg.FreeAutomorphism.from_images(images, rank)
            lift = mc.MappingClass(f.top, auto)
        except ValueError as e:
            reasons.append(f"lift is not a homeomorphism: {e}")
            continue
        lifts.append(Lift(pi, lift))
    if not lifts:
        return LiftResult(False, [], "; ".join(sorted(set(reasons))) or "no valid lift")
    return LiftResult(True, lifts)


def equivalence_witness(f: CoverPresentation, g: CoverPresentation, h: mc.MappingClass):
    """A lift of ``h`` through ``(f, g)`` equal to ``h`` as a mapping class, or ``None``.

    Such a lift makes ``(h, lift)`` an equivalence pair: ``h o f = g o lift``
    with ``lift`` isotopic to ``h`` relative to the marked points.
    """
    res = lifts_through(f, g, h)
    for lift in res.lifts:
        if lift.element.puncture_perm != h.puncture_perm:
            continue
        try:
            w = mc.mc_equal(lift.element, h)
        except fg.Undecided:
            continue
        if w is not None:
            return lift
    return None


def dynamics_compatible(f: CoverPresentation, g: CoverPresentation, tau: Sequence[int]) -> bool:
    """Whether the puncture bijection ``tau`` conjugates the point maps and keeps local degrees."""
    for p in range(1, f.n + 1):
        if tau[f.point_map[p - 1] - 1] != g.point_map[tau[p - 1] - 1]:
            return False
        if f.local_degrees[p - 1] != g.local_degrees[tau[p - 1] - 1]:
            return False
    return True


def compose(g: CoverPresentation, h: CoverPresentation) -> CoverPresentation:
    """Presentation of ``h o g`` (``g`` first); ``g``'s base must be ``h``'s cover sphere.

    Sheets are pairs ``(s_h, s_g)`` flattened to ``s_h * deg(g) + s_g``.
    """
    if g.base.n != h.top.n:
        raise ValueError("the maps do not compose: puncture counts differ")
    dg, dh = g.degree, h.degree
    mono, res = [], []
    for k in range(1, h.n):
        perm, row = [0] * (dg * dh), []
        for sh in range(dh):
            for sg in range(dg):
                r_h, th = h.restrict((k,), sh)
                r_g, tg = g.restrict(r_h, sg)
                perm[sh * dg + sg] = th * dg + tg
                row.append(r_g)
        mono.append(tuple(perm))
        res.append(tuple(row))
    return build(h.base, mono, res, cover=g.top, comment="")


def homeomorphism_class(c: CoverPresentation) -> mc.MappingClass:
    """The mapping class of a degree-one self-presentation: the inverse of ``y -> y|_0``."""
    if c.degree != 1 or c.top.n != c.base.n:
        raise ValueError("not a degree-one self-map")
    lifted = fg.FreeAutomorphism.from_images([c.restrictions[k - 1][0] for k in range(1, c.n)],
                                             c.base.rank)
    return mc.MappingClass(c.base, fg.invert(lifted))
