"""Centralizers and conjugators of mapping classes; commutants in GL(2, Z).

The bounded searches enumerate a shortlex ball in the standard twist
generators.  With radius ``ceil(M0 * |phi|)`` the commuting elements of the
ball generate the whole centralizer, relative to the constant ``M0``; the
result records which constant was used, or that a budget cut the search.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import freegroup as fg
from . import mapping_class as mc
from . import sphere as sp
from .errors import ContractViolation, NotInvariant, NotUnimodular, UnsupportedCurve

DEFAULT_M0 = Fraction(4)
DEFAULT_K = Fraction(2)


@dataclass(frozen=True)
class CertifiedUpTo:
    m0: Fraction

    def __str__(self):
        return f"certified up to M0={self.m0}"


@dataclass(frozen=True)
class HeuristicBudget:
    radius: int
    needed: int

    def __str__(self):
        return f"heuristic (budget radius {self.radius} < required {self.needed})"


@dataclass(frozen=True)
class Generator:
    element: mc.MappingClass
    witness: fg.Word  # g o phi and phi o g differ by conjugation with this word


@dataclass
class CentralizerResult:
    target: mc.MappingClass
    generators: list
    search_radius: int
    completeness: object
    undecided: int = 0
    commutant_size: int = 0

    def elements(self) -> list:
        return [g.element for g in self.generators]


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def norm(phi: mc.MappingClass, gens: mc.GeneratorSet, budget: int = 3) -> mc.WordLength:
    """Word length of ``phi``, exact when it fits in the ball of radius ``budget``."""
    return mc.word_length(phi, gens, budget=budget)


def _radius(scale: Fraction, length: int, budget: int | None) -> tuple:
    needed = max(1, math.ceil(Fraction(scale) * length))
    if budget is not None and budget < needed:
        return budget, needed
    return needed, needed


def closure_in_ball(gens: Sequence[mc.MappingClass], ball: mc.Ball) -> list:
    """Ball elements reachable from the identity by multiplying by ``gens^{+-1}``
    without leaving the ball."""
    start = ball.elements[0]
    seen = {id(start)}
    out = [start]
    queue = [start]
    steps = [g for g in gens] + [g.inverse() for g in gens]
    while queue:
        nxt = []
        for m in queue:
            for g in steps:
                hit = ball.find(m * g)
                if hit is not None and id(hit) not in seen:
                    seen.add(id(hit))
                    out.append(hit)
                    nxt.append(hit)
        queue = nxt
    return out


def _probes(s: sp.PuncturedSphere) -> list:
    return mc.probe_words(s) if s.n >= 4 else []


def _probes_agree(probes, a, b, c, d) -> bool:
    """Whether ``a o b`` and ``c o d`` send every probe curve to the same class.

    A necessary condition for equality, and far cheaper than composing the
    automorphisms in full.
    """
    return all(fg.conj_class(a(b(w))) == fg.conj_class(c(d(w))) for w in probes)


def centralizer_search(phi: mc.MappingClass, gens: mc.GeneratorSet, m0=DEFAULT_M0,
                       budget: int | None = None, threads: int = 1,
                       length_budget: int = 3) -> CentralizerResult:
    """Generators of the centralizer of ``phi`` found in a bounded ball.

    Elements are kept in shortlex order; one is dropped when the earlier
    kept ones already reach it inside the ball.  Equality tests that run
    out of budget keep the element (sound, possibly redundant).
    """
    length = norm(phi, gens, length_budget).value
    radius, needed = _radius(Fraction(m0), length, budget)
    ball = mc.ball(gens, radius)

    probes = _probes(phi.surface)

    def test(m):
        if not _probes_agree(probes, m.auto, phi.auto, phi.auto, m.auto):
            return None
        try:
            return mc.mc_equal(m * phi, phi * m)
        except fg.Undecided:
            return "undecided"

    verdicts = _map(test, ball.elements, threads)
    commuting = []
    undecided = ball.undecided
    for m, w in zip(ball.elements, verdicts):
        if w == "undecided":
            undecided += 1
        elif w is not None:
            commuting.append(Generator(m, w))

    kept: list = []
    reached = {id(ball.elements[0])}
    for g in commuting:
        if id(g.element) in reached:
            continue
        kept.append(g)
        reached = {id(m) for m in closure_in_ball([k.element for k in kept], ball)}
    completeness = CertifiedUpTo(Fraction(m0)) if radius >= needed and not undecided \
        else HeuristicBudget(radius, needed)
    return CentralizerResult(phi, kept, radius, completeness, undecided, len(commuting))


@dataclass(frozen=True)
class Conjugator:
    element: mc.MappingClass
    radius: int
    certified: bool


@dataclass(frozen=True)
class NotConjugateWithin:
    radius: int
    certified: bool
    needed: int

    def __bool__(self):
        return False


def conjugator_search(phi: mc.MappingClass, phi2: mc.MappingClass, gens: mc.GeneratorSet,
                      k=DEFAULT_K, budget: int | None = None, threads: int = 1,
                      length_budget: int = 3):
    """Shortlex-first ``eta`` with ``eta o phi o eta^-1 = phi2`` in a bounded ball.

    Returns ``Conjugator`` or ``NotConjugateWithin``; raises ``Undecided``
    when some equality test ran out of budget and nothing was found.
    """
    total = norm(phi, gens, length_budget).value + norm(phi2, gens, length_budget).value
    radius, needed = _radius(Fraction(k), total, budget)
    certified = radius >= needed
    if _cycle_type(phi.puncture_perm) != _cycle_type(phi2.puncture_perm):
        return NotConjugateWithin(radius, certified, needed)
    probes = _probes(phi.surface)

    def test(eta):
        if not _probes_agree(probes, eta.auto, phi.auto, phi2.auto, eta.auto):
            return None
        try:
            return mc.mc_equal(eta * phi, phi2 * eta)
        except fg.Undecided:
            return "undecided"

    # deepen one layer at a time; layers are shortlex, so the first hit is shortlex-first
    undecided = False
    ball = None
    for r in range(radius + 1):
        ball = mc.ball(gens, r)
        for chunk in _chunks(ball.layers[r], 64):
            for eta, w in zip(chunk, _map(test, chunk, threads)):
                if w == "undecided":
                    undecided = True
                elif w is not None:
                    return Conjugator(eta, radius, certified)
    if undecided or ball.undecided:
        raise fg.Undecided(radius, "conjugator search hit an undecided equality")
    return NotConjugateWithin(radius, certified, needed)


def _cycle_type(perm) -> tuple:
    seen, out = set(), []
    for i in range(1, len(perm) + 1):
        if i in seen:
            continue
        k, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j - 1]
            k += 1
        out.append(k)
    return tuple(sorted(out))


def _chunks(items, size):
    for i in range(0, len(items), size):
        yield items[i:i + size]


# ---------------------------------------------------------------------------
# Structured generators
# ---------------------------------------------------------------------------


def curve_orbits(phi: mc.MappingClass, gamma: sp.Multicurve) -> list:
    """Orbits of ``phi`` on the curves of ``gamma`` as lists of indices."""
    images = []
    for c in gamma:
        k = gamma.index(mc.act_on_curve(phi, c).cls)
        if k is None:
            raise NotInvariant(f"image of {c} is not in the multicurve")
        images.append(k)
    seen, out = set(), []
    for i in range(len(gamma)):
        if i in seen:
            continue
        orbit, j = [], i
        while j not in seen:
            seen.add(j)
            orbit.append(j)
            j = images[j]
        out.append(orbit)
    return out


def returns_orientation(phi: mc.MappingClass, c: sp.CurveClass, period: int) -> bool:
    """Whether ``phi^period`` sends the oriented loop ``c.word`` to itself."""
    w = (phi ** period).auto(c.word)
    return fg.oriented_class(w) == fg.oriented_class(c.word)


def admissible_multitwists(phi: mc.MappingClass, gamma: sp.Multicurve,
                           orientation_flags: Sequence[bool] | None = None,
                           half_twists: bool = False) -> list:
    """One multitwist per orbit of ``phi`` on ``gamma`` whose first return keeps orientation.

    ``orientation_flags`` (one per orbit, in orbit order) overrides the
    oriented comparison of the stored representatives.  Each orbit needs a
    standard curve; the other twists are its conjugates by powers of ``phi``.
    With ``half_twists`` an orbit whose standard curve bounds two adjacent
    punctures uses the half twist there (its square is the full twist);
    other curves keep full twists.
    """
    s = phi.surface
    out = []
    for idx, orbit in enumerate(curve_orbits(phi, gamma)):
        first = gamma.curves[orbit[0]]
        flag = orientation_flags[idx] if orientation_flags is not None \
            else returns_orientation(phi, first, len(orbit))
        if not flag:
            continue
        start = next((k for k, i in enumerate(orbit) if sp.standard_interval(gamma.curves[i])), None)
        if start is None:
            raise UnsupportedCurve("an admissible orbit must contain a standard curve")
        curve = gamma.curves[orbit[start]]
        i, j = sp.standard_interval(curve)
        base = mc.half_twist(s, i) if half_twists and j == i + 1 else mc.dehn_twist(s, curve)
        total = mc.identity(s)
        for step in range(len(orbit)):
            total = total * mc.conjugate_twist(base, phi ** step)
        out.append(total)
    return out


def assemble_centralizer_generators(phi: mc.MappingClass, multitwists=(), graph_section=(),
                                    orbit_sections=()) -> list:
    """Union of the generator families, each checked to commute with ``phi``."""
    out: list = []
    for part, items in (("multitwists", multitwists), ("graph_section", graph_section),
                        ("orbit_sections", orbit_sections)):
        for k, g in enumerate(items):
            w = mc.mc_equal(g * phi, phi * g)
            if w is None:
                raise ContractViolation(f"{part}[{k}] does not commute with the target")
            if g.is_pure and g.auto.is_identity() or mc.mc_equal(g, mc.identity(g.surface)) is not None:
                continue
            if any(mc.mc_equal(g, h.element) is not None for h in out):
                continue
            out.append(Generator(g, w))
    return out


# ---------------------------------------------------------------------------
# Commutants in GL(2, Z)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix2:
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def of(cls, rows) -> "IntMatrix2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def __mul__(self, o: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                          self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return IntMatrix2(-self.a, -self.b, -self.c, -self.d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def inverse(self) -> "IntMatrix2":
        e = self.det
        if abs(e) != 1:
            raise NotUnimodular(f"determinant {e}")
        return IntMatrix2(self.d * e, -self.b * e, -self.c * e, self.a * e)

    def __pow__(self, k: int) -> "IntMatrix2":
        out, base = IDENTITY, self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def commutes(self, o: "IntMatrix2") -> bool:
        return self * o == o * self

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = IntMatrix2(1, 0, 0, 1)
MINUS_I = IntMatrix2(-1, 0, 0, -1)
GL2Z_GENERATORS = (IntMatrix2(0, -1, 1, 0), IntMatrix2(1, 1, 0, 1), IntMatrix2(1, 0, 0, -1))


@dataclass(frozen=True)
class Commutant:
    case: str  # "Hyperbolic" | "Parabolic" | "EllipticOrCentral"
    generators: tuple
    whole_group: bool = False
    fundamental: IntMatrix2 | None = None


def _isqrt_exact(m: int):
    if m < 0:
        return None
    r = math.isqrt(m)
    return r if r * r == m else None


def sl2z_commutant(A: IntMatrix2, max_v: int = 10 ** 6) -> Commutant:
    """Unimodular integer matrices commuting with ``A``.

    For non-scalar ``A`` the integer commutant is ``Z I + Z N`` with
    ``N = (A - d I) / gcd(b, c, a - d)``; the units ``u I + v N`` are the
    solutions of ``det = +-1``, a binary quadratic form of discriminant
    ``(tr^2 - 4 det) / g^2``.
    """
    if abs(A.det) != 1:
        raise NotUnimodular(f"determinant {A.det} is not +-1")
    if A.b == 0 and A.c == 0 and A.a == A.d:
        return Commutant("EllipticOrCentral", GL2Z_GENERATORS, True)
    g = math.gcd(math.gcd(A.b, A.c), A.a - A.d)
    N = IntMatrix2((A.a - A.d) // g, A.b // g, A.c // g, 0)
    t, e = N.trace, N.det
    disc = t * t - 4 * e

    def unit(u, v):
        return IntMatrix2(u + v * N.a, v * N.b, v * N.c, u + v * N.d)

    def solve_u(v):
        sols = []
        for target in (1, -1):
            r = _isqrt_exact(disc * v * v + 4 * target)
            if r is None:
                continue
            for root in {r, -r}:
                num = -t * v + root
                if num % 2 == 0:
                    sols.append(num // 2)
        return sorted(set(sols))

    if disc == 0:
        half = t // 2
        nil = IntMatrix2(N.a - half, N.b, N.c, N.d - half)
        gen = IDENTITY if nil == IntMatrix2(0, 0, 0, 0) else IntMatrix2(1 + nil.a, nil.b, nil.c, 1 + nil.d)
        out = tuple(x for x in (MINUS_I, gen) if x.commutes(A))
        return Commutant("Parabolic", out, False, gen)
    if disc > 0 and _isqrt_exact(disc) is None:
        for v in range(1, max_v + 1):
            us = solve_u(v)
            if us:
                # the least v holds +-e^(+-1) and possibly e^2 (when tr e = +-1);
                # the fundamental unit e has the least |trace| among them
                cands = [unit(u, v) for u in us]
                fund = min(cands, key=lambda m: (abs(m.trace), -m.trace, m.a))
                if not fund.commutes(A) or abs(fund.det) != 1:
                    raise ContractViolation("commutant unit check failed")
                return Commutant("Hyperbolic", (MINUS_I, fund), False, fund)
        raise ContractViolation(f"no unit found with v <= {max_v}")
    units = []
    for v in range(-2, 3):
        for u in solve_u(v):
            m = unit(u, v)
            if m != IDENTITY and m not in units:
                units.append(m)
    units.sort(key=lambda m: (m.a, m.b, m.c, m.d))
    return Commutant("EllipticOrCentral", tuple(units), False)


def generated_contains(res: Commutant, X: IntMatrix2, max_power: int = 64) -> bool:
    """Membership of ``X`` in the group generated by a commutant result."""
    if res.whole_group:
        return abs(X.det) == 1
    if res.case == "Hyperbolic":
        F = res.fundamental
        P = IDENTITY
        Fi = F.inverse()
        Q = IDENTITY
        for _ in range(max_power):
            if X in (P, -P, Q, -Q):
                return True
            P, Q = P * F, Q * Fi
        return False
    if res.case == "Parabolic":
        gen = res.fundamental
        if gen == IDENTITY:
            return X in (IDENTITY, MINUS_I)
        nil = (gen.a - 1, gen.b, gen.c, gen.d - 1)
        pivot = next(i for i, x in enumerate(nil) if x)
        for sign in (1, -1):
            y = (sign * X.a - 1, sign * X.b, sign * X.c, sign * X.d - 1)
            k, r = divmod(y[pivot], nil[pivot])
            if r == 0 and all(yy == k * n for yy, n in zip(y, nil)):
                return True
        return False
    group = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for m in frontier:
            for gmat in res.generators:
                p = m * gmat
                if p not in group:
                    group.add(p)
                    nxt.append(p)
        frontier = nxt
    return X in group
