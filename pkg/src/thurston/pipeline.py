"""Deciding combinatorial equivalence of Thurston maps.

``check_equivalence`` runs cheap invariant gates, then loops over puncture
bijections ``tau`` and curve correspondences ``sigma``.  For each branch
it moves ``f``'s obstruction onto ``g``'s, puts both maps in standard
form, compares the decompositions piece by piece, and finally searches
for an equivalence of the form ``psi o Theta o T^v`` where ``Theta``
stabilizes every curve, ``psi`` runs over liftable thick symmetries and
``T^v`` is a multitwist solved for with integer linear algebra.

Only ``Equivalent`` verdicts carry a witness; every one of them is
re-checked by lifting before it is returned.  ``NotEquivalent`` is
returned only when every branch was closed by a decisive step.
"""

from __future__ import annotations

import itertools
import math
import subprocess
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from . import branched_cover as bc
from . import centralizer as cz
from . import decomposition as dc
from . import formats
from . import freegroup as fg
from . import hurwitz as hw
from . import mapping_class as mc
from . import obstruction as ob
from . import sphere as sp
from .errors import ContractViolation, NotDecomposable, NotStable, OrbitOverflow, ThurstonError

EQUIVALENT, NOT_EQUIVALENT, INCONCLUSIVE = "Equivalent", "NotEquivalent", "Inconclusive"
UNAVAILABLE = "unavailable"


@dataclass
class Config:
    ball_radius: int = 3  # radius of the curve-stabilizer candidate search (standard twists)
    curve_budget: int = 20000  # states when moving one multicurve onto another
    hurwitz_budget: int = hw.DEFAULT_BUDGET
    m0: Fraction = cz.DEFAULT_M0
    k: Fraction = cz.DEFAULT_K
    search_budget: int | None = 4  # cap on ball radii of centralizer and conjugator searches
    n_override: int | None = None
    threads: int = 1
    cache: object = None
    max_lattice_points: int = 4096


# ---------------------------------------------------------------------------
# Geometrization oracle
# ---------------------------------------------------------------------------


class GeometrizationOracle:
    """Fingerprints of first-return maps: equal tokens mean the oracle asserts equivalence.

    Either wraps a callback ``presentation -> str | None`` or speaks the
    subprocess protocol: each request is one ``thurston-map v1`` document
    followed by an empty line, each response one line, ``token:<opaque>``
    or ``unavailable``.  Tokens are cached per document, so repeated
    questions get identical answers.
    """

    def __init__(self, callback: Callable | None = None, command: Sequence[str] | None = None,
                 timeout: float = 60.0):
        if (callback is None) == (command is None):
            raise ValueError("give exactly one of callback and command")
        self.callback = callback
        self.command = list(command) if command is not None else None
        self.timeout = timeout
        self._proc = None
        self._lock = threading.Lock()
        self._cache: dict = {}

    def token(self, c: bc.CoverPresentation) -> str | None:
        doc = formats.emit_presentation(c)
        with self._lock:
            if doc not in self._cache:
                self._cache[doc] = self._ask(c, doc)
            return self._cache[doc]

    def _ask(self, c, doc: str) -> str | None:
        if self.callback is not None:
            tok = self.callback(c)
            return None if tok is None or tok == UNAVAILABLE else str(tok)
        if self._proc is None:
            self._proc = subprocess.Popen(self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                          text=True, bufsize=1)
        try:
            self._proc.stdin.write(doc + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError):
            return None
        line = line.strip()
        if line.startswith("token:"):
            return line[len("token:"):]
        return None

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=self.timeout)
            except Exception:
                self._proc.kill()
            self._proc = None


def invariant_token(c: bc.CoverPresentation, budget: int = 20000) -> str | None:
    """Token built from equivalence invariants of a labeled map.

    Equivalent maps get equal tokens; the converse fails in general, so
    this is only good for pruning (which is all the pipeline asks of it).
    """
    orb = bc.orbifold_type(c)
    t = hw.from_presentation(c)
    try:
        orbit = hw.hurwitz_orbit(t, budget, labeled=True)
    except OrbitOverflow:
        return None
    # the labeled orbit is an invariant; its least state pinned at the identity labels is a short name
    states = sorted(st for st in orbit.states if st[0] == t.labels)
    return repr((c.degree, c.point_map, c.local_degrees, orb.signature, states[0]))


def invariant_oracle() -> GeometrizationOracle:
    return GeometrizationOracle(callback=invariant_token)


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistVector:
    coords: tuple

    def __len__(self):
        return len(self.coords)

    def __add__(self, o):
        return TwistVector(tuple(a + b for a, b in zip(self.coords, o.coords)))

    def __sub__(self, o):
        return TwistVector(tuple(a - b for a, b in zip(self.coords, o.coords)))


@dataclass
class GateReport:
    passed: bool
    gate: str
    reason: str
    permutations: list = field(default_factory=list)


@dataclass
class EquivalenceCertificate:
    verdict: str
    gate: str = ""
    reason: str = ""
    witness: mc.MappingClass | None = None  # h1 with h1 o f = g o h2
    lift: bc.Lift | None = None  # h2 and the sheet correspondence
    tau: tuple = ()
    sigma: tuple = ()
    twists: tuple = ()
    modulus: int | None = None
    modulus_source: str = ""
    canonical: bool = True
    leaves: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {EQUIVALENT: 0, NOT_EQUIVALENT: 1}.get(self.verdict, 2)

    def lines(self) -> list:
        out = [f"verdict: {self.verdict}"]
        if self.gate:
            out.append(f"gate: {self.gate}")
        if self.reason:
            out.append(f"reason: {self.reason}")
        out.append(f"obstructions: {'canonical' if self.canonical else 'fallback (not canonical)'}")
        if self.verdict == EQUIVALENT:
            out.append("puncture bijection: " + " ".join(map(str, self.tau)))
            if self.sigma:
                out.append("curve correspondence: " + " ".join(str(i + 1) for i in self.sigma))
            if self.modulus is not None:
                out.append(f"N: {self.modulus} ({self.modulus_source})")
            if self.twists:
                out.append("twist exponents: " + " ".join(map(str, self.twists)))
            out.append("h1:")
            out += [f"  x{k} -> {formats.format_word(w)}" for k, w in enumerate(self.witness.auto.images, 1)]
            out.append("h2:")
            out += [f"  x{k} -> {formats.format_word(w)}"
                    for k, w in enumerate(self.lift.element.auto.images, 1)]
            out.append("sheet map: " + " ".join(str(s + 1) for s in self.lift.sheet_map))
        for leaf in self.leaves:
            out.append(f"undecided: {leaf}")
        for note in self.notes:
            out.append(f"note: {note}")
        return out


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


def matrix_permutations(mf: ob.ThurstonMatrix, mg: ob.ThurstonMatrix) -> list:
    """All ``perm`` with ``mg[perm[i], perm[j]] == mf[i, j]``, in lexicographic order."""
    k = mf.size
    if mg.size != k:
        return []
    return [p for p in itertools.permutations(range(k))
            if all(mg[p[i], p[j]] == mf[i, j] for i in range(k) for j in range(k))]


def gate_obstruction_invariants(f, g, gamma_f: sp.Multicurve, gamma_g: sp.Multicurve) -> GateReport:
    if len(gamma_f) != len(gamma_g):
        return GateReport(False, "ObstructionSize", f"|Gamma_f| = {len(gamma_f)} but |Gamma_g| = {len(gamma_g)}")
    mf, mg = ob.thurston_matrix(f, gamma_f), ob.thurston_matrix(g, gamma_g)
    perms = matrix_permutations(mf, mg)
    if not perms:
        return GateReport(False, "ThurstonMatrix", "no relabeling of curves makes the Thurston matrices equal")
    return GateReport(True, "ThurstonMatrix", "matrices agree", perms)


def orbifold_compatible(f, g, tau) -> bool:
    sf, sg = bc.orbifold_type(f).signature, bc.orbifold_type(g).signature
    return all(sf[p - 1] == sg[tau[p - 1] - 1] for p in range(1, f.n + 1))


def _partition(curve: sp.CurveClass) -> frozenset:
    _, a, b = ob.curve_sides(curve)
    return frozenset((frozenset(p for _, p in a), frozenset(p for _, p in b)))


def realizable_sigmas(gamma_f, gamma_g, tau, perms) -> list:
    """Curve correspondences whose puncture partitions match under ``tau`` (and the matrices)."""
    pf = [_partition(c) for c in gamma_f]
    pg = [_partition(c) for c in gamma_g]
    out = []
    for p in perms:
        ok = all(frozenset(frozenset(tau[x - 1] for x in side) for side in pf[i]) == pg[p[i]]
                 for i in range(len(pf)))
        if ok:
            out.append(tuple(p))
    return out


def move_multicurve(s: sp.PuncturedSphere, src: Sequence[sp.CurveClass], targets: dict,
                    budget: int) -> dict:
    """Pure classes ``theta`` with ``theta(src[i]) = targets[key][i]``, found breadth first.

    ``targets`` maps keys to tuples of classes; returns key -> MappingClass
    for the keys reached within ``budget`` states.
    """
    gens = mc.standard_generators(s) if s.n >= 4 else None
    start = tuple(c.cls for c in src)
    want = {tuple(t): key for key, t in targets.items()}
    found: dict = {}
    if start in want:
        found[want[start]] = mc.identity(s)
    if gens is None or len(found) == len(targets):
        return found
    parent = {start: None}
    queue = deque([start])
    moves = [(a, gens.letter(a)) for a in gens.letters()]
    while queue and len(found) < len(targets):
        cur = queue.popleft()
        for a, m in moves:
            nxt = tuple(fg.conj_class(m.auto(c.word), s.rank) for c in cur)
            if nxt in parent:
                continue
            parent[nxt] = (cur, a)
            if nxt in want and want[nxt] not in found:
                word, st = [], nxt
                while parent[st] is not None:
                    st, b = parent[st]
                    word.append(b)
                # word lists the last move first, which is the outermost factor
                found[want[nxt]] = gens.evaluate(tuple(word))
            if len(parent) > budget:
                return found
            queue.append(nxt)
    return found


# ---------------------------------------------------------------------------
# Twists along a standard multicurve
# ---------------------------------------------------------------------------


def multitwist(s: sp.PuncturedSphere, gamma: sp.Multicurve, v: Sequence[int]) -> mc.MappingClass:
    out = mc.identity(s)
    for c, k in zip(gamma, v):
        if k:
            out = out * mc.dehn_twist(s, c, k)
    return out


def _probe(regions, gamma_index: int, s: sp.PuncturedSphere):
    """A loop crossing curve ``gamma_index`` twice and no other curve of the multicurve."""
    inner = next(r for r in regions if r.curve == gamma_index)
    parent = next(r for r in regions if ("c", gamma_index) in r.items)
    a = parent.items.index(("c", gamma_index))
    if a + 1 < len(parent.items):
        return fg.mul(inner.item_words[0], parent.item_words[a + 1])
    if parent.curve is None:
        return fg.mul(inner.item_words[0], s.generator(s.n))
    return fg.mul(parent.item_words[a - 1], inner.item_words[-1])


def is_multitwist(d: mc.MappingClass, regions) -> bool:
    """Whether a pure class fixing every curve acts trivially on every region."""
    if not d.is_pure:
        return False
    for reg in regions:
        r = dc.restrict_to_region(d, reg)
        if r is None:
            return False
        if reg.is_pants:
            continue
        if mc.mc_equal(r, mc.identity(reg.sphere)) is None:
            return False
    return True


def twist_defect(d: mc.MappingClass, gamma: sp.Multicurve, regions=None) -> TwistVector:
    """Exponents ``v`` with ``d = prod T_gamma^v_gamma`` for a multitwist ``d`` about standard curves."""
    s = d.surface
    regions = regions if regions is not None else dc.regions_of(s, gamma)
    out = []
    for k, c in enumerate(gamma):
        beta = _probe(regions, k, s)
        target = fg.oriented_class(d.auto(beta))
        bound = len(target) + len(beta) + 2
        hit = None
        for e in itertools.chain([0], *[(j, -j) for j in range(1, bound + 1)]):
            if fg.oriented_class(mc.dehn_twist(s, c, e).auto(beta)) == target:
                hit = e
                break
        if hit is None:
            raise ContractViolation(f"probe image is not a twist of the probe about curve {k + 1}")
        out.append(hit)
    v = TwistVector(tuple(out))
    if mc.mc_equal(d, multitwist(s, gamma, v.coords)) is None:
        raise ContractViolation("class is not the multitwist read off the probes")
    return v


def modulus(c: bc.CoverPresentation, gamma: sp.Multicurve) -> int:
    """lcm of the degrees of all preimage components of the curves."""
    n = 1
    for g in gamma:
        for comp in bc.pullback_curve(c, g):
            n = math.lcm(n, comp.degree)
    return n


def solve_integer(columns: list, target: Sequence[int]):
    """Integer ``x`` with ``sum x_i columns[i] = target``, or ``None`` (Smith normal form)."""
    k = len(target)
    if not columns:
        return [] if all(t == 0 for t in target) else None
    a = Matrix([[col[r] for col in columns] for r in range(k)])
    s, u, v = smith_normal_decomp(a, domain=ZZ)
    b = u * Matrix(list(target))
    y = [0] * a.cols
    for r in range(k):
        d = s[r, r] if r < min(s.rows, s.cols) else 0
        if d == 0:
            if b[r] != 0:
                return None
        else:
            if b[r] % d:
                return None
            y[r] = b[r] // d
    x = v * Matrix(y)
    sol = [int(t) for t in x]
    assert all(sum(sol[i] * columns[i][r] for i in range(len(columns))) == target[r] for r in range(k))
    return sol


@dataclass
class GlueResult:
    success: bool
    witness: mc.MappingClass | None = None
    lift: bc.Lift | None = None
    twists: tuple = ()
    reason: str = ""
    undecided: bool = False


def _pure_lifts(f, g, h):
    res = bc.lifts_through(f, g, h)
    return [l for l in res.lifts if l.element.puncture_perm == h.puncture_perm]


def lift_matrix_check(c, gamma, regions, m, n):
    """Lift each ``T_delta^N`` through ``(c, c)`` and compare with ``N * column delta``."""
    s = c.base
    k = len(gamma)
    for delta in range(k):
        e = [0] * k
        e[delta] = n
        t = multitwist(s, gamma, e)
        lifts = [l for l in _pure_lifts(c, c, t) if l.sheet_map == tuple(range(c.degree))]
        if not lifts:
            raise ContractViolation(f"T^{n} about curve {delta + 1} does not lift with the identity sheet map")
        got = twist_defect(lifts[0].element, gamma, regions)
        want = tuple(n * m[i][delta] for i in range(k))
        if tuple(Fraction(x) for x in got.coords) != want:
            raise ContractViolation(f"lift of T^{n} about curve {delta + 1} is {got.coords}, matrix gives {want}")


def lattice_glue(f, g, theta: mc.MappingClass, gamma: sp.Multicurve, m: ob.ThurstonMatrix, n: int,
                 psis=(), config: Config | None = None, regions=None) -> GlueResult:
    """Search ``psi o theta o T^(m1 + N k)`` among lifts; ``psis`` are ``(psi, n_psi)`` pairs."""
    config = config or Config()
    s = f.base
    regions = regions if regions is not None else dc.regions_of(s, gamma)
    k = len(gamma)
    cols = []
    for j in range(k):
        cols.append([int(n * (m[i, j] - (1 if i == j else 0))) for i in range(k)])
    for i, (_, npsi) in enumerate(psis):
        cols.append(list(npsi.coords))
    total = n ** k
    if total > config.max_lattice_points:
        return GlueResult(False, reason=f"{total} residues exceed the sweep limit", undecided=True)
    undecided = False
    for m1 in itertools.product(range(n), repeat=k):
        h = theta * multitwist(s, gamma, m1)
        try:
            lifts = _pure_lifts(f, g, h)
        except ThurstonError:
            lifts = []
        for lift in lifts:
            d = theta.inverse() * lift.element
            try:
                if not is_multitwist(d, regions):
                    continue
                m2 = twist_defect(d, gamma, regions)
            except fg.Undecided:
                undecided = True
                continue
            rhs = [a - b for a, b in zip(m1, m2.coords)]
            sol = solve_integer(cols, rhs)
            if sol is None:
                continue
            kk, aa = sol[:k], sol[k:]
            v = tuple(a + n * b for a, b in zip(m1, kk))
            w = theta * multitwist(s, gamma, v)
            for (psi, _), e in zip(psis, aa):
                w = (psi ** e) * w
            wit = bc.equivalence_witness(f, g, w)
            if wit is None:
                raise ContractViolation("lattice solution failed to lift to an equivalence")
            return GlueResult(True, w, wit, v)
    reason = "no residue m1 gives a solvable twist system"
    return GlueResult(False, reason=reason, undecided=undecided)


# ---------------------------------------------------------------------------
# Thick parts
# ---------------------------------------------------------------------------


@dataclass
class ThickResult:
    ok: bool | None  # False: decisive rejection; None: could not decide
    stage: str = ""
    reason: str = ""
    notes: list = field(default_factory=list)


def _region_generators(reg: dc.Region):
    return mc.standard_generators(reg.sphere) if reg.sphere.n >= 4 else None


def thick_equivalence_search(f, g, dec_f: dc.DecompositionData, dec_g: dc.DecompositionData,
                             oracle: GeometrizationOracle | None, config: Config) -> ThickResult:
    """Compare standard-form decompositions with the same multicurve, piece by piece."""
    notes = []
    for reg in dec_f.regions:
        if dec_f.target(reg.index) != dec_g.target(reg.index):
            return ThickResult(False, "components",
                               f"region {reg.index} maps to region {dec_f.target(reg.index)} under f "
                               f"but to {dec_g.target(reg.index)} under g")
    for cf in dec_f.cycles:
        cg = dec_g.cycle_of(cf.regions[0])
        x = cf.regions[0]
        if cf.first_return.degree != cg.first_return.degree:
            return ThickResult(False, "first-return", f"first returns at region {x} have different degrees")
        if cf.homeomorphism is not None:
            gens = _region_generators(dec_f.regions[x])
            if gens is None:
                continue
            try:
                res = cz.conjugator_search(cf.homeomorphism, cg.homeomorphism, gens, config.k,
                                           config.search_budget, config.threads)
            except fg.Undecided:
                notes.append(f"conjugacy of the homeomorphisms at region {x} undecided")
                continue
            if not res:
                if res.certified:
                    return ThickResult(False, "first-return",
                                       f"homeomorphisms at region {x} are not conjugate (certified radius {res.radius})")
                notes.append(f"homeomorphisms at region {x} not conjugate within radius {res.radius} "
                             f"(certification needs {res.needed})")
            continue
        if oracle is None:
            notes.append(f"no oracle for the first return at region {x}")
            continue
        tf, tg = oracle.token(cf.first_return), oracle.token(cg.first_return)
        if tf is None or tg is None:
            notes.append(f"oracle unavailable for the first return at region {x}")
        elif tf != tg:
            return ThickResult(False, "first-return", f"geometrizations differ at region {x}")
    for reg in dec_f.regions:
        pf, pg = dec_f.pieces[reg.index].presentation, dec_g.pieces[reg.index].presentation
        res = hw.same_hurwitz_class(pf, pg, None, config.hurwitz_budget, config.cache)
        if res.same is None:
            notes.append(f"Hurwitz test of region {reg.index}: {res.reason}")
        elif not res.same:
            return ThickResult(False, "hurwitz", f"patched coverings of region {reg.index} are not Hurwitz equivalent")
    return ThickResult(True, notes=notes)


def stabilizer_candidates(s: sp.PuncturedSphere, gamma: sp.Multicurve, regions, radius: int):
    """Pure classes fixing every curve, one per class modulo twists, from a ball of standard twists.

    The second value tells whether the list is complete, which holds when
    every region is a pair of pants (then only multitwists remain).
    """
    ident = mc.identity(s)
    if all(r.is_pants for r in regions):
        return [ident], True
    gens = mc.standard_generators(s)
    ball = mc.ball(gens, radius)
    classes = [c.cls for c in gamma]
    out, keys = [], {}
    for m in ball.elements:
        if any(fg.conj_class(m.auto(c.word), s.rank) != cls for c, cls in zip(gamma, classes)):
            continue
        parts = []
        for reg in regions:
            r = dc.restrict_to_region(m, reg)
            if r is None:
                break
            parts.append(r)
        else:
            key = tuple(mc.fingerprint(r) for r, reg in zip(parts, regions) if not reg.is_pants)
            bucket = keys.setdefault(key, [])
            dup = False
            for other in bucket:
                try:
                    if all(reg.is_pants or mc.mc_equal(a, b) is not None
                           for a, b, reg in zip(parts, other, regions)):
                        dup = True
                        break
                except fg.Undecided:
                    pass
            if not dup:
                bucket.append(parts)
                out.append(m)
    return out, False


def liftable_symmetries(g, gamma, regions, candidates) -> list:
    """``(psi, n_psi)`` for candidates that lift through ``(g, g)`` to ``psi`` up to twists."""
    out = []
    for psi in candidates:
        if not psi.auto.is_identity() and psi.word:
            for lift in _pure_lifts(g, g, psi):
                d = psi.inverse() * lift.element
                try:
                    if is_multitwist(d, regions):
                        out.append((psi, twist_defect(d, gamma, regions)))
                        break
                except fg.Undecided:
                    continue
    return out


# ---------------------------------------------------------------------------
# Thick centralizer
# ---------------------------------------------------------------------------


@dataclass
class ThickCentralizer:
    generators: list  # dicts region -> MappingClass on the patched sphere
    pieces: list  # (cycle regions, kind, status)
    markers: list  # reasons some generators could not be computed
    orbit_sizes: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.markers

    def lines(self) -> list:
        out = []
        for regs, kind, status in self.pieces:
            out.append(f"cycle {' -> '.join(map(str, regs))}: {kind}: {status}")
        out.append(f"generators: {len(self.generators)}")
        for i, gen in enumerate(self.generators, start=1):
            parts = []
            for r in sorted(gen):
                m = gen[r]
                parts.append(f"region {r}: " + "; ".join(
                    f"x{k}->{formats.format_word(w)}" for k, w in enumerate(m.auto.images, 1)))
            out.append(f"  g{i}: " + " | ".join(parts))
        for mk in self.markers:
            out.append(f"inconclusive: {mk}")
        return out


def _cover_key(c: bc.CoverPresentation) -> tuple:
    return hw.canonical_relabeling(c.monodromy, c.degree)[0]


def _stabilizer_generators(pieces: list, gens: list, limit: int = 2000):
    """Schreier generators of the subgroup of ``<gens>`` lifting through every presentation in ``pieces``.

    A class ``h`` acts on covers by post-composition; it lifts through
    ``P`` exactly when ``h o P`` is isomorphic to ``P`` over the identity.
    Returns ``(generators, orbit size)`` or ``(None, size)`` past ``limit``.
    """
    start = tuple(pieces)
    states = [start]
    reps = [None]
    buckets = {tuple(_cover_key(p) for p in start): [0]}
    steps = []
    for gmc in gens:
        steps += [gmc, gmc.inverse()]
    out = []
    i = 0
    while i < len(states):
        cur = states[i]
        for h in steps:
            nxt = tuple(bc.post_compose(h, p) for p in cur)
            key = tuple(_cover_key(p) for p in nxt)
            hit = None
            for j in buckets.get(key, []):
                if all(bc.lifts_through(a, b) for a, b in zip(states[j], nxt)):
                    hit = j
                    break
            t_cur = reps[i]
            moved = h if t_cur is None else h * t_cur
            if hit is None:
                states.append(nxt)
                reps.append(moved)
                buckets.setdefault(key, []).append(len(states) - 1)
                if len(states) > limit:
                    return None, len(states)
            else:
                t_hit = reps[hit]
                sg = moved if t_hit is None else t_hit.inverse() * moved
                if not sg.auto.is_identity():
                    out.append(sg)
        i += 1
    return out, len(states)


def compute_thick_centralizer(g: bc.CoverPresentation, gamma: sp.Multicurve,
                              oracle: GeometrizationOracle | None = None,
                              config: Config | None = None, dec: dc.DecompositionData | None = None
                              ) -> ThickCentralizer:
    """Generators of thick self-equivalences, per periodic cycle of regions."""
    config = config or Config()
    if dec is None:
        _, g2, gamma2 = dc.standard_form(g, gamma)
        dec = dc.decompose(g2, gamma2)
    gens_out, pieces, markers, sizes = [], [], [], {}
    for cyc in dec.cycles:
        x = cyc.regions[0]
        reg = dec.regions[x]
        if cyc.homeomorphism is None:
            kind = bc.orbifold_type(cyc.first_return).kind
            if kind == "Hyperbolic" or reg.is_pants:
                pieces.append((cyc.regions, kind, "trivial"))
            else:
                pieces.append((cyc.regions, kind, "not computed"))
                markers.append(f"cycle at region {x}: centralizer of a {kind} piece is not computed")
            continue
        gens = _region_generators(reg)
        if gens is None:
            pieces.append((cyc.regions, "Homeomorphism", "trivial (pair of pants)"))
            continue
        res = cz.centralizer_search(cyc.homeomorphism, gens, config.m0, config.search_budget, config.threads)
        status = f"centralizer {len(res.generators)} generators, {res.completeness}"
        if not isinstance(res.completeness, cz.CertifiedUpTo):
            markers.append(f"cycle at region {x}: centralizer search {res.completeness}")
        elements = [gg.element for gg in res.generators if not gg.element.auto.is_identity()]
        # carry each element around the cycle by lifting through the degree-one pieces
        order = list(cyc.regions)
        feeders = [p for r, p in sorted(dec.pieces.items())
                   if p.target in order and r not in order]
        chosen = elements
        if feeders:
            stab, size = _stabilizer_generators([p.presentation for p in feeders if p.target == x],
                                                elements)
            sizes[x] = size
            if stab is None:
                markers.append(f"cycle at region {x}: liftable subgroup orbit exceeds the limit")
                chosen = []
            else:
                chosen = stab
            status += f", liftable index {size}"
        pieces.append((cyc.regions, "Homeomorphism", status))
        for el in chosen:
            tup = {x: el}
            cur, ok = el, True
            for r in reversed(order[1:]):
                lifts = _pure_lifts(dec.pieces[r].presentation, dec.pieces[r].presentation, cur)
                if not lifts:
                    ok = False
                    break
                cur = lifts[0].element
                tup[r] = cur
            for p in feeders:
                if not ok:
                    break
                base = tup.get(p.target)
                lifts = _pure_lifts(p.presentation, p.presentation, base) if base is not None else []
                if not lifts:
                    ok = False
                    break
                tup[p.source] = lifts[0].element
            if ok:
                gens_out.append(tup)
            else:
                markers.append(f"cycle at region {x}: a generator failed to lift around the cycle")
    return ThickCentralizer(gens_out, pieces, markers, sizes)


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


@dataclass
class _Branch:
    tau: tuple
    sigma: tuple
    result: GlueResult | None = None
    decisive: bool = True
    stage: str = ""
    reason: str = ""
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)


def _run_branch(f, g, gamma_f, gamma_g, tau, sigma, theta0, oracle, config, sound) -> _Branch:
    br = _Branch(tau, sigma)
    s = f.base
    h0 = theta0
    try:
        big_f = bc.conjugate(f, h0)
        m, big_g, gamma_std = dc.standard_form(g, gamma_g)
        big_f = bc.conjugate(big_f, m) if not m.auto.is_identity() else big_f
        dec_f = dc.decompose(big_f, gamma_std)
        dec_g = dc.decompose(big_g, gamma_std)
    except (NotDecomposable, NotStable, ThurstonError) as e:
        br.decisive, br.stage, br.reason = False, "decompose", str(e)
        return br
    thick = thick_equivalence_search(big_f, big_g, dec_f, dec_g, oracle, config)
    br.notes += thick.notes
    if thick.ok is False:
        br.stage, br.reason = thick.stage, thick.reason
        br.decisive = sound
        return br
    regions = dec_g.regions
    if gamma_std.curves:
        n = config.n_override or math.lcm(modulus(big_f, gamma_std), modulus(big_g, gamma_std))
        src = "override" if config.n_override else "lcm of preimage component degrees"
        mat = ob.thurston_matrix(big_f, gamma_std)
        lift_matrix_check(big_f, gamma_std, regions, mat.entries, n)
    else:
        n, src, mat = 1, "no curves", ob.ThurstonMatrix(gamma_std, ())
    br.details.update(modulus=n, modulus_source=src)
    undecided = False
    tried = set()
    # deepen the candidate ball one step at a time; short witnesses are found cheaply
    for radius in range(config.ball_radius + 1):
        cands, complete = stabilizer_candidates(s, gamma_std, regions, radius)
        psis = liftable_symmetries(big_g, gamma_std, regions, cands)
        for theta in cands:
            key = (theta.word, len(psis))  # retried when new symmetries turned up
            if key in tried:
                continue
            tried.add(key)
            try:
                res = lattice_glue(big_f, big_g, theta, gamma_std, mat, n, psis, config, regions)
            except fg.Undecided:
                undecided = True
                continue
            undecided = undecided or res.undecided
            if res.success:
                # pull the witness back: h1 = m^-1 o w o m o h0
                w = m.inverse() * res.witness * m * h0
                lift = bc.equivalence_witness(f, g, w)
                if lift is None:
                    raise ContractViolation("assembled equivalence does not lift to itself")
                br.result = GlueResult(True, w, lift, res.twists)
                return br
        if complete:
            break
    br.stage = "lattice"
    br.reason = "no candidate glued to an equivalence"
    br.decisive = sound and complete and not undecided
    if not complete:
        br.notes.append(f"curve-stabilizer candidates limited to radius {config.ball_radius}")
    if undecided:
        br.notes.append("some equalities were undecided during gluing")
    return br


def check_equivalence(f: bc.CoverPresentation, g: bc.CoverPresentation,
                      oracle: GeometrizationOracle | None = None, config: Config | None = None,
                      obstructions: tuple | None = None) -> EquivalenceCertificate:
    """Decide whether ``f`` and ``g`` are combinatorially equivalent.

    ``obstructions`` is ``(Gamma_f, Gamma_g)`` taken as canonical; without
    it both are the stable saturation of the empty multicurve and only
    verdicts that do not depend on them count as decisive.
    """
    config = config or Config()
    if f.degree != g.degree or f.n != g.n:
        return EquivalenceCertificate(NOT_EQUIVALENT, "shape", "degree or number of marked points differs")
    n = f.n
    taus = [tau for tau in itertools.permutations(range(1, n + 1))
            if bc.dynamics_compatible(f, g, tau) and orbifold_compatible(f, g, tau)]
    if not taus:
        return EquivalenceCertificate(NOT_EQUIVALENT, "dynamics",
                                      "no bijection of marked points conjugates the dynamics and local degrees")
    canonical = obstructions is not None
    if canonical:
        gamma_f, gamma_g = obstructions
    else:
        empty = sp.Multicurve((), "fallback")
        gamma_f, gamma_g = ob.stable_saturation(f, empty), ob.stable_saturation(g, empty)
        if not gamma_f or not gamma_g:
            gamma_f = gamma_g = empty
    sound = canonical or (len(gamma_f) == 0 and len(gamma_g) == 0)
    cert_base = dict(canonical=canonical)
    leaves: list = []
    gate = gate_obstruction_invariants(f, g, gamma_f, gamma_g)
    if not gate.passed:
        if sound:
            return EquivalenceCertificate(NOT_EQUIVALENT, gate.gate, gate.reason, **cert_base)
        return EquivalenceCertificate(INCONCLUSIVE, gate.gate, gate.reason + " (advisory: obstructions not canonical)",
                                      leaves=[gate.reason], **cert_base)
    s = f.base
    jobs = []
    for tau in taus:
        sigmas = realizable_sigmas(gamma_f, gamma_g, tau, gate.permutations)
        if not sigmas:
            if not sound:
                leaves.append(f"tau {tau}: no realizable curve correspondence (advisory)")
            continue
        beta = mc.permutation_braid(s, tau)
        moved = [mc.act_on_curve(beta, c) for c in gamma_f]
        targets = {sg: tuple(gamma_g.curves[sg[i]].cls for i in range(len(sg))) for sg in sigmas}
        found = move_multicurve(s, moved, targets, config.curve_budget)
        for sg in sigmas:
            if sg not in found:
                leaves.append(f"tau {tau}, sigma {sg}: no curve-matching class within {config.curve_budget} states")
                continue
            jobs.append((tau, sg, found[sg] * beta))

    def run(job):
        tau, sg, theta0 = job
        return _run_branch(f, g, gamma_f, gamma_g, tau, sg, theta0, oracle, config, sound)

    branches = cz._map(run, jobs, config.threads)
    notes = []
    for br in branches:
        if br.result is not None and br.result.success:
            return EquivalenceCertificate(
                EQUIVALENT, "", "equivalence found and re-verified", br.result.witness, br.result.lift,
                br.tau, br.sigma, br.result.twists, br.details.get("modulus"),
                br.details.get("modulus_source", ""), canonical, [], sorted(set(notes + br.notes)))
        if not br.decisive:
            leaves.append(f"tau {br.tau}, sigma {br.sigma}: {br.stage}: {br.reason}"
                          + (f" [{'; '.join(br.notes)}]" if br.notes else ""))
    if leaves:
        return EquivalenceCertificate(INCONCLUSIVE, "search", "some branches were not decided",
                                      leaves=leaves, **cert_base)
    stages = sorted({br.stage for br in branches})
    return EquivalenceCertificate(NOT_EQUIVALENT, ",".join(stages) or "dynamics",
                                  f"all {len(branches)} branches closed decisively", **cert_base)


def audit(f: bc.CoverPresentation, g: bc.CoverPresentation, cert: EquivalenceCertificate) -> bool:
    """Independent re-check of a certificate's witness (and of the NotEquivalent bookkeeping)."""
    if cert.verdict == EQUIVALENT:
        h1, lift = cert.witness, cert.lift
        if h1 is None or lift is None:
            return False
        res = bc.lifts_through(f, g, h1)
        if not any(l.sheet_map == lift.sheet_map and mc.mc_equal(l.element, lift.element) is not None
                   for l in res.lifts):
            return False
        return mc.mc_equal(h1, lift.element) is not None
    if cert.verdict == NOT_EQUIVALENT:
        return not cert.leaves
    return True
