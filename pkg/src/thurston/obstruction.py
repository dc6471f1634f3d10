"""Thurston matrices, exact spectral comparison with 1, stability and Levy cycles.

``M[g][d]`` sums ``1/deg`` over the components of the preimage of curve
``d`` that are homotopic to curve ``g``.  Levy edges point from a curve to
the curves homotopic to its degree-one preimages; a Levy cycle is a
directed cycle of such edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import branched_cover as bc
from . import mapping_class as mc
from . import sphere as sp
from .errors import ContractViolation, NotStable, UnsupportedCurve


# ---------------------------------------------------------------------------
# Stability and the matrix
# ---------------------------------------------------------------------------


@dataclass
class StabilityReport:
    stable: bool
    offending: list  # (index of curve in the multicurve, PullbackComponent)

    def __bool__(self):
        return self.stable


def _require_self_map(c: bc.CoverPresentation):
    if not c.is_self_map:
        raise ValueError("stability needs a self-map (cover sphere equal to base sphere)")


def is_stable(c: bc.CoverPresentation, gamma: sp.Multicurve) -> StabilityReport:
    _require_self_map(c)
    offending = []
    for k, g in enumerate(gamma):
        for comp in bc.pullback_curve(c, g):
            if comp.kind == sp.ESSENTIAL and gamma.index(comp.cls) is None:
                offending.append((k, comp))
    return StabilityReport(not offending, offending)


@dataclass(frozen=True)
class ThurstonMatrix:
    gamma: sp.Multicurve
    entries: tuple  # rows of Fractions

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list:
        return [list(r) for r in self.entries]

    def permuted(self, perm: Sequence[int]) -> "ThurstonMatrix":
        """Matrix with index ``i`` renamed ``perm[i]``."""
        k = self.size
        inv = [0] * k
        for i, p in enumerate(perm):
            inv[p] = i
        rows = tuple(tuple(self.entries[inv[a]][inv[b]] for b in range(k)) for a in range(k))
        curves = tuple(self.gamma.curves[inv[a]] for a in range(k))
        return ThurstonMatrix(sp.Multicurve(curves, self.gamma.provenance), rows)

    def lines(self) -> list:
        return [" ".join(str(x) for x in row) for row in self.entries]


def thurston_matrix(c: bc.CoverPresentation, gamma: sp.Multicurve) -> ThurstonMatrix:
    rep = is_stable(c, gamma)
    if not rep:
        k, comp = rep.offending[0]
        raise NotStable(f"curve {k + 1} has an essential preimage {comp.word} outside the multicurve")
    k = len(gamma)
    m = [[Fraction(0)] * k for _ in range(k)]
    for d, g in enumerate(gamma):
        for comp in bc.pullback_curve(c, g):
            if comp.kind == sp.ESSENTIAL:
                m[gamma.index(comp.cls)][d] += Fraction(1, comp.degree)
    return ThurstonMatrix(gamma, tuple(tuple(r) for r in m))


# ---------------------------------------------------------------------------
# Exact comparison of the leading eigenvalue with 1
# ---------------------------------------------------------------------------


LESS, EQUAL, GREATER = "LESS", "EQUAL", "GREATER"


@dataclass
class BlockCertificate:
    """Certificate for one strongly connected block (indices into the full matrix).

    ``kind`` is LESS with a positive ``vector`` u and ``theta < 1`` such that
    ``B u <= theta u``; EQUAL with a positive ``vector`` v such that
    ``B v = v``; or GREATER with a nonnegative ``vector`` v and
    ``theta > 1`` such that ``B v >= theta v``.
    """

    block: tuple
    kind: str
    vector: tuple
    theta: Fraction


@dataclass
class SpectralVerdict:
    verdict: str
    blocks: list
    witness: tuple  # EQUAL/GREATER: v >= 0, v != 0 with M v >= v; LESS: u > 0 with M u <= theta u
    theta: Fraction | None
    approx: float

    def lines(self) -> list:
        head = f"lambda: {self.verdict}"
        if self.verdict == LESS:
            head += f", theta={self.theta}"
        out = [head, f"lambda approx: {self.approx:.12g}",
               "witness: " + " ".join(str(x) for x in self.witness)]
        return out


def _as_fractions(m) -> list:
    if isinstance(m, ThurstonMatrix):
        m = m.entries
    return [[Fraction(x) for x in row] for row in m]


def _matvec(m, v) -> list:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in m]


def _sccs(m) -> list:
    """Strongly connected components of the support graph, Tarjan order."""
    k = len(m)
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in range(k):
            if m[v][w] == 0:
                continue
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(tuple(sorted(comp)))

    for v in range(k):
        if v not in index:
            visit(v)
    return out


def _det(a) -> Fraction:
    a = [row[:] for row in a]
    k = len(a)
    det = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, k):
            f = a[r][c] / a[c][c]
            if f:
                for j in range(c, k):
                    a[r][j] -= f * a[c][j]
    return det


def _solve(a, b) -> list:
    """Solve ``a x = b`` for nonsingular ``a``."""
    k = len(a)
    aug = [list(a[r]) + [b[r]] for r in range(k)]
    for c in range(k):
        piv = next(r for r in range(c, k) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(k):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[r][k] for r in range(k)]


def _nullspace(a) -> list:
    k = len(a)
    cols = len(a[0]) if a else 0
    rows = [row[:] for row in a]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, k) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(k):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fcol]
        basis.append(v)
    return basis


def _block_certificate(m, block: tuple, max_iter: int = 10000) -> BlockCertificate:
    b = [[m[i][j] for j in block] for i in block]
    k = len(block)
    a = [[(Fraction(1) if i == j else Fraction(0)) - b[i][j] for j in range(k)] for i in range(k)]
    if all(_det([row[:r] for row in a[:r]]) > 0 for r in range(1, k + 1)):
        u = _solve(a, [Fraction(1)] * k)
        scale = min(u)
        u = [x / scale for x in u]
        bu = _matvec(b, u)
        theta = max(x / y for x, y in zip(bu, u))
        return BlockCertificate(block, LESS, tuple(u), theta)
    if _det(a) == 0:
        for v in _nullspace(a):
            if all(x > 0 for x in v) or all(x < 0 for x in v):
                v = [abs(x) for x in v]
                scale = min(v)
                return BlockCertificate(block, EQUAL, tuple(x / scale for x in v), Fraction(1))
    # lambda > 1: Collatz-Wielandt lower bounds on the primitive matrix B + I
    shifted = [[b[i][j] + (1 if i == j else 0) for j in range(k)] for i in range(k)]
    v = [Fraction(1)] * k
    for _ in range(max_iter):
        w = _matvec(shifted, v)
        theta = min(x / y for x, y in zip(w, v)) - 1
        if theta > 1:
            top = max(v)
            return BlockCertificate(block, GREATER, tuple(x / top for x in v), theta)
        top = max(w)
        v = [x / top for x in w]
        # keep the entries small without losing exactness of the check
        v = [Fraction(x).limit_denominator(10 ** 12) if x.denominator > 10 ** 15 else x for x in v]
        v = [x if x > 0 else Fraction(1, 10 ** 12) for x in v]
    raise ContractViolation("no Collatz-Wielandt certificate found for a block with lambda > 1")


def leading_eigenvalue_geq_1(m) -> SpectralVerdict:
    """Compare the spectral radius of a nonnegative rational matrix with 1, exactly."""
    rows = _as_fractions(m)
    k = len(rows)
    if any(x < 0 for row in rows for x in row):
        raise ValueError("matrix must be nonnegative")
    approx = 0.0
    if k:
        approx = float(max(abs(np.linalg.eigvals(np.array([[float(x) for x in r] for r in rows])))))
    if k == 0:
        return SpectralVerdict(LESS, [], (), Fraction(0), 0.0)
    blocks = []
    for comp in _sccs(rows):
        if len(comp) == 1 and rows[comp[0]][comp[0]] == 0:
            blocks.append(BlockCertificate(comp, LESS, (Fraction(1),), Fraction(0)))
        else:
            blocks.append(_block_certificate(rows, comp))
    kinds = {c.kind for c in blocks}
    if GREATER in kinds:
        verdict = GREATER
    elif EQUAL in kinds:
        verdict = EQUAL
    else:
        verdict = LESS
    if verdict == LESS:
        a = [[(Fraction(1) if i == j else Fraction(0)) - rows[i][j] for j in range(k)] for i in range(k)]
        u = _solve(a, [Fraction(1)] * k)
        scale = min(u)
        u = [x / scale for x in u]
        mu = _matvec(rows, u)
        theta = max(x / y for x, y in zip(mu, u))
        return SpectralVerdict(LESS, blocks, tuple(u), theta, approx)
    cert = next(c for c in blocks if c.kind == verdict)
    v = [Fraction(0)] * k
    for idx, x in zip(cert.block, cert.vector):
        v[idx] = x
    return SpectralVerdict(verdict, blocks, tuple(v), cert.theta, approx)


def verify_verdict(m, res: SpectralVerdict) -> bool:
    """Re-check every inequality in a verdict by exact arithmetic."""
    rows = _as_fractions(m)
    k = len(rows)
    for c in res.blocks:
        b = [[rows[i][j] for j in c.block] for i in c.block]
        bv = _matvec(b, c.vector)
        if c.kind == LESS:
            if not (c.theta < 1 and all(x > 0 for x in c.vector)
                    and all(y <= c.theta * x for x, y in zip(c.vector, bv))):
                return False
        elif c.kind == EQUAL:
            if not (all(x > 0 for x in c.vector) and list(bv) == list(c.vector)):
                return False
        else:
            if not (c.theta > 1 and any(x > 0 for x in c.vector) and all(x >= 0 for x in c.vector)
                    and all(y >= c.theta * x for x, y in zip(c.vector, bv))):
                return False
    kinds = [c.kind for c in res.blocks]
    expect = GREATER if GREATER in kinds else EQUAL if EQUAL in kinds else LESS
    if k and expect != res.verdict:
        return False
    mv = _matvec(rows, res.witness) if k else []
    if res.verdict == LESS:
        return all(x > 0 for x in res.witness) and all(y <= res.theta * x for x, y in zip(res.witness, mv))
    return (all(x >= 0 for x in res.witness) and any(x > 0 for x in res.witness)
            and all(y >= x for x, y in zip(res.witness, mv)))


# ---------------------------------------------------------------------------
# Levy cycles
# ---------------------------------------------------------------------------


@dataclass
class LevyCycle:
    """Curves ``c_0 .. c_{k-1}`` (indices) where a degree-one preimage of ``c_t`` is homotopic to ``c_{t+1}``."""

    curves: tuple
    degenerate: bool
    sheets: tuple  # sheet (1-based) carrying the chosen degree-one preimage at each step

    def lines(self, gamma: sp.Multicurve | None = None) -> list:
        names = [str(i + 1) for i in self.curves]
        tag = "degenerate" if self.degenerate else "non-degenerate"
        return [f"levy cycle: {' -> '.join(names)} -> {names[0]} ({tag})"]


def levy_edges(c: bc.CoverPresentation, gamma: sp.Multicurve) -> dict:
    """``(d, g) -> [sheet]`` for degree-one components of the preimage of ``d`` homotopic to ``g``."""
    edges: dict = {}
    for d, curve in enumerate(gamma):
        for comp in bc.pullback_curve(c, curve):
            if comp.degree == 1 and comp.kind == sp.ESSENTIAL:
                g = gamma.index(comp.cls)
                if g is not None:
                    edges.setdefault((d, g), []).append(comp.sheets[0] - 1)
    return edges


def _simple_cycles(k: int, adj: dict) -> list:
    out = []

    def dfs(start, v, path, seen):
        for w in sorted(adj.get(v, ())):
            if w == start:
                out.append(tuple(path))
            elif w > start and w not in seen:
                seen.add(w)
                path.append(w)
                dfs(start, w, path, seen)
                path.pop()
                seen.discard(w)

    for s in range(k):
        dfs(s, s, [s], {s})
    return out


def curve_sides(curve: sp.CurveClass) -> tuple:
    """``(boundary word, side A, side B)``; sides are lists of ``(loop word, puncture)``.

    Side A is the side bounded by the boundary word read counterclockwise.
    """
    s = curve.surface
    ij = sp.standard_interval(curve)
    m = None
    if ij is None:
        m = mc.standardize(s, [curve])
        if m is None:
            raise UnsupportedCurve("could not move the curve to a standard position")
        ij = sp.standard_interval(mc.act_on_curve(m, curve))
    i, j = ij
    inside = [(s.generator(p), p) for p in range(i, j + 1)]
    outside = [(s.generator(p), p) for p in range(1, s.n + 1) if not i <= p <= j]
    boundary = s.interval_word(i, j)
    if m is None:
        return boundary, inside, outside
    mi = m.inverse()

    def back(side):
        return [(mi.auto(w), mi.puncture_perm[p - 1]) for w, p in side]

    return mi.auto(boundary), back(inside), back(outside)


def _disk_data(c: bc.CoverPresentation, side: list, sheet: int):
    """Marked points of the preimage disk at ``sheet`` if it maps with degree one, else ``None``."""
    marked = set()
    for w, _ in side:
        r, end = c.restrict(w, sheet)
        if end != sheet:
            return None
        kind = sp.is_trivial_or_peripheral(c.top, r)
        if kind.kind == "peripheral":
            marked.add(kind.index)
        elif kind.kind == "essential":
            return None
    return frozenset(marked)


def find_levy_cycles(c: bc.CoverPresentation, gamma: sp.Multicurve) -> list:
    """All simple Levy cycles, each flagged degenerate when the bounded disks map homeomorphically."""
    _require_self_map(c)
    edges = levy_edges(c, gamma)
    adj: dict = {}
    for d, g in edges:
        adj.setdefault(d, set()).add(g)
    out = []
    sides = {}
    for cyc in _simple_cycles(len(gamma), adj):
        for t in cyc:
            if t not in sides:
                sides[t] = curve_sides(gamma.curves[t])
        k = len(cyc)
        degenerate = False
        chosen = tuple(edges[(cyc[t], cyc[(t + 1) % k])][0] + 1 for t in range(k))
        options = []
        for t in range(k):
            cur, nxt = cyc[t], cyc[(t + 1) % k]
            comps = bc.pullback_curve(c, sides[cur][0])
            options.append([comp.sheets[0] - 1 for comp in comps
                            if comp.degree == 1 and comp.cls == gamma.curves[nxt].cls])
        for choice in itertools.product((1, 2), repeat=k):
            for sheets in itertools.product(*options):
                ok = True
                for t in range(k):
                    cur, nxt = cyc[t], cyc[(t + 1) % k]
                    side = sides[cur][choice[t]]
                    target = frozenset(p for _, p in sides[nxt][choice[(t + 1) % k]])
                    if _disk_data(c, side, sheets[t]) != target:
                        ok = False
                        break
                if ok:
                    degenerate = True
                    chosen = tuple(s + 1 for s in sheets)
                    break
            if degenerate:
                break
        out.append(LevyCycle(cyc, degenerate, chosen))
    return out


# ---------------------------------------------------------------------------
# Stable saturation
# ---------------------------------------------------------------------------


@dataclass
class Overflow:
    curves: list
    reason: str

    def __bool__(self):
        return False


def stable_saturation(c: bc.CoverPresentation, seed: sp.Multicurve, budget: int = 32):
    """Close ``seed`` under essential preimages; ``Overflow`` past ``n-3`` classes or ``budget`` rounds."""
    _require_self_map(c)
    s = c.base
    curves = list(seed.curves)
    limit = max(s.n - 3, 0)
    for _ in range(budget):
        added = False
        classes = {g.cls for g in curves}
        for g in list(curves):
            for comp in bc.pullback_curve(c, g):
                if comp.kind == sp.ESSENTIAL and comp.cls not in classes:
                    curves.append(sp.curve(s, comp.word, simple=g.declared_simple, provenance="pullback"))
                    classes.add(comp.cls)
                    added = True
        if len(curves) > limit:
            return Overflow(curves, f"{len(curves)} classes exceed the maximum {limit} of a multicurve")
        if not added:
            out = sp.Multicurve(tuple(curves), "pullback" if len(curves) > len(seed) else seed.provenance)
            if not is_stable(c, out):
                raise ContractViolation("saturation is not stable")
            return out
    return Overflow(curves, f"no fixed point within {budget} rounds")
