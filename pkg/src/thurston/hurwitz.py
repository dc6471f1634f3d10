"""Hurwitz moves, orbits and the Hurwitz-class decision.

A Hurwitz tuple is a sequence of sheet permutations (0-based, right
action) whose ordered product is the identity and which act transitively.
Move ``i`` (1-based) replaces ``(s_i, s_{i+1})`` by
``(s_i s_{i+1} s_i^-1, s_i)``; move ``-i`` is its inverse.  Labels ride
along with the permutations so that labeled orbits remember which branch
value sits at which position.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from . import branched_cover as bc
from . import mapping_class as mc
from .errors import ContractViolation, OrbitOverflow

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class HurwitzTuple:
    degree: int
    perms: tuple
    labels: tuple = ()

    def __post_init__(self):
        perms = tuple(tuple(p) for p in self.perms)
        object.__setattr__(self, "perms", perms)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, len(perms) + 1)))
        if len(self.labels) != len(perms):
            raise ValueError("one label per permutation is required")

    def product(self) -> tuple:
        p = bc.perm_identity(self.degree)
        for q in self.perms:
            p = bc.perm_then(p, q)
        return p

    def is_valid(self) -> bool:
        return (all(bc.is_permutation(p, self.degree) for p in self.perms)
                and self.product() == bc.perm_identity(self.degree)
                and len(bc.orbits(self.perms, self.degree)) == 1)


def from_presentation(c: bc.CoverPresentation, order: Sequence[int] | None = None) -> HurwitzTuple:
    """Monodromy tuple of a presentation, in puncture order (labels are puncture numbers)."""
    order = tuple(order) if order is not None else tuple(range(1, c.n + 1))
    return HurwitzTuple(c.degree, tuple(c.monodromy[q - 1] for q in order), order)


def _conj(p: Sequence[int], m: Sequence[int]) -> tuple:
    """Relabel sheets of ``p`` by ``m`` (sheet ``s`` becomes ``m[s]``)."""
    out = [0] * len(p)
    for s, t in enumerate(p):
        out[m[s]] = m[t]
    return tuple(out)


def canonical_relabeling(perms: Sequence[Sequence[int]], degree: int) -> tuple:
    """``(canonical perms, relabeling)`` minimizing over BFS relabelings from each start sheet."""
    best = None
    for start in range(degree):
        m = {start: 0}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for p in perms:
                t = p[s]
                if t not in m:
                    m[t] = len(m)
                    queue.append(t)
        if len(m) != degree:
            raise ValueError("tuple is not transitive")
        relabel = tuple(m[s] for s in range(degree))
        cand = tuple(_conj(p, relabel) for p in perms)
        if best is None or cand < best[0]:
            best = (cand, relabel)
    return best


def canonical(t: HurwitzTuple) -> tuple:
    return canonical_relabeling(t.perms, t.degree)[0]


def hurwitz_move(t: HurwitzTuple, i: int) -> HurwitzTuple:
    """Move ``i`` for ``i > 0`` and its inverse for ``i < 0`` (positions 1-based)."""
    k = abs(i) - 1
    if not 0 <= k < len(t.perms) - 1:
        raise IndexError(f"move {i} out of range for a tuple of length {len(t.perms)}")
    perms, labels = list(t.perms), list(t.labels)
    a, b = perms[k], perms[k + 1]
    if i > 0:
        new = (bc.perm_then(bc.perm_then(a, b), bc.perm_inverse(a)), a)
    else:
        new = (b, bc.perm_then(bc.perm_then(bc.perm_inverse(b), a), b))
    perms[k], perms[k + 1] = new
    labels[k], labels[k + 1] = labels[k + 1], labels[k]
    return HurwitzTuple(t.degree, tuple(perms), tuple(labels))


def hurwitz_moves(t: HurwitzTuple, moves: Sequence[int]) -> HurwitzTuple:
    for i in moves:
        t = hurwitz_move(t, i)
    return t


def _move_letters(length: int) -> list:
    out = []
    for i in range(1, length):
        out += [i, -i]
    return out


@dataclass
class HurwitzOrbit:
    start: tuple  # state of the starting tuple
    states: dict  # state -> (parent state, move) ; the start maps to None
    labeled: bool

    def __len__(self):
        return len(self.states)

    def __contains__(self, state):
        return state in self.states

    def canonical_set(self) -> frozenset:
        return frozenset(self.states)

    def path_to(self, state) -> list:
        moves = []
        while self.states[state] is not None:
            parent, move = self.states[state]
            moves.append(move)
            state = parent
        return moves[::-1]


def _state(t: HurwitzTuple, labeled: bool):
    perms = canonical(t)
    return (t.labels, perms) if labeled else perms


def _tuple_of(state, degree: int, labeled: bool, length: int) -> HurwitzTuple:
    if labeled:
        labels, perms = state
        return HurwitzTuple(degree, perms, labels)
    return HurwitzTuple(degree, state, tuple(range(1, length + 1)))


def cache_key(t: HurwitzTuple, labeled: bool) -> str:
    payload = json.dumps({"d": t.degree, "start": _state(t, labeled), "labeled": labeled})
    return hashlib.sha256(payload.encode()).hexdigest()


def hurwitz_orbit(t: HurwitzTuple, budget: int = DEFAULT_BUDGET, labeled: bool = False,
                  cache=None) -> HurwitzOrbit:
    """Closure of ``t`` under moves, inverse moves and simultaneous conjugation.

    States are canonical forms (with labels when ``labeled``).  A cache is
    any object with ``get(key)`` and ``put(key, orbit)``; hits are checked
    by re-canonicalizing every state and replaying every parent move.
    """
    if not t.is_valid():
        raise ValueError("not a valid Hurwitz tuple")
    key = cache_key(t, labeled)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None and _verify_cached(t, hit, labeled):
            return hit
    start = _state(t, labeled)
    states = {start: None}
    queue = deque([start])
    letters = _move_letters(len(t.perms))
    while queue:
        cur = queue.popleft()
        tup = _tuple_of(cur, t.degree, labeled, len(t.perms))
        for i in letters:
            nxt = _state(hurwitz_move(tup, i), labeled)
            if nxt not in states:
                states[nxt] = (cur, i)
                if len(states) > budget:
                    raise OrbitOverflow(f"orbit exceeds {budget} states",
                                        HurwitzOrbit(start, states, labeled))
                queue.append(nxt)
    orbit = HurwitzOrbit(start, states, labeled)
    if cache is not None:
        cache.put(key, orbit)
    return orbit


def _verify_cached(t: HurwitzTuple, orbit: HurwitzOrbit, labeled: bool) -> bool:
    if orbit.labeled != labeled or orbit.start != _state(t, labeled):
        return False
    n = len(t.perms)
    letters = _move_letters(n)
    for state, parent in orbit.states.items():
        tup = _tuple_of(state, t.degree, labeled, n)
        if _state(tup, labeled) != state:
            return False
        if parent is not None:
            prev, move = parent
            if prev not in orbit.states:
                return False
            if _state(hurwitz_move(_tuple_of(prev, t.degree, labeled, n), move), labeled) != state:
                return False
        # closure: negative answers rely on it
        for i in letters:
            if _state(hurwitz_move(tup, i), labeled) not in orbit.states:
                return False
    return True


def orbit_partition(tuples: Sequence[HurwitzTuple], budget: int = DEFAULT_BUDGET) -> list:
    """Partition tuples into unlabeled orbits; blocks are lists of input indices."""
    seen: dict = {}
    blocks: list = []
    for idx, t in enumerate(tuples):
        c = canonical(t)
        if c in seen:
            blocks[seen[c]].append(idx)
            continue
        orbit = hurwitz_orbit(t, budget)
        b = len(blocks)
        blocks.append([idx])
        for state in orbit.states:
            seen[state] = b
    return blocks


# ---------------------------------------------------------------------------
# Decision between presentations
# ---------------------------------------------------------------------------


@dataclass
class HurwitzWitness:
    moves: list  # applied to b's tuple (puncture order)
    relabel: tuple  # sheet s of the moved tuple becomes sheet relabel[s] of a

    def lines(self) -> list:
        mv = " ".join(f"s{m}" if m > 0 else f"s{-m}^-1" for m in self.moves)
        return [f"moves: {mv or '(none)'}",
                "sheet relabeling: " + " ".join(str(x + 1) for x in self.relabel)]


@dataclass
class HurwitzDecision:
    same: bool | None  # None when inconclusive
    witness: HurwitzWitness | None = None
    orbit_size: int = 0
    reason: str = ""
    lift: object = None

    def __bool__(self):
        return bool(self.same)


def verify_witness(a: HurwitzTuple, b: HurwitzTuple, h0: Sequence[int], w: HurwitzWitness) -> bool:
    """Replay ``w`` on ``b`` and compare with ``a`` after relabeling sheets and branch values."""
    moved = hurwitz_moves(b, w.moves)
    if moved.labels != tuple(h0[x - 1] for x in a.labels):
        return False
    return tuple(_conj(p, w.relabel) for p in moved.perms) == a.perms


def same_hurwitz_class(a: bc.CoverPresentation, b: bc.CoverPresentation, h0: Sequence[int] | None = None,
                       budget: int = DEFAULT_BUDGET, cache=None,
                       h0_class: mc.MappingClass | None = None) -> HurwitzDecision:
    """Decide whether ``h0 o a = b o h1`` for some homeomorphism ``h1``.

    ``h0`` is a bijection of base punctures (``h0[i-1]`` is the image of
    puncture ``i``).  When ``h0_class`` is given as well, the second
    question is also settled: whether that particular mapping class lifts.
    """
    if a.degree != b.degree or a.n != b.n:
        return HurwitzDecision(False, reason="degree or puncture count differs")
    n = a.n
    h0 = tuple(h0) if h0 is not None else tuple(range(1, n + 1))
    if sorted(h0) != list(range(1, n + 1)):
        raise ValueError("h0 must be a bijection of punctures")
    ta = from_presentation(a)
    tb = from_presentation(b)
    try:
        orbit = hurwitz_orbit(tb, budget, labeled=True, cache=cache)
    except OrbitOverflow as e:
        return HurwitzDecision(None, orbit_size=len(e.partial), reason=f"inconclusive: {e}")
    target = (h0, canonical(ta))
    if target not in orbit:
        return HurwitzDecision(False, orbit_size=len(orbit), reason="not in the labeled orbit")
    moves = orbit.path_to(target)
    moved = hurwitz_moves(tb, moves)
    _, r_moved = canonical_relabeling(moved.perms, moved.degree)
    _, r_a = canonical_relabeling(ta.perms, ta.degree)
    relabel = bc.perm_then(r_moved, bc.perm_inverse(r_a))
    witness = HurwitzWitness(moves, relabel)
    if not verify_witness(ta, tb, h0, witness):
        raise ContractViolation("Hurwitz witness failed to replay")
    decision = HurwitzDecision(True, witness, len(orbit))
    if h0_class is not None:
        if tuple(h0_class.puncture_perm) != h0:
            raise ValueError("h0_class does not induce the bijection h0")
        res = bc.lifts_through(a, b, h0_class)
        decision.lift = res
        if not res:
            decision.same = True
            decision.reason = "same Hurwitz class, but this h0 does not lift: " + res.reason
    return decision
