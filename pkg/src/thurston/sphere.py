"""The n-punctured sphere, its peripheral classes and curve classes.

The fundamental group is presented as ``<x_1..x_n | x_1 x_2 ... x_n = 1>``
and stored as the free group on ``x_1..x_{n-1}`` with
``x_n = (x_1 ... x_{n-1})^-1``.  Punctures sit on a horizontal line, ``x_i``
is a counterclockwise loop around puncture ``i`` based below the line, and
the standard curve ``c_{i,j}`` is the round curve around punctures ``i..j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import freegroup as fg
from .errors import NoEssentialCurves, NotEssential


@dataclass(frozen=True)
class PuncturedSphere:
    n: int
    labels: tuple = ()

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("a punctured sphere needs at least 3 punctures")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"p{i}" for i in range(1, self.n + 1)))
        if len(self.labels) != self.n:
            raise ValueError("one label per puncture is required")

    @property
    def rank(self) -> int:
        return self.n - 1

    def generator(self, i: int) -> fg.Word:
        """Word for the peripheral loop ``x_i`` (``1 <= i <= n``)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"puncture {i} out of range 1..{self.n}")
        if i < self.n:
            return (i,)
        return fg.inverse(tuple(range(1, self.n)))

    def interval_word(self, i: int, j: int) -> fg.Word:
        return fg.mul(*(self.generator(k) for k in range(i, j + 1)))

    def relation(self) -> fg.Word:
        return fg.mul(*(self.generator(i) for i in range(1, self.n + 1)))

    def index_of(self, label: str) -> int:
        return self.labels.index(label) + 1


class Kind(NamedTuple):
    kind: str  # "trivial" | "peripheral" | "essential"
    index: int | None = None


TRIVIAL = Kind("trivial")
ESSENTIAL = Kind("essential")


def peripheral(s: PuncturedSphere, i: int) -> fg.ConjClass:
    return fg.conj_class(s.generator(i), s.rank)


def peripheral_table(s: PuncturedSphere) -> dict:
    return {peripheral(s, i).word: i for i in range(1, s.n + 1)}


def is_trivial_or_peripheral(s: PuncturedSphere, cls) -> Kind:
    """Classify a class (or a word) as trivial, peripheral around ``i`` or essential."""
    if not isinstance(cls, fg.ConjClass):
        cls = fg.conj_class(cls, s.rank)
    if cls.is_trivial:
        return TRIVIAL
    i = peripheral_table(s).get(cls.word)
    if i is not None:
        return Kind("peripheral", i)
    return ESSENTIAL


@dataclass(frozen=True)
class CurveClass:
    """An essential, non-peripheral curve class on a punctured sphere.

    ``word`` is a representative loop; ``cls`` its unoriented conjugacy
    class, which is what equality compares.  ``enclosure`` is the set of
    punctures on the side avoiding puncture ``n`` when the abelianized
    representative is a 0/1 vector, else ``None``; it is a cheap
    separating invariant, never an equality proof.
    """

    surface: PuncturedSphere = field(compare=False)
    cls: fg.ConjClass
    word: fg.Word = field(compare=False, default=())
    enclosure: frozenset | None = field(compare=False, default=None)
    declared_simple: bool = field(compare=False, default=False)
    provenance: str = field(compare=False, default="user")

    def __str__(self):
        return " ".join(_fmt_letter(a) for a in self.word) or "1"


def _fmt_letter(a: int) -> str:
    return f"x{a}" if a > 0 else f"x{-a}^-1"


def _enclosure(s: PuncturedSphere, w: fg.Word):
    v = fg.abelianize(w, s.rank)
    for vec in (v, tuple(-a for a in v)):
        if all(a in (0, 1) for a in vec):
            return frozenset(i + 1 for i, a in enumerate(vec) if a)
    return None


def curve(s: PuncturedSphere, w: Sequence[int], *, simple: bool = False,
          provenance: str = "user") -> CurveClass:
    """Wrap a word as a curve class, checking it is essential."""
    w = fg.reduce(w, s.rank)
    cls = fg.conj_class(w, s.rank)
    kind = is_trivial_or_peripheral(s, cls)
    if kind != ESSENTIAL:
        raise NotEssential(f"class of {w} is {kind.kind}")
    return CurveClass(s, cls, w, _enclosure(s, w), simple, provenance)


def standard_curve(s: PuncturedSphere, i: int, j: int) -> CurveClass:
    """The round curve ``c_{i,j}`` around punctures ``i..j`` (``j <= n-1``)."""
    if not (1 <= i <= j <= s.n - 1) or not (2 <= j - i + 1 <= s.n - 2):
        raise NotEssential(f"c_{{{i},{j}}} is not an essential standard curve on {s.n} punctures")
    w = tuple(range(i, j + 1))
    c = curve(s, w, simple=True, provenance="standard")
    return c


def standard_pairs(n: int) -> list:
    """Admissible ``(i, j)`` for standard curves, ordered by size then start."""
    out = []
    for size in range(2, n - 1):
        for i in range(1, n - size + 1):
            out.append((i, i + size - 1))
    return out


def filling_system(s: PuncturedSphere) -> list:
    if s.n < 4:
        raise NoEssentialCurves(f"a sphere with {s.n} punctures has no essential curves")
    return [standard_curve(s, i, j) for i, j in standard_pairs(s.n)]


def standard_interval(c: CurveClass):
    """Return ``(i, j)`` if ``c`` is a standard curve, else ``None``."""
    s = c.surface
    for i, j in standard_pairs(s.n):
        if fg.conj_class(tuple(range(i, j + 1)), s.rank) == c.cls:
            return (i, j)
    return None


@dataclass(frozen=True)
class Multicurve:
    curves: tuple
    provenance: str = "user"

    def __post_init__(self):
        classes = [c.cls for c in self.curves]
        if len(set(classes)) != len(classes):
            raise ValueError("multicurve components must be pairwise non-homotopic")

    def __len__(self):
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)

    def index(self, cls: fg.ConjClass) -> int | None:
        for k, c in enumerate(self.curves):
            if c.cls == cls:
                return k
        return None
