"""Text formats: ``thurston-map v1`` documents, words, curves and multicurves.

A map document looks like::

    thurston-map v1
    comment: z^2 - 1 with its critical orbit
    degree: 2
    punctures:
      p1 maps_to p2 local_degree 2
      p2 maps_to p1 local_degree 1
      p3 maps_to p3 local_degree 2
    monodromy:
      p1: ()
      p2: (1 2)
      p3: (1 2)
    restrictions:
      p1: 1 | x2
      p2: 1 | x1
      p3: x1^-1 x2^-1 | 1

Sheets are numbered from 1.  ``maps_to`` and ``local_degree`` describe
the marked point as a preimage point: where it goes and its local degree.
Restriction rows hold one word per sheet, separated by ``|``; ``1`` is
the empty word.  The row of the last puncture may be omitted, it is
implied by the relation ``x_1 ... x_n = 1``.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import re

from . import branched_cover as bc
from . import freegroup as fg
from . import sphere as sp
from .errors import ParseError, PresentationError

HEADER = "thurston-map v1"
SECTIONS = ("comment", "degree", "punctures", "monodromy", "restrictions")

_TOKEN = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, rank: int | None = None, line: int | None = None, field: str | None = None) -> fg.Word:
    """``"x1 x2^-1 x3^2"`` to a reduced signed-int word; ``"1"`` or ``""`` is the identity."""
    out: list = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad generator token {tok!r}", line, field)
        k, e = int(m.group(1)), int(m.group(2) or 1)
        if k < 1 or (rank is not None and k > rank + 1):
            raise ParseError(f"generator x{k} out of range", line, field)
        out += [k if e > 0 else -k] * abs(e)
    if rank is not None:
        # x_n is allowed as shorthand for (x_1 ... x_{n-1})^-1
        expanded: list = []
        for a in out:
            if abs(a) == rank + 1:
                w = fg.inverse(tuple(range(1, rank + 1)))
                expanded += list(w if a > 0 else fg.inverse(w))
            else:
                expanded.append(a)
        out = expanded
    return fg.reduce(out)


def format_word(w) -> str:
    if not w:
        return "1"
    parts, i = [], 0
    w = tuple(w)
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        k = abs(w[i])
        e = (j - i) * (1 if w[i] > 0 else -1)
        parts.append(f"x{k}" if e == 1 else f"x{k}^{e}")
        i = j
    return " ".join(parts)


def parse_cycles(text: str, degree: int, line=None, field=None) -> tuple:
    """Cycle notation with 1-based sheets, e.g. ``(1 2)(3 4 5)``; ``()`` is the identity."""
    perm = list(range(degree))
    if not re.fullmatch(r"(\s*\([\d\s,]*\))*\s*", text):
        raise ParseError(f"bad cycle notation {text!r}", line, field)
    seen = set()
    for cyc in re.findall(r"\(([^)]*)\)", text):
        pts = [int(t) for t in re.split(r"[\s,]+", cyc.strip()) if t]
        for p in pts:
            if not 1 <= p <= degree:
                raise ParseError(f"entry {p} out of range 1..{degree}", line, field)
            if p in seen:
                raise ParseError(f"entry {p} appears twice", line, field)
            seen.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a - 1] = b - 1
    return tuple(perm)


def format_cycles(p) -> str:
    cycles = [c for c in bc.perm_cycles(p) if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(s + 1) for s in c) + ")" for c in cycles)


def _strip(lines):
    for no, raw in enumerate(lines, start=1):
        text = raw.rstrip()
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        yield no, text


def parse_presentation(text: str, validate: bool = True) -> bc.CoverPresentation:
    """Parse and (by default) validate a ``thurston-map v1`` document."""
    rows = list(_strip(text.splitlines()))
    if not rows or rows[0][1].strip() != HEADER:
        raise ParseError(f"first line must be {HEADER!r}", rows[0][0] if rows else 1, "header")
    data: dict = {"comment": "", "punctures": [], "monodromy": {}, "restrictions": {}}
    section = None
    for no, line in rows[1:]:
        indented = line[:1].isspace()
        key, sep, rest = line.strip().partition(":")
        if not indented:
            key = key.strip()
            if key not in SECTIONS or not sep:
                raise ParseError(f"unknown section {line.strip()!r}", no, key)
            section = key
            if key == "comment":
                data["comment"] = rest.strip()
            elif key == "degree":
                try:
                    data["degree"] = int(rest)
                except ValueError:
                    raise ParseError("degree must be an integer", no, "degree") from None
            elif rest.strip():
                raise ParseError(f"section {key} takes indented rows", no, key)
            continue
        if section == "punctures":
            parts = line.split()
            if len(parts) != 5 or parts[1] != "maps_to" or parts[3] != "local_degree":
                raise ParseError("expected '<name> maps_to <name> local_degree <k>'", no, "punctures")
            try:
                k = int(parts[4])
            except ValueError:
                raise ParseError("local degree must be an integer", no, "punctures") from None
            data["punctures"].append((parts[0], parts[2], k, no))
        elif section in ("monodromy", "restrictions"):
            if not sep:
                raise ParseError(f"expected '<name>: ...' in {section}", no, section)
            name = key.strip()
            if name in data[section]:
                raise ParseError(f"puncture {name} listed twice", no, section)
            data[section][name] = (rest.strip(), no)
        elif section == "comment":
            data["comment"] = (data["comment"] + " " + line.strip()).strip()
        else:
            raise ParseError("indented row outside a section", no, section)
    if "degree" not in data:
        raise ParseError("missing degree", None, "degree")
    d = data["degree"]
    if d < 1:
        raise ParseError("degree must be positive", None, "degree")
    names = [p[0] for p in data["punctures"]]
    if len(names) < 3:
        raise ParseError("at least three punctures are required", None, "punctures")
    if len(set(names)) != len(names):
        raise ParseError("puncture names must be distinct", None, "punctures")
    index = {nm: i + 1 for i, nm in enumerate(names)}
    n = len(names)
    s = sp.PuncturedSphere(n, tuple(names))
    point_map, local = [], []
    for nm, img, k, no in data["punctures"]:
        if img not in index:
            raise ParseError(f"unknown puncture {img!r}", no, "punctures")
        point_map.append(index[img])
        local.append(k)
    for section in ("monodromy", "restrictions"):
        for nm, (_, no) in data[section].items():
            if nm not in index:
                raise ParseError(f"unknown puncture {nm!r}", no, section)
    mono = []
    for nm in names:
        if nm not in data["monodromy"]:
            raise ParseError(f"missing monodromy of {nm}", None, "monodromy")
        txt, no = data["monodromy"][nm]
        mono.append(parse_cycles(txt, d, no, "monodromy"))
    res = []
    for nm in names[:-1]:
        if nm not in data["restrictions"]:
            raise ParseError(f"missing restrictions of {nm}", None, "restrictions")
        res.append(_parse_row(data["restrictions"][nm], d, s.rank))
    draft = bc.CoverPresentation(d, s, tuple(mono), tuple(res) + (tuple(() for _ in range(d)),),
                                 (), (), None, data["comment"])
    row_n = _implied_last_row(draft)
    if names[-1] in data["restrictions"]:
        given = _parse_row(data["restrictions"][names[-1]], d, s.rank)
        if given != row_n:
            raise PresentationError("RestrictionRelationViolation",
                                    f"restrictions of {names[-1]} disagree with the relation")
    c = bc.CoverPresentation(d, s, tuple(mono), tuple(res) + (row_n,), tuple(point_map), tuple(local),
                             None, data["comment"])
    if validate:
        bc.validate(c)
    return c


def _implied_last_row(draft: bc.CoverPresentation) -> tuple:
    """Restriction of ``x_n`` at each sheet, so that ``x_1 ... x_n`` restricts trivially."""
    d, n = draft.degree, draft.n
    row = [()] * d
    for s0 in range(d):
        w, t = draft.restrict(tuple(range(1, n)), s0)
        # x_n starts at sheet t and closes the loop back at s0
        row[t] = fg.inverse(w)
    return tuple(row)


def _parse_row(entry, degree: int, rank: int) -> tuple:
    text, no = entry
    cells = text.split("|")
    if len(cells) != degree:
        raise ParseError(f"expected {degree} words separated by '|', got {len(cells)}", no, "restrictions")
    return tuple(parse_word(cell, rank, no, "restrictions") for cell in cells)


def emit_presentation(c: bc.CoverPresentation) -> str:
    if not c.is_self_map:
        raise ValueError("only self-maps have a thurston-map document")
    names = c.base.labels
    lines = [HEADER]
    if c.comment:
        lines.append(f"comment: {c.comment}")
    lines.append(f"degree: {c.degree}")
    lines.append("punctures:")
    for q in range(1, c.n + 1):
        lines.append(f"  {names[q - 1]} maps_to {names[c.point_map[q - 1] - 1]} "
                     f"local_degree {c.local_degrees[q - 1]}")
    lines.append("monodromy:")
    for q in range(1, c.n + 1):
        lines.append(f"  {names[q - 1]}: {format_cycles(c.monodromy[q - 1])}")
    lines.append("restrictions:")
    for q in range(1, c.n + 1):
        lines.append(f"  {names[q - 1]}: " + " | ".join(format_word(w) for w in c.restrictions[q - 1]))
    return "\n".join(lines) + "\n"


def parse_curve(s: sp.PuncturedSphere, text: str) -> sp.CurveClass:
    """A curve given as a word, or as ``c<i>,<j>`` / ``c<i><j>`` for a standard curve."""
    t = text.strip()
    m = re.fullmatch(r"c(\d+),(\d+)", t) or (re.fullmatch(r"c(\d)(\d)", t) if s.n < 11 else None)
    if m:
        return sp.standard_curve(s, int(m.group(1)), int(m.group(2)))
    return sp.curve(s, parse_word(t, s.rank, None, "curve"))


def parse_multicurve(s: sp.PuncturedSphere, text: str, provenance: str = "user") -> sp.Multicurve:
    """Curves separated by ``;`` or newlines; ``#`` starts a comment line."""
    curves = []
    for no, raw in enumerate(text.replace(";", "\n").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            curves.append(parse_curve(s, line))
        except ParseError:
            raise
        except Exception as e:
            raise ParseError(str(e), no, "multicurve") from None
    return sp.Multicurve(tuple(curves), provenance)


def format_curve(c: sp.CurveClass) -> str:
    ij = sp.standard_interval(c)
    if ij is not None:
        return f"c{ij[0]},{ij[1]}"
    return format_word(c.word)


def parse_bijection(text: str, n: int) -> tuple:
    """``"2 1 3 4"`` (images of punctures 1..n) or cycle notation like ``(1 2)``."""
    t = text.strip()
    if t.startswith("("):
        p = parse_cycles(t, n, None, "h0")
        return tuple(x + 1 for x in p)
    vals = [int(x) for x in t.replace(",", " ").split()]
    if sorted(vals) != list(range(1, n + 1)):
        raise ParseError(f"{text!r} is not a permutation of 1..{n}", None, "h0")
    return tuple(vals)
