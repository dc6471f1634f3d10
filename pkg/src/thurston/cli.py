"""Command line entry point: ``thurston <command> ...``.

Commands print a plain-text report on stdout.  Exit codes: 0 success or
equivalent, 1 negative verdict (invalid, not equivalent, not Hurwitz
equivalent), 2 inconclusive, 64 usage error or unreadable input,
70 internal contract violation.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import shlex
import sys
import tempfile
from fractions import Fraction

from . import branched_cover as bc
from . import centralizer as cz
from . import decomposition as dc
from . import formats
from . import hurwitz as hw
from . import mapping_class as mc
from . import obstruction as ob
from . import pipeline as pl
from . import sphere as sp
from .errors import ContractViolation, ParseError, PresentationError, ThurstonError

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2, 64, 70


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Orbit cache
# ---------------------------------------------------------------------------


def _tuplify(x):
    return tuple(_tuplify(y) for y in x) if isinstance(x, list) else x


class OrbitCache:
    """Hurwitz orbits stored as one JSON file per content key.

    The key hashes the canonical starting tuple, so a file can only be
    reused for the orbit it describes; ``hurwitz_orbit`` still replays
    every stored move before trusting a hit.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, key: str) -> str:
        if not re.fullmatch(r"[0-9a-f]{64}", key):
            raise ValueError("cache keys are sha256 hex digests")
        return os.path.join(self.root, key + ".json")

    def get(self, key: str):
        try:
            with open(self._path(key)) as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return None
        try:
            states = {}
            for st, parent, move in data["states"]:
                st = _tuplify(st)
                states[st] = None if parent is None else (_tuplify(parent), move)
            return hw.HurwitzOrbit(_tuplify(data["start"]), states, bool(data["labeled"]))
        except (KeyError, TypeError, ValueError):
            return None

    def put(self, key: str, orbit) -> None:
        rows = [[st, None, None] if v is None else [st, v[0], v[1]] for st, v in orbit.states.items()]
        payload = json.dumps({"start": orbit.start, "labeled": orbit.labeled, "states": rows})
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, self._path(key))


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def load_map(path: str) -> bc.CoverPresentation:
    try:
        return formats.parse_presentation(_read(path))
    except (ParseError, PresentationError) as e:
        raise UsageError(f"{path}: {e}") from None


def load_multicurve(s: sp.PuncturedSphere, arg: str) -> sp.Multicurve:
    """A multicurve from a file path, or inline text (``c1,2; x1 x3``)."""
    text = _read(arg) if os.path.exists(arg) else arg
    try:
        return formats.parse_multicurve(s, text)
    except ThurstonError as e:
        raise UsageError(f"bad multicurve {arg!r}: {e}") from None
    except ValueError as e:
        raise UsageError(f"bad multicurve {arg!r}: {e}") from None


_MC_TOKEN = re.compile(r"^([TH])(\d+)(?:_(\d+))?(?:\^(-?\d+))?$")


def parse_mapping_class(s: sp.PuncturedSphere, text: str) -> mc.MappingClass:
    """``T12 T34^-1 H23``: products of twists ``T<i><j>`` and half twists ``H<i><i+1>``, left factor outermost.

    With ten or more punctures write ``T<i>_<j>``.
    """
    out = mc.identity(s)
    for tok in text.split():
        m = _MC_TOKEN.match(tok)
        if not m:
            raise UsageError(f"bad mapping class token {tok!r}")
        kind, a, b, e = m.group(1), m.group(2), m.group(3), int(m.group(4) or 1)
        if b is None:
            if len(a) != 2:
                raise UsageError(f"write {tok!r} as {kind}<i>_<j>")
            i, j = int(a[0]), int(a[1])
        else:
            i, j = int(a), int(b)
        try:
            if kind == "T":
                g = mc.dehn_twist(s, sp.standard_curve(s, i, j))
            else:
                if j != i + 1:
                    raise UsageError(f"half twists swap neighbours: {tok!r}")
                g = mc.half_twist(s, i)
        except ThurstonError as err:
            raise UsageError(f"{tok}: {err}") from None
        out = out * (g ** e)
    return out


def _surface(text: str) -> sp.PuncturedSphere:
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"surface must be a puncture count, got {text!r}") from None
    if n < 4:
        raise UsageError("mapping class commands need at least four punctures")
    return sp.PuncturedSphere(n)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _auto_lines(m: mc.MappingClass, indent: str = "  ") -> list:
    return [f"{indent}x{k} -> {formats.format_word(w)}" for k, w in enumerate(m.auto.images, 1)]


def _cache(args):
    return OrbitCache(args.cache) if getattr(args, "cache", None) else None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    try:
        c = formats.parse_presentation(_read(args.file), validate=False)
    except ParseError as e:
        out.append("valid: no")
        out.append(f"parse error: {e}")
        return EXIT_NO
    except PresentationError as e:
        out.append("valid: no")
        out.append(f"violation {e.invariant}: {e}")
        return EXIT_NO
    rep = bc.validate(c, raise_on_error=False)
    out += rep.lines()
    if rep.ok:
        orb = bc.orbifold_type(c)
        out.append(f"orbifold: {orb.kind}, signature " + " ".join("inf" if v == 0 else str(v) for v in orb.signature))
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_pullback(args, out) -> int:
    c = load_map(args.file)
    try:
        curve = formats.parse_curve(c.base, args.curve)
    except (ThurstonError, ValueError) as e:
        raise UsageError(f"bad curve {args.curve!r}: {e}") from None
    comps = bc.pullback_curve(c, curve)
    out.append(f"curve: {formats.format_curve(curve)}")
    out.append(f"components: {len(comps)}")
    for k, comp in enumerate(comps, start=1):
        out.append(f"component {k}: degree {comp.degree}, {comp.kind.kind}, sheets "
                   + " ".join(map(str, comp.sheets)) + f", word {formats.format_word(comp.word)}")
    out.append(f"total degree: {sum(x.degree for x in comps)}")
    return EXIT_OK


def cmd_matrix(args, out) -> int:
    c = load_map(args.file)
    gamma = load_multicurve(c.base, args.multicurve)
    rep = ob.is_stable(c, gamma)
    if not rep:
        for k, comp in rep.offending:
            out.append(f"unstable: curve {k + 1} has essential preimage {formats.format_word(comp.word)} "
                       "outside the multicurve")
        return EXIT_NO
    m = ob.thurston_matrix(c, gamma)
    out.append("curves: " + "; ".join(formats.format_curve(g) for g in gamma))
    out.append("matrix:")
    out += ["  " + line for line in m.lines()]
    verdict = ob.leading_eigenvalue_geq_1(m.entries)
    out += verdict.lines()
    for blk in verdict.blocks:
        out.append(f"block {' '.join(str(i + 1) for i in blk.block)}: {blk.kind}, vector "
                   + " ".join(map(str, blk.vector)) + f", theta {blk.theta}")
    if args.verify:
        out.append("verify: " + ("ok" if ob.verify_verdict(m.entries, verdict) else "FAILED"))
        if not ob.verify_verdict(m.entries, verdict):
            raise ContractViolation("spectral certificate failed to re-verify")
    levy = ob.find_levy_cycles(c, gamma)
    if not levy:
        out.append("levy cycles: none")
    for cyc in levy:
        out += cyc.lines(gamma)
    return EXIT_OK


def cmd_centralizer(args, out) -> int:
    s = _surface(args.surface)
    phi = parse_mapping_class(s, args.word)
    gens = mc.standard_generators(s)
    res = cz.centralizer_search(phi, gens, args.m0, args.budget, args.threads)
    out.append(f"phi: {args.word}")
    out.append(f"search radius: {res.search_radius}")
    out.append(f"completeness: {res.completeness}")
    out.append(f"commuting elements in ball: {res.commutant_size}")
    out.append(f"generators: {len(res.generators)}")
    for g in res.generators:
        out.append(f"  {gens.format_word(g.element.word)}")
    if args.verify:
        ok = all(mc.commutes(g.element, phi) is not None for g in res.generators)
        out.append("verify: " + ("ok" if ok else "FAILED"))
        if not ok:
            raise ContractViolation("a centralizer generator does not commute")
    return EXIT_OK if isinstance(res.completeness, cz.CertifiedUpTo) else EXIT_UNKNOWN


def cmd_conjugate(args, out) -> int:
    s = _surface(args.surface)
    if len(args.word) != 2:
        raise UsageError("conjugate takes exactly two --word options")
    phi, phi2 = (parse_mapping_class(s, w) for w in args.word)
    gens = mc.standard_generators(s)
    try:
        res = cz.conjugator_search(phi, phi2, gens, args.k, args.budget, args.threads)
    except ThurstonError as e:
        out.append(f"result: undecided ({e})")
        return EXIT_UNKNOWN
    if res:
        out.append("result: conjugate")
        out.append(f"conjugator: {gens.format_word(res.element.word)}")
        out.append(f"radius: {res.radius} ({'certified' if res.certified else 'budget-capped'})")
        if args.verify:
            ok = mc.mc_equal(res.element * phi, phi2 * res.element) is not None
            out.append("verify: " + ("ok" if ok else "FAILED"))
            if not ok:
                raise ContractViolation("conjugator failed to re-verify")
        return EXIT_OK
    out.append("result: not conjugate within radius" if res.certified else "result: no conjugator found")
    out.append(f"radius: {res.radius}, required {res.needed}")
    return EXIT_NO if res.certified else EXIT_UNKNOWN


def cmd_hurwitz(args, out) -> int:
    a, b = load_map(args.f), load_map(args.g)
    try:
        h0 = formats.parse_bijection(args.h0, a.n) if args.h0 else None
    except ParseError as e:
        raise UsageError(str(e)) from None
    dec = hw.same_hurwitz_class(a, b, h0, args.budget, _cache(args))
    verdict = {True: "same class", False: "different classes", None: "inconclusive"}[dec.same]
    out.append(f"hurwitz: {verdict}")
    out.append(f"orbit size: {dec.orbit_size}")
    if dec.reason:
        out.append(f"reason: {dec.reason}")
    if dec.witness is not None:
        out += dec.witness.lines()
        if args.verify:
            ta, tb = hw.from_presentation(a), hw.from_presentation(b)
            ok = hw.verify_witness(ta, tb, h0 or tuple(range(1, a.n + 1)), dec.witness)
            out.append("verify: " + ("ok" if ok else "FAILED"))
            if not ok:
                raise ContractViolation("Hurwitz witness failed to replay")
    return {True: EXIT_OK, False: EXIT_NO, None: EXIT_UNKNOWN}[dec.same]


def _oracle(args):
    if not args.oracle:
        return None
    return pl.GeometrizationOracle(command=shlex.split(args.oracle))


def _config(args) -> pl.Config:
    return pl.Config(ball_radius=args.radius, curve_budget=args.curve_budget,
                     hurwitz_budget=args.hurwitz_budget, m0=args.m0, k=args.k,
                     n_override=args.n, threads=args.threads, cache=_cache(args))


def cmd_equiv(args, out) -> int:
    f, g = load_map(args.f), load_map(args.g)
    obstructions = None
    if args.obstruction:
        if len(args.obstruction) != 2:
            raise UsageError("give --obstruction twice: first for f, then for g")
        gf = load_multicurve(f.base, args.obstruction[0])
        gg = load_multicurve(g.base, args.obstruction[1])
        obstructions = (sp.Multicurve(gf.curves, "canonical"), sp.Multicurve(gg.curves, "canonical"))
    oracle = _oracle(args)
    try:
        cert = pl.check_equivalence(f, g, oracle, _config(args), obstructions)
    finally:
        if oracle is not None:
            oracle.close()
    out += cert.lines()
    if args.verify:
        ok = pl.audit(f, g, cert)
        out.append("verify: " + ("ok" if ok else "FAILED"))
        if not ok:
            raise ContractViolation("certificate failed the audit")
    return cert.exit_code


def cmd_selfeq(args, out) -> int:
    c = load_map(args.f)
    gamma = load_multicurve(c.base, args.obstruction) if args.obstruction else sp.Multicurve(())
    m, c2, gamma2 = dc.standard_form(c, gamma)
    dec = dc.decompose(c2, gamma2)
    out += dec.lines()
    oracle = _oracle(args)
    try:
        tc = pl.compute_thick_centralizer(c2, gamma2, oracle, _config(args), dec)
    finally:
        if oracle is not None:
            oracle.close()
    if not m.auto.is_identity():
        out.append("standardizing class:")
        out += _auto_lines(m)
    out += tc.lines()
    if args.verify:
        ok = True
        for gen in tc.generators:
            for r, el in gen.items():
                piece = dec.pieces[r]
                base = gen.get(piece.target)
                if base is not None and not bc.lifts_through(piece.presentation, piece.presentation, base):
                    ok = False
        out.append("verify: " + ("ok" if ok else "FAILED"))
        if not ok:
            raise ContractViolation("a thick self-equivalence failed to lift")
    return EXIT_OK if tc.complete else EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="thurston", description="Combinatorial Thurston maps: presentations, "
                 "obstructions, Hurwitz classes and equivalence certificates.")
    ap.add_argument("--threads", type=int, default=1, help="worker threads (reports do not depend on it)")
    ap.add_argument("--cache", help="directory for the Hurwitz orbit cache")
    ap.add_argument("--verify", action="store_true", help="re-check every emitted witness")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a thurston-map document")
    p.add_argument("file")

    p = sub.add_parser("pullback", help="preimage components of a curve")
    p.add_argument("file")
    p.add_argument("--curve", required=True, help="word (x1 x2) or standard curve (c1,2)")

    p = sub.add_parser("matrix", help="Thurston matrix, eigenvalue verdict and Levy cycles")
    p.add_argument("file")
    p.add_argument("--multicurve", required=True, help="file or inline curves separated by ';'")

    p = sub.add_parser("centralizer", help="generators of the centralizer of a mapping class")
    p.add_argument("surface", help="number of punctures")
    p.add_argument("--word", required=True, help="e.g. 'T12 T34^-1'")
    p.add_argument("--m0", type=_fraction, default=cz.DEFAULT_M0)
    p.add_argument("--budget", type=int, default=None, help="cap on the search radius")

    p = sub.add_parser("conjugate", help="conjugator between two mapping classes")
    p.add_argument("surface", help="number of punctures")
    p.add_argument("--word", action="append", default=[], help="give twice")
    p.add_argument("--k", type=_fraction, default=cz.DEFAULT_K)
    p.add_argument("--budget", type=int, default=None, help="cap on the search radius")

    p = sub.add_parser("hurwitz", help="Hurwitz equivalence of two covers")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--h0", help="puncture bijection: images '2 1 3 4' or cycles '(1 2)'")
    p.add_argument("--budget", type=int, default=hw.DEFAULT_BUDGET)

    for name, hlp in (("equiv", "decide Thurston equivalence"), ("selfeq", "thick self-equivalences")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("f")
        if name == "equiv":
            p.add_argument("g")
            p.add_argument("--obstruction", action="append", default=[],
                           help="canonical obstruction of f, then of g (file or inline)")
        else:
            p.add_argument("--obstruction", help="canonical obstruction (file or inline)")
        p.add_argument("--oracle", help="command speaking the geometrization oracle protocol")
        p.add_argument("--radius", type=int, default=pl.Config.ball_radius)
        p.add_argument("--curve-budget", type=int, default=pl.Config.curve_budget)
        p.add_argument("--hurwitz-budget", type=int, default=hw.DEFAULT_BUDGET)
        p.add_argument("--m0", type=_fraction, default=cz.DEFAULT_M0)
        p.add_argument("--k", type=_fraction, default=cz.DEFAULT_K)
        p.add_argument("--n", type=int, default=None, help="override the twist modulus N")
    return ap


COMMANDS = {"validate": cmd_validate, "pullback": cmd_pullback, "matrix": cmd_matrix,
            "centralizer": cmd_centralizer, "conjugate": cmd_conjugate, "hurwitz": cmd_hurwitz,
            "equiv": cmd_equiv, "selfeq": cmd_selfeq}


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    out: list = []
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        code = COMMANDS[args.command](args, out)
    except UsageError as e:
        stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except ContractViolation as e:
        stdout.write("".join(line + "\n" for line in out))
        stderr.write(f"contract violation: {e}\n")
        return EXIT_CONTRACT
    except ThurstonError as e:
        stdout.write("".join(line + "\n" for line in out))
        stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_USAGE
    stdout.write("".join(line + "\n" for line in out))
    return code


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
