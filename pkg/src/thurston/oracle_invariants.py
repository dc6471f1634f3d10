"""Reference geometrization oracle speaking the subprocess protocol.

Reads ``thurston-map v1`` documents from stdin, each terminated by an
empty line, and answers each with one line: ``token:<hex>`` or
``unavailable``.  The token hashes equivalence invariants (dynamics,
orbifold signature, labeled Hurwitz orbit), so equal maps get equal
tokens; unequal tokens prove inequivalence, equal ones prove nothing.

    python -m thurston.oracle_invariants [--budget N]
"""

from __future__ import annotations

import argparse
import hashlib
import sys

from . import formats
from .errors import ThurstonError
from .pipeline import invariant_token


def answer(doc: str, budget: int) -> str:
    try:
        c = formats.parse_presentation(doc)
    except ThurstonError:
        return "unavailable"
    tok = invariant_token(c, budget)
    if tok is None:
        return "unavailable"
    return "token:" + hashlib.sha256(tok.encode()).hexdigest()


def serve(stdin, stdout, budget: int) -> None:
    buf: list = []
    for line in stdin:
        if line.strip():
            buf.append(line)
            continue
        if not buf:
            continue
        stdout.write(answer("".join(buf), budget) + "\n")
        stdout.flush()
        buf = []
    if buf:
        stdout.write(answer("".join(buf), budget) + "\n")
        stdout.flush()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="thurston-oracle", description="invariant-based geometrization oracle")
    ap.add_argument("--budget", type=int, default=20000, help="Hurwitz orbit state budget")
    args = ap.parse_args(argv)
    serve(sys.stdin, sys.stdout, args.budget)
    return 0


if __name__ == "__main__":
    sys.exit(main())
